// corrdyn command line front end. Thin argument layer over corrdyn::run();
// all real work lives in the library so tests exercise the same code path.

#include <charconv>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "corrdyn/error.hpp"
#include "corrdyn/runner.hpp"
#include "corrdyn/version.hpp"

namespace {

using corrdyn::RunConfig;

std::size_t parse_index(std::string_view text, std::string_view what) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  corrdyn::require(ec == std::errc{} && ptr == text.data() + text.size(),
                   "invalid ", what, " '", std::string(text), "'");
  return value;
}

// "full", "begin:end", "begin:" or ":end" (half-open window indices).
corrdyn::ReferenceRange parse_reference(const std::string& text) {
  corrdyn::ReferenceRange range;
  if (text == "full" || text.empty()) return range;
  const auto colon = text.find(':');
  corrdyn::require(colon != std::string::npos, "invalid reference range '", text,
                   "', expected 'begin:end'");
  const std::string_view head = std::string_view(text).substr(0, colon);
  const std::string_view tail = std::string_view(text).substr(colon + 1);
  if (!head.empty()) range.begin = parse_index(head, "reference begin");
  if (!tail.empty()) range.end = parse_index(tail, "reference end");
  return range;
}

corrdyn::ReturnKind parse_return_kind(const std::string& text) {
  if (text == "log") return corrdyn::ReturnKind::Log;
  if (text == "simple") return corrdyn::ReturnKind::Simple;
  corrdyn::raise("invalid return kind '", text, "', expected 'log' or 'simple'");
}

corrdyn::PanelFormat parse_format(const std::string& text) {
  if (text == "wide") return corrdyn::PanelFormat::Wide;
  if (text == "long") return corrdyn::PanelFormat::Long;
  corrdyn::raise("invalid input format '", text, "', expected 'wide' or 'long'");
}

bool parse_input_kind(const std::string& text) {
  if (text == "prices") return false;
  if (text == "returns") return true;
  corrdyn::raise("invalid input kind '", text, "', expected 'prices' or 'returns'");
}

corrdyn::WindowReturnKind parse_window_return_kind(const std::string& text) {
  if (text == "log") return corrdyn::WindowReturnKind::LogSum;
  if (text == "simple") return corrdyn::WindowReturnKind::SimpleCompound;
  corrdyn::raise("invalid window return kind '", text, "', expected 'log' or 'simple'");
}

// Settings from a JSON config file override anything given on the command
// line. Keys mirror the long flags with underscores; unknown keys are errors
// so typos do not silently fall back to flag values.
void apply_config_file(const std::filesystem::path& path, RunConfig& cfg) {
  std::ifstream in(path);
  corrdyn::require(in.good(), "cannot open config file '", path.string(), "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& err) {
    corrdyn::raise("config file '", path.string(), "': ", err.what());
  }
  corrdyn::require(doc.is_object(), "config file '", path.string(), "': expected a JSON object");

  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "input") cfg.input = value.get<std::string>();
      else if (key == "out_dir") cfg.out_dir = value.get<std::string>();
      else if (key == "format") cfg.input_format = parse_format(value.get<std::string>());
      else if (key == "input_kind") cfg.input_is_returns = parse_input_kind(value.get<std::string>());
      else if (key == "return_kind") cfg.return_kind = parse_return_kind(value.get<std::string>());
      else if (key == "window") cfg.window.length = value.get<std::size_t>();
      else if (key == "stride") cfg.window.stride = value.get<std::size_t>();
      else if (key == "reference") cfg.reference = parse_reference(value.get<std::string>());
      else if (key == "band") cfg.band = value.get<std::size_t>();
      else if (key == "threshold_sdu") cfg.threshold_sdu = value.get<double>();
      else if (key == "window_return_kind")
        cfg.window_return_kind = parse_window_return_kind(value.get<std::string>());
      else if (key == "model") cfg.model = value.get<std::string>();
      else if (key == "index") cfg.index = value.get<std::string>();
      else if (key == "length") cfg.length = value.get<std::size_t>();
      else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else if (key == "threads") cfg.threads = value.get<unsigned>();
      else if (key == "per_window") cfg.per_window = value.get<bool>();
      else corrdyn::raise("config file '", path.string(), "': unknown key '", key, "'");
    }
  } catch (const nlohmann::json::exception& err) {
    corrdyn::raise("config file '", path.string(), "': ", err.what());
  }
}

struct FlagText {
  std::string format = "wide";
  std::string input_kind = "prices";
  std::string return_kind = "log";
  std::string window_return_kind = "log";
  std::string reference = "full";
  std::string config;
};

void add_output_flags(CLI::App* sub, RunConfig& cfg, FlagText& text) {
  sub->add_option("--out-dir", cfg.out_dir, "Output directory (created if missing)")
      ->capture_default_str();
  sub->add_option("--config", text.config,
                  "JSON config file; its settings override command line flags");
}

void add_panel_flags(CLI::App* sub, RunConfig& cfg, FlagText& text) {
  sub->add_option("--input", cfg.input, "Input CSV panel")->required();
  sub->add_option("--format", text.format, "Input layout: wide or long")
      ->check(CLI::IsMember({"wide", "long"}))
      ->capture_default_str();
  sub->add_option("--input-kind", text.input_kind, "Input values: prices or returns")
      ->check(CLI::IsMember({"prices", "returns"}))
      ->capture_default_str();
  sub->add_option("--return-kind", text.return_kind, "Return definition: log or simple")
      ->check(CLI::IsMember({"log", "simple"}))
      ->capture_default_str();
  sub->add_option("--threads", cfg.threads, "Worker threads for window evaluation")
      ->capture_default_str();
}

void add_window_flags(CLI::App* sub, RunConfig& cfg, FlagText&) {
  sub->add_option("--window", cfg.window.length, "Window length in periods")
      ->capture_default_str();
  sub->add_option("--stride", cfg.window.stride, "Offset between window starts")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sliding-window correlation spectra for multivariate return panels"};
  app.set_version_flag("--version", std::string(corrdyn::kToolName) + " " + corrdyn::kVersion);
  app.require_subcommand(1);

  RunConfig cfg;
  FlagText text;
  std::size_t band = 0;

  CLI::App* analyze = app.add_subcommand(
      "analyze", "Sliding spectra and normalized eigenvalue dynamics of a panel");
  add_panel_flags(analyze, cfg, text);
  add_window_flags(analyze, cfg, text);
  analyze->add_option("--reference", text.reference,
                      "Reference window range 'begin:end' for normalization (default full)");
  analyze->add_option("--band", band, "Number of smallest eigenvalues in the band average");
  add_output_flags(analyze, cfg, text);

  CLI::App* simulate =
      app.add_subcommand("simulate", "Generate a synthetic return panel from a model config");
  simulate->add_option("--model", cfg.model, "Model config JSON")->required();
  simulate->add_option("--length", cfg.length, "Panel length in periods (ignored with regimes)")
      ->capture_default_str();
  simulate->add_option("--window", cfg.window.length, "Window length for regime sizing")
      ->capture_default_str();
  simulate->add_option("--seed", cfg.seed, "Generator seed")->capture_default_str();
  add_output_flags(simulate, cfg, text);

  CLI::App* partition = app.add_subcommand(
      "partition", "Split windows by normalized spectrum statistics and report index returns");
  add_panel_flags(partition, cfg, text);
  add_window_flags(partition, cfg, text);
  partition->add_option("--reference", text.reference,
                        "Reference window range 'begin:end' for normalization (default full)");
  partition->add_option("--band", band, "Number of smallest eigenvalues in the band average");
  partition->add_option("--threshold-sdu", cfg.threshold_sdu,
                        "Partition threshold in standard deviation units")
      ->capture_default_str();
  partition->add_option("--index", cfg.index,
                        "Index return CSV (default: equal-weighted panel mean)");
  partition->add_option("--window-return-kind", text.window_return_kind,
                        "Window return aggregation: log or simple")
      ->check(CLI::IsMember({"log", "simple"}))
      ->capture_default_str();
  add_output_flags(partition, cfg, text);

  CLI::App* ipr = app.add_subcommand(
      "ipr", "Inverse participation ratios of the correlation eigenvectors");
  add_panel_flags(ipr, cfg, text);
  add_window_flags(ipr, cfg, text);
  ipr->add_flag("--per-window", cfg.per_window, "One profile per sliding window");
  add_output_flags(ipr, cfg, text);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(analyze)) cfg.command = corrdyn::Command::Analyze;
    else if (app.got_subcommand(simulate)) cfg.command = corrdyn::Command::Simulate;
    else if (app.got_subcommand(partition)) cfg.command = corrdyn::Command::Partition;
    else cfg.command = corrdyn::Command::Ipr;

    cfg.input_format = parse_format(text.format);
    cfg.input_is_returns = parse_input_kind(text.input_kind);
    cfg.return_kind = parse_return_kind(text.return_kind);
    cfg.window_return_kind = parse_window_return_kind(text.window_return_kind);
    cfg.reference = parse_reference(text.reference);
    for (CLI::App* sub : {analyze, partition})
      if (app.got_subcommand(sub) && sub->count("--band") > 0) cfg.band = band;

    if (!text.config.empty()) apply_config_file(text.config, cfg);

    const corrdyn::RunResult result = corrdyn::run(cfg);
    for (const auto& path : result.outputs) std::cout << path.string() << '\n';
    return 0;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
}

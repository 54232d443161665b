#include "corrdyn/runner.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>

#include "corrdyn/error.hpp"
#include "corrdyn/ipr.hpp"
#include "corrdyn/models.hpp"
#include "corrdyn/version.hpp"
#include "detail/csv.hpp"

namespace corrdyn {

namespace {

using ordered_json = nlohmann::ordered_json;

const char* command_name(Command command) {
  switch (command) {
    case Command::Analyze: return "analyze";
    case Command::Simulate: return "simulate";
    case Command::Partition: return "partition";
    case Command::Ipr: return "ipr";
  }
  return "unknown";
}

std::string reference_string(const ReferenceRange& reference) {
  if (reference.is_full()) return "full";
  return std::to_string(reference.begin) + ":" + std::to_string(reference.end);
}

/// Accumulates the reproducibility manifest. Output paths are recorded
/// relative to the manifest so two runs into different directories (or with
/// different thread counts) still produce byte-identical manifests.
class ManifestWriter {
 public:
  ManifestWriter(const RunConfig& cfg) {
    root_["tool"] = kToolName;
    root_["version"] = kVersion;
    root_["command"] = command_name(cfg.command);
    root_["seed"] = cfg.seed;
    root_["parameters"] = ordered_json::object();
    root_["inputs"] = ordered_json::array();
    root_["outputs"] = ordered_json::array();
  }

  template <typename T>
  void parameter(const std::string& key, const T& value) {
    root_["parameters"][key] = value;
  }

  void input(const std::filesystem::path& path) {
    ordered_json entry;
    entry["path"] = path.string();
    entry["fnv1a64"] = detail::hex64(detail::fnv1a64_file(path));
    root_["inputs"].push_back(std::move(entry));
  }

  void output(const std::filesystem::path& path) {
    ordered_json entry;
    entry["file"] = path.filename().string();
    entry["fnv1a64"] = detail::hex64(detail::fnv1a64_file(path));
    root_["outputs"].push_back(std::move(entry));
  }

  std::filesystem::path write(const std::filesystem::path& out_dir) {
    const std::filesystem::path path = out_dir / "manifest.json";
    detail::write_text_atomic(path, root_.dump(2) + "\n");
    return path;
  }

 private:
  ordered_json root_;
};

ReturnsPanel load_input_panel(const RunConfig& cfg) {
  require(!cfg.input.empty(), "run: --input is required for this command");
  if (cfg.input_is_returns) return load_returns(cfg.input);
  return compute_returns(load_prices(cfg.input, cfg.input_format), cfg.return_kind);
}

void describe_panel(ManifestWriter& manifest, const ReturnsPanel& panel, const RunConfig& cfg) {
  manifest.parameter("input_format", cfg.input_format == PanelFormat::Wide ? "wide" : "long");
  manifest.parameter("input_kind", cfg.input_is_returns ? "returns" : "prices");
  manifest.parameter("return_kind", cfg.return_kind == ReturnKind::Log ? "log" : "simple");
  manifest.parameter("n_assets", panel.n_assets());
  manifest.parameter("n_periods", panel.n_periods());
}

void describe_window(ManifestWriter& manifest, const RunConfig& cfg, std::size_t n_assets,
                     std::size_t n_windows) {
  manifest.parameter("window", cfg.window.length);
  manifest.parameter("stride", cfg.window.stride);
  manifest.parameter("n_windows", n_windows);
  manifest.parameter("q", static_cast<double>(cfg.window.length) / static_cast<double>(n_assets));
}

std::vector<double> equal_weighted_index(const ReturnsPanel& panel) {
  std::vector<double> index(panel.n_periods());
  for (std::size_t t = 0; t < index.size(); ++t)
    index[t] = panel.returns.col(static_cast<Eigen::Index>(t)).mean();
  return index;
}

}  // namespace

std::size_t default_band(std::size_t n_assets) {
  return static_cast<std::size_t>(
      std::ceil(0.8 * static_cast<double>(n_assets)));
}

RunResult run_analyze(const RunConfig& cfg) {
  const ReturnsPanel panel = load_input_panel(cfg);

  SlidingOptions opts;
  opts.threads = cfg.threads;
  const SpectrumSeries spectra = sliding_spectra(panel, cfg.window, opts);
  const NormalizedSeries normalized = normalize_series(spectra, cfg.reference);
  const std::size_t band = cfg.band.value_or(default_band(panel.n_assets()));
  const Eigen::VectorXd band_series = band_average(normalized, band);

  std::filesystem::create_directories(cfg.out_dir);
  RunResult result;
  result.outputs.push_back(cfg.out_dir / "eigenvalues.csv");
  write_spectra_csv(spectra, result.outputs.back());
  result.outputs.push_back(cfg.out_dir / "normalized.csv");
  write_heatmap_csv(normalized, result.outputs.back());
  result.outputs.push_back(cfg.out_dir / "band_average.csv");
  write_band_csv(normalized.window_starts, band_series, result.outputs.back());

  ManifestWriter manifest(cfg);
  describe_panel(manifest, panel, cfg);
  describe_window(manifest, cfg, panel.n_assets(), spectra.n_windows());
  manifest.parameter("reference", reference_string(normalized.reference));
  manifest.parameter("band", band);
  manifest.input(cfg.input);
  for (const auto& path : result.outputs) manifest.output(path);
  result.outputs.push_back(manifest.write(cfg.out_dir));
  return result;
}

RunResult run_simulate(const RunConfig& cfg) {
  require(!cfg.model.empty(), "run: --model is required for simulate");
  const ModelConfig config = load_model_config(cfg.model);

  ReturnsPanel panel;
  std::vector<double> index;
  if (config.regimes) {
    RegimePanel regime =
        generate_regime_panel(config.model, *config.regimes, cfg.window.length, cfg.seed);
    panel = std::move(regime.panel);
    index = std::move(regime.index_returns);
  } else {
    const CholeskyFactor factor = cholesky(market_plus_sectors_matrix(config.model));
    panel = generate_panel(factor, cfg.length, cfg.seed);
    index = equal_weighted_index(panel);
  }

  std::filesystem::create_directories(cfg.out_dir);
  RunResult result;
  result.outputs.push_back(cfg.out_dir / "panel.csv");
  write_returns_csv(panel, result.outputs.back());
  result.outputs.push_back(cfg.out_dir / "index.csv");
  write_index_csv(panel.times, index, result.outputs.back());

  ManifestWriter manifest(cfg);
  manifest.parameter("n_assets", config.model.n);
  manifest.parameter("rho0", config.model.rho0);
  manifest.parameter("sector_groups", config.model.sectors.size());
  if (config.regimes) {
    manifest.parameter("regime_segments", config.regimes->segments.size());
    manifest.parameter("window", cfg.window.length);
  } else {
    manifest.parameter("length", cfg.length);
  }
  manifest.parameter("n_periods", panel.n_periods());
  manifest.input(cfg.model);
  for (const auto& path : result.outputs) manifest.output(path);
  result.outputs.push_back(manifest.write(cfg.out_dir));
  return result;
}

RunResult run_partition(const RunConfig& cfg) {
  const ReturnsPanel panel = load_input_panel(cfg);

  std::vector<double> index;
  if (!cfg.index.empty()) {
    index = load_index_returns(cfg.index);
    require(index.size() == panel.n_periods(), "run: index series has ", index.size(),
            " periods, panel has ", panel.n_periods());
  } else {
    index = equal_weighted_index(panel);
  }

  SlidingOptions opts;
  opts.threads = cfg.threads;
  const SpectrumSeries spectra = sliding_spectra(panel, cfg.window, opts);
  const NormalizedSeries normalized = normalize_series(spectra, cfg.reference);
  const std::size_t band = cfg.band.value_or(default_band(panel.n_assets()));

  const Eigen::VectorXd largest =
      normalized.values.col(static_cast<Eigen::Index>(normalized.n_assets()) - 1);
  const Eigen::VectorXd smallest_band = band_average(normalized, band);
  const std::vector<double> window_returns =
      window_index_return(index, cfg.window, cfg.window_return_kind);

  PartitionReport report =
      partition_by_sdu(largest, window_returns, cfg.threshold_sdu, "largest");
  PartitionReport smallest_report =
      partition_by_sdu(smallest_band, window_returns, cfg.threshold_sdu, "mean_smallest_k");
  report.cells.insert(report.cells.end(), smallest_report.cells.begin(),
                      smallest_report.cells.end());

  std::filesystem::create_directories(cfg.out_dir);
  RunResult result;
  result.outputs.push_back(cfg.out_dir / "partition.json");
  write_partition_json(report, result.outputs.back());
  result.outputs.push_back(cfg.out_dir / "partition.csv");
  write_partition_csv(report, result.outputs.back());

  ManifestWriter manifest(cfg);
  describe_panel(manifest, panel, cfg);
  describe_window(manifest, cfg, panel.n_assets(), spectra.n_windows());
  manifest.parameter("reference", reference_string(normalized.reference));
  manifest.parameter("band", band);
  manifest.parameter("threshold_sdu", cfg.threshold_sdu);
  manifest.parameter("window_return_kind",
                     cfg.window_return_kind == WindowReturnKind::LogSum ? "log" : "simple");
  manifest.parameter("index", cfg.index.empty() ? "equal_weighted" : cfg.index.string());
  manifest.input(cfg.input);
  if (!cfg.index.empty()) manifest.input(cfg.index);
  for (const auto& path : result.outputs) manifest.output(path);
  result.outputs.push_back(manifest.write(cfg.out_dir));
  return result;
}

RunResult run_ipr(const RunConfig& cfg) {
  const ReturnsPanel panel = load_input_panel(cfg);

  std::filesystem::create_directories(cfg.out_dir);
  RunResult result;
  ManifestWriter manifest(cfg);
  describe_panel(manifest, panel, cfg);
  manifest.parameter("per_window", cfg.per_window);

  if (cfg.per_window) {
    SlidingOptions opts;
    opts.threads = cfg.threads;
    opts.compute_ipr = true;
    const SpectrumSeries spectra = sliding_spectra(panel, cfg.window, opts);
    describe_window(manifest, cfg, panel.n_assets(), spectra.n_windows());

    std::ostringstream out;
    out << "window_start,eigen_index,eigenvalue,ipr\n";
    for (std::size_t w = 0; w < spectra.n_windows(); ++w)
      for (std::size_t k = 0; k < spectra.n_assets(); ++k)
        out << spectra.window_starts[w] << ',' << (k + 1) << ','
            << detail::format_double(spectra.eigenvalues(static_cast<Eigen::Index>(w),
                                                         static_cast<Eigen::Index>(k)))
            << ','
            << detail::format_double(
                   spectra.ipr(static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(k)))
            << '\n';
    result.outputs.push_back(cfg.out_dir / "ipr.csv");
    detail::write_text_atomic(result.outputs.back(), out.str());
  } else {
    // Whole-period profile: the entire panel as a single window.
    const Spectrum spectrum =
        eigendecompose(correlation_matrix(normalize_window(panel.returns), panel.assets));
    const IprProfile profile = ipr_profile(spectrum);
    result.outputs.push_back(cfg.out_dir / "ipr.csv");
    write_ipr_csv(spectrum, profile, result.outputs.back());
  }

  manifest.input(cfg.input);
  for (const auto& path : result.outputs) manifest.output(path);
  result.outputs.push_back(manifest.write(cfg.out_dir));
  return result;
}

RunResult run(const RunConfig& cfg) {
  switch (cfg.command) {
    case Command::Analyze: return run_analyze(cfg);
    case Command::Simulate: return run_simulate(cfg);
    case Command::Partition: return run_partition(cfg);
    case Command::Ipr: return run_ipr(cfg);
  }
  raise("run: unknown command");
}

}  // namespace corrdyn

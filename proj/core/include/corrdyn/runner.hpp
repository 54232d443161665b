#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "corrdyn/dynamics.hpp"
#include "corrdyn/ingest.hpp"

namespace corrdyn {

enum class Command { Analyze, Simulate, Partition, Ipr };

/// Everything a run needs, resolved from CLI flags / config file. All
/// randomness flows from the single `seed`.
struct RunConfig {
  Command command = Command::Analyze;

  std::filesystem::path input;
  std::filesystem::path out_dir = ".";
  PanelFormat input_format = PanelFormat::Wide;
  bool input_is_returns = false;
  ReturnKind return_kind = ReturnKind::Log;

  WindowConfig window;
  ReferenceRange reference;
  std::optional<std::size_t> band;  // default: ceil(0.8 * N)
  double threshold_sdu = 1.0;
  WindowReturnKind window_return_kind = WindowReturnKind::LogSum;

  std::filesystem::path model;      // model config (simulate)
  std::filesystem::path index;      // optional index returns CSV (partition)
  std::size_t length = 1000;        // generated panel length (simulate)
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool per_window = false;          // ipr: per-window profiles
};

struct RunResult {
  std::vector<std::filesystem::path> outputs;  // manifest last
};

/// Default band size: the smallest ceil(0.8 * N) eigenvalues.
std::size_t default_band(std::size_t n_assets);

RunResult run_analyze(const RunConfig& cfg);
RunResult run_simulate(const RunConfig& cfg);
RunResult run_partition(const RunConfig& cfg);
RunResult run_ipr(const RunConfig& cfg);

/// Dispatches on cfg.command.
RunResult run(const RunConfig& cfg);

}  // namespace corrdyn

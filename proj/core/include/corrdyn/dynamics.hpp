#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "corrdyn/correlation.hpp"

namespace corrdyn {

/// Half-open range [begin, end) of window indices used as the reference
/// period for eigenvalue time-normalisation. Defaults to the full series;
/// a sub-range supports normalising against a low-volatility period.
struct ReferenceRange {
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  std::size_t begin = 0;
  std::size_t end = npos;

  bool is_full() const { return begin == 0 && end == npos; }

  /// Clamps npos to n_windows and checks the range holds >= 2 windows.
  ReferenceRange resolve(std::size_t n_windows) const;
};

/// Eigenvalue series in standard deviation units (SDU): column i is
/// (lambda_i(t) - mean_ref) / sigma_ref with the mean and population sigma
/// taken over the reference range only.
struct NormalizedSeries {
  std::vector<std::size_t> window_starts;
  Eigen::MatrixXd values;  // W x N
  ReferenceRange reference;

  std::size_t n_windows() const { return window_starts.size(); }
  std::size_t n_assets() const { return static_cast<std::size_t>(values.cols()); }
};

NormalizedSeries normalize_series(const SpectrumSeries& series, ReferenceRange reference = {});

/// Per-window arithmetic mean of the k smallest (ascending) normalised
/// eigenvalues — the broad-band statistic that moves counter to the largest
/// eigenvalue.
Eigen::VectorXd band_average(const NormalizedSeries& normalized, std::size_t k);

enum class WindowReturnKind {
  LogSum,          // sum of log returns over the window (log of gross return)
  SimpleCompound,  // prod(1 + r) - 1
};

/// Aggregate index return of each window [s, s + T), as a fraction.
std::vector<double> window_index_return(const std::vector<double>& index_returns,
                                        const WindowConfig& cfg,
                                        WindowReturnKind kind = WindowReturnKind::LogSum);

/// One side of an SDU partition: the windows where a statistic sits beyond
/// the threshold, and the mean index return over them. An empty cell keeps
/// count 0 and an unset mean (serialised as null, never 0).
struct PartitionCell {
  std::string statistic;  // "largest" or "mean_smallest_k"
  std::string side;       // "below" or "above"
  double threshold = 1.0;
  std::size_t count = 0;
  std::optional<double> mean_return;
};

struct PartitionReport {
  std::vector<PartitionCell> cells;
};

/// Splits windows at +/- threshold SDU: cell "below" collects windows with
/// stat < -threshold, "above" those with stat > +threshold. The two cells
/// are disjoint by construction.
PartitionReport partition_by_sdu(const Eigen::VectorXd& stat,
                                 const std::vector<double>& window_returns, double threshold,
                                 const std::string& statistic);

std::string partition_report_json(const PartitionReport& report);
void write_partition_json(const PartitionReport& report, const std::filesystem::path& path);

/// CSV with columns `statistic,side,threshold_sdu,window_count,
/// mean_window_return` (empty mean for empty cells).
void write_partition_csv(const PartitionReport& report, const std::filesystem::path& path);

/// Heatmap-ready CSV: `window_start,sdu_1,...,sdu_N`, one row per window.
void write_heatmap_csv(const NormalizedSeries& normalized, const std::filesystem::path& path);

/// CSV with columns `window_start,band_average`.
void write_band_csv(const std::vector<std::size_t>& window_starts, const Eigen::VectorXd& values,
                    const std::filesystem::path& path);

}  // namespace corrdyn

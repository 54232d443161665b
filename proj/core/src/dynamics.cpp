#include "corrdyn/dynamics.hpp"

#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "detail/csv.hpp"

namespace corrdyn {

ReferenceRange ReferenceRange::resolve(std::size_t n_windows) const {
  ReferenceRange resolved{begin, end == npos ? n_windows : end};
  require(resolved.end <= n_windows, "ReferenceRange: end ", resolved.end, " exceeds window count ",
          n_windows);
  require(resolved.begin < resolved.end, "ReferenceRange: empty range [", resolved.begin, ", ",
          resolved.end, ")");
  require(resolved.end - resolved.begin >= 2, "ReferenceRange: need at least 2 windows, got ",
          resolved.end - resolved.begin);
  return resolved;
}

NormalizedSeries normalize_series(const SpectrumSeries& series, ReferenceRange reference) {
  const std::size_t n_windows = series.n_windows();
  require(n_windows > 0, "normalize_series: empty series");
  const ReferenceRange resolved = reference.resolve(n_windows);
  const Eigen::Index ref_begin = static_cast<Eigen::Index>(resolved.begin);
  const Eigen::Index ref_count = static_cast<Eigen::Index>(resolved.end - resolved.begin);

  NormalizedSeries normalized;
  normalized.window_starts = series.window_starts;
  normalized.reference = resolved;
  normalized.values.resizeLike(series.eigenvalues);

  for (Eigen::Index i = 0; i < series.eigenvalues.cols(); ++i) {
    const auto ref = series.eigenvalues.col(i).segment(ref_begin, ref_count);
    const double mean = ref.mean();
    const double sigma =
        std::sqrt((ref.array() - mean).square().sum() / static_cast<double>(ref_count));
    require(sigma > 0.0, "normalize_series: zero standard deviation over reference for eigenvalue ",
            i + 1);
    normalized.values.col(i) = (series.eigenvalues.col(i).array() - mean) / sigma;
  }
  return normalized;
}

Eigen::VectorXd band_average(const NormalizedSeries& normalized, std::size_t k) {
  const std::size_t n = normalized.n_assets();
  require(k >= 1 && k <= n, "band_average: k = ", k, " out of range [1, ", n, "]");
  return normalized.values.leftCols(static_cast<Eigen::Index>(k)).rowwise().mean();
}

std::vector<double> window_index_return(const std::vector<double>& index_returns,
                                        const WindowConfig& cfg, WindowReturnKind kind) {
  const auto starts = cfg.window_starts(index_returns.size());
  std::vector<double> out;
  out.reserve(starts.size());
  for (std::size_t start : starts) {
    if (kind == WindowReturnKind::LogSum) {
      double sum = 0.0;
      for (std::size_t t = start; t < start + cfg.length; ++t) sum += index_returns[t];
      out.push_back(sum);
    } else {
      double gross = 1.0;
      for (std::size_t t = start; t < start + cfg.length; ++t) gross *= 1.0 + index_returns[t];
      out.push_back(gross - 1.0);
    }
  }
  return out;
}

PartitionReport partition_by_sdu(const Eigen::VectorXd& stat,
                                 const std::vector<double>& window_returns, double threshold,
                                 const std::string& statistic) {
  require(static_cast<std::size_t>(stat.size()) == window_returns.size(),
          "partition_by_sdu: ", stat.size(), " statistic values vs ", window_returns.size(),
          " window returns");
  require(threshold > 0.0, "partition_by_sdu: threshold must be positive, got ", threshold);

  PartitionCell below{statistic, "below", threshold, 0, std::nullopt};
  PartitionCell above{statistic, "above", threshold, 0, std::nullopt};
  double below_sum = 0.0;
  double above_sum = 0.0;
  for (Eigen::Index w = 0; w < stat.size(); ++w) {
    if (stat(w) < -threshold) {
      ++below.count;
      below_sum += window_returns[static_cast<std::size_t>(w)];
    } else if (stat(w) > threshold) {
      ++above.count;
      above_sum += window_returns[static_cast<std::size_t>(w)];
    }
  }
  if (below.count > 0) below.mean_return = below_sum / static_cast<double>(below.count);
  if (above.count > 0) above.mean_return = above_sum / static_cast<double>(above.count);

  PartitionReport report;
  report.cells.push_back(std::move(below));
  report.cells.push_back(std::move(above));
  return report;
}

std::string partition_report_json(const PartitionReport& report) {
  nlohmann::ordered_json cells = nlohmann::ordered_json::array();
  for (const auto& cell : report.cells) {
    nlohmann::ordered_json entry;
    entry["statistic"] = cell.statistic;
    entry["side"] = cell.side;
    entry["threshold_sdu"] = cell.threshold;
    entry["window_count"] = cell.count;
    if (cell.mean_return)
      entry["mean_window_return"] = *cell.mean_return;
    else
      entry["mean_window_return"] = nullptr;
    cells.push_back(std::move(entry));
  }
  nlohmann::ordered_json root;
  root["cells"] = std::move(cells);
  return root.dump(2) + "\n";
}

void write_partition_json(const PartitionReport& report, const std::filesystem::path& path) {
  detail::write_text_atomic(path, partition_report_json(report));
}

void write_partition_csv(const PartitionReport& report, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "statistic,side,threshold_sdu,window_count,mean_window_return\n";
  for (const auto& cell : report.cells) {
    out << cell.statistic << ',' << cell.side << ',' << detail::format_double(cell.threshold)
        << ',' << cell.count << ',';
    if (cell.mean_return) out << detail::format_double(*cell.mean_return);
    out << '\n';
  }
  detail::write_text_atomic(path, out.str());
}

void write_heatmap_csv(const NormalizedSeries& normalized, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "window_start";
  for (std::size_t i = 1; i <= normalized.n_assets(); ++i) out << ",sdu_" << i;
  out << '\n';
  for (std::size_t w = 0; w < normalized.n_windows(); ++w) {
    out << normalized.window_starts[w];
    for (std::size_t i = 0; i < normalized.n_assets(); ++i)
      out << ','
          << detail::format_double(normalized.values(static_cast<Eigen::Index>(w),
                                                     static_cast<Eigen::Index>(i)));
    out << '\n';
  }
  detail::write_text_atomic(path, out.str());
}

void write_band_csv(const std::vector<std::size_t>& window_starts, const Eigen::VectorXd& values,
                    const std::filesystem::path& path) {
  require(window_starts.size() == static_cast<std::size_t>(values.size()),
          "write_band_csv: ", window_starts.size(), " starts vs ", values.size(), " values");
  std::ostringstream out;
  out << "window_start,band_average\n";
  for (std::size_t w = 0; w < window_starts.size(); ++w)
    out << window_starts[w] << ','
        << detail::format_double(values(static_cast<Eigen::Index>(w))) << '\n';
  detail::write_text_atomic(path, out.str());
}

}  // namespace corrdyn

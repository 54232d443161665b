#include "corrdyn/correlation.hpp"

#include <Eigen/Eigenvalues>
#include <atomic>
#include <cmath>
#include <optional>
#include <sstream>
#include <thread>
#include <utility>

#include "corrdyn/ipr.hpp"
#include "detail/csv.hpp"

namespace corrdyn {

void WindowConfig::validate() const {
  require(length >= 2, "WindowConfig: window length must be >= 2, got ", length);
  require(stride >= 1, "WindowConfig: stride must be >= 1, got ", stride);
}

std::vector<std::size_t> WindowConfig::window_starts(std::size_t n_periods) const {
  validate();
  require(n_periods >= length, "WindowConfig: panel has ", n_periods,
          " periods, shorter than window length ", length);
  std::vector<std::size_t> starts;
  for (std::size_t s = 0; s + length <= n_periods; s += stride) starts.push_back(s);
  return starts;
}

void CorrelationMatrix::validate() const {
  const Eigen::Index n = values.rows();
  require(n > 0 && values.cols() == n, "CorrelationMatrix: not square");
  require(assets.empty() || assets.size() == static_cast<std::size_t>(n),
          "CorrelationMatrix: ", assets.size(), " assets for order ", n);
  require(values.allFinite(), "CorrelationMatrix: non-finite entry");
  for (Eigen::Index i = 0; i < n; ++i)
    require(values(i, i) == 1.0, "CorrelationMatrix: diagonal entry ", i, " is ", values(i, i),
            ", expected exactly 1");
  const double asym = (values - values.transpose()).cwiseAbs().maxCoeff();
  require(asym <= 1e-12, "CorrelationMatrix: asymmetry ", asym, " exceeds 1e-12");
  const double bound = values.cwiseAbs().maxCoeff();
  require(bound <= 1.0 + 1e-12, "CorrelationMatrix: entry magnitude ", bound, " exceeds 1");
}

void Spectrum::validate() const {
  const Eigen::Index n = eigenvalues.size();
  require(n > 0, "Spectrum: empty");
  require(eigenvectors.rows() == n && eigenvectors.cols() == n,
          "Spectrum: eigenvector matrix shape mismatch");
  for (Eigen::Index k = 1; k < n; ++k)
    require(eigenvalues(k - 1) <= eigenvalues(k), "Spectrum: eigenvalues not ascending at ", k);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double norm = eigenvectors.col(k).norm();
    require(std::abs(norm - 1.0) <= 1e-12, "Spectrum: eigenvector ", k, " norm ", norm);
  }
  const double trace_gap = std::abs(eigenvalues.sum() - static_cast<double>(n));
  require(trace_gap <= 1e-8 * static_cast<double>(n), "Spectrum: |sum(lambda) - N| = ",
          trace_gap, " exceeds 1e-8 * N");
}

Eigen::MatrixXd normalize_window(const Eigen::MatrixXd& returns) {
  const Eigen::Index n = returns.rows();
  const Eigen::Index window = returns.cols();
  require(n > 0 && window >= 2, "normalize_window: need at least 1 row and 2 columns");
  require(returns.allFinite(), "normalize_window: non-finite input");

  Eigen::MatrixXd normalized(n, window);
  const double inv_window = 1.0 / static_cast<double>(window);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mean = returns.row(i).mean();
    const Eigen::RowVectorXd centered = returns.row(i).array() - mean;
    const double sigma = std::sqrt(centered.squaredNorm() * inv_window);
    if (sigma <= 0.0)
      throw ZeroVarianceError(
          static_cast<std::size_t>(i),
          detail::concat("normalize_window: zero-variance row ", i, " over window of length ",
                         window));
    normalized.row(i) = centered / sigma;
  }
  return normalized;
}

CorrelationMatrix correlation_matrix(const Eigen::MatrixXd& normalized,
                                     std::vector<std::string> assets) {
  const Eigen::Index n = normalized.rows();
  const Eigen::Index window = normalized.cols();
  require(n > 0 && window >= 2, "correlation_matrix: need at least 1 row and 2 columns");

  CorrelationMatrix matrix;
  matrix.values.noalias() = (normalized * normalized.transpose()) / static_cast<double>(window);
  matrix.values = ((matrix.values + matrix.values.transpose()) / 2.0).eval();
  matrix.values.diagonal().setOnes();
  matrix.assets = std::move(assets);
  matrix.validate();
  return matrix;
}

Spectrum eigendecompose(const CorrelationMatrix& matrix) {
  matrix.validate();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix.values);
  require(solver.info() == Eigen::Success, "eigendecompose: eigensolver did not converge");

  Spectrum spectrum;
  spectrum.eigenvalues = solver.eigenvalues();  // ascending
  spectrum.eigenvectors = solver.eigenvectors();

  // Sign convention: largest-magnitude component positive, ties to the first.
  const Eigen::Index n = spectrum.eigenvalues.size();
  for (Eigen::Index k = 0; k < n; ++k) {
    auto column = spectrum.eigenvectors.col(k);
    const double peak = column.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(column(i)) == peak) {
        if (column(i) < 0.0) column = -column;
        break;
      }
    }
  }
  return spectrum;
}

namespace {

std::string window_error_message(const ReturnsPanel& panel, std::size_t window_index,
                                 std::size_t start, const std::exception& error) {
  std::ostringstream os;
  os << "sliding_spectra: window " << window_index << " (start " << start << "): ";
  if (const auto* zero = dynamic_cast<const ZeroVarianceError*>(&error))
    os << "asset '" << panel.assets[zero->row()] << "': ";
  os << error.what();
  return os.str();
}

}  // namespace

SpectrumSeries sliding_spectra(const ReturnsPanel& panel, const WindowConfig& cfg,
                               const SlidingOptions& opts) {
  panel.validate();
  const auto starts = cfg.window_starts(panel.n_periods());
  const std::size_t n_windows = starts.size();
  const Eigen::Index n = static_cast<Eigen::Index>(panel.n_assets());

  SpectrumSeries series;
  series.window_starts = starts;
  series.window_length = cfg.length;
  series.eigenvalues.resize(static_cast<Eigen::Index>(n_windows), n);
  if (opts.keep_eigenvectors) series.eigenvectors.resize(n_windows);
  if (opts.compute_ipr) series.ipr.resize(static_cast<Eigen::Index>(n_windows), n);

  std::vector<std::optional<std::string>> errors(n_windows);

  auto evaluate = [&](std::size_t w) {
    const std::size_t start = starts[w];
    try {
      const Eigen::MatrixXd normalized = normalize_window(
          panel.returns.middleCols(static_cast<Eigen::Index>(start),
                                   static_cast<Eigen::Index>(cfg.length)));
      const CorrelationMatrix matrix = correlation_matrix(normalized);
      const Spectrum spectrum = eigendecompose(matrix);
      series.eigenvalues.row(static_cast<Eigen::Index>(w)) = spectrum.eigenvalues.transpose();
      if (opts.keep_eigenvectors) series.eigenvectors[w] = spectrum.eigenvectors;
      if (opts.compute_ipr)
        series.ipr.row(static_cast<Eigen::Index>(w)) = ipr_profile(spectrum).values.transpose();
    } catch (const std::exception& error) {
      errors[w] = window_error_message(panel, w, start, error);
    }
  };

  const unsigned threads = std::max(1u, opts.threads);
  if (threads == 1 || n_windows <= 1) {
    for (std::size_t w = 0; w < n_windows; ++w) evaluate(w);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t w = next.fetch_add(1); w < n_windows; w = next.fetch_add(1)) evaluate(w);
    };
    std::vector<std::thread> pool;
    const unsigned pool_size = std::min<std::size_t>(threads, n_windows);
    pool.reserve(pool_size);
    for (unsigned i = 0; i < pool_size; ++i) pool.emplace_back(worker);
    for (auto& thread : pool) thread.join();
  }

  // Deterministic error selection: lowest window index wins regardless of
  // evaluation order.
  for (std::size_t w = 0; w < n_windows; ++w)
    if (errors[w]) throw Error(*errors[w]);
  return series;
}

void write_spectra_csv(const SpectrumSeries& series, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "window_start";
  for (std::size_t k = 1; k <= series.n_assets(); ++k) out << ",lambda_" << k;
  out << '\n';
  for (std::size_t w = 0; w < series.n_windows(); ++w) {
    out << series.window_starts[w];
    for (std::size_t k = 0; k < series.n_assets(); ++k)
      out << ','
          << detail::format_double(series.eigenvalues(static_cast<Eigen::Index>(w),
                                                      static_cast<Eigen::Index>(k)));
    out << '\n';
  }
  detail::write_text_atomic(path, out.str());
}

void write_eigenvectors_csv(const SpectrumSeries& series, const std::filesystem::path& path) {
  require(series.eigenvectors.size() == series.n_windows(),
          "write_eigenvectors_csv: eigenvectors were not kept");
  std::ostringstream out;
  out << "window_start,eigen_index";
  for (std::size_t i = 1; i <= series.n_assets(); ++i) out << ",v_" << i;
  out << '\n';
  for (std::size_t w = 0; w < series.n_windows(); ++w) {
    const Eigen::MatrixXd& vectors = series.eigenvectors[w];
    for (Eigen::Index k = 0; k < vectors.cols(); ++k) {
      out << series.window_starts[w] << ',' << (k + 1);
      for (Eigen::Index i = 0; i < vectors.rows(); ++i)
        out << ',' << detail::format_double(vectors(i, k));
      out << '\n';
    }
  }
  detail::write_text_atomic(path, out.str());
}

}  // namespace corrdyn

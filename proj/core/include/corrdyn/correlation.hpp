#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "corrdyn/error.hpp"
#include "corrdyn/panel.hpp"

namespace corrdyn {

/// Sliding-window geometry: window length T and the stride between
/// consecutive window starts. The ratio Q = T/N controls estimation noise.
struct WindowConfig {
  std::size_t length = 200;
  std::size_t stride = 1;

  void validate() const;

  /// Window start offsets {0, stride, 2*stride, ...} with start + length <=
  /// n_periods. Throws if the panel is shorter than one window.
  std::vector<std::size_t> window_starts(std::size_t n_periods) const;
};

/// Equal-time cross-correlation matrix for one window: symmetric, unit
/// diagonal, entries in [-1, 1].
struct CorrelationMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> assets;  // empty for synthetic matrices

  std::size_t order() const { return static_cast<std::size_t>(values.rows()); }

  /// Checks symmetry (1e-12), exact unit diagonal, and the [-1, 1] bounds
  /// with 1e-12 slack.
  void validate() const;
};

/// Eigenvalues in ascending order with sign-fixed orthonormal eigenvectors;
/// column k of `eigenvectors` pairs with `eigenvalues[k]`.
struct Spectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;

  std::size_t order() const { return static_cast<std::size_t>(eigenvalues.size()); }

  /// Checks ascending order, unit vector norms (1e-12) and trace
  /// conservation |sum(lambda) - N| <= 1e-8 * N.
  void validate() const;
};

/// Thrown by normalize_window when a row is constant over the window. The
/// row index lets callers attach the asset identifier.
class ZeroVarianceError : public Error {
 public:
  ZeroVarianceError(std::size_t row, const std::string& what) : Error(what), row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

/// Per-window standardisation: each row is shifted to mean 0 and scaled to
/// population standard deviation 1 (divide by T). The population convention
/// is what makes C = (1/T) G G^T come out with an exact unit diagonal.
Eigen::MatrixXd normalize_window(const Eigen::MatrixXd& returns);

/// C = (1/T) G G^T on normalised rows, symmetrised as (C + C^T)/2 with the
/// diagonal snapped to exactly 1.
CorrelationMatrix correlation_matrix(const Eigen::MatrixXd& normalized,
                                     std::vector<std::string> assets = {});

/// Full symmetric eigendecomposition, ascending eigenvalues. Each
/// eigenvector's sign is fixed so its largest-magnitude component is positive
/// (ties break to the first such component). Within a numerically degenerate
/// cluster the basis is whatever the solver returns, orthonormalised.
Spectrum eigendecompose(const CorrelationMatrix& matrix);

/// Eigen-spectrum of every sliding window, keyed by window start.
struct SpectrumSeries {
  std::vector<std::size_t> window_starts;
  std::size_t window_length = 0;
  Eigen::MatrixXd eigenvalues;                // W x N, row w = ascending spectrum
  std::vector<Eigen::MatrixXd> eigenvectors;  // size W when requested, else empty
  Eigen::MatrixXd ipr;                        // W x N when requested, else 0 x 0

  std::size_t n_windows() const { return window_starts.size(); }
  std::size_t n_assets() const { return static_cast<std::size_t>(eigenvalues.cols()); }
};

struct SlidingOptions {
  bool keep_eigenvectors = false;
  bool compute_ipr = false;
  unsigned threads = 1;  // window evaluation is embarrassingly parallel
};

/// One Spectrum per window. Results are keyed by start index and independent
/// of evaluation order, so any thread count produces identical output.
/// Per-window failures are reported with the window index and asset attached.
SpectrumSeries sliding_spectra(const ReturnsPanel& panel, const WindowConfig& cfg,
                               const SlidingOptions& opts = {});

/// CSV with columns `window_start,lambda_1,...,lambda_N`.
void write_spectra_csv(const SpectrumSeries& series, const std::filesystem::path& path);

/// CSV with columns `window_start,eigen_index,v_1,...,v_N`; one N-row block
/// per window. Requires eigenvectors to have been kept.
void write_eigenvectors_csv(const SpectrumSeries& series, const std::filesystem::path& path);

}  // namespace corrdyn

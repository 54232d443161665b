#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "corrdyn/correlation.hpp"
#include "corrdyn/panel.hpp"

namespace corrdyn {

/// A group of assets whose mutual correlation is perturbed to rho0 + delta.
struct SectorGroup {
  std::vector<std::size_t> members;
  double delta = 0.0;
};

/// One-factor / market-plus-sectors parameterisation. The perturbations must
/// sum to zero over the perturbed pairs so the mean off-diagonal correlation
/// stays at rho0; with `compensate` set, any residual is spread uniformly
/// over the unperturbed pairs instead (for unbalanced group sizes).
struct ModelSpec {
  std::size_t n = 0;
  double rho0 = 0.0;
  std::vector<SectorGroup> sectors;
  bool compensate = false;

  void validate() const;
};

struct OneFactorSpectrum {
  double lambda_max = 0.0;   // (N-1) * rho0 + 1, the market eigenvalue
  double lambda_bulk = 0.0;  // 1 - rho0, (N-1)-fold degenerate
  std::size_t multiplicity = 0;
};

/// All off-diagonal correlations equal to rho0. Positive definite iff
/// -1/(N-1) < rho0 < 1, which is enforced.
CorrelationMatrix one_factor_matrix(std::size_t n, double rho0);

/// Closed-form spectrum of the one-factor matrix.
OneFactorSpectrum analytic_one_factor_spectrum(std::size_t n, double rho0);

/// One-factor matrix with within-group off-diagonals moved to rho0 + delta_g.
/// Rejects non-positive-definite results outright — no silent repair.
CorrelationMatrix market_plus_sectors_matrix(const ModelSpec& spec);

/// Lower-triangular factor with A A^T = C.
struct CholeskyFactor {
  Eigen::MatrixXd lower;

  std::size_t order() const { return static_cast<std::size_t>(lower.rows()); }
};

/// Cholesky-Crout factorisation. Fails with the offending pivot index when
/// the matrix is not positive definite.
CholeskyFactor cholesky(const CorrelationMatrix& matrix);

/// Correlated Gaussian panel x_t = A y_t with y ~ N(0, I). Draws are consumed
/// in a fixed order — for each period t, components j = 0..N-1 — so a seed
/// pins the panel bit-for-bit no matter how the caller parallelises around it.
ReturnsPanel generate_panel(const CholeskyFactor& factor, std::size_t n_periods,
                            std::uint64_t seed);

/// One regime segment: how many sliding windows it spans, the global
/// correlation within it, and the per-period drift added to every asset.
struct RegimeSegment {
  std::size_t windows = 0;
  double rho0 = 0.0;
  double drift = 0.0;
};

struct RegimeSpec {
  std::vector<RegimeSegment> segments;

  std::size_t total_windows() const;
  void validate() const;
};

struct RegimePanel {
  ReturnsPanel panel;
  std::vector<double> index_returns;  // equal-weighted mean across assets
};

/// Concatenates per-segment panels generated from the segment's rho0 (keeping
/// the base spec's sector structure) with the segment drift added to every
/// return. A lead-in of window_length - 1 periods from the first segment is
/// prepended so that, at stride 1, the window count equals the scheduled
/// total. One Gaussian stream seeds everything.
RegimePanel generate_regime_panel(const ModelSpec& base, const RegimeSpec& regimes,
                                  std::size_t window_length, std::uint64_t seed);

/// Model configuration file: a JSON object with keys `n`, `rho0`, optional
/// `sectors` ([{"members": [...], "delta": d}, ...]), optional `compensate`,
/// and an optional `regimes` list ([{"windows": w, "rho0": r, "drift": mu}]).
struct ModelConfig {
  ModelSpec model;
  std::optional<RegimeSpec> regimes;
};

ModelConfig load_model_config(const std::filesystem::path& path);

}  // namespace corrdyn

#include "corrdyn/models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <utility>

#include <nlohmann/json.hpp>

#include "corrdyn/error.hpp"
#include "corrdyn/rng.hpp"

namespace corrdyn {

namespace {

void check_rho0_bounds(std::size_t n, double rho0) {
  require(n >= 2, "model: need at least 2 assets, got ", n);
  const double lower = -1.0 / static_cast<double>(n - 1);
  require(rho0 > lower && rho0 < 1.0, "model: rho0 = ", rho0,
          " outside the positive-definite range (", lower, ", 1)");
}

std::size_t pair_count(std::size_t members) { return members * (members - 1) / 2; }

std::string synthetic_label(const char* prefix, std::size_t value, std::size_t maximum) {
  std::size_t width = 1;
  for (std::size_t x = maximum; x >= 10; x /= 10) ++width;
  std::string digits = std::to_string(value);
  return prefix + std::string(width - digits.size(), '0') + digits;
}

}  // namespace

void ModelSpec::validate() const {
  check_rho0_bounds(n, rho0);
  std::set<std::size_t> seen;
  double weighted_delta_sum = 0.0;
  std::size_t perturbed_pairs = 0;
  for (std::size_t g = 0; g < sectors.size(); ++g) {
    const auto& group = sectors[g];
    require(group.members.size() >= 2, "ModelSpec: sector group ", g,
            " needs at least 2 members");
    for (std::size_t member : group.members) {
      require(member < n, "ModelSpec: sector group ", g, " member ", member,
              " out of range for N = ", n);
      require(seen.insert(member).second, "ModelSpec: sector groups overlap at asset index ",
              member);
    }
    weighted_delta_sum += static_cast<double>(pair_count(group.members.size())) * group.delta;
    perturbed_pairs += pair_count(group.members.size());
  }
  if (!sectors.empty() && !compensate)
    require(std::abs(weighted_delta_sum) <= 1e-12,
            "ModelSpec: zero-sum perturbation constraint violated; sum over perturbed pairs = ",
            weighted_delta_sum, " (set compensate to spread it over unperturbed pairs)");
  if (compensate && perturbed_pairs > 0 && std::abs(weighted_delta_sum) > 1e-12)
    require(pair_count(n) > perturbed_pairs,
            "ModelSpec: no unperturbed pairs left to absorb the compensation");
}

CorrelationMatrix one_factor_matrix(std::size_t n, double rho0) {
  check_rho0_bounds(n, rho0);
  CorrelationMatrix matrix;
  matrix.values = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(n),
                                            static_cast<Eigen::Index>(n), rho0);
  matrix.values.diagonal().setOnes();
  matrix.validate();
  return matrix;
}

OneFactorSpectrum analytic_one_factor_spectrum(std::size_t n, double rho0) {
  check_rho0_bounds(n, rho0);
  return {static_cast<double>(n - 1) * rho0 + 1.0, 1.0 - rho0, n - 1};
}

CorrelationMatrix market_plus_sectors_matrix(const ModelSpec& spec) {
  spec.validate();
  CorrelationMatrix matrix = one_factor_matrix(spec.n, spec.rho0);
  if (spec.sectors.empty()) return matrix;

  const Eigen::Index n = static_cast<Eigen::Index>(spec.n);
  Eigen::MatrixXi perturbed = Eigen::MatrixXi::Zero(n, n);
  double weighted_delta_sum = 0.0;
  std::size_t perturbed_pairs = 0;
  for (const auto& group : spec.sectors) {
    for (std::size_t a = 0; a < group.members.size(); ++a) {
      for (std::size_t b = a + 1; b < group.members.size(); ++b) {
        const Eigen::Index i = static_cast<Eigen::Index>(group.members[a]);
        const Eigen::Index j = static_cast<Eigen::Index>(group.members[b]);
        matrix.values(i, j) = matrix.values(j, i) = spec.rho0 + group.delta;
        perturbed(i, j) = perturbed(j, i) = 1;
      }
    }
    weighted_delta_sum += static_cast<double>(pair_count(group.members.size())) * group.delta;
    perturbed_pairs += pair_count(group.members.size());
  }

  if (spec.compensate && std::abs(weighted_delta_sum) > 0.0) {
    const std::size_t free_pairs = pair_count(spec.n) - perturbed_pairs;
    require(free_pairs > 0,
            "market_plus_sectors_matrix: no unperturbed pairs to absorb the compensation");
    const double adjust = -weighted_delta_sum / static_cast<double>(free_pairs);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j)
        if (!perturbed(i, j)) {
          matrix.values(i, j) += adjust;
          matrix.values(j, i) = matrix.values(i, j);
        }
  }

  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      require(matrix.values(i, j) >= -1.0 && matrix.values(i, j) <= 1.0,
              "market_plus_sectors_matrix: correlation ", matrix.values(i, j), " at (", i, ", ",
              j, ") outside [-1, 1]");

  matrix.validate();
  cholesky(matrix);  // positive definiteness gate; throws with the pivot index
  return matrix;
}

CholeskyFactor cholesky(const CorrelationMatrix& matrix) {
  matrix.validate();
  const Eigen::Index n = matrix.values.rows();
  CholeskyFactor factor;
  factor.lower = Eigen::MatrixXd::Zero(n, n);
  auto& lower = factor.lower;

  for (Eigen::Index j = 0; j < n; ++j) {
    double diagonal = matrix.values(j, j) - lower.row(j).head(j).squaredNorm();
    require(diagonal > 0.0, "cholesky: matrix not positive definite at pivot ", j);
    lower(j, j) = std::sqrt(diagonal);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double offdiag =
          matrix.values(i, j) - lower.row(i).head(j).dot(lower.row(j).head(j));
      lower(i, j) = offdiag / lower(j, j);
    }
  }
  return factor;
}

ReturnsPanel generate_panel(const CholeskyFactor& factor, std::size_t n_periods,
                            std::uint64_t seed) {
  const std::size_t n = factor.order();
  require(n > 0, "generate_panel: empty factor");
  require(n_periods >= 2, "generate_panel: need at least 2 periods, got ", n_periods);

  GaussianSource rng(seed);
  ReturnsPanel panel;
  panel.returns.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n_periods));
  Eigen::VectorXd draws(static_cast<Eigen::Index>(n));
  for (std::size_t t = 0; t < n_periods; ++t) {
    for (std::size_t j = 0; j < n; ++j) draws(static_cast<Eigen::Index>(j)) = rng.next();
    panel.returns.col(static_cast<Eigen::Index>(t)).noalias() =
        factor.lower.triangularView<Eigen::Lower>() * draws;
  }
  for (std::size_t i = 1; i <= n; ++i) panel.assets.push_back(synthetic_label("A", i, n));
  for (std::size_t t = 1; t <= n_periods; ++t)
    panel.times.push_back(synthetic_label("t", t, n_periods));
  panel.validate();
  return panel;
}

std::size_t RegimeSpec::total_windows() const {
  return std::accumulate(segments.begin(), segments.end(), std::size_t{0},
                         [](std::size_t sum, const RegimeSegment& s) { return sum + s.windows; });
}

void RegimeSpec::validate() const {
  require(!segments.empty(), "RegimeSpec: no segments");
  for (std::size_t k = 0; k < segments.size(); ++k)
    require(segments[k].windows >= 1, "RegimeSpec: segment ", k, " has zero windows");
}

RegimePanel generate_regime_panel(const ModelSpec& base, const RegimeSpec& regimes,
                                  std::size_t window_length, std::uint64_t seed) {
  base.validate();
  regimes.validate();
  require(window_length >= 2, "generate_regime_panel: window length must be >= 2, got ",
          window_length);
  for (std::size_t k = 0; k < regimes.segments.size(); ++k)
    check_rho0_bounds(base.n, regimes.segments[k].rho0);

  const std::size_t n = base.n;
  const std::size_t n_periods = window_length - 1 + regimes.total_windows();

  RegimePanel out;
  out.panel.returns.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n_periods));
  out.index_returns.resize(n_periods);

  GaussianSource rng(seed);
  Eigen::VectorXd draws(static_cast<Eigen::Index>(n));
  std::size_t t = 0;
  for (std::size_t k = 0; k < regimes.segments.size(); ++k) {
    const RegimeSegment& segment = regimes.segments[k];
    ModelSpec spec = base;
    spec.rho0 = segment.rho0;
    const CholeskyFactor factor = cholesky(market_plus_sectors_matrix(spec));

    // The first segment also generates the window_length - 1 lead-in periods.
    std::size_t periods = segment.windows + (k == 0 ? window_length - 1 : 0);
    for (std::size_t p = 0; p < periods; ++p, ++t) {
      for (std::size_t j = 0; j < n; ++j) draws(static_cast<Eigen::Index>(j)) = rng.next();
      auto column = out.panel.returns.col(static_cast<Eigen::Index>(t));
      column.noalias() = factor.lower.triangularView<Eigen::Lower>() * draws;
      column.array() += segment.drift;
      out.index_returns[t] = column.mean();
    }
  }

  for (std::size_t i = 1; i <= n; ++i) out.panel.assets.push_back(synthetic_label("A", i, n));
  for (std::size_t p = 1; p <= n_periods; ++p)
    out.panel.times.push_back(synthetic_label("t", p, n_periods));
  out.panel.validate();
  return out;
}

ModelConfig load_model_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), "load_model_config: cannot open file '", path.string(), "'");
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& error) {
    raise("load_model_config: '", path.string(), "': ", error.what());
  }

  ModelConfig config;
  try {
    require(root.contains("n") && root.contains("rho0"),
            "load_model_config: keys 'n' and 'rho0' are required");
    config.model.n = root.at("n").get<std::size_t>();
    config.model.rho0 = root.at("rho0").get<double>();
    config.model.compensate = root.value("compensate", false);
    if (root.contains("sectors")) {
      for (const auto& entry : root.at("sectors")) {
        SectorGroup group;
        group.members = entry.at("members").get<std::vector<std::size_t>>();
        group.delta = entry.at("delta").get<double>();
        config.model.sectors.push_back(std::move(group));
      }
    }
    if (root.contains("regimes")) {
      RegimeSpec regimes;
      for (const auto& entry : root.at("regimes")) {
        RegimeSegment segment;
        segment.windows = entry.at("windows").get<std::size_t>();
        segment.rho0 = entry.at("rho0").get<double>();
        segment.drift = entry.value("drift", 0.0);
        regimes.segments.push_back(segment);
      }
      config.regimes = std::move(regimes);
    }
  } catch (const nlohmann::json::exception& error) {
    raise("load_model_config: '", path.string(), "': ", error.what());
  }

  config.model.validate();
  if (config.regimes) config.regimes->validate();
  return config;
}

}  // namespace corrdyn

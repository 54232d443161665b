#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "corrdyn/correlation.hpp"
#include "corrdyn/error.hpp"
#include "corrdyn/ipr.hpp"
#include "corrdyn/models.hpp"
#include "corrdyn/rng.hpp"
#include "helpers.hpp"

using corrdyn::Error;

TEST_SUITE("ipr") {

TEST_CASE("closed-form vectors") {
  const int n = 16;
  const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(n, 1.0 / 4.0);  // 1/sqrt(16)
  CHECK(std::abs(corrdyn::ipr(uniform) - 1.0 / n) < 1e-15);

  Eigen::VectorXd basis = Eigen::VectorXd::Zero(n);
  basis(5) = 1.0;
  CHECK(corrdyn::ipr(basis) == 1.0);

  Eigen::VectorXd pair = Eigen::VectorXd::Zero(n);
  pair(0) = pair(1) = 1.0 / std::numbers::sqrt2;
  CHECK(std::abs(corrdyn::ipr(pair) - 0.5) < 1e-15);
}

TEST_CASE("norm precondition") {
  Eigen::VectorXd stretched = Eigen::VectorXd::Constant(4, 1.0);
  CHECK_THROWS_WITH_AS(corrdyn::ipr(stretched), doctest::Contains("non-unit norm"), Error);
  CHECK_THROWS_WITH_AS(corrdyn::ipr(Eigen::VectorXd::Zero(3)),
                       doctest::Contains("non-unit norm"), Error);
}

TEST_CASE("sign flip leaves the IPR unchanged") {
  corrdyn::GaussianSource rng(8);
  Eigen::VectorXd v(9);
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.next();
  v.normalize();
  CHECK(corrdyn::ipr(v) == corrdyn::ipr(-v));
}

TEST_CASE("range bounds hold for random unit vectors") {
  corrdyn::GaussianSource rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd v(10);
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.next();
    v.normalize();
    const double value = corrdyn::ipr(v);
    CHECK(value >= 1.0 / 10.0 - 1e-12);
    CHECK(value <= 1.0 + 1e-12);
  }
}

TEST_CASE("identity spectrum is fully localized") {
  corrdyn::CorrelationMatrix eye;
  eye.values = Eigen::MatrixXd::Identity(5, 5);
  const auto profile = corrdyn::ipr_profile(corrdyn::eigendecompose(eye));
  REQUIRE(profile.values.size() == 5);
  CHECK((profile.values.array() - 1.0).abs().maxCoeff() < 1e-12);
}

TEST_CASE("exact one-factor market mode is fully delocalized") {
  const auto spectrum = corrdyn::eigendecompose(corrdyn::one_factor_matrix(49, 0.204));
  const auto profile = corrdyn::ipr_profile(spectrum);
  // Only the top eigenvector is non-degenerate; its IPR is pinned at 1/N.
  CHECK(std::abs(profile.values(48) - 1.0 / 49.0) < 1e-10);
  // Every profile entry respects the hard bounds.
  CHECK(profile.values.minCoeff() >= 1.0 / 49.0 - 1e-12);
  CHECK(profile.values.maxCoeff() <= 1.0 + 1e-12);
}

TEST_CASE("profile matches per-vector values") {
  corrdyn::GaussianSource rng(10);
  Eigen::MatrixXd raw(6, 80);
  for (Eigen::Index t = 0; t < raw.cols(); ++t)
    for (Eigen::Index i = 0; i < raw.rows(); ++i) raw(i, t) = rng.next();
  const auto spectrum =
      corrdyn::eigendecompose(corrdyn::correlation_matrix(corrdyn::normalize_window(raw)));
  const auto profile = corrdyn::ipr_profile(spectrum);
  for (Eigen::Index k = 0; k < 6; ++k)
    CHECK(profile.values(k) == corrdyn::ipr(spectrum.eigenvectors.col(k)));
}

TEST_CASE("profile CSV export") {
  test::TempDir dir("ipr_csv");
  const auto spectrum = corrdyn::eigendecompose(corrdyn::one_factor_matrix(4, 0.3));
  const auto profile = corrdyn::ipr_profile(spectrum);
  corrdyn::write_ipr_csv(spectrum, profile, dir.file("ipr.csv"));
  const auto text = test::read_file(dir.file("ipr.csv"));
  CHECK(text.rfind("eigen_index,eigenvalue,ipr\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 5);

  // First data row: eigen_index 1, eigenvalue 1 - rho0 up to eigensolver noise.
  const auto row = text.substr(text.find('\n') + 1);
  CHECK(row.rfind("1,", 0) == 0);
  CHECK(std::stod(row.substr(2)) == doctest::Approx(0.7).epsilon(1e-12));
}

}  // TEST_SUITE

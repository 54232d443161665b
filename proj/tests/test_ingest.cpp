#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "corrdyn/error.hpp"
#include "corrdyn/ingest.hpp"
#include "corrdyn/rng.hpp"
#include "helpers.hpp"

using corrdyn::Error;
using corrdyn::PanelFormat;
using corrdyn::ReturnKind;

TEST_SUITE("ingest") {

TEST_CASE("wide prices load with sorted assets") {
  test::TempDir dir("ingest_wide");
  const auto path = test::write_file(dir.file("prices.csv"),
                                     "date,B,A\n"
                                     "2020-01-01,50,100\n"
                                     "2020-01-02,50,110\n"
                                     "2020-01-03,55,121\n");
  const auto panel = corrdyn::load_prices(path, PanelFormat::Wide);
  REQUIRE(panel.assets == std::vector<std::string>{"A", "B"});
  REQUIRE(panel.times.size() == 3);
  CHECK(panel.prices(0, 0) == 100.0);
  CHECK(panel.prices(0, 2) == 121.0);
  CHECK(panel.prices(1, 0) == 50.0);
  CHECK(panel.prices(1, 2) == 55.0);
}

TEST_CASE("long format matches wide format after permutation") {
  test::TempDir dir("ingest_long");
  const auto wide = test::write_file(dir.file("wide.csv"),
                                     "date,A,B\n"
                                     "d1,100,50\n"
                                     "d2,110,50\n"
                                     "d3,121,55\n");
  // Same observations, shuffled row order.
  const auto lng = test::write_file(dir.file("long.csv"),
                                    "date,asset,price\n"
                                    "d2,B,50\n"
                                    "d1,A,100\n"
                                    "d3,A,121\n"
                                    "d1,B,50\n"
                                    "d3,B,55\n"
                                    "d2,A,110\n");
  const auto from_wide = corrdyn::load_prices(wide, PanelFormat::Wide);
  const auto from_long = corrdyn::load_prices(lng, PanelFormat::Long);
  CHECK(from_wide.assets == from_long.assets);
  CHECK(from_wide.times == from_long.times);
  CHECK(from_wide.prices == from_long.prices);
}

TEST_CASE("load errors") {
  test::TempDir dir("ingest_err");
  CHECK_THROWS_WITH_AS(corrdyn::load_prices(dir.file("absent.csv"), PanelFormat::Wide),
                       doctest::Contains("cannot open file"), Error);

  const auto zero = test::write_file(dir.file("zero.csv"), "date,A\nd1,100\nd2,0\n");
  CHECK_THROWS_WITH_AS(corrdyn::load_prices(zero, PanelFormat::Wide),
                       doctest::Contains("non-positive price"), Error);

  const auto ragged = test::write_file(dir.file("ragged.csv"), "date,A,B\nd1,1,2\nd2,1\n");
  CHECK_THROWS_WITH_AS(corrdyn::load_prices(ragged, PanelFormat::Wide),
                       doctest::Contains("ragged row"), Error);

  const auto dup = test::write_file(dir.file("dup.csv"),
                                    "date,asset,price\nd1,A,1\nd1,A,2\nd2,A,3\n");
  CHECK_THROWS_WITH_AS(corrdyn::load_prices(dup, PanelFormat::Long),
                       doctest::Contains("duplicate (time, asset) pair"), Error);

  // An asset missing one observation is rejected outright, not imputed.
  const auto sparse = test::write_file(dir.file("sparse.csv"),
                                       "date,asset,price\n"
                                       "d1,A,1\nd2,A,2\nd1,B,3\n");
  CHECK_THROWS_WITH_AS(corrdyn::load_prices(sparse, PanelFormat::Long),
                       doctest::Contains("missing price for asset 'B'"), Error);

  const auto dupdate = test::write_file(dir.file("dupdate.csv"), "date,A\nd1,1\nd1,2\nd2,3\n");
  CHECK_THROWS_WITH_AS(corrdyn::load_prices(dupdate, PanelFormat::Wide),
                       doctest::Contains("not strictly increasing"), Error);
}

TEST_CASE("log and simple returns") {
  test::TempDir dir("ingest_ret");
  const auto path = test::write_file(dir.file("prices.csv"),
                                     "date,A\nd1,100\nd2,110\nd3,121\n");
  const auto panel = corrdyn::load_prices(path, PanelFormat::Wide);

  const auto logret = corrdyn::compute_returns(panel, ReturnKind::Log);
  REQUIRE(logret.n_periods() == 2);
  CHECK(logret.times == std::vector<std::string>{"d2", "d3"});
  CHECK(std::abs(logret.returns(0, 0) - 0.09531017980432486) < 1e-15);
  CHECK(std::abs(logret.returns(0, 1) - 0.09531017980432486) < 1e-15);

  const auto simple = corrdyn::compute_returns(panel, ReturnKind::Simple);
  CHECK(std::abs(simple.returns(0, 0) - 0.10) < 1e-12);
  CHECK(std::abs(simple.returns(0, 1) - 0.10) < 1e-12);
}

TEST_CASE("constant prices give zero returns") {
  test::TempDir dir("ingest_const");
  const auto path = test::write_file(dir.file("prices.csv"),
                                     "date,A\nd1,100\nd2,100\nd3,100\n");
  const auto panel = corrdyn::load_prices(path, PanelFormat::Wide);
  for (const auto kind : {ReturnKind::Log, ReturnKind::Simple}) {
    const auto returns = corrdyn::compute_returns(panel, kind);
    CHECK(returns.returns.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("log returns reconstruct prices up to a constant factor") {
  corrdyn::PricePanel panel;
  panel.assets = {"A", "B"};
  panel.times = {"d1", "d2", "d3", "d4", "d5"};
  panel.prices.resize(2, 5);
  panel.prices << 103.2, 99.7, 101.4, 120.0, 118.3,
                  12.5, 12.9, 13.4, 12.2, 12.8;
  const auto returns = corrdyn::compute_returns(panel, ReturnKind::Log);
  for (Eigen::Index i = 0; i < 2; ++i) {
    double level = panel.prices(i, 0);
    for (Eigen::Index t = 0; t < returns.returns.cols(); ++t) {
      level *= std::exp(returns.returns(i, t));
      CHECK(std::abs(level / panel.prices(i, t + 1) - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("select_subset is deterministic and order preserving") {
  Eigen::MatrixXd values(6, 4);
  for (Eigen::Index i = 0; i < 6; ++i)
    for (Eigen::Index t = 0; t < 4; ++t) values(i, t) = static_cast<double>(10 * i + t);
  const auto panel = test::make_panel(values);

  const auto full = corrdyn::select_subset(panel, 6, 7);
  CHECK(full.assets == panel.assets);
  CHECK(full.returns == panel.returns);

  const auto one = corrdyn::select_subset(panel, 1, 3);
  REQUIRE(one.n_assets() == 1);
  bool found = false;
  for (Eigen::Index i = 0; i < 6; ++i)
    if (one.returns.row(0) == panel.returns.row(i) && one.assets[0] == panel.assets[i])
      found = true;
  CHECK(found);

  const auto a = corrdyn::select_subset(panel, 3, 11);
  const auto b = corrdyn::select_subset(panel, 3, 11);
  CHECK(a.assets == b.assets);
  CHECK(a.returns == b.returns);

  // Selected rows keep the parent's relative order.
  std::size_t previous = 0;
  bool first = true;
  for (const auto& asset : a.assets) {
    const auto it = std::find(panel.assets.begin(), panel.assets.end(), asset);
    const auto index = static_cast<std::size_t>(it - panel.assets.begin());
    if (!first) CHECK(index > previous);
    previous = index;
    first = false;
  }

  CHECK_THROWS_WITH_AS(corrdyn::select_subset(panel, 0, 1), doctest::Contains("out of range"),
                       Error);
  CHECK_THROWS_WITH_AS(corrdyn::select_subset(panel, 7, 1), doctest::Contains("out of range"),
                       Error);
}

TEST_CASE("different seeds eventually pick different subsets") {
  Eigen::MatrixXd values = Eigen::MatrixXd::Random(8, 5);
  const auto panel = test::make_panel(values);
  bool differ = false;
  const auto base = corrdyn::select_subset(panel, 4, 0);
  for (std::uint64_t seed = 1; seed <= 16 && !differ; ++seed)
    differ = corrdyn::select_subset(panel, 4, seed).assets != base.assets;
  CHECK(differ);
}

TEST_CASE("returns CSV round trip is exact") {
  test::TempDir dir("ingest_roundtrip");
  Eigen::MatrixXd values(2, 3);
  values << 0.1, -0.25, 1.0 / 3.0,
            1e-17, 12345.6789, -0.0001;
  const auto panel = test::make_panel(values);
  corrdyn::write_returns_csv(panel, dir.file("returns.csv"));
  const auto loaded = corrdyn::load_returns(dir.file("returns.csv"));
  CHECK(loaded.assets == panel.assets);
  CHECK(loaded.times == panel.times);
  CHECK(loaded.returns == panel.returns);  // bit-exact via shortest round-trip formatting
}

TEST_CASE("index CSV round trip") {
  test::TempDir dir("ingest_index");
  const std::vector<std::string> times{"d1", "d2", "d3"};
  const std::vector<double> values{0.01, -0.02, 0.003};
  corrdyn::write_index_csv(times, values, dir.file("index.csv"));
  const auto loaded = corrdyn::load_index_returns(dir.file("index.csv"));
  CHECK(loaded == values);
}

}  // TEST_SUITE

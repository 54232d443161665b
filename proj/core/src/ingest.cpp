#include "corrdyn/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <utility>

#include "corrdyn/error.hpp"
#include "corrdyn/rng.hpp"
#include "detail/csv.hpp"

namespace corrdyn {

namespace {

// Sorts labels and returns the permutation old index -> position.
std::vector<std::size_t> sort_permutation(const std::vector<std::string>& labels) {
  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return labels[a] < labels[b]; });
  return order;
}

void check_price(double price, const std::string& asset, const std::string& time) {
  require(price > 0.0, "load_prices: non-positive price ", detail::format_double(price),
          " for asset '", asset, "' at time '", time, "'");
}

PricePanel assemble_panel(std::vector<std::string> assets, std::vector<std::string> times,
                          const Eigen::MatrixXd& prices) {
  // Determinism contract: assets and times sorted by label.
  const auto asset_order = sort_permutation(assets);
  const auto time_order = sort_permutation(times);

  PricePanel panel;
  panel.assets.reserve(assets.size());
  panel.times.reserve(times.size());
  for (std::size_t i : asset_order) panel.assets.push_back(std::move(assets[i]));
  for (std::size_t t : time_order) panel.times.push_back(std::move(times[t]));
  panel.prices.resize(static_cast<Eigen::Index>(asset_order.size()),
                      static_cast<Eigen::Index>(time_order.size()));
  for (std::size_t i = 0; i < asset_order.size(); ++i)
    for (std::size_t t = 0; t < time_order.size(); ++t)
      panel.prices(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) =
          prices(static_cast<Eigen::Index>(asset_order[i]),
                 static_cast<Eigen::Index>(time_order[t]));
  panel.validate();
  return panel;
}

PricePanel load_prices_wide(const std::filesystem::path& path) {
  const auto table = detail::read_csv(path);
  require(table.header.size() >= 2, "load_prices: wide header needs 'date' plus asset columns");
  require(table.header[0] == "date", "load_prices: wide header must start with 'date', got '",
          table.header[0], "'");
  std::vector<std::string> assets(table.header.begin() + 1, table.header.end());
  require(!table.rows.empty(), "load_prices: file '", path.string(), "' has no data rows");

  std::vector<std::string> times;
  Eigen::MatrixXd prices(static_cast<Eigen::Index>(assets.size()),
                         static_cast<Eigen::Index>(table.rows.size()));
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    require(row.size() == table.header.size(), "load_prices: ragged row ", r + 2, ": expected ",
            table.header.size(), " fields, got ", row.size());
    const std::string& time = row[0];
    for (std::size_t a = 0; a < assets.size(); ++a) {
      require(!row[a + 1].empty(), "load_prices: missing price for asset '", assets[a],
              "' at time '", time, "'");
      const double price = detail::parse_double(row[a + 1], "load_prices");
      check_price(price, assets[a], time);
      prices(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(r)) = price;
    }
    times.push_back(time);
  }
  return assemble_panel(std::move(assets), std::move(times), prices);
}

PricePanel load_prices_long(const std::filesystem::path& path) {
  const auto table = detail::read_csv(path);
  require(table.header == std::vector<std::string>({"date", "asset", "price"}),
          "load_prices: long header must be 'date,asset,price'");
  require(!table.rows.empty(), "load_prices: file '", path.string(), "' has no data rows");

  std::map<std::pair<std::string, std::string>, double> cells;  // (time, asset) -> price
  std::set<std::string> time_set;
  std::set<std::string> asset_set;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    require(row.size() == 3, "load_prices: ragged row ", r + 2, ": expected 3 fields, got ",
            row.size());
    const double price = detail::parse_double(row[2], "load_prices");
    check_price(price, row[1], row[0]);
    const auto [it, inserted] = cells.emplace(std::make_pair(row[0], row[1]), price);
    require(inserted, "load_prices: duplicate (time, asset) pair ('", row[0], "', '", row[1],
            "')");
    time_set.insert(row[0]);
    asset_set.insert(row[1]);
  }

  std::vector<std::string> times(time_set.begin(), time_set.end());
  std::vector<std::string> assets(asset_set.begin(), asset_set.end());
  Eigen::MatrixXd prices(static_cast<Eigen::Index>(assets.size()),
                         static_cast<Eigen::Index>(times.size()));
  for (std::size_t a = 0; a < assets.size(); ++a) {
    for (std::size_t t = 0; t < times.size(); ++t) {
      const auto it = cells.find(std::make_pair(times[t], assets[a]));
      require(it != cells.end(), "load_prices: missing price for asset '", assets[a],
              "' at time '", times[t], "'");
      prices(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(t)) = it->second;
    }
  }
  return assemble_panel(std::move(assets), std::move(times), prices);
}

}  // namespace

void PricePanel::validate() const {
  require(!assets.empty(), "PricePanel: no assets");
  require(times.size() >= 2, "PricePanel: need at least 2 times");
  require(prices.rows() == static_cast<Eigen::Index>(assets.size()),
          "PricePanel: row count ", prices.rows(), " != asset count ", assets.size());
  require(prices.cols() == static_cast<Eigen::Index>(times.size()),
          "PricePanel: column count ", prices.cols(), " != time count ", times.size());
  for (std::size_t i = 1; i < assets.size(); ++i)
    require(assets[i - 1] != assets[i], "PricePanel: duplicate asset '", assets[i], "'");
  for (std::size_t t = 1; t < times.size(); ++t)
    require(times[t - 1] < times[t], "PricePanel: time labels not strictly increasing at '",
            times[t], "'");
  require((prices.array() > 0.0).all(), "PricePanel: non-positive price");
  require(prices.allFinite(), "PricePanel: non-finite price");
}

void ReturnsPanel::validate() const {
  require(!assets.empty(), "ReturnsPanel: no assets");
  require(returns.rows() == static_cast<Eigen::Index>(assets.size()),
          "ReturnsPanel: row count ", returns.rows(), " != asset count ", assets.size());
  require(returns.cols() == static_cast<Eigen::Index>(times.size()),
          "ReturnsPanel: column count ", returns.cols(), " != time count ", times.size());
  require(times.size() >= 2, "ReturnsPanel: need at least 2 return periods, got ", times.size());
  require(returns.allFinite(), "ReturnsPanel: non-finite return");
}

PricePanel load_prices(const std::filesystem::path& path, PanelFormat format) {
  return format == PanelFormat::Wide ? load_prices_wide(path) : load_prices_long(path);
}

ReturnsPanel load_returns(const std::filesystem::path& path) {
  const auto table = detail::read_csv(path);
  require(table.header.size() >= 2, "load_returns: wide header needs 'date' plus asset columns");
  require(table.header[0] == "date", "load_returns: wide header must start with 'date', got '",
          table.header[0], "'");
  std::vector<std::string> assets(table.header.begin() + 1, table.header.end());
  require(!table.rows.empty(), "load_returns: file '", path.string(), "' has no data rows");

  ReturnsPanel panel;
  panel.assets = assets;
  panel.returns.resize(static_cast<Eigen::Index>(assets.size()),
                       static_cast<Eigen::Index>(table.rows.size()));
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    require(row.size() == table.header.size(), "load_returns: ragged row ", r + 2, ": expected ",
            table.header.size(), " fields, got ", row.size());
    panel.times.push_back(row[0]);
    for (std::size_t a = 0; a < assets.size(); ++a) {
      require(!row[a + 1].empty(), "load_returns: missing return for asset '", assets[a],
              "' at time '", row[0], "'");
      panel.returns(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(r)) =
          detail::parse_double(row[a + 1], "load_returns");
    }
  }
  for (std::size_t t = 1; t < panel.times.size(); ++t)
    require(panel.times[t - 1] < panel.times[t],
            "load_returns: time labels not strictly increasing at '", panel.times[t], "'");
  panel.validate();
  return panel;
}

std::vector<double> load_index_returns(const std::filesystem::path& path) {
  const auto table = detail::read_csv(path);
  require(table.header.size() == 2, "load_index_returns: expected 2 columns 'date,<value>'");
  std::vector<double> values;
  values.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    require(row.size() == 2, "load_index_returns: ragged row ", r + 2);
    values.push_back(detail::parse_double(row[1], "load_index_returns"));
  }
  require(values.size() >= 2, "load_index_returns: need at least 2 rows");
  return values;
}

ReturnsPanel compute_returns(const PricePanel& panel, ReturnKind kind) {
  panel.validate();
  const Eigen::Index n = panel.prices.rows();
  const Eigen::Index periods = panel.prices.cols() - 1;

  ReturnsPanel out;
  out.assets = panel.assets;
  out.times.assign(panel.times.begin() + 1, panel.times.end());
  out.returns.resize(n, periods);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index t = 0; t < periods; ++t) {
      const double ratio = panel.prices(i, t + 1) / panel.prices(i, t);
      out.returns(i, t) = kind == ReturnKind::Log ? std::log(ratio) : ratio - 1.0;
    }
  }
  out.validate();
  return out;
}

ReturnsPanel select_subset(const ReturnsPanel& panel, std::size_t k, std::uint64_t seed) {
  panel.validate();
  const std::size_t n = panel.n_assets();
  require(k >= 1 && k <= n, "select_subset: k = ", k, " out of range [1, ", n, "]");

  // Partial Fisher-Yates over the index array, then ascending sort so the
  // parent's asset order is preserved.
  std::vector<std::size_t> indices(n);
  std::iota(indices.begin(), indices.end(), 0);
  GaussianSource rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.uniform_below(n - i));
    std::swap(indices[i], indices[j]);
  }
  indices.resize(k);
  std::sort(indices.begin(), indices.end());

  ReturnsPanel out;
  out.times = panel.times;
  out.returns.resize(static_cast<Eigen::Index>(k), panel.returns.cols());
  for (std::size_t i = 0; i < k; ++i) {
    out.assets.push_back(panel.assets[indices[i]]);
    out.returns.row(static_cast<Eigen::Index>(i)) =
        panel.returns.row(static_cast<Eigen::Index>(indices[i]));
  }
  out.validate();
  return out;
}

void write_returns_csv(const ReturnsPanel& panel, const std::filesystem::path& path) {
  panel.validate();
  std::ostringstream out;
  out << "date";
  for (const auto& asset : panel.assets) out << ',' << asset;
  out << '\n';
  for (std::size_t t = 0; t < panel.n_periods(); ++t) {
    out << panel.times[t];
    for (std::size_t i = 0; i < panel.n_assets(); ++i)
      out << ','
          << detail::format_double(
                 panel.returns(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)));
    out << '\n';
  }
  detail::write_text_atomic(path, out.str());
}

void write_index_csv(const std::vector<std::string>& times, const std::vector<double>& values,
                     const std::filesystem::path& path) {
  require(times.size() == values.size(), "write_index_csv: ", times.size(), " times vs ",
          values.size(), " values");
  std::ostringstream out;
  out << "date,index_return\n";
  for (std::size_t t = 0; t < times.size(); ++t)
    out << times[t] << ',' << detail::format_double(values[t]) << '\n';
  detail::write_text_atomic(path, out.str());
}

}  // namespace corrdyn

#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <vector>

namespace corrdyn {

/// Price history for N assets over L+1 observation times. Prices are strictly
/// positive, rows are complete, and time labels are strictly increasing.
struct PricePanel {
  std::vector<std::string> assets;
  std::vector<std::string> times;
  Eigen::MatrixXd prices;  // assets.size() x times.size()

  std::size_t n_assets() const { return assets.size(); }
  std::size_t n_times() const { return times.size(); }

  /// Throws Error on any invariant violation.
  void validate() const;
};

/// Return history for N assets over L periods. Each period is labelled by its
/// end time. All entries are finite and L >= 2.
struct ReturnsPanel {
  std::vector<std::string> assets;
  std::vector<std::string> times;
  Eigen::MatrixXd returns;  // assets.size() x times.size()

  std::size_t n_assets() const { return assets.size(); }
  std::size_t n_periods() const { return times.size(); }

  void validate() const;
};

}  // namespace corrdyn

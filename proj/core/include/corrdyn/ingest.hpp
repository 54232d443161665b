#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "corrdyn/panel.hpp"

namespace corrdyn {

/// Wide: header `date,<asset>,<asset>,...`, one row per time.
/// Long: header `date,asset,price`, one row per observation.
enum class PanelFormat { Wide, Long };

enum class ReturnKind { Log, Simple };

/// Loads a price panel. Assets and times are sorted by label for determinism;
/// incomplete assets (any missing price) are rejected with an error, never
/// imputed. Duplicate assets, duplicate (time, asset) pairs, ragged rows and
/// non-positive prices are all errors.
PricePanel load_prices(const std::filesystem::path& path, PanelFormat format);

/// Loads a wide-format CSV of returns (same layout as the wide price format,
/// values interpreted as per-period returns).
ReturnsPanel load_returns(const std::filesystem::path& path);

/// Loads a two-column CSV `date,<value>` of per-period index returns.
std::vector<double> load_index_returns(const std::filesystem::path& path);

/// Per-period returns from prices. Log: ln(p[t+1]/p[t]); simple:
/// p[t+1]/p[t] - 1. The result has one fewer column than the price panel.
ReturnsPanel compute_returns(const PricePanel& panel, ReturnKind kind);

/// Draws k assets without replacement, deterministically for a given seed.
/// The selected rows keep their order from the parent panel.
ReturnsPanel select_subset(const ReturnsPanel& panel, std::size_t k, std::uint64_t seed);

/// Writes a returns panel in the wide CSV format (atomically).
void write_returns_csv(const ReturnsPanel& panel, const std::filesystem::path& path);

/// Writes a `date,index_return` CSV (atomically).
void write_index_csv(const std::vector<std::string>& times, const std::vector<double>& values,
                     const std::filesystem::path& path);

}  // namespace corrdyn

#pragma once

#include <cstdint>
#include <random>

namespace corrdyn {

/// Seedable stream of standard normal draws.
///
/// The stream is fully determined by the seed: uniforms are built from the
/// top 53 bits of each mt19937_64 word (the engine's output sequence is
/// fixed by the standard) and turned into normals with Box-Muller, consuming
/// two uniforms per pair. std::normal_distribution is deliberately not used;
/// its output is implementation-defined.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

  /// Uniform draw in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Standard normal draw.
  double next();

  /// Uniform integer in [0, bound), rejection-sampled so the result does not
  /// depend on std::uniform_int_distribution internals.
  std::uint64_t uniform_below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace corrdyn

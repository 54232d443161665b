#pragma once

#include <Eigen/Dense>
#include <filesystem>

#include "corrdyn/correlation.hpp"

namespace corrdyn {

/// Inverse Participation Ratio of each eigenvector, in ascending-eigenvalue
/// order. Entries live in [1/N, 1]: 1/N for a fully delocalised vector (the
/// market eigenvector), 1 for a single-component one.
struct IprProfile {
  Eigen::VectorXd values;
};

/// Sum of fourth powers of the components of a unit vector — the reciprocal
/// of the effective number of components that contribute. Invariant under
/// sign flips, so the eigenvector sign convention does not matter.
double ipr(const Eigen::VectorXd& vector);

/// IPR of every eigenvector in the spectrum.
///
/// Inside a degenerate eigenvalue cluster the solver's basis choice is
/// arbitrary, and so are those IPR values; only IPRs of non-degenerate
/// eigenvectors are basis-independent.
IprProfile ipr_profile(const Spectrum& spectrum);

/// CSV with columns `eigen_index,eigenvalue,ipr`.
void write_ipr_csv(const Spectrum& spectrum, const IprProfile& profile,
                   const std::filesystem::path& path);

}  // namespace corrdyn

#include "corrdyn/ipr.hpp"

#include <cmath>
#include <sstream>

#include "corrdyn/error.hpp"
#include "detail/csv.hpp"

namespace corrdyn {

double ipr(const Eigen::VectorXd& vector) {
  require(vector.size() > 0, "ipr: empty vector");
  const double norm = vector.norm();
  require(std::abs(norm - 1.0) <= 1e-8, "ipr: non-unit norm ", norm);
  return vector.array().square().square().sum();
}

IprProfile ipr_profile(const Spectrum& spectrum) {
  spectrum.validate();
  const Eigen::Index n = spectrum.eigenvalues.size();
  IprProfile profile;
  profile.values.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) profile.values(k) = ipr(spectrum.eigenvectors.col(k));
  return profile;
}

void write_ipr_csv(const Spectrum& spectrum, const IprProfile& profile,
                   const std::filesystem::path& path) {
  require(profile.values.size() == spectrum.eigenvalues.size(),
          "write_ipr_csv: profile/spectrum size mismatch");
  std::ostringstream out;
  out << "eigen_index,eigenvalue,ipr\n";
  for (Eigen::Index k = 0; k < profile.values.size(); ++k)
    out << (k + 1) << ',' << detail::format_double(spectrum.eigenvalues(k)) << ','
        << detail::format_double(profile.values(k)) << '\n';
  detail::write_text_atomic(path, out.str());
}

}  // namespace corrdyn

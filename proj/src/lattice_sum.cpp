#include "ffrate/lattice_sum.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ffrate/constants.hpp"
#include "ffrate/errors.hpp"

namespace ffrate {

double LatticeSumResult::partial_sum(int s_max) const {
  const int n = std::clamp(s_max, 0, static_cast<int>(shell_contributions.size()));
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += shell_contributions[i];
  return total;
}

LatticeSumResult lattice_sum(int layers) {
  if (layers < 1) throw InvalidInput("lattice sum: layers must be >= 1");
  const int s_max = layers * layers;
  LatticeSumResult out;
  out.layers = layers;
  out.shell_counts.assign(s_max, 0);
  for (int m = -layers; m <= layers; ++m) {
    for (int n = -layers; n <= layers; ++n) {
      for (int p = -layers; p <= layers; ++p) {
        const int s = m * m + n * n + p * p;
        if (s >= 1 && s <= s_max) ++out.shell_counts[s - 1];
      }
    }
  }
  out.shell_contributions.resize(s_max);
  for (int s = 1; s <= s_max; ++s) {
    const double s3 = static_cast<double>(s) * s * s;
    out.shell_contributions[s - 1] = out.shell_counts[s - 1] / s3;
    out.coefficient += out.shell_contributions[s - 1];
  }
  return out;
}

SpinDensity spin_density(double concentration_ppm, double cation_density, double isotopic_fraction) {
  if (!(concentration_ppm >= 0.0)) throw InvalidInput("spin density: concentration must be >= 0");
  if (!(cation_density >= 0.0)) throw InvalidInput("spin density: cation density must be >= 0");
  if (!(isotopic_fraction >= 0.0 && isotopic_fraction <= 1.0)) {
    throw InvalidInput("spin density: isotopic fraction must lie in [0, 1]");
  }
  SpinDensity out;
  out.concentration_ppm = concentration_ppm;
  out.cation_density = cation_density;
  out.isotopic_fraction = isotopic_fraction;
  out.n_s = 0.5 * isotopic_fraction * (concentration_ppm * 1e-6) * cation_density;
  return out;
}

double pair_coupling_scale(double n_s, double g) {
  if (!(n_s > 0.0)) throw InvalidInput("pair coupling scale: n_s must be > 0");
  const double mb = constants::bohr_magneton;
  return constants::mu0_over_4pi * g * g * mb * mb * n_s / constants::planck;
}

}  // namespace ffrate

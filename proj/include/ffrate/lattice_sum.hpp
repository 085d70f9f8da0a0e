#pragma once

#include <vector>

namespace ffrate {

/// Weighted enumeration of a fictitious simple-cubic arrangement of
/// partner spins with density n_s (spacing a = n_s^{-1/3}), so that
/// sum_k 1/r_k^6 = coefficient * n_s^2.
///
/// `layers` is a radius in lattice units: every site with
/// m^2 + n^2 + p^2 <= layers^2 is included. Contributions are reported per
/// distance shell s = m^2 + n^2 + p^2 (shell s holds count(s) sites, each
/// contributing 1/s^3). Shells with no lattice representation (s = 7, 15,
/// ...) appear with zero count.
struct LatticeSumResult {
  int layers = 0;
  double coefficient = 0.0;
  std::vector<int> shell_counts;            // index s - 1
  std::vector<double> shell_contributions;  // count(s) / s^3

  /// Sum of shells 1..s_max (s_max clamped to the enumerated range).
  [[nodiscard]] double partial_sum(int s_max) const;
};

LatticeSumResult lattice_sum(int layers);

struct SpinDensity {
  double n_s = 0.0;  // m^-3
  double concentration_ppm = 0.0;
  double cation_density = 0.0;  // m^-3
  double isotopic_fraction = 1.0;
};

/// n_s = 1/2 * f * (ppm * 1e-6) * cation density: half the resonant dopant
/// density, since only partners in the opposite state can flip-flop.
SpinDensity spin_density(double concentration_ppm, double cation_density, double isotopic_fraction);

/// (mu0/4pi) g^2 mu_B^2 n_s / h: dipolar coupling in Hz at the mean partner
/// distance n_s^{-1/3}. Diagnostic only.
double pair_coupling_scale(double n_s, double g);

}  // namespace ffrate

#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "ffrate/spin_core.hpp"

// Brute-force checks of the closed forms: explicit two-spin operators,
// Monte-Carlo sphere averages and random-placement distance sums.
namespace ffrate::oracle {

struct OracleConfig {
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 1;
  double sigma_level = 3.0;
  // Random placement.
  double box_size_m = 0.0;  // 0: 12 mean spacings
  double cutoff_m = 0.0;    // 0: 0.05 mean spacings
  int realizations = 200;
  int layers = 10;

  void validate() const;
};

struct OracleReport {
  double estimate = 0.0;
  double standard_error = 0.0;
  double analytic = 0.0;
  double z_score = 0.0;
  double sigma_level = 3.0;
  std::uint64_t samples = 0;
  bool pass = false;
};

/// <+-| 3(mu_i.u)(mu_j.u) - mu_i.mu_j |-+> / mu_B^2 from explicit 4x4
/// two-spin operators and the Zeeman eigenstates. No closed forms used.
std::complex<double> pair_element_bruteforce(const Vec3& g, double big_theta, double big_phi,
                                             const Vec3& u);

/// The reverse element <-+| ... |+->; the Hermitian conjugate of the above.
std::complex<double> pair_element_reverse(const Vec3& g, double big_theta, double big_phi,
                                          const Vec3& u);

/// 3 <-+|(mu_i.u)(mu_j.u)|+-> / mu_B^2 by brute force (real part).
double matrix_element_a_bruteforce(const Vec3& g, double big_theta, double big_phi, const Vec3& u);

/// Uniform direction from two uniforms (inverse CDF on cos theta).
Vec3 sphere_point(double u1, double u2);

/// Monte-Carlo estimate of Xi: sphere mean of |pair element|^2.
OracleReport xi_monte_carlo(const Vec3& g, double big_theta, double big_phi, const OracleConfig& config);

/// Monte-Carlo sphere mean of A compared with B.
OracleReport mean_a_monte_carlo(const Vec3& g, double big_theta, double big_phi,
                                const OracleConfig& config);

/// sum over offsets with |r| >= cutoff of 1/|r|^6.
double inverse_sixth_sum(std::span<const Vec3> offsets, double cutoff);

/// Simple-cubic partner sites within `layers` spacings of the origin.
std::vector<Vec3> cubic_lattice_offsets(double n_s, int layers);

struct PlacementSummary {
  double n_s = 0.0;
  double box_size_m = 0.0;
  double cutoff_m = 0.0;
  int realizations = 0;
  std::uint64_t partners = 0;
  double mean = 0.0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double lattice_coefficient = 0.0;
  double lattice_reference = 0.0;  // coefficient * n_s^2
  bool lattice_within_iqr = false;
};

/// Distribution of sum 1/r^6 seen by a probe spin when n_s * box^3 partners
/// are dropped uniformly into a periodic box (minimum-image distances,
/// partners closer than the cutoff skipped). Each realization draws from
/// its own substream.
PlacementSummary random_placement_sum(double n_s, const OracleConfig& config);

}  // namespace ffrate::oracle

#pragma once

#include <complex>

#include "ffrate/spin_core.hpp"

// Angular-averaged flip-flop coupling factor Xi for two identical effective
// spin-1/2 ions. All inputs are principal-frame quantities: g = (g_x, g_y,
// g_z) and the effective-field angles (Theta, Phi) from effective_field().
// Inter-ion direction angles (theta, phi) are lower case.
namespace ffrate::coupling {

struct AnisotropyParams {
  double sum = 0.0;     // S = g_x^2 + g_y^2
  double delta1 = 0.0;  // g_x^2 + g_y^2 - 2 g_z^2, longitudinal vs transverse
  double delta2 = 0.0;  // g_x^2 - g_y^2, within the transverse plane
};

AnisotropyParams anisotropy_params(double gx, double gy, double gz);
AnisotropyParams anisotropy_params(const Vec3& g);

/// (g_x cos(phi) + i g_y sin(phi)) e^{-i Phi}. Named pair_gamma to keep it
/// apart from the inhomogeneous linewidth.
std::complex<double> pair_gamma(const Vec3& g, double big_phi, double phi);

/// 3 <-+|(mu_i.u)(mu_j.u)|+-> / mu_B^2 for inter-ion direction (theta, phi).
double matrix_element_a(const Vec3& g, double big_theta, double big_phi, double theta, double phi);

/// <-+|mu_i.mu_j|+-> / mu_B^2, independent of the inter-ion direction.
double matrix_element_b(const Vec3& g, double big_theta, double big_phi);

/// Sphere average of A^2, closed form.
double mean_a_squared(const Vec3& g, double big_theta, double big_phi);

/// Xi = <A^2> - B^2. Production path.
double xi_analytic(const Vec3& g, double big_theta, double big_phi);
double xi_analytic(const Vec3& g, const EffectiveField& field);

/// Xi by adaptive Gauss-Kronrod quadrature of (A - B)^2 over the sphere.
/// Slow; kept as an independent check of the closed form.
double xi_quadrature(const Vec3& g, double big_theta, double big_phi, double rel_tol = 1e-12);

/// Field along the principal z axis: Xi = (g_x^4 + g_y^4 - g_x^2 g_y^2) / 20.
double xi_special_parallel(double gx, double gy);

/// Field in the principal xy plane with components (b_x, b_y).
/// Throws InvalidInput when the in-plane field vanishes.
double xi_special_perpendicular(double gz, double gx, double gy, double bx, double by);

/// 1/g_perp^2 = (b_x^2/g_y^2 + b_y^2/g_x^2)/|b|^2.
double perpendicular_g(double gx, double gy, double bx, double by);

}  // namespace ffrate::coupling

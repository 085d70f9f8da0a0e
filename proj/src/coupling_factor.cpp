#include "ffrate/coupling_factor.hpp"

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ffrate/constants.hpp"
#include "ffrate/errors.hpp"

namespace ffrate::coupling {

AnisotropyParams anisotropy_params(double gx, double gy, double gz) {
  const double x2 = gx * gx;
  const double y2 = gy * gy;
  const double z2 = gz * gz;
  return {x2 + y2, x2 + y2 - 2.0 * z2, x2 - y2};
}

AnisotropyParams anisotropy_params(const Vec3& g) { return anisotropy_params(g.x(), g.y(), g.z()); }

std::complex<double> pair_gamma(const Vec3& g, double big_phi, double phi) {
  return std::complex<double>(g.x() * std::cos(phi), g.y() * std::sin(phi)) *
         std::polar(1.0, -big_phi);
}

double matrix_element_a(const Vec3& g, double big_theta, double big_phi, double theta, double phi) {
  const std::complex<double> gam = pair_gamma(g, big_phi, phi);
  const double re = gam.real();
  const double im = gam.imag();
  const double st = std::sin(theta);
  const double ct = std::cos(theta);
  const double sT = std::sin(big_theta);
  const double cT = std::cos(big_theta);
  const double gz = g.z();
  return 0.75 * (st * st * cT * cT * re * re + gz * gz * ct * ct * sT * sT -
                 2.0 * gz * st * ct * sT * cT * re + st * st * im * im);
}

double matrix_element_b(const Vec3& g, double big_theta, double big_phi) {
  const AnisotropyParams p = anisotropy_params(g);
  const double s2 = std::sin(big_theta) * std::sin(big_theta);
  return 0.125 * (2.0 * p.sum - s2 * p.delta1 - s2 * std::cos(2.0 * big_phi) * p.delta2);
}

double mean_a_squared(const Vec3& g, double big_theta, double big_phi) {
  const AnisotropyParams p = anisotropy_params(g);
  const double s2 = std::sin(big_theta) * std::sin(big_theta);
  const double c2 = std::cos(big_theta) * std::cos(big_theta);
  const double cos2p = std::cos(2.0 * big_phi);
  const double sin2p = std::sin(2.0 * big_phi);
  const double first =
      2.0 / 3.0 * p.sum - 0.5 * s2 * p.delta1 + 0.5 * (c2 - 1.0 / 3.0) * cos2p * p.delta2;
  const double second = p.sum - cos2p * p.delta2;
  return 9.0 / 80.0 *
         (first * first + 2.0 / 9.0 * second * second +
          1.0 / 3.0 * c2 * sin2p * sin2p * p.delta2 * p.delta2);
}

double xi_analytic(const Vec3& g, double big_theta, double big_phi) {
  const double b = matrix_element_b(g, big_theta, big_phi);
  return mean_a_squared(g, big_theta, big_phi) - b * b;
}

double xi_analytic(const Vec3& g, const EffectiveField& field) {
  return xi_analytic(g, field.theta, field.phi);
}

double xi_quadrature(const Vec3& g, double big_theta, double big_phi, double rel_tol) {
  using boost::math::quadrature::gauss_kronrod;
  const double b = matrix_element_b(g, big_theta, big_phi);
  auto over_theta = [&](double phi) {
    auto f = [&](double theta) {
      const double d = matrix_element_a(g, big_theta, big_phi, theta, phi) - b;
      return d * d * std::sin(theta);
    };
    return gauss_kronrod<double, 31>::integrate(f, 0.0, constants::pi, 10, rel_tol);
  };
  const double total =
      gauss_kronrod<double, 31>::integrate(over_theta, 0.0, 2.0 * constants::pi, 10, rel_tol);
  return total / (4.0 * constants::pi);
}

double xi_special_parallel(double gx, double gy) {
  const double x2 = gx * gx;
  const double y2 = gy * gy;
  return (x2 * x2 + y2 * y2 - x2 * y2) / 20.0;
}

double perpendicular_g(double gx, double gy, double bx, double by) {
  const double b2 = bx * bx + by * by;
  if (!(b2 > 0.0)) throw InvalidInput("perpendicular g: in-plane field component is zero");
  const double inv = (bx * bx / (gy * gy) + by * by / (gx * gx)) / b2;
  return 1.0 / std::sqrt(inv);
}

double xi_special_perpendicular(double gz, double gx, double gy, double bx, double by) {
  const double gp = perpendicular_g(gx, gy, bx, by);
  const double z2 = gz * gz;
  const double p2 = gp * gp;
  return (z2 * z2 + p2 * p2 - z2 * p2) / 20.0;
}

}  // namespace ffrate::coupling

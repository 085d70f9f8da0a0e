#include <doctest.h>

#include <cmath>

#include "ffrate/constants.hpp"
#include "ffrate/coupling_factor.hpp"
#include "ffrate/errors.hpp"
#include "ffrate/lattice_sum.hpp"
#include "ffrate/mc_oracle.hpp"
#include "ffrate/rng.hpp"

using namespace ffrate;
using namespace ffrate::oracle;
using doctest::Approx;

namespace {

constexpr double pi = constants::pi;

Vec3 random_g(Rng& rng) {
  return {0.2 + 15 * rng.uniform(), 0.2 + 15 * rng.uniform(), 0.2 + 15 * rng.uniform()};
}

double angle_of(const Vec3& u, bool polar) {
  return polar ? std::acos(std::clamp(u.z(), -1.0, 1.0)) : std::atan2(u.y(), u.x());
}

}  // namespace

TEST_CASE("explicit element equals A - B") {
  Rng rng = Rng::substream(31, 0);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 g = random_g(rng);
    const double t = pi * rng.uniform(), p = 2 * pi * rng.uniform();
    const Vec3 u = sphere_point(rng.uniform(), rng.uniform());
    const auto brute = pair_element_bruteforce(g, t, p, u);
    const double closed = coupling::matrix_element_a(g, t, p, angle_of(u, true), angle_of(u, false)) -
                          coupling::matrix_element_b(g, t, p);
    const double scale = std::max(std::abs(closed), 1e-3 * g.squaredNorm());
    CHECK(std::abs(brute - closed) / scale < 1e-10);
    CHECK(std::abs(std::norm(brute) - closed * closed) <= 1e-10 * std::max(closed * closed, 1e-6));
  }
}

TEST_CASE("reverse element is the conjugate") {
  Rng rng = Rng::substream(32, 0);
  for (int i = 0; i < 100; ++i) {
    const Vec3 g = random_g(rng);
    const double t = pi * rng.uniform(), p = 2 * pi * rng.uniform();
    const Vec3 u = sphere_point(rng.uniform(), rng.uniform());
    const auto a = pair_element_bruteforce(g, t, p, u);
    const auto b = pair_element_reverse(g, t, p, u);
    CHECK(std::abs(a - std::conj(b)) < 1e-12 * (1 + std::abs(a)));
  }
}

TEST_CASE("isotropic element along the field") {
  // g = 2: A - B = -(g^2/4)(3 cos^2 - 1) for u at angle theta from the field.
  const Vec3 g(2, 2, 2);
  for (double th : {0.0, 0.3, 1.0, pi / 2}) {
    const Vec3 u(std::sin(th), 0, std::cos(th));
    const auto e = pair_element_bruteforce(g, 0.0, 0.0, u);
    CHECK(e.real() == Approx(-(3 * std::cos(th) * std::cos(th) - 1)).epsilon(1e-12));
    CHECK(std::abs(e.imag()) < 1e-14);
  }
}

TEST_CASE("explicit A equals the closed form") {
  Rng rng = Rng::substream(33, 0);
  for (int i = 0; i < 200; ++i) {
    const Vec3 g = random_g(rng);
    const double t = pi * rng.uniform(), p = 2 * pi * rng.uniform();
    const Vec3 u = sphere_point(rng.uniform(), rng.uniform());
    const double closed = coupling::matrix_element_a(g, t, p, angle_of(u, true), angle_of(u, false));
    CHECK(matrix_element_a_bruteforce(g, t, p, u) ==
          Approx(closed).epsilon(1e-10).scale(g.squaredNorm()));
  }
}

TEST_CASE("sphere points are uniform") {
  Rng rng = Rng::substream(34, 0);
  Vec3 mean = Vec3::Zero();
  double zz = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const Vec3 u = sphere_point(rng.uniform(), rng.uniform());
    CHECK(u.norm() == Approx(1.0).epsilon(1e-14));
    mean += u;
    zz += u.z() * u.z();
  }
  CHECK((mean / n).norm() < 5.0 / std::sqrt(n));
  CHECK(zz / n == Approx(1.0 / 3.0).epsilon(0.01));
}

TEST_CASE("Monte-Carlo Xi") {
  OracleConfig cfg;
  cfg.samples = 1'000'000;
  const OracleReport iso = xi_monte_carlo(Vec3(2, 2, 2), 0.3, 1.2, cfg);
  CHECK(iso.analytic == Approx(0.8).epsilon(1e-12));
  CHECK(iso.pass);
  CHECK(iso.standard_error > 0.0);
  const OracleReport ln = xi_monte_carlo(Vec3(2.15, 2.15, 15.14), pi / 2, 0.0, cfg);
  CHECK(ln.analytic == Approx(2575.17).epsilon(1e-5));
  CHECK(std::abs(ln.z_score) < 3.0);
}

TEST_CASE("Monte-Carlo determinism") {
  OracleConfig cfg;
  cfg.samples = 100'000;
  cfg.seed = 77;
  const Vec3 g(0.56, 1.8, 14.65);
  const OracleReport a = xi_monte_carlo(g, 0.4, 0.9, cfg);
  const OracleReport b = xi_monte_carlo(g, 0.4, 0.9, cfg);
  CHECK(a.estimate == b.estimate);
  CHECK(a.standard_error == b.standard_error);
  cfg.seed = 78;
  CHECK(xi_monte_carlo(g, 0.4, 0.9, cfg).estimate != a.estimate);
}

TEST_CASE("standard error falls as one over root N") {
  OracleConfig cfg;
  const Vec3 g(1.0, 3.0, 8.0);
  cfg.samples = 250'000;
  const double se1 = xi_monte_carlo(g, 1.0, 0.5, cfg).standard_error;
  cfg.samples = 1'000'000;
  const double se4 = xi_monte_carlo(g, 1.0, 0.5, cfg).standard_error;
  CHECK(se4 / se1 == Approx(0.5).epsilon(0.2));
}

TEST_CASE("mean of A converges to B") {
  OracleConfig cfg;
  cfg.samples = 400'000;
  const OracleReport r = mean_a_monte_carlo(Vec3(0.9, 2.4, 7.0), 0.8, 2.0, cfg);
  CHECK(r.pass);
}

TEST_CASE("config validation") {
  OracleConfig cfg;
  cfg.samples = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidInput);
  cfg = {};
  cfg.realizations = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidInput);
}

TEST_CASE("lattice arrangement through the distance pipeline") {
  const double n_s = 3e22;
  const auto offsets = cubic_lattice_offsets(n_s, 10);
  const double a = std::cbrt(1.0 / n_s);
  const double sum = inverse_sixth_sum(offsets, 0.5 * a);
  CHECK(sum == Approx(lattice_sum(10).coefficient * n_s * n_s).epsilon(1e-12));
}

TEST_CASE("random placement") {
  OracleConfig cfg;
  cfg.realizations = 40;
  cfg.seed = 5;
  const double n1 = 1e22;
  const PlacementSummary s1 = random_placement_sum(n1, cfg);
  CHECK(s1.partners >= 1000);
  CHECK(s1.q1 <= s1.median);
  CHECK(s1.median <= s1.q3);
  CHECK(s1.lattice_reference == Approx(lattice_sum(10).coefficient * n1 * n1).epsilon(1e-14));
  // Default box and cutoff scale with the spacing, so the statistics go as n_s^2.
  const double n2 = 8e22;
  const PlacementSummary s2 = random_placement_sum(n2, cfg);
  CHECK(s2.median / (n2 * n2) == Approx(s1.median / (n1 * n1)).epsilon(1e-9));
  CHECK(random_placement_sum(n1, cfg).median == s1.median);

  OracleConfig small = cfg;
  small.box_size_m = 2.0 * std::cbrt(1.0 / n1);
  CHECK_THROWS_AS(random_placement_sum(n1, small), InvalidInput);
}

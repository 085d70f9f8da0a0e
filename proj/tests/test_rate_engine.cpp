#include <doctest.h>

#include <cmath>

#include "ffrate/constants.hpp"
#include "ffrate/coupling_factor.hpp"
#include "ffrate/errors.hpp"
#include "ffrate/rate_engine.hpp"

using namespace ffrate;
using doctest::Approx;

namespace {

RateEngine engine(const char* name) { return RateEngine(builtin_registry().get(name)); }

RateQuery query(const char* name, double phi, double theta) {
  RateQuery q;
  q.material = name;
  q.phi_deg = phi;
  q.theta_deg = theta;
  return q;
}

}  // namespace

TEST_CASE("rate formula against a hand evaluation") {
  // R = 2 pi / hbar^2 * (mu0/4pi n mu_B^2)^2 * c * xi / Gamma
  const double hbar = 1.054571817e-34, mub = 9.2740100783e-24;
  const double n = 7.35e22, c = 8.4, xi = 1.07, gamma = 2 * constants::pi * 5e6;
  const double expected = 2 * constants::pi / (hbar * hbar) * std::pow(1.25663706212e-6 / (4 * constants::pi) * n * mub * mub, 2) * c * xi / gamma;
  CHECK(flipflop_rate(xi, n, c, gamma) == Approx(expected).epsilon(1e-9));
  CHECK(gamma_rate_from_linewidth(5.0) == Approx(gamma).epsilon(1e-15));
}

TEST_CASE("Er:LiNbO3 lifetimes") {
  const RateEngine e = engine("er_linbo3");
  const RateResult along_c = e.rate(query("er_linbo3", 0, 0));
  const RateResult across = e.rate(query("er_linbo3", 0, 90));
  REQUIRE(along_c.t_ff);
  REQUIRE(across.t_ff);
  CHECK(*along_c.t_ff == Approx(15.8e-3).epsilon(0.15));
  CHECK(*along_c.t_ff / *across.t_ff == Approx(2412).epsilon(0.05));
  CHECK(along_c.xi == Approx(std::pow(2.15, 4) / 20).epsilon(1e-12));
  CHECK(along_c.g_eff == Approx(15.14).epsilon(1e-12));
  CHECK(along_c.warnings.empty());
}

TEST_CASE("rate scales with concentration squared and inversely with linewidth") {
  const RateEngine e = engine("er_yso_site1");
  RateQuery q = query("er_yso_site1", 40, 90);
  const double r10 = e.rate(q).rate;
  q.concentration_ppm = 50;
  CHECK(e.rate(q).rate / r10 == Approx(25.0).epsilon(1e-14));
  q.concentration_ppm = 10;
  q.gamma_mhz = 2.5;
  CHECK(e.rate(q).rate / r10 == Approx(2.0).epsilon(1e-14));
}

TEST_CASE("linewidth band brackets the central lifetime") {
  const RateEngine e = engine("er_yso_site1");
  RateQuery q = query("er_yso_site1", 100, 90);
  q.gamma_range = GammaRange{2.3, 6.3};
  const RateResult r = e.rate(q);
  REQUIRE(r.t_low);
  REQUIRE(r.t_high);
  CHECK(*r.t_low < *r.t_ff);
  CHECK(*r.t_ff < *r.t_high);
  CHECK(*r.t_high / *r.t_low == Approx(6.3 / 2.3).epsilon(1e-14));
}

TEST_CASE("zero concentration gives an unbounded lifetime") {
  const RateEngine e = engine("er_cawo4");
  RateQuery q = query("er_cawo4", 0, 30);
  q.concentration_ppm = 0.0;
  const RateResult r = e.rate(q);
  CHECK(r.rate == 0.0);
  CHECK_FALSE(r.t_ff.has_value());
}

TEST_CASE("strong coupling is flagged") {
  const RateEngine e = engine("er_cawo4");
  RateQuery q = query("er_cawo4", 0, 90);
  q.concentration_ppm = 1e5;
  q.field_t = 1e-5;
  CHECK_FALSE(e.rate(q).warnings.empty());
}

TEST_CASE("invalid queries") {
  const RateEngine e = engine("er_cawo4");
  RateQuery q = query("er_cawo4", 0, 0);
  q.gamma_mhz = 0;
  CHECK_THROWS_AS(e.rate(q), InvalidInput);
  q = query("er_cawo4", 0, 0);
  q.field_t = 0;
  CHECK_THROWS_AS(e.rate(q), InvalidInput);
  q = query("er_cawo4", 0, 0);
  q.concentration_ppm = -1;
  CHECK_THROWS_AS(e.rate(q), InvalidInput);
  q = query("er_cawo4", 0, 0);
  q.gamma_range = GammaRange{3, 2};
  CHECK_THROWS_AS(e.rate(q), InvalidInput);
  CHECK_THROWS_AS(RateEngine(builtin_registry().get("er_cawo4"), 0), InvalidInput);
}

TEST_CASE("sweeps") {
  const RateEngine e = engine("er_cawo4");
  const auto rows = e.angular_sweep(SweepPlane::ac, 0, 180, 1, 10, 5);
  REQUIRE(rows.size() == 181);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].angle_deg == double(i));
    const double xi = e.xi(plane_direction(SweepPlane::ac, rows[i].angle_deg));
    CHECK(rows[i].xi == xi);
  }
  CHECK(*rows[10].t_ff == Approx(*rows[170].t_ff).epsilon(1e-12));
  CHECK_THROWS_AS(e.angular_sweep(SweepPlane::d1d2, 0, 180, 1, 10, 5), InvalidInput);
  CHECK_THROWS_AS(e.angular_sweep(SweepPlane::ac, 0, 180, 0, 10, 5), InvalidInput);
  CHECK(inclusive_grid(0, 1, 0.1).size() == 11);
  CHECK(inclusive_grid(0, 1, 0.1).back() == 1.0);
}

TEST_CASE("Er:CaWO4 best orientation") {
  const RateEngine e = engine("er_cawo4");
  const BestOrientation best = e.best_orientation();
  CHECK(best.theta_deg == Approx(8.68).epsilon(0.01));
  const double xi_max = e.xi(plane_direction(SweepPlane::ac, 90));
  CHECK(xi_max / best.xi == Approx(1.335).epsilon(0.05));
  // Independent check: a 0.01 deg scan finds nothing lower.
  for (double a = 0; a <= 180; a += 0.01) {
    CHECK(e.xi(plane_direction(SweepPlane::ac, a)) >= best.xi * (1 - 1e-12));
  }
}

TEST_CASE("whole-sphere search is no worse than the plane") {
  for (const char* name : {"er_yso_site1", "nd_yso", "er_linbo3"}) {
    const RateEngine e = engine(name);
    CHECK(e.best_orientation_sphere().xi <= e.best_orientation().xi * (1 + 1e-12));
  }
}

TEST_CASE("lifetime map") {
  const RateEngine e = engine("er_yso_site1");
  const LifetimeMap m = e.lifetime_map(37, 19, 10, 5);
  CHECK(m.phi_deg.size() == 37);
  CHECK(m.theta_deg.size() == 19);
  CHECK(m.phi_deg.back() == 360.0);
  CHECK(m.theta_deg.back() == 180.0);
  CHECK(m.t_ff.size() == 37 * 19);
  RateQuery q = query("er_yso_site1", m.phi_deg[5], m.theta_deg[7]);
  CHECK(*m.at(7, 5) == Approx(*e.rate(q).t_ff).epsilon(1e-14));
  CHECK_THROWS_AS(e.lifetime_map(1, 19, 10, 5), InvalidInput);
}

TEST_CASE("concentration scan and threshold") {
  const RateEngine e = engine("er_linbo3");
  const auto rows = e.concentration_scan(log_spaced(0.1, 100, 13), 5);
  REQUIRE(rows.size() == 13);
  CHECK(rows.front().concentration_ppm == Approx(0.1));
  CHECK(rows.back().concentration_ppm == Approx(100));
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(*rows[i].t_ff < *rows[i - 1].t_ff);
  const double c = e.concentration_for_lifetime(10.0, 5);
  CHECK(*e.concentration_scan({c}, 5)[0].t_ff == Approx(10.0).epsilon(1e-10));
}

TEST_CASE("zeeman range over the sweep plane") {
  const RateEngine e = engine("er_linbo3");
  const FrequencyRange r = e.zeeman_range(1e-3, SweepPlane::ac);
  CHECK(r.min_hz == Approx(30.1e6).epsilon(0.01));
  CHECK(r.max_hz == Approx(212e6).epsilon(0.01));
}

TEST_CASE("plane names") {
  CHECK(sweep_plane_from_string("d1d2") == SweepPlane::d1d2);
  CHECK(to_string(SweepPlane::ac) == "ac");
  CHECK_THROWS_AS(sweep_plane_from_string("xy"), InvalidInput);
}

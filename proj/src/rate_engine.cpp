#include "ffrate/rate_engine.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "ffrate/constants.hpp"
#include "ffrate/coupling_factor.hpp"
#include "ffrate/errors.hpp"
#include "parallel.hpp"

namespace ffrate {

double gamma_rate_from_linewidth(double linewidth_mhz) {
  return 2.0 * constants::pi * linewidth_mhz * 1e6;
}

double flipflop_rate(double xi, double n_s, double lattice_coefficient, double gamma_rate) {
  const double mb2 = constants::bohr_magneton * constants::bohr_magneton;
  const double coupling = constants::mu0_over_4pi * n_s * mb2;
  return 2.0 * constants::pi / constants::hbar * coupling * coupling * lattice_coefficient * xi /
         (constants::hbar * gamma_rate);
}

std::string_view to_string(SweepPlane plane) { return plane == SweepPlane::d1d2 ? "d1d2" : "ac"; }

SweepPlane sweep_plane_from_string(std::string_view text) {
  if (text == "d1d2") return SweepPlane::d1d2;
  if (text == "ac") return SweepPlane::ac;
  throw InvalidInput("unknown sweep plane '" + std::string(text) + "' (expected d1d2 or ac)");
}

SweepPlane default_plane(SweepFrame frame) {
  return frame == SweepFrame::d1d2b ? SweepPlane::d1d2 : SweepPlane::ac;
}

Vec3 plane_direction(SweepPlane plane, double angle_deg) {
  return plane == SweepPlane::d1d2 ? direction_from_angles(angle_deg, 90.0)
                                   : direction_from_angles(0.0, angle_deg);
}

std::vector<double> inclusive_grid(double start, double stop, double step) {
  if (!(step > 0.0)) throw InvalidInput("grid: step must be > 0");
  if (!(stop >= start)) throw InvalidInput("grid: stop must be >= start");
  const double span = (stop - start) / step;
  auto n = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) grid[i] = start + static_cast<double>(i) * step;
  if (std::abs(grid.back() - stop) > 1e-9 * std::max(1.0, std::abs(stop))) {
    grid.push_back(stop);
  } else {
    grid.back() = stop;
  }
  return grid;
}

std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0 && hi >= lo)) throw InvalidInput("log grid: need 0 < lo <= hi");
  if (n == 0) throw InvalidInput("log grid: need at least one point");
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

RateEngine::RateEngine(Material material, int layers)
    : material_(std::move(material)),
      frame_(diagonalize_g(material_.g_tensor)),
      layers_(layers),
      lattice_coefficient_(lattice_sum(layers).coefficient) {}

double RateEngine::xi(const Vec3& direction) const {
  const EffectiveField field = effective_field(frame_, direction);
  return coupling::xi_analytic(frame_.values, field);
}

double RateEngine::n_s(double concentration_ppm) const {
  return spin_density(concentration_ppm, material_.cation_density, material_.isotopic_fraction).n_s;
}

std::optional<double> RateEngine::lifetime(double xi, double concentration_ppm,
                                           double gamma_mhz) const {
  if (!(gamma_mhz > 0.0)) throw InvalidInput("linewidth must be > 0");
  const double r = flipflop_rate(xi, n_s(concentration_ppm), lattice_coefficient_,
                                 gamma_rate_from_linewidth(gamma_mhz));
  if (!(r > 0.0)) return std::nullopt;
  return 1.0 / r;
}

RateResult RateEngine::rate(const RateQuery& query) const {
  FieldSpec field{query.field_t, query.phi_deg, query.theta_deg};
  field.validate();
  if (!(field.magnitude_t > 0.0)) throw InvalidInput("field magnitude must be > 0");
  if (!(query.gamma_mhz > 0.0)) throw InvalidInput("linewidth must be > 0");
  if (!(query.concentration_ppm >= 0.0)) throw InvalidInput("concentration must be >= 0");
  if (query.gamma_range && (!(query.gamma_range->lo_mhz > 0.0) ||
                            query.gamma_range->lo_mhz > query.gamma_range->hi_mhz)) {
    throw InvalidInput("linewidth range must satisfy 0 < lo <= hi");
  }

  RateResult out;
  out.query = query;
  out.lattice_coefficient = lattice_coefficient_;
  const EffectiveField eff = effective_field(frame_, field.direction());
  out.g_eff = eff.g_eff;
  out.zeeman_hz = zeeman_eigenpair(eff, field.magnitude_t).frequency_hz;
  out.xi = coupling::xi_analytic(frame_.values, eff);
  out.n_s = n_s(query.concentration_ppm);
  out.rate = flipflop_rate(out.xi, out.n_s, lattice_coefficient_,
                           gamma_rate_from_linewidth(query.gamma_mhz));
  if (out.rate > 0.0) out.t_ff = 1.0 / out.rate;
  if (query.gamma_range) {
    out.t_low = lifetime(out.xi, query.concentration_ppm, query.gamma_range->lo_mhz);
    out.t_high = lifetime(out.xi, query.concentration_ppm, query.gamma_range->hi_mhz);
  }
  if (out.n_s > 0.0) {
    out.coupling_hz = pair_coupling_scale(out.n_s, out.g_eff);
    if (out.coupling_hz >= 0.1 * out.zeeman_hz) {
      std::ostringstream msg;
      msg << "dipolar coupling scale " << out.coupling_hz << " Hz is not small against the Zeeman "
          << "splitting " << out.zeeman_hz << " Hz; perturbative flip-flop treatment is strained";
      out.warnings.push_back(msg.str());
    }
  }
  return out;
}

void RateEngine::check_plane(SweepPlane plane) const {
  if (plane != default_plane(material_.sweep_frame)) {
    throw InvalidInput("plane '" + std::string(to_string(plane)) + "' does not belong to the " +
                       std::string(to_string(material_.sweep_frame)) + " frame of material '" +
                       material_.name + "'");
  }
}

std::vector<SweepRow> RateEngine::angular_sweep(SweepPlane plane, double start_deg,
                                                double stop_deg, double step_deg,
                                                double concentration_ppm, double gamma_mhz,
                                                std::optional<GammaRange> range) const {
  check_plane(plane);
  const std::vector<double> grid = inclusive_grid(start_deg, stop_deg, step_deg);
  std::vector<SweepRow> rows(grid.size());
  detail::parallel_for(grid.size(), [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.angle_deg = grid[i];
    row.xi = xi(plane_direction(plane, grid[i]));
    row.t_ff = lifetime(row.xi, concentration_ppm, gamma_mhz);
    if (range) {
      row.t_low = lifetime(row.xi, concentration_ppm, range->lo_mhz);
      row.t_high = lifetime(row.xi, concentration_ppm, range->hi_mhz);
    }
  });
  return rows;
}

LifetimeMap RateEngine::lifetime_map(std::size_t n_phi, std::size_t n_theta,
                                     double concentration_ppm, double gamma_mhz) const {
  if (n_phi < 2 || n_theta < 2) throw InvalidInput("map: grid must be at least 2x2");
  LifetimeMap map;
  map.phi_deg.resize(n_phi);
  map.theta_deg.resize(n_theta);
  for (std::size_t j = 0; j < n_phi; ++j) {
    map.phi_deg[j] = 360.0 * static_cast<double>(j) / static_cast<double>(n_phi - 1);
  }
  for (std::size_t i = 0; i < n_theta; ++i) {
    map.theta_deg[i] = 180.0 * static_cast<double>(i) / static_cast<double>(n_theta - 1);
  }
  map.xi.resize(n_phi * n_theta);
  map.t_ff.resize(n_phi * n_theta);
  detail::parallel_for(n_phi * n_theta, [&](std::size_t k) {
    const std::size_t i = k / n_phi;
    const std::size_t j = k % n_phi;
    map.xi[k] = xi(direction_from_angles(map.phi_deg[j], map.theta_deg[i]));
    map.t_ff[k] = lifetime(map.xi[k], concentration_ppm, gamma_mhz);
  });
  return map;
}

namespace {

// Minimizes f on [a, b]; f is assumed unimodal there.
template <class F>
double golden_section(F&& f, double a, double b, double tol = 1e-9) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

BestOrientation RateEngine::best_orientation() const {
  const SweepPlane plane = default_plane(material_.sweep_frame);
  auto f = [&](double angle) { return xi(plane_direction(plane, angle)); };
  double best_angle = 0.0;
  double best_xi = std::numeric_limits<double>::infinity();
  for (int a = 0; a <= 180; ++a) {
    const double v = f(a);
    // Mirror-image angles give equal xi up to rounding; keep the first.
    if (v < best_xi * (1.0 - 1e-9)) {
      best_xi = v;
      best_angle = a;
    }
  }
  double refined = golden_section(f, std::max(0.0, best_angle - 1.0), std::min(180.0, best_angle + 1.0));
  double refined_xi = f(refined);
  if (!(refined_xi < best_xi)) {
    refined = best_angle;
    refined_xi = best_xi;
  }
  BestOrientation out;
  out.xi = refined_xi;
  if (plane == SweepPlane::d1d2) {
    out.phi_deg = refined;
    out.theta_deg = 90.0;
  } else {
    out.phi_deg = 0.0;
    out.theta_deg = refined;
  }
  return out;
}

BestOrientation RateEngine::best_orientation_sphere() const {
  auto f = [&](double phi, double theta) { return xi(direction_from_angles(phi, theta)); };
  BestOrientation best{0.0, 0.0, std::numeric_limits<double>::infinity()};
  // xi(-b) == xi(b): the upper hemisphere suffices.
  for (int t = 0; t <= 90; ++t) {
    for (int p = 0; p < 360; ++p) {
      const double v = f(p, t);
      if (v < best.xi * (1.0 - 1e-9)) best = {static_cast<double>(p), static_cast<double>(t), v};
    }
  }
  BestOrientation cur = best;
  for (int pass = 0; pass < 4; ++pass) {
    const double phi = golden_section([&](double p) { return f(p, cur.theta_deg); },
                                      cur.phi_deg - 1.0, cur.phi_deg + 1.0);
    if (const double v = f(phi, cur.theta_deg); v < cur.xi) cur = {phi, cur.theta_deg, v};
    const double theta = golden_section([&](double t) { return f(cur.phi_deg, t); },
                                        std::max(0.0, cur.theta_deg - 1.0),
                                        std::min(180.0, cur.theta_deg + 1.0));
    if (const double v = f(cur.phi_deg, theta); v < cur.xi) cur = {cur.phi_deg, theta, v};
  }
  cur.phi_deg = std::fmod(cur.phi_deg + 360.0, 360.0);
  return cur;
}

std::vector<ScanRow> RateEngine::concentration_scan(const std::vector<double>& concentrations_ppm,
                                                    double gamma_mhz,
                                                    std::optional<GammaRange> range) const {
  for (double c : concentrations_ppm) {
    if (!(c > 0.0)) throw InvalidInput("concentration scan: concentrations must be > 0");
  }
  const BestOrientation best = best_orientation();
  std::vector<ScanRow> rows(concentrations_ppm.size());
  detail::parallel_for(rows.size(), [&](std::size_t i) {
    ScanRow& row = rows[i];
    row.concentration_ppm = concentrations_ppm[i];
    row.t_ff = lifetime(best.xi, row.concentration_ppm, gamma_mhz);
    if (range) {
      row.t_low = lifetime(best.xi, row.concentration_ppm, range->lo_mhz);
      row.t_high = lifetime(best.xi, row.concentration_ppm, range->hi_mhz);
    }
  });
  return rows;
}

double RateEngine::concentration_for_lifetime(double target_s, double gamma_mhz) const {
  if (!(target_s > 0.0)) throw InvalidInput("target lifetime must be > 0");
  const double reference_ppm = 1.0;
  const auto t = lifetime(best_orientation().xi, reference_ppm, gamma_mhz);
  if (!t) throw InvalidInput("lifetime is unbounded at every concentration");
  return reference_ppm * std::sqrt(*t / target_s);
}

FrequencyRange RateEngine::zeeman_range(double field_t, std::optional<SweepPlane> plane) const {
  const Mat3 g = material_.g_tensor.matrix();
  if (!plane) return ffrate::zeeman_range(g, field_t, OrientationSet::sphere());
  check_plane(*plane);
  const Vec3 u = plane_direction(*plane, 0.0);
  const Vec3 v = plane_direction(*plane, 90.0);
  return ffrate::zeeman_range(g, field_t, OrientationSet::in_plane(u, v));
}

}  // namespace ffrate

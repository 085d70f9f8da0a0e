#include "ffrate/mc_oracle.hpp"

#include <algorithm>
#include <cmath>

#include "ffrate/constants.hpp"
#include "ffrate/coupling_factor.hpp"
#include "ffrate/errors.hpp"
#include "ffrate/lattice_sum.hpp"
#include "ffrate/rng.hpp"
#include "parallel.hpp"

namespace ffrate::oracle {

namespace {

using Mat4c = Eigen::Matrix4cd;
using Vec4c = Eigen::Vector4cd;
using Vec2c = Eigen::Vector2cd;

constexpr std::uint64_t kChunk = 1 << 16;

Mat4c kron(const Mat2c& a, const Mat2c& b) {
  Mat4c out;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  }
  return out;
}

Vec4c kron(const Vec2c& a, const Vec2c& b) {
  Vec4c out;
  out << a(0) * b(0), a(0) * b(1), a(1) * b(0), a(1) * b(1);
  return out;
}

// Two-spin operator pieces and product states for one (g, Theta, Phi).
struct PairSystem {
  Vec3 g;
  Mat4c dot_term;  // mu_i . mu_j / mu_B^2
  Vec4c plus_minus;
  Vec4c minus_plus;

  PairSystem(const Vec3& g_in, double big_theta, double big_phi) : g(g_in) {
    const auto& s = spin_half_operators();
    dot_term.setZero();
    for (int k = 0; k < 3; ++k) dot_term += g(k) * g(k) * kron(s[k], s[k]);
    EffectiveField field;
    field.theta = big_theta;
    field.phi = big_phi;
    field.g_eff = 1.0;
    const ZeemanEigenpair pair = zeeman_eigenpair(field, 1.0);
    const Vec2c plus(pair.plus[0], pair.plus[1]);
    const Vec2c minus(pair.minus[0], pair.minus[1]);
    plus_minus = kron(plus, minus);
    minus_plus = kron(minus, plus);
  }

  // (mu . u) / mu_B for one spin.
  [[nodiscard]] Mat2c projected(const Vec3& u) const {
    const auto& s = spin_half_operators();
    return u.x() * g.x() * s[0] + u.y() * g.y() * s[1] + u.z() * g.z() * s[2];
  }

  [[nodiscard]] Mat4c operator_for(const Vec3& u) const {
    const Mat2c m = projected(u);
    return 3.0 * kron(m, m) - dot_term;
  }
};

struct Moments {
  double count = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    count += 1.0;
    const double d = x - mean;
    mean += d / count;
    m2 += d * (x - mean);
  }

  void merge(const Moments& o) {
    if (o.count == 0.0) return;
    const double n = count + o.count;
    const double d = o.mean - mean;
    mean += d * o.count / n;
    m2 += o.m2 + d * d * count * o.count / n;
    count = n;
  }
};

// Sample mean of f(u) over uniform directions, chunked into substreams and
// merged in chunk order.
template <class F>
Moments sphere_average(const OracleConfig& config, F&& f) {
  const std::uint64_t chunks = (config.samples + kChunk - 1) / kChunk;
  std::vector<Moments> parts(chunks);
  detail::parallel_for(chunks, [&](std::size_t c) {
    Rng rng = Rng::substream(config.seed, c);
    const std::uint64_t begin = c * kChunk;
    const std::uint64_t end = std::min(config.samples, begin + kChunk);
    for (std::uint64_t i = begin; i < end; ++i) {
      const double u1 = rng.uniform();
      const double u2 = rng.uniform();
      parts[c].add(f(sphere_point(u1, u2)));
    }
  });
  Moments total;
  for (const auto& p : parts) total.merge(p);
  return total;
}

OracleReport make_report(const Moments& m, double analytic, const OracleConfig& config) {
  OracleReport r;
  r.samples = config.samples;
  r.sigma_level = config.sigma_level;
  r.estimate = m.mean;
  r.analytic = analytic;
  r.standard_error = m.count > 1.0 ? std::sqrt(m.m2 / (m.count - 1.0) / m.count) : 0.0;
  const double diff = r.estimate - analytic;
  if (r.standard_error > 0.0) {
    r.z_score = diff / r.standard_error;
  } else {
    r.z_score = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
  }
  r.pass = std::abs(r.z_score) < config.sigma_level;
  return r;
}

double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

void OracleConfig::validate() const {
  if (samples < 1) throw InvalidInput("oracle: samples must be >= 1");
  if (!(sigma_level > 0.0)) throw InvalidInput("oracle: sigma level must be > 0");
  if (realizations < 1) throw InvalidInput("oracle: realizations must be >= 1");
  if (box_size_m < 0.0 || cutoff_m < 0.0) throw InvalidInput("oracle: negative box or cutoff");
  if (layers < 1) throw InvalidInput("oracle: layers must be >= 1");
}

std::complex<double> pair_element_bruteforce(const Vec3& g, double big_theta, double big_phi,
                                             const Vec3& u) {
  const PairSystem sys(g, big_theta, big_phi);
  return sys.plus_minus.dot(sys.operator_for(u) * sys.minus_plus);
}

std::complex<double> pair_element_reverse(const Vec3& g, double big_theta, double big_phi,
                                          const Vec3& u) {
  const PairSystem sys(g, big_theta, big_phi);
  return sys.minus_plus.dot(sys.operator_for(u) * sys.plus_minus);
}

double matrix_element_a_bruteforce(const Vec3& g, double big_theta, double big_phi, const Vec3& u) {
  const PairSystem sys(g, big_theta, big_phi);
  const Mat2c m = sys.projected(u);
  return (3.0 * sys.minus_plus.dot(kron(m, m) * sys.plus_minus)).real();
}

Vec3 sphere_point(double u1, double u2) {
  const double cos_t = 1.0 - 2.0 * u1;
  const double sin_t = std::sqrt(std::max(0.0, 1.0 - cos_t * cos_t));
  const double phi = 2.0 * constants::pi * u2;
  return {sin_t * std::cos(phi), sin_t * std::sin(phi), cos_t};
}

OracleReport xi_monte_carlo(const Vec3& g, double big_theta, double big_phi,
                            const OracleConfig& config) {
  config.validate();
  const PairSystem sys(g, big_theta, big_phi);
  const Moments m = sphere_average(config, [&](const Vec3& u) {
    return std::norm(sys.plus_minus.dot(sys.operator_for(u) * sys.minus_plus));
  });
  return make_report(m, coupling::xi_analytic(g, big_theta, big_phi), config);
}

OracleReport mean_a_monte_carlo(const Vec3& g, double big_theta, double big_phi,
                                const OracleConfig& config) {
  config.validate();
  const PairSystem sys(g, big_theta, big_phi);
  const Moments m = sphere_average(config, [&](const Vec3& u) {
    const Mat2c p = sys.projected(u);
    return (3.0 * sys.minus_plus.dot(kron(p, p) * sys.plus_minus)).real();
  });
  return make_report(m, coupling::matrix_element_b(g, big_theta, big_phi), config);
}

double inverse_sixth_sum(std::span<const Vec3> offsets, double cutoff) {
  const double cut2 = cutoff * cutoff;
  double total = 0.0;
  for (const Vec3& r : offsets) {
    const double r2 = r.squaredNorm();
    if (r2 < cut2 || r2 == 0.0) continue;
    total += 1.0 / (r2 * r2 * r2);
  }
  return total;
}

std::vector<Vec3> cubic_lattice_offsets(double n_s, int layers) {
  if (!(n_s > 0.0)) throw InvalidInput("lattice offsets: n_s must be > 0");
  if (layers < 1) throw InvalidInput("lattice offsets: layers must be >= 1");
  const double a = std::cbrt(1.0 / n_s);
  const int s_max = layers * layers;
  std::vector<Vec3> out;
  for (int m = -layers; m <= layers; ++m) {
    for (int n = -layers; n <= layers; ++n) {
      for (int p = -layers; p <= layers; ++p) {
        const int s = m * m + n * n + p * p;
        if (s >= 1 && s <= s_max) out.emplace_back(m * a, n * a, p * a);
      }
    }
  }
  // Shell order, so the sum accumulates like the lattice enumeration.
  std::stable_sort(out.begin(), out.end(),
                   [](const Vec3& x, const Vec3& y) { return x.squaredNorm() < y.squaredNorm(); });
  return out;
}

PlacementSummary random_placement_sum(double n_s, const OracleConfig& config) {
  config.validate();
  if (!(n_s > 0.0)) throw InvalidInput("placement: n_s must be > 0");
  const double spacing = std::cbrt(1.0 / n_s);
  PlacementSummary out;
  out.n_s = n_s;
  out.box_size_m = config.box_size_m > 0.0 ? config.box_size_m : 12.0 * spacing;
  out.cutoff_m = config.cutoff_m > 0.0 ? config.cutoff_m : 0.05 * spacing;
  out.realizations = config.realizations;
  const double expected = n_s * std::pow(out.box_size_m, 3);
  if (expected < 1000.0) {
    throw InvalidInput("placement: box holds only " + std::to_string(expected) +
                       " partners; need at least 1000");
  }
  out.partners = static_cast<std::uint64_t>(std::llround(expected));
  const double box = out.box_size_m;

  std::vector<double> sums(static_cast<std::size_t>(config.realizations));
  detail::parallel_for(sums.size(), [&](std::size_t r) {
    Rng rng = Rng::substream(config.seed, r);
    std::vector<Vec3> offsets(out.partners);
    for (auto& p : offsets) {
      // Probe at the origin; coordinates in [-box/2, box/2) are already the
      // minimum images.
      const double x = (rng.uniform() - 0.5) * box;
      const double y = (rng.uniform() - 0.5) * box;
      const double z = (rng.uniform() - 0.5) * box;
      p = {x, y, z};
    }
    sums[r] = inverse_sixth_sum(offsets, out.cutoff_m);
  });

  double total = 0.0;
  for (double s : sums) total += s;
  out.mean = total / static_cast<double>(sums.size());
  std::vector<double> sorted = sums;
  std::sort(sorted.begin(), sorted.end());
  out.median = quantile(sorted, 0.5);
  out.q1 = quantile(sorted, 0.25);
  out.q3 = quantile(sorted, 0.75);
  out.lattice_coefficient = lattice_sum(config.layers).coefficient;
  out.lattice_reference = out.lattice_coefficient * n_s * n_s;
  out.lattice_within_iqr = out.lattice_reference >= out.q1 && out.lattice_reference <= out.q3;
  return out;
}

}  // namespace ffrate::oracle

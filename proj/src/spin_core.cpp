#include "ffrate/spin_core.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <string>

#include "ffrate/constants.hpp"
#include "ffrate/errors.hpp"

namespace ffrate {

namespace {

using constants::deg;

Mat3 rot_z(double a) {
  Mat3 r;
  r << std::cos(a), -std::sin(a), 0.0, std::sin(a), std::cos(a), 0.0, 0.0, 0.0, 1.0;
  return r;
}

Mat3 rot_y(double a) {
  Mat3 r;
  r << std::cos(a), 0.0, std::sin(a), 0.0, 1.0, 0.0, -std::sin(a), 0.0, std::cos(a);
  return r;
}

void check_symmetric(const Mat3& m) {
  const double scale = m.cwiseAbs().maxCoeff();
  if (!m.allFinite()) throw InvalidInput("g-tensor: non-finite entry");
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvalidInput("g-tensor: matrix is not symmetric");
  }
}

}  // namespace

Mat3 EulerZYZ::rotation() const {
  return rot_z(alpha_deg * deg) * rot_y(beta_deg * deg) * rot_z(gamma_deg * deg);
}

EulerZYZ EulerZYZ::from_rotation(const Mat3& r) {
  const double sb = std::hypot(r(2, 0), r(2, 1));
  const double beta = std::atan2(sb, r(2, 2));
  double alpha = 0.0;
  double gamma = 0.0;
  if (sb > 1e-12) {
    alpha = std::atan2(r(1, 2), r(0, 2));
    gamma = std::atan2(r(2, 1), -r(2, 0));
  } else if (r(2, 2) > 0.0) {
    alpha = std::atan2(r(1, 0), r(0, 0));
  } else {
    alpha = std::atan2(-r(0, 1), r(1, 1));
  }
  return {alpha / deg, beta / deg, gamma / deg};
}

GTensorSpec GTensorSpec::from_matrix(const Mat3& m) {
  check_symmetric(m);
  Eigen::SelfAdjointEigenSolver<Mat3> solver(m);
  if (solver.eigenvalues().minCoeff() <= 0.0) {
    throw InvalidInput("g-tensor: principal values must be strictly positive");
  }
  GTensorSpec spec;
  spec.form_ = Mat3(0.5 * (m + m.transpose()));
  return spec;
}

GTensorSpec GTensorSpec::from_principal(std::array<double, 3> values, EulerZYZ rotation) {
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InvalidInput("g-tensor: principal values must be strictly positive");
    }
  }
  GTensorSpec spec;
  spec.form_ = PrincipalForm{values, rotation};
  return spec;
}

Mat3 GTensorSpec::matrix() const {
  if (const auto* m = std::get_if<Mat3>(&form_)) return *m;
  const auto& p = std::get<PrincipalForm>(form_);
  const Mat3 r = p.rotation.rotation();
  const Vec3 g(p.values[0], p.values[1], p.values[2]);
  Mat3 m = r * g.asDiagonal() * r.transpose();
  return 0.5 * (m + m.transpose());
}

bool GTensorSpec::operator==(const GTensorSpec& other) const {
  if (is_matrix() != other.is_matrix()) return false;
  if (is_matrix()) return stored_matrix() == other.stored_matrix();
  return stored_principal() == other.stored_principal();
}

PrincipalFrame diagonalize_g(const Mat3& m) {
  check_symmetric(m);
  Eigen::SelfAdjointEigenSolver<Mat3> solver(0.5 * (m + m.transpose()));
  if (solver.info() != Eigen::Success) throw InvalidInput("g-tensor: eigen decomposition failed");
  PrincipalFrame frame{solver.eigenvalues(), solver.eigenvectors()};
  if (frame.values.minCoeff() <= 0.0) {
    throw InvalidInput("g-tensor: principal values must be strictly positive");
  }
  if (frame.axes.determinant() < 0.0) frame.axes.col(2) *= -1.0;
  return frame;
}

PrincipalFrame diagonalize_g(const GTensorSpec& spec) { return diagonalize_g(spec.matrix()); }

Vec3 direction_from_angles(double phi_deg, double theta_deg) {
  const double p = phi_deg * deg;
  const double t = theta_deg * deg;
  return {std::sin(t) * std::cos(p), std::sin(t) * std::sin(p), std::cos(t)};
}

void FieldSpec::validate() const {
  if (!(magnitude_t >= 0.0)) throw InvalidInput("field: magnitude must be >= 0");
  if (!(theta_deg >= 0.0 && theta_deg <= 180.0)) {
    throw InvalidInput("field: theta must lie in [0, 180] degrees");
  }
  if (!(phi_deg >= 0.0 && phi_deg < 360.0)) {
    throw InvalidInput("field: phi must lie in [0, 360) degrees");
  }
}

Vec3 FieldSpec::direction() const { return direction_from_angles(phi_deg, theta_deg); }

Vec3 EffectiveField::unit() const {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

EffectiveField effective_field(const Vec3& principal_values, const Vec3& field_principal) {
  const double b = field_principal.norm();
  if (!(b > 0.0)) throw InvalidInput("effective field: zero field has no direction");
  const Vec3 w = principal_values.cwiseProduct(field_principal);
  const double norm = w.norm();
  EffectiveField out;
  out.g_eff = norm / b;
  out.theta = std::atan2(std::hypot(w.x(), w.y()), w.z());
  out.phi = std::atan2(w.y(), w.x());
  if (out.phi < 0.0) out.phi += 2.0 * constants::pi;
  return out;
}

EffectiveField effective_field(const PrincipalFrame& frame, const Vec3& field_crystal) {
  return effective_field(frame.values, frame.to_principal(field_crystal));
}

ZeemanEigenpair zeeman_eigenpair(const EffectiveField& field, double magnitude_t) {
  using cd = std::complex<double>;
  ZeemanEigenpair out;
  out.splitting_j = field.g_eff * constants::bohr_magneton * magnitude_t;
  out.frequency_hz = out.splitting_j / constants::planck;
  const double c = std::cos(0.5 * field.theta);
  const double s = std::sin(0.5 * field.theta);
  const cd phase = std::polar(1.0, field.phi);
  out.plus = {cd(c, 0.0), s * phase};
  out.minus = {-s * std::conj(phase), cd(c, 0.0)};
  return out;
}

const std::array<Mat2c, 3>& spin_half_operators() {
  using cd = std::complex<double>;
  static const std::array<Mat2c, 3> ops = [] {
    std::array<Mat2c, 3> s;
    s[0] << cd(0, 0), cd(0.5, 0), cd(0.5, 0), cd(0, 0);
    s[1] << cd(0, 0), cd(0, -0.5), cd(0, 0.5), cd(0, 0);
    s[2] << cd(0.5, 0), cd(0, 0), cd(0, 0), cd(-0.5, 0);
    return s;
  }();
  return ops;
}

Mat2c zeeman_hamiltonian(const EffectiveField& field, double magnitude_t) {
  const auto& s = spin_half_operators();
  const Vec3 n = field.unit();
  const Mat2c ns = n.x() * s[0] + n.y() * s[1] + n.z() * s[2];
  return -constants::bohr_magneton * field.g_eff * magnitude_t * ns;
}

OrientationSet OrientationSet::in_plane(const Vec3& u, const Vec3& v) {
  OrientationSet set;
  set.kind = Kind::plane;
  set.plane_u = u.normalized();
  set.plane_v = (v - v.dot(set.plane_u) * set.plane_u).normalized();
  return set;
}

OrientationSet OrientationSet::list(std::vector<Vec3> dirs) {
  OrientationSet set;
  set.kind = Kind::directions;
  set.directions = std::move(dirs);
  return set;
}

FrequencyRange zeeman_range(const Mat3& g_matrix, double magnitude_t, const OrientationSet& set) {
  if (!(magnitude_t > 0.0)) throw InvalidInput("zeeman range: field magnitude must be > 0");
  double g_lo = 0.0;
  double g_hi = 0.0;
  const Mat3 g2 = g_matrix * g_matrix;
  switch (set.kind) {
    case OrientationSet::Kind::full_sphere: {
      const Vec3 ev = Eigen::SelfAdjointEigenSolver<Mat3>(g2).eigenvalues();
      g_lo = std::sqrt(ev.minCoeff());
      g_hi = std::sqrt(ev.maxCoeff());
      break;
    }
    case OrientationSet::Kind::plane: {
      Eigen::Matrix<double, 3, 2> basis;
      basis.col(0) = set.plane_u;
      basis.col(1) = set.plane_v;
      const Eigen::Matrix2d q = basis.transpose() * g2 * basis;
      const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(q).eigenvalues();
      g_lo = std::sqrt(ev.minCoeff());
      g_hi = std::sqrt(ev.maxCoeff());
      break;
    }
    case OrientationSet::Kind::directions: {
      if (set.directions.empty()) throw InvalidInput("zeeman range: empty orientation set");
      g_lo = std::numeric_limits<double>::infinity();
      g_hi = 0.0;
      for (const Vec3& d : set.directions) {
        const double g = (g_matrix * d.normalized()).norm();
        g_lo = std::min(g_lo, g);
        g_hi = std::max(g_hi, g);
      }
      break;
    }
  }
  const double scale = constants::bohr_magneton * magnitude_t / constants::planck;
  return {g_lo * scale, g_hi * scale};
}

}  // namespace ffrate

#pragma once

#include <array>
#include <complex>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace ffrate {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Z-Y-Z Euler angles in degrees. The active rotation
/// R = Rz(alpha) Ry(beta) Rz(gamma) carries the crystal axes onto the
/// principal axes, so the crystal-frame tensor is R diag(g) R^T.
struct EulerZYZ {
  double alpha_deg = 0.0;
  double beta_deg = 0.0;
  double gamma_deg = 0.0;

  [[nodiscard]] Mat3 rotation() const;
  static EulerZYZ from_rotation(const Mat3& r);

  bool operator==(const EulerZYZ&) const = default;
};

struct PrincipalForm {
  std::array<double, 3> values{};
  EulerZYZ rotation{};

  bool operator==(const PrincipalForm&) const = default;
};

/// A dopant g-tensor, given either as a symmetric crystal-frame matrix or
/// as principal values plus the rotation to the principal frame.
class GTensorSpec {
 public:
  static GTensorSpec from_matrix(const Mat3& m);
  static GTensorSpec from_principal(std::array<double, 3> values, EulerZYZ rotation = {});

  [[nodiscard]] bool is_matrix() const { return std::holds_alternative<Mat3>(form_); }
  [[nodiscard]] const Mat3& stored_matrix() const { return std::get<Mat3>(form_); }
  [[nodiscard]] const PrincipalForm& stored_principal() const {
    return std::get<PrincipalForm>(form_);
  }

  /// Crystal-frame matrix, whichever way the tensor was given.
  [[nodiscard]] Mat3 matrix() const;

  bool operator==(const GTensorSpec& other) const;

 private:
  std::variant<Mat3, PrincipalForm> form_;
};

/// Principal values sorted ascending (so z is always the largest) and the
/// proper rotation whose columns are the matching principal axes.
struct PrincipalFrame {
  Vec3 values;
  Mat3 axes;

  /// Crystal-frame vector expressed in the principal frame.
  [[nodiscard]] Vec3 to_principal(const Vec3& crystal) const { return axes.transpose() * crystal; }
  [[nodiscard]] Mat3 matrix() const { return axes * values.asDiagonal() * axes.transpose(); }
};

PrincipalFrame diagonalize_g(const GTensorSpec& spec);
PrincipalFrame diagonalize_g(const Mat3& m);

/// Applied field: magnitude in tesla and polar angles (degrees) in the
/// crystal frame, theta measured from the third axis.
struct FieldSpec {
  double magnitude_t = 0.0;
  double phi_deg = 0.0;
  double theta_deg = 0.0;

  void validate() const;
  [[nodiscard]] Vec3 direction() const;
  [[nodiscard]] Vec3 vector() const { return magnitude_t * direction(); }
};

Vec3 direction_from_angles(double phi_deg, double theta_deg);

/// Effective-field description in the principal frame: g_eff and the
/// polar angles (radians) of (g_x B_x, g_y B_y, g_z B_z).
struct EffectiveField {
  double g_eff = 0.0;
  double theta = 0.0;
  double phi = 0.0;

  [[nodiscard]] Vec3 unit() const;
};

EffectiveField effective_field(const Vec3& principal_values, const Vec3& field_principal);

/// Convenience: crystal-frame tensor and crystal-frame field direction.
EffectiveField effective_field(const PrincipalFrame& frame, const Vec3& field_crystal);

using Spinor = std::array<std::complex<double>, 2>;

/// Zeeman splitting and eigenstates in the S_z basis (|+1/2>, |-1/2>).
struct ZeemanEigenpair {
  double splitting_j = 0.0;
  double frequency_hz = 0.0;
  Spinor plus{};
  Spinor minus{};
};

ZeemanEigenpair zeeman_eigenpair(const EffectiveField& field, double magnitude_t);

/// Spin-1/2 operators S_x, S_y, S_z.
using Mat2c = Eigen::Matrix2cd;
const std::array<Mat2c, 3>& spin_half_operators();

/// Explicit 2x2 Zeeman Hamiltonian -mu_B g_eff B (n . S).
Mat2c zeeman_hamiltonian(const EffectiveField& field, double magnitude_t);

/// Directions over which a Zeeman frequency range is requested.
struct OrientationSet {
  enum class Kind { full_sphere, plane, directions };

  Kind kind = Kind::full_sphere;
  Vec3 plane_u = Vec3::UnitX();
  Vec3 plane_v = Vec3::UnitY();
  std::vector<Vec3> directions;

  static OrientationSet sphere() { return {}; }
  static OrientationSet in_plane(const Vec3& u, const Vec3& v);
  static OrientationSet list(std::vector<Vec3> dirs);
};

struct FrequencyRange {
  double min_hz = 0.0;
  double max_hz = 0.0;
};

/// Extremes of g_eff mu_B B / h over the orientation set. Sphere and plane
/// cases are exact: g_eff^2 = b^T G^2 b is a quadratic form in b.
FrequencyRange zeeman_range(const Mat3& g_matrix, double magnitude_t, const OrientationSet& set);

}  // namespace ffrate

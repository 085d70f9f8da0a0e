#include <doctest.h>

#include <cmath>

#include "ffrate/constants.hpp"
#include "ffrate/errors.hpp"
#include "ffrate/rng.hpp"
#include "ffrate/spin_core.hpp"

using namespace ffrate;
using doctest::Approx;

namespace {

Mat3 random_rotation(Rng& rng) {
  Eigen::Quaterniond q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
  return q.normalized().toRotationMatrix();
}

}  // namespace

TEST_CASE("euler angles round trip") {
  Rng rng = Rng::substream(11, 0);
  for (int i = 0; i < 200; ++i) {
    const Mat3 r = random_rotation(rng);
    const Mat3 back = EulerZYZ::from_rotation(r).rotation();
    CHECK((r - back).cwiseAbs().maxCoeff() < 1e-12);
  }
  const Mat3 rz = EulerZYZ{90.0, 0.0, 0.0}.rotation();
  CHECK((rz * Vec3::UnitX() - Vec3::UnitY()).norm() < 1e-15);
}

TEST_CASE("g tensor validation") {
  Mat3 m = Mat3::Identity();
  m(0, 1) = 0.5;
  CHECK_THROWS_AS(GTensorSpec::from_matrix(m), InvalidInput);
  Mat3 neg = Mat3::Identity();
  neg(2, 2) = -1.0;
  CHECK_THROWS_AS(GTensorSpec::from_matrix(neg), InvalidInput);
  CHECK_THROWS_AS(GTensorSpec::from_principal({1.0, 0.0, 2.0}), InvalidInput);
}

TEST_CASE("diagonalization returns ascending values and a proper rotation") {
  Rng rng = Rng::substream(12, 0);
  for (int i = 0; i < 100; ++i) {
    const Mat3 r = random_rotation(rng);
    const Vec3 g(0.5 + 3 * rng.uniform(), 0.5 + 3 * rng.uniform(), 0.5 + 3 * rng.uniform());
    const Mat3 m = r * g.asDiagonal() * r.transpose();
    const PrincipalFrame f = diagonalize_g(m);
    CHECK(f.values(0) <= f.values(1));
    CHECK(f.values(1) <= f.values(2));
    CHECK(f.axes.determinant() == Approx(1.0).epsilon(1e-12));
    CHECK((f.matrix() - m).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("effective field for g = (1, 2, 3) along (1, 1, 1)") {
  const Vec3 b = Vec3(1, 1, 1).normalized();
  const EffectiveField e = effective_field(Vec3(1, 2, 3), b);
  CHECK(e.g_eff == Approx(std::sqrt(14.0 / 3.0)).epsilon(1e-14));
  CHECK(e.theta == Approx(std::acos(3.0 / std::sqrt(14.0))).epsilon(1e-14));
  CHECK(e.phi == Approx(std::atan2(2.0, 1.0)).epsilon(1e-14));
}

TEST_CASE("zero field is rejected") {
  CHECK_THROWS_AS(effective_field(Vec3(1, 2, 3), Vec3::Zero()), InvalidInput);
  FieldSpec f{-1.0, 0.0, 0.0};
  CHECK_THROWS_AS(f.validate(), InvalidInput);
}

TEST_CASE("zeeman eigenstates diagonalize the explicit hamiltonian") {
  Rng rng = Rng::substream(13, 0);
  for (int i = 0; i < 100; ++i) {
    const Vec3 g(0.5 + 5 * rng.uniform(), 0.5 + 5 * rng.uniform(), 0.5 + 5 * rng.uniform());
    const Vec3 b(rng.normal(), rng.normal(), rng.normal());
    const EffectiveField e = effective_field(g, b);
    const double field = 1e-3;
    const ZeemanEigenpair z = zeeman_eigenpair(e, field);
    const Mat2c h = zeeman_hamiltonian(e, field);
    Eigen::Vector2cd plus(z.plus[0], z.plus[1]);
    Eigen::Vector2cd minus(z.minus[0], z.minus[1]);
    const auto ep = plus.dot(h * plus).real();
    const auto em = minus.dot(h * minus).real();
    CHECK(std::abs(ep - em) == Approx(z.splitting_j).epsilon(1e-12));
    CHECK(std::abs(plus.dot(minus)) < 1e-14);
    CHECK(std::abs(minus.dot(h * plus)) < 1e-12 * z.splitting_j);
    CHECK(z.splitting_j ==
          Approx(e.g_eff * constants::bohr_magneton * field).epsilon(1e-14));
  }
}

TEST_CASE("g_eff 2.1602 at 1 mT is about 30.2 MHz") {
  const EffectiveField e{2.1602, 0.0, 0.0};
  const double expected = 2.1602 * 9.2740100783e-24 * 1e-3 / 6.62607015e-34;
  CHECK(zeeman_eigenpair(e, 1e-3).frequency_hz == Approx(expected).epsilon(1e-12));
  CHECK(expected == Approx(30.2e6).epsilon(0.005));
}

TEST_CASE("zeeman range") {
  const Mat3 g = Vec3(2.15, 2.15, 15.14).asDiagonal();
  const FrequencyRange sphere = zeeman_range(g, 1e-3, OrientationSet::sphere());
  const double unit = 9.2740100783e-24 * 1e-3 / 6.62607015e-34;
  CHECK(sphere.min_hz == Approx(2.15 * unit).epsilon(1e-12));
  CHECK(sphere.max_hz == Approx(15.14 * unit).epsilon(1e-12));
  CHECK(sphere.min_hz == Approx(30.1e6).epsilon(0.01));
  CHECK(sphere.max_hz == Approx(212e6).epsilon(0.01));

  const FrequencyRange xy = zeeman_range(g, 1e-3, OrientationSet::in_plane(Vec3::UnitX(), Vec3::UnitY()));
  CHECK(xy.max_hz == Approx(2.15 * unit).epsilon(1e-12));

  // A dense list brackets the exact plane result from inside.
  Rng rng = Rng::substream(14, 0);
  const Mat3 r = random_rotation(rng);
  const Mat3 gr = r * Vec3(0.7, 3.0, 9.0).asDiagonal() * r.transpose();
  std::vector<Vec3> dirs;
  for (int k = 0; k < 3600; ++k) {
    const double a = k * constants::pi / 3600;
    dirs.emplace_back(std::cos(a), 0.0, std::sin(a));
  }
  const FrequencyRange listed = zeeman_range(gr, 1e-3, OrientationSet::list(dirs));
  const FrequencyRange exact = zeeman_range(gr, 1e-3, OrientationSet::in_plane(Vec3::UnitX(), Vec3::UnitZ()));
  CHECK(listed.min_hz >= exact.min_hz * (1 - 1e-12));
  CHECK(listed.max_hz <= exact.max_hz * (1 + 1e-12));
  CHECK(listed.max_hz == Approx(exact.max_hz).epsilon(1e-5));
  CHECK_THROWS_AS(zeeman_range(gr, 1e-3, OrientationSet::list({})), InvalidInput);
}

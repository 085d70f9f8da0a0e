#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ffrate/lattice_sum.hpp"
#include "ffrate/materials.hpp"
#include "ffrate/spin_core.hpp"

namespace ffrate {

/// Linewidths are given in MHz; the rate uses the angular-frequency width
/// Gamma_inh = 2 pi * linewidth. This reproduces the 15.8 ms Er:LiNbO3
/// lifetime at 10 ppm and 5 MHz.
inline constexpr std::string_view gamma_convention = "angular: Gamma_inh[s^-1] = 2*pi*linewidth[Hz]";

double gamma_rate_from_linewidth(double linewidth_mhz);

/// Golden-rule flip-flop rate for dimensionless coupling xi:
/// R = (2 pi / hbar) (mu0/4pi n_s mu_B^2)^2 c xi / (hbar Gamma).
double flipflop_rate(double xi, double n_s, double lattice_coefficient, double gamma_rate);

enum class SweepPlane { d1d2, ac };

std::string_view to_string(SweepPlane plane);
SweepPlane sweep_plane_from_string(std::string_view text);

/// The plane that belongs to a material's sweep frame.
SweepPlane default_plane(SweepFrame frame);

/// Crystal-frame unit vector for an angle within a sweep plane
/// (d1d2: phi at theta = 90; ac: theta at phi = 0).
Vec3 plane_direction(SweepPlane plane, double angle_deg);

struct RateQuery {
  std::string material;
  double concentration_ppm = 10.0;
  double field_t = 1e-3;
  double phi_deg = 0.0;
  double theta_deg = 0.0;
  double gamma_mhz = 5.0;
  std::optional<GammaRange> gamma_range;
  int layers = 10;
};

struct RateResult {
  RateQuery query;
  double xi = 0.0;
  double n_s = 0.0;
  double rate = 0.0;              // s^-1
  std::optional<double> t_ff;     // s; empty when rate == 0
  std::optional<double> t_low;    // lifetime at the lower linewidth bound
  std::optional<double> t_high;   // lifetime at the upper linewidth bound
  double g_eff = 0.0;
  double zeeman_hz = 0.0;
  double coupling_hz = 0.0;
  double lattice_coefficient = 0.0;
  std::vector<std::string> warnings;
};

struct SweepRow {
  double angle_deg = 0.0;
  double xi = 0.0;
  std::optional<double> t_ff;
  std::optional<double> t_low;
  std::optional<double> t_high;
};

struct LifetimeMap {
  std::vector<double> phi_deg;    // columns
  std::vector<double> theta_deg;  // rows
  std::vector<double> xi;         // row-major, theta-major
  std::vector<std::optional<double>> t_ff;

  [[nodiscard]] const std::optional<double>& at(std::size_t theta_index, std::size_t phi_index) const {
    return t_ff[theta_index * phi_deg.size() + phi_index];
  }
};

struct BestOrientation {
  double phi_deg = 0.0;
  double theta_deg = 0.0;
  double xi = 0.0;
};

struct ScanRow {
  double concentration_ppm = 0.0;
  std::optional<double> t_ff;
  std::optional<double> t_low;
  std::optional<double> t_high;
};

/// Inclusive grid start, start + step, ..., stop.
std::vector<double> inclusive_grid(double start, double stop, double step);

/// Rate model for one material: caches the principal frame and the lattice
/// coefficient. Every grid cell is evaluated in isolation, so results do not
/// depend on how many threads run.
class RateEngine {
 public:
  explicit RateEngine(Material material, int layers = 10);

  [[nodiscard]] const Material& material() const { return material_; }
  [[nodiscard]] const PrincipalFrame& frame() const { return frame_; }
  [[nodiscard]] double lattice_coefficient() const { return lattice_coefficient_; }
  [[nodiscard]] int layers() const { return layers_; }

  [[nodiscard]] double xi(const Vec3& direction) const;
  [[nodiscard]] double n_s(double concentration_ppm) const;

  /// Lifetime 1/R for a given xi; empty when R == 0.
  [[nodiscard]] std::optional<double> lifetime(double xi, double concentration_ppm,
                                               double gamma_mhz) const;

  [[nodiscard]] RateResult rate(const RateQuery& query) const;

  [[nodiscard]] std::vector<SweepRow> angular_sweep(SweepPlane plane, double start_deg,
                                                    double stop_deg, double step_deg,
                                                    double concentration_ppm, double gamma_mhz,
                                                    std::optional<GammaRange> range = {}) const;

  [[nodiscard]] LifetimeMap lifetime_map(std::size_t n_phi, std::size_t n_theta,
                                         double concentration_ppm, double gamma_mhz) const;

  /// Longest-lifetime orientation: 1 deg coarse scan in the material's sweep
  /// plane, then golden-section refinement. Ties go to the smallest angle.
  [[nodiscard]] BestOrientation best_orientation() const;

  /// Same, over the whole sphere (coarse 1 deg grid, alternating golden
  /// sections in phi and theta).
  [[nodiscard]] BestOrientation best_orientation_sphere() const;

  [[nodiscard]] std::vector<ScanRow> concentration_scan(const std::vector<double>& concentrations_ppm,
                                                        double gamma_mhz,
                                                        std::optional<GammaRange> range = {}) const;

  /// Concentration at which the best-orientation lifetime equals target_s.
  [[nodiscard]] double concentration_for_lifetime(double target_s, double gamma_mhz) const;

  /// Zeeman frequency extremes over the sweep plane (or the whole sphere).
  [[nodiscard]] FrequencyRange zeeman_range(double field_t, std::optional<SweepPlane> plane) const;

 private:
  void check_plane(SweepPlane plane) const;

  Material material_;
  PrincipalFrame frame_;
  int layers_;
  double lattice_coefficient_;
};

std::vector<double> log_spaced(double lo, double hi, std::size_t n);

}  // namespace ffrate

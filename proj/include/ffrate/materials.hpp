#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ffrate/spin_core.hpp"

namespace ffrate {

/// Crystal frame used for field angles.
///  d1d2b: (D1, D2, b) optical extinction axes; sweeps run over phi in the
///         D1-D2 plane (theta = 90 deg).
///  abc:   (a, b, c) with c the symmetry axis; sweeps run over theta from c
///         in the a-c plane (phi = 0).
enum class SweepFrame { d1d2b, abc };

std::string_view to_string(SweepFrame frame);
SweepFrame sweep_frame_from_string(std::string_view text);

struct GammaRange {
  double lo_mhz = 0.0;
  double hi_mhz = 0.0;

  bool operator==(const GammaRange&) const = default;
};

/// Registry-time gate: g_eff along (phi, theta) must match within rel_tol.
struct GEffCheck {
  double phi_deg = 0.0;
  double theta_deg = 0.0;
  double g_eff = 0.0;
  double rel_tol = 0.1;
  std::string source;

  bool operator==(const GEffCheck&) const = default;
};

struct Material {
  std::string name;
  std::string description;
  SweepFrame sweep_frame = SweepFrame::abc;
  GTensorSpec g_tensor = GTensorSpec::from_principal({2.0, 2.0, 2.0});
  double cation_density = 0.0;  // substituted sites, m^-3
  double isotopic_fraction = 1.0;
  double gamma_inh_default_mhz = 5.0;
  GammaRange gamma_inh_range_mhz{5.0, 5.0};
  std::vector<GEffCheck> g_eff_checks;
  /// Source note per field, keyed by JSON field name.
  std::map<std::string, std::string> provenance;

  /// Throws InvalidInput naming the offending field.
  void validate() const;

  bool operator==(const Material&) const = default;
};

/// Immutable after construction; safe to share between threads.
class Registry {
 public:
  Registry() = default;
  explicit Registry(std::vector<Material> materials);

  static Registry load(const std::filesystem::path& path);
  static Registry parse(std::string_view text, std::string_view origin = "<string>");

  [[nodiscard]] std::string to_json() const;
  void save(const std::filesystem::path& path) const;

  [[nodiscard]] const Material& get(std::string_view name) const;
  [[nodiscard]] std::vector<std::string> list() const;
  [[nodiscard]] const std::vector<Material>& materials() const { return materials_; }

  bool operator==(const Registry&) const = default;

 private:
  std::vector<Material> materials_;
};

inline constexpr int registry_schema_version = 1;

/// er_yso_site1, er_cawo4, er_linbo3 and nd_yso with documented defaults.
const Registry& builtin_registry();

}  // namespace ffrate

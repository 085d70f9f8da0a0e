#include <cmath>

#include "ffrate/constants.hpp"
#include "ffrate/materials.hpp"

namespace ffrate {

namespace {

constexpr double angstrom3 = 1e-30;

// Y2SiO5 (X2 phase, C2/c): a = 10.41, b = 6.721, c = 12.49 A, beta = 102.65 deg,
// 16 Y per cell split evenly over two crystallographic sites.
double yso_site_density() {
  const double volume =
      10.41 * 6.721 * 12.49 * std::sin(102.65 * constants::deg) * angstrom3;
  return 8.0 / volume;
}

// LiNbO3 (R3c, hexagonal setting): a = 5.148, c = 13.863 A, Z = 6.
double linbo3_li_density() {
  const double volume = std::sqrt(3.0) / 2.0 * 5.148 * 5.148 * 13.863 * angstrom3;
  return 6.0 / volume;
}

// CaWO4 (I4_1/a): a = 5.243, c = 11.376 A, Z = 4.
double cawo4_ca_density() {
  const double volume = 5.243 * 5.243 * 11.376 * angstrom3;
  return 4.0 / volume;
}

const char* const kGammaDefault =
    "5 MHz spin inhomogeneous linewidth, the common value used for all material comparisons";
const char* const kErIsotopes =
    "zero-nuclear-spin Er isotopes (0.78 of dopants); 167Er with its hyperfine structure excluded";

Material er_yso_site1() {
  Material m;
  m.name = "er_yso_site1";
  m.description = "Er3+:Y2SiO5, crystallographic site 1 (1536.48 nm), ground doublet";
  m.sweep_frame = SweepFrame::d1d2b;
  Mat3 g;
  g << 3.070, -3.124, 3.396,  //
      -3.124, 8.156, -5.756,  //
      3.396, -5.756, 5.787;
  m.g_tensor = GTensorSpec::from_matrix(g);
  m.provenance["g_tensor.matrix"] =
      "site-1 ground-state g-tensor in (D1, D2, b) from EPR, Sun et al., PRB 77, 085124 (2008); "
      "principal values 0.56, 1.80, 14.65";
  m.cation_density = yso_site_density();
  m.provenance["cation_density_m3"] =
      "Y site-1 density: 8 of the 16 Y per C2/c cell, a=10.41 A, b=6.721 A, c=12.49 A, "
      "beta=102.65 deg; site-2 ions are off-resonant and do not take part";
  m.isotopic_fraction = 0.78;
  m.provenance["isotopic_fraction"] = kErIsotopes;
  m.gamma_inh_default_mhz = 5.0;
  m.provenance["gamma_inh_default_mhz"] = kGammaDefault;
  m.gamma_inh_range_mhz = {2.3, 6.3};
  m.provenance["gamma_inh_range_mhz"] =
      "extremal spin linewidths from SHB antihole widths at 0.3 mT, 10 ppm sample "
      "(50 ppm sample: 2.8-6 MHz)";
  m.g_eff_checks = {
      {133.0, 90.0, 11.7, 0.10, "in-plane g_eff at the longest-lifetime orientation"},
      {27.0, 90.0, 1.7, 0.10, "in-plane g_eff at the shortest-lifetime orientation"},
  };
  return m;
}

Material er_cawo4() {
  Material m;
  m.name = "er_cawo4";
  m.description = "Er3+:CaWO4, S4 site, axial g-tensor with c as symmetry axis";
  m.sweep_frame = SweepFrame::abc;
  m.g_tensor = GTensorSpec::from_principal({8.38, 8.38, 1.25});
  m.provenance["g_tensor.principal"] = "g_perp = 8.38, g_par = 1.25 (EPR of Er3+ in scheelite)";
  m.provenance["g_tensor.euler_zyz_deg"] = "axial: principal z along c, no rotation";
  m.cation_density = cawo4_ca_density();
  m.provenance["cation_density_m3"] = "Ca density, tetragonal a=5.243 A, c=11.376 A, Z=4";
  m.isotopic_fraction = 0.78;
  m.provenance["isotopic_fraction"] = kErIsotopes;
  m.gamma_inh_default_mhz = 5.0;
  m.provenance["gamma_inh_default_mhz"] = kGammaDefault;
  m.gamma_inh_range_mhz = {5.0, 5.0};
  m.provenance["gamma_inh_range_mhz"] = "no measured range; collapsed to the default";
  return m;
}

Material er_linbo3() {
  Material m;
  m.name = "er_linbo3";
  m.description = "Er3+:LiNbO3, C3 site on Li, axial g-tensor with c as symmetry axis";
  m.sweep_frame = SweepFrame::abc;
  m.g_tensor = GTensorSpec::from_principal({2.15, 2.15, 15.14});
  m.provenance["g_tensor.principal"] = "g_perp = 2.15, g_par = 15.14 (EPR of Er3+ in LiNbO3)";
  m.provenance["g_tensor.euler_zyz_deg"] = "axial: principal z along c, no rotation";
  m.cation_density = linbo3_li_density();
  m.provenance["cation_density_m3"] = "Li density, hexagonal a=5.148 A, c=13.863 A, Z=6";
  m.isotopic_fraction = 0.78;
  m.provenance["isotopic_fraction"] = kErIsotopes;
  m.gamma_inh_default_mhz = 5.0;
  m.provenance["gamma_inh_default_mhz"] = kGammaDefault;
  m.gamma_inh_range_mhz = {5.0, 5.0};
  m.provenance["gamma_inh_range_mhz"] = "no measured range; collapsed to the default";
  return m;
}

Material nd_yso() {
  Material m;
  m.name = "nd_yso";
  m.description = "Nd3+:Y2SiO5, site 1, ground doublet";
  m.sweep_frame = SweepFrame::d1d2b;
  Mat3 g;
  g << 0.99249, -0.19622, 0.26390,  //
      -0.19622, 2.39597, -1.57417,  //
      0.26390, -1.57417, 2.71238;
  m.g_tensor = GTensorSpec::from_matrix(g);
  m.provenance["g_tensor.matrix"] =
      "least-squares reconstruction with the largest principal value fixed at 4.17 "
      "(Wolfowicz et al., PRL 114, 170503 (2015)), fitted to in-plane g_eff 2.87 at "
      "phi=104 deg and 0.98 at phi=12 deg; principal values 0.93, 1.00, 4.17";
  m.cation_density = yso_site_density();
  m.provenance["cation_density_m3"] =
      "Y site-1 density: 8 of the 16 Y per C2/c cell, a=10.41 A, b=6.721 A, c=12.49 A, "
      "beta=102.65 deg";
  m.isotopic_fraction = 1.0;
  m.provenance["isotopic_fraction"] =
      "OPEN: Nd isotope treatment unknown; all dopants counted (even isotopes are ~0.80)";
  m.gamma_inh_default_mhz = 5.0;
  m.provenance["gamma_inh_default_mhz"] = kGammaDefault;
  m.gamma_inh_range_mhz = {5.0, 5.0};
  m.provenance["gamma_inh_range_mhz"] = "no measured range; collapsed to the default";
  m.g_eff_checks = {
      {104.0, 90.0, 2.87, 0.10, "in-plane g_eff at the longest-lifetime orientation"},
      {12.0, 90.0, 0.98, 0.10, "in-plane g_eff at the shortest-lifetime orientation"},
  };
  return m;
}

}  // namespace

const Registry& builtin_registry() {
  static const Registry registry({er_yso_site1(), er_cawo4(), er_linbo3(), nd_yso()});
  return registry;
}

}  // namespace ffrate

#include "ffrate/io.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace ffrate::io {

using nlohmann::json;

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

std::string format_optional(const std::optional<double>& value) {
  return value ? format_number(*value) : std::string("null");
}

json optional_json(const std::optional<double>& value) { return value ? json(*value) : json(); }

json to_json(const RateResult& r) {
  json out;
  out["material"] = r.query.material;
  out["concentration_ppm"] = r.query.concentration_ppm;
  out["field_mt"] = r.query.field_t * 1e3;
  out["phi_deg"] = r.query.phi_deg;
  out["theta_deg"] = r.query.theta_deg;
  out["gamma_mhz"] = r.query.gamma_mhz;
  out["gamma_range_mhz"] =
      r.query.gamma_range ? json::array({r.query.gamma_range->lo_mhz, r.query.gamma_range->hi_mhz})
                          : json();
  out["gamma_convention"] = std::string(gamma_convention);
  out["layers"] = r.query.layers;
  out["lattice_coefficient"] = r.lattice_coefficient;
  out["xi"] = r.xi;
  out["n_s_m3"] = r.n_s;
  out["rate_s"] = r.rate;
  out["t_ff_s"] = optional_json(r.t_ff);
  out["t_low_s"] = optional_json(r.t_low);
  out["t_high_s"] = optional_json(r.t_high);
  out["g_eff"] = r.g_eff;
  out["zeeman_hz"] = r.zeeman_hz;
  out["coupling_hz"] = r.coupling_hz;
  out["warnings"] = r.warnings;
  return out;
}

json to_json(const Material& m) {
  json out;
  out["name"] = m.name;
  out["description"] = m.description;
  out["sweep_frame"] = std::string(to_string(m.sweep_frame));
  const PrincipalFrame frame = diagonalize_g(m.g_tensor);
  out["principal_g"] = {frame.values.x(), frame.values.y(), frame.values.z()};
  const Mat3 g = m.g_tensor.matrix();
  out["g_matrix"] = json::array({json::array({g(0, 0), g(0, 1), g(0, 2)}),
                                 json::array({g(1, 0), g(1, 1), g(1, 2)}),
                                 json::array({g(2, 0), g(2, 1), g(2, 2)})});
  out["cation_density_m3"] = m.cation_density;
  out["isotopic_fraction"] = m.isotopic_fraction;
  out["gamma_inh_default_mhz"] = m.gamma_inh_default_mhz;
  out["gamma_inh_range_mhz"] = {m.gamma_inh_range_mhz.lo_mhz, m.gamma_inh_range_mhz.hi_mhz};
  out["provenance"] = m.provenance;
  return out;
}

json to_json(const oracle::OracleReport& r) {
  return {{"estimate", r.estimate},   {"standard_error", r.standard_error},
          {"analytic", r.analytic},   {"z_score", r.z_score},
          {"sigma_level", r.sigma_level}, {"samples", r.samples},
          {"pass", r.pass}};
}

json to_json(const oracle::PlacementSummary& s) {
  return {{"n_s_m3", s.n_s},
          {"box_size_m", s.box_size_m},
          {"cutoff_m", s.cutoff_m},
          {"realizations", s.realizations},
          {"partners", s.partners},
          {"mean", s.mean},
          {"median", s.median},
          {"q1", s.q1},
          {"q3", s.q3},
          {"lattice_coefficient", s.lattice_coefficient},
          {"lattice_reference", s.lattice_reference},
          {"lattice_within_iqr", s.lattice_within_iqr}};
}

json to_json(const decay::FitResult& fit) {
  json out;
  out["n"] = fit.n;
  out["alpha_l"] = fit.alpha_l;
  out["a"] = fit.a;
  out["tau_s"] = fit.tau;
  json reliable = json::array();
  for (bool b : fit.reliable) reliable.push_back(b);
  out["reliable"] = reliable;
  out["t1_opt_s"] = fit.t1_opt;
  out["chi2"] = fit.chi2;
  out["chi2_by_n"] = fit.chi2_by_n;
  out["converged"] = fit.converged;
  if (fit.n > 0) {
    const auto dom = decay::dominant_time(fit);
    out["dominant_tau_s"] = dom.tau;
    out["dominant_tie"] = dom.tie;
  }
  return out;
}

json sweep_json(const std::vector<SweepRow>& rows, SweepPlane plane, bool band) {
  json list = json::array();
  for (const auto& r : rows) {
    json row = {{"angle_deg", r.angle_deg}, {"xi", r.xi}, {"t_ff_s", optional_json(r.t_ff)}};
    if (band) {
      row["t_low_s"] = optional_json(r.t_low);
      row["t_high_s"] = optional_json(r.t_high);
    }
    list.push_back(row);
  }
  return {{"plane", std::string(to_string(plane))},
          {"gamma_convention", std::string(gamma_convention)},
          {"rows", list}};
}

json map_json(const LifetimeMap& map) {
  json rows = json::array();
  for (std::size_t i = 0; i < map.theta_deg.size(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < map.phi_deg.size(); ++j) row.push_back(optional_json(map.at(i, j)));
    rows.push_back(row);
  }
  return {{"phi_deg", map.phi_deg},
          {"theta_deg", map.theta_deg},
          {"t_ff_s", rows},
          {"layout", "rows indexed by theta, columns by phi"},
          {"gamma_convention", std::string(gamma_convention)}};
}

json scan_json(const std::vector<ScanRow>& rows, bool band) {
  json list = json::array();
  for (const auto& r : rows) {
    json row = {{"conc_ppm", r.concentration_ppm}, {"t_ff_s", optional_json(r.t_ff)}};
    if (band) {
      row["t_low_s"] = optional_json(r.t_low);
      row["t_high_s"] = optional_json(r.t_high);
    }
    list.push_back(row);
  }
  return {{"gamma_convention", std::string(gamma_convention)}, {"rows", list}};
}

void write_rate_csv(std::ostream& out, const RateResult& r) {
  out << "phi_deg,theta_deg,conc_ppm,xi,n_s_m3,rate_s,t_ff_s";
  if (r.query.gamma_range) out << ",t_low_s,t_high_s";
  out << '\n';
  out << format_number(r.query.phi_deg) << ',' << format_number(r.query.theta_deg) << ','
      << format_number(r.query.concentration_ppm) << ',' << format_number(r.xi) << ','
      << format_number(r.n_s) << ',' << format_number(r.rate) << ',' << format_optional(r.t_ff);
  if (r.query.gamma_range) out << ',' << format_optional(r.t_low) << ',' << format_optional(r.t_high);
  out << '\n';
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, bool band) {
  out << "angle_deg,t_ff_s";
  if (band) out << ",t_low_s,t_high_s";
  out << '\n';
  for (const auto& r : rows) {
    out << format_number(r.angle_deg) << ',' << format_optional(r.t_ff);
    if (band) out << ',' << format_optional(r.t_low) << ',' << format_optional(r.t_high);
    out << '\n';
  }
}

void write_map_csv(std::ostream& out, const LifetimeMap& map) {
  out << "phi_deg,theta_deg,t_ff_s\n";
  for (std::size_t i = 0; i < map.theta_deg.size(); ++i) {
    for (std::size_t j = 0; j < map.phi_deg.size(); ++j) {
      out << format_number(map.phi_deg[j]) << ',' << format_number(map.theta_deg[i]) << ','
          << format_optional(map.at(i, j)) << '\n';
    }
  }
}

void write_scan_csv(std::ostream& out, const std::vector<ScanRow>& rows, bool band) {
  out << "conc_ppm,t_ff_s";
  if (band) out << ",t_low_s,t_high_s";
  out << '\n';
  for (const auto& r : rows) {
    out << format_number(r.concentration_ppm) << ',' << format_optional(r.t_ff);
    if (band) out << ',' << format_optional(r.t_low) << ',' << format_optional(r.t_high);
    out << '\n';
  }
}

namespace {

std::string csv_cell(const json& v) {
  if (v.is_null()) return "null";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_float()) return format_number(v.get<double>());
  if (v.is_number()) return v.dump();
  if (v.is_string() || v.is_object()) {
    std::string s = v.is_string() ? v.get<std::string>() : v.dump();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
      if (c == '"') quoted += '"';
      quoted += c;
    }
    return quoted + "\"";
  }
  if (v.is_array()) {
    std::string joined;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) joined += ';';
      joined += csv_cell(v[i]);
    }
    return joined;
  }
  return v.dump();
}

}  // namespace

void write_record_csv(std::ostream& out, const json& record) {
  bool first = true;
  for (auto it = record.begin(); it != record.end(); ++it) {
    out << (first ? "" : ",") << it.key();
    first = false;
  }
  out << '\n';
  first = true;
  for (auto it = record.begin(); it != record.end(); ++it) {
    out << (first ? "" : ",") << csv_cell(it.value());
    first = false;
  }
  out << '\n';
}

}  // namespace ffrate::io

#include "ffrate/materials.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ffrate/errors.hpp"

namespace ffrate {

using nlohmann::json;

std::string_view to_string(SweepFrame frame) {
  return frame == SweepFrame::d1d2b ? "d1d2b" : "abc";
}

SweepFrame sweep_frame_from_string(std::string_view text) {
  if (text == "d1d2b") return SweepFrame::d1d2b;
  if (text == "abc") return SweepFrame::abc;
  throw InvalidInput("unknown sweep frame '" + std::string(text) + "' (expected d1d2b or abc)");
}

void Material::validate() const {
  auto fail = [this](const std::string& field, const std::string& what) {
    throw InvalidInput("material '" + name + "': " + field + ": " + what);
  };
  if (name.empty()) throw InvalidInput("material: empty name");
  if (!(cation_density > 0.0) || !std::isfinite(cation_density)) {
    fail("cation_density_m3", "must be positive");
  }
  if (!(isotopic_fraction > 0.0 && isotopic_fraction <= 1.0)) {
    fail("isotopic_fraction", "must lie in (0, 1]");
  }
  if (!(gamma_inh_default_mhz > 0.0)) fail("gamma_inh_default_mhz", "must be positive");
  if (!(gamma_inh_range_mhz.lo_mhz > 0.0 && gamma_inh_range_mhz.hi_mhz > 0.0)) {
    fail("gamma_inh_range_mhz", "must be positive");
  }
  if (gamma_inh_range_mhz.lo_mhz > gamma_inh_range_mhz.hi_mhz) {
    fail("gamma_inh_range_mhz", "lower bound exceeds upper bound");
  }
  PrincipalFrame frame;
  try {
    frame = diagonalize_g(g_tensor);
  } catch (const InvalidInput& e) {
    fail("g_tensor", e.what());
  }
  for (const GEffCheck& check : g_eff_checks) {
    const Vec3 dir = direction_from_angles(check.phi_deg, check.theta_deg);
    const double g = effective_field(frame, dir).g_eff;
    if (std::abs(g - check.g_eff) > check.rel_tol * check.g_eff) {
      std::ostringstream msg;
      msg << "g_eff_checks: g_eff at (phi=" << check.phi_deg << ", theta=" << check.theta_deg
          << ") is " << g << ", expected " << check.g_eff << " within " << check.rel_tol * 100
          << "%";
      fail("g_tensor", msg.str());
    }
  }
}

Registry::Registry(std::vector<Material> materials) : materials_(std::move(materials)) {
  for (std::size_t i = 0; i < materials_.size(); ++i) {
    materials_[i].validate();
    for (std::size_t j = 0; j < i; ++j) {
      if (materials_[j].name == materials_[i].name) {
        throw InvalidInput("registry: duplicate material '" + materials_[i].name + "'");
      }
    }
  }
}

const Material& Registry::get(std::string_view name) const {
  auto it = std::find_if(materials_.begin(), materials_.end(),
                         [&](const Material& m) { return m.name == name; });
  if (it == materials_.end()) {
    throw InvalidInput("unknown material '" + std::string(name) + "'");
  }
  return *it;
}

std::vector<std::string> Registry::list() const {
  std::vector<std::string> names;
  names.reserve(materials_.size());
  for (const auto& m : materials_) names.push_back(m.name);
  return names;
}

namespace {

// Reads one material object; `where` prefixes every diagnostic.
class Reader {
 public:
  Reader(const json& obj, std::string where) : obj_(obj), where_(std::move(where)) {}

  [[noreturn]] void fail(const std::string& field, const std::string& what) const {
    throw InvalidInput(where_ + "." + field + ": " + what);
  }

  const json& require(const std::string& field) const {
    auto it = obj_.find(field);
    if (it == obj_.end()) fail(field, "missing");
    return *it;
  }

  std::string string(const std::string& field) const {
    const json& v = require(field);
    if (!v.is_string()) fail(field, "expected a string");
    return v.get<std::string>();
  }

  double number(const std::string& field) const {
    const json& v = require(field);
    if (!v.is_number()) fail(field, "expected a number");
    return v.get<double>();
  }

  std::vector<double> numbers(const std::string& field, std::size_t n) const {
    const json& v = require(field);
    if (!v.is_array() || v.size() != n) fail(field, "expected an array of " + std::to_string(n));
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) fail(field, "expected numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  std::string source(const std::string& field) const { return string(field + "_source"); }

  const std::string& where() const { return where_; }

 private:
  const json& obj_;
  std::string where_;
};

GTensorSpec read_g_tensor(const Reader& outer, const json& node,
                          std::map<std::string, std::string>& provenance) {
  if (!node.is_object()) outer.fail("g_tensor", "expected an object");
  Reader r(node, outer.where() + ".g_tensor");
  try {
    if (node.contains("matrix")) {
      const json& m = r.require("matrix");
      if (!m.is_array() || m.size() != 3) r.fail("matrix", "expected 3 rows");
      Mat3 mat;
      for (int i = 0; i < 3; ++i) {
        if (!m[i].is_array() || m[i].size() != 3) r.fail("matrix", "expected 3x3 numbers");
        for (int j = 0; j < 3; ++j) {
          if (!m[i][j].is_number()) r.fail("matrix", "expected 3x3 numbers");
          mat(i, j) = m[i][j].get<double>();
        }
      }
      provenance["g_tensor.matrix"] = r.source("matrix");
      return GTensorSpec::from_matrix(mat);
    }
    const auto p = r.numbers("principal", 3);
    provenance["g_tensor.principal"] = r.source("principal");
    EulerZYZ euler;
    if (node.contains("euler_zyz_deg")) {
      const auto e = r.numbers("euler_zyz_deg", 3);
      euler = {e[0], e[1], e[2]};
      provenance["g_tensor.euler_zyz_deg"] = r.source("euler_zyz_deg");
    }
    return GTensorSpec::from_principal({p[0], p[1], p[2]}, euler);
  } catch (const InvalidInput& e) {
    const std::string what = e.what();
    if (what.rfind(r.where(), 0) == 0) throw;
    r.fail("value", what);
  }
}

Material read_material(const json& node, const std::string& where) {
  if (!node.is_object()) throw InvalidInput(where + ": expected an object");
  Reader r(node, where);
  Material m;
  m.name = r.string("name");
  if (node.contains("description")) m.description = r.string("description");
  try {
    m.sweep_frame = sweep_frame_from_string(r.string("sweep_frame"));
  } catch (const InvalidInput& e) {
    r.fail("sweep_frame", e.what());
  }
  m.g_tensor = read_g_tensor(r, r.require("g_tensor"), m.provenance);

  auto scalar = [&](const std::string& field, double& target) {
    target = r.number(field);
    m.provenance[field] = r.source(field);
  };
  scalar("cation_density_m3", m.cation_density);
  scalar("isotopic_fraction", m.isotopic_fraction);
  scalar("gamma_inh_default_mhz", m.gamma_inh_default_mhz);
  const auto range = r.numbers("gamma_inh_range_mhz", 2);
  m.gamma_inh_range_mhz = {range[0], range[1]};
  m.provenance["gamma_inh_range_mhz"] = r.source("gamma_inh_range_mhz");

  if (node.contains("g_eff_checks")) {
    const json& checks = node["g_eff_checks"];
    if (!checks.is_array()) r.fail("g_eff_checks", "expected an array");
    for (std::size_t i = 0; i < checks.size(); ++i) {
      if (!checks[i].is_object()) r.fail("g_eff_checks", "expected objects");
      Reader c(checks[i], where + ".g_eff_checks[" + std::to_string(i) + "]");
      GEffCheck check;
      check.phi_deg = c.number("phi_deg");
      check.theta_deg = c.number("theta_deg");
      check.g_eff = c.number("g_eff");
      check.rel_tol = c.number("rel_tol");
      check.source = c.source("g_eff");
      m.g_eff_checks.push_back(check);
    }
  }
  m.validate();
  return m;
}

std::pair<std::size_t, std::size_t> line_and_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

json write_material(const Material& m) {
  auto src = [&](const std::string& key) {
    auto it = m.provenance.find(key);
    return it == m.provenance.end() ? std::string() : it->second;
  };
  json g;
  if (m.g_tensor.is_matrix()) {
    const Mat3& mat = m.g_tensor.stored_matrix();
    json rows = json::array();
    for (int i = 0; i < 3; ++i) rows.push_back({mat(i, 0), mat(i, 1), mat(i, 2)});
    g["matrix"] = rows;
    g["matrix_source"] = src("g_tensor.matrix");
  } else {
    const PrincipalForm& p = m.g_tensor.stored_principal();
    g["principal"] = {p.values[0], p.values[1], p.values[2]};
    g["principal_source"] = src("g_tensor.principal");
    g["euler_zyz_deg"] = {p.rotation.alpha_deg, p.rotation.beta_deg, p.rotation.gamma_deg};
    g["euler_zyz_deg_source"] = src("g_tensor.euler_zyz_deg");
  }
  json out;
  out["name"] = m.name;
  out["description"] = m.description;
  out["sweep_frame"] = std::string(to_string(m.sweep_frame));
  out["g_tensor"] = g;
  out["cation_density_m3"] = m.cation_density;
  out["cation_density_m3_source"] = src("cation_density_m3");
  out["isotopic_fraction"] = m.isotopic_fraction;
  out["isotopic_fraction_source"] = src("isotopic_fraction");
  out["gamma_inh_default_mhz"] = m.gamma_inh_default_mhz;
  out["gamma_inh_default_mhz_source"] = src("gamma_inh_default_mhz");
  out["gamma_inh_range_mhz"] = {m.gamma_inh_range_mhz.lo_mhz, m.gamma_inh_range_mhz.hi_mhz};
  out["gamma_inh_range_mhz_source"] = src("gamma_inh_range_mhz");
  json checks = json::array();
  for (const auto& c : m.g_eff_checks) {
    checks.push_back({{"phi_deg", c.phi_deg},
                      {"theta_deg", c.theta_deg},
                      {"g_eff", c.g_eff},
                      {"g_eff_source", c.source},
                      {"rel_tol", c.rel_tol}});
  }
  out["g_eff_checks"] = checks;
  return out;
}

}  // namespace

Registry Registry::parse(std::string_view text, std::string_view origin) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_and_column(text, e.byte);
    throw InvalidInput(std::string(origin) + ":" + std::to_string(line) + ":" +
                       std::to_string(col) + ": JSON parse error: " + e.what());
  }
  const std::string where(origin);
  if (!doc.is_object()) throw InvalidInput(where + ": expected a JSON object");
  if (!doc.contains("schema") || !doc["schema"].is_number_integer()) {
    throw InvalidInput(where + ": schema: missing or not an integer");
  }
  if (doc["schema"].get<int>() != registry_schema_version) {
    throw InvalidInput(where + ": schema: unsupported version " + doc["schema"].dump());
  }
  if (!doc.contains("materials") || !doc["materials"].is_array()) {
    throw InvalidInput(where + ": materials: missing or not an array");
  }
  std::vector<Material> materials;
  const json& list = doc["materials"];
  for (std::size_t i = 0; i < list.size(); ++i) {
    materials.push_back(read_material(list[i], where + ": materials[" + std::to_string(i) + "]"));
  }
  return Registry(std::move(materials));
}

Registry Registry::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open registry file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.string());
}

std::string Registry::to_json() const {
  json doc;
  doc["schema"] = registry_schema_version;
  json list = json::array();
  for (const auto& m : materials_) list.push_back(write_material(m));
  doc["materials"] = list;
  return doc.dump(2) + "\n";
}

void Registry::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write registry file '" + path.string() + "'");
  out << to_json();
}

}  // namespace ffrate

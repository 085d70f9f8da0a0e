#include <doctest.h>

#include <filesystem>
#include <string>

#include <json.hpp>

#include "ffrate/errors.hpp"
#include "ffrate/materials.hpp"

using namespace ffrate;
using doctest::Approx;
using nlohmann::json;

namespace {

std::string error_of(const std::string& text) {
  try {
    Registry::parse(text, "test.json");
  } catch (const InvalidInput& e) {
    return e.what();
  }
  return {};
}

json builtin_doc() { return json::parse(builtin_registry().to_json()); }

}  // namespace

TEST_CASE("builtin materials") {
  const Registry& r = builtin_registry();
  CHECK(r.list() == std::vector<std::string>{"er_yso_site1", "er_cawo4", "er_linbo3", "nd_yso"});
  for (const auto& m : r.materials()) CHECK_NOTHROW(m.validate());
  CHECK(r.get("er_linbo3").cation_density == Approx(1.886e28).epsilon(0.01));
  CHECK(r.get("er_cawo4").cation_density == Approx(1.28e28).epsilon(0.01));
  CHECK(r.get("er_yso_site1").isotopic_fraction == 0.78);
  CHECK(r.get("nd_yso").isotopic_fraction == 1.0);
  CHECK_THROWS_AS(r.get("er_glass"), InvalidInput);
}

TEST_CASE("principal values") {
  const Registry& r = builtin_registry();
  const Vec3 ln = diagonalize_g(r.get("er_linbo3").g_tensor).values;
  CHECK(ln.x() == Approx(2.15));
  CHECK(ln.z() == Approx(15.14));
  const Vec3 yso = diagonalize_g(r.get("er_yso_site1").g_tensor).values;
  CHECK(yso.z() == Approx(14.65).epsilon(0.01));
  const Vec3 nd = diagonalize_g(r.get("nd_yso").g_tensor).values;
  CHECK(nd.z() == Approx(4.17).epsilon(0.005));
}

TEST_CASE("every field carries a source note") {
  for (const auto& m : builtin_registry().materials()) {
    for (const char* key : {"cation_density_m3", "isotopic_fraction", "gamma_inh_default_mhz",
                            "gamma_inh_range_mhz"}) {
      REQUIRE(m.provenance.count(key) == 1);
      CHECK(!m.provenance.at(key).empty());
    }
  }
}

TEST_CASE("json round trip") {
  const Registry& r = builtin_registry();
  const std::string text = r.to_json();
  const Registry back = Registry::parse(text);
  CHECK(back == r);
  CHECK(back.to_json() == text);
}

TEST_CASE("shipped registry file matches the builtin") {
  const std::filesystem::path path = std::filesystem::path(FFRATE_SOURCE_DIR) / "data" / "materials.json";
  CHECK(Registry::load(path) == builtin_registry());
}

TEST_CASE("principal-form tensors round trip") {
  json doc = builtin_doc();
  json& cawo4 = doc["materials"][1];
  REQUIRE(cawo4["name"] == "er_cawo4");
  cawo4["g_tensor"]["euler_zyz_deg"] = {10.0, 20.0, 30.0};
  const Registry r = Registry::parse(doc.dump());
  CHECK(Registry::parse(r.to_json()) == r);
  CHECK_FALSE(r.get("er_cawo4").g_tensor.is_matrix());
}

TEST_CASE("diagnostics name the offending field") {
  CHECK(error_of("{\"schema\": 1, \"materials\": [}").find("test.json:1:") == 0);
  CHECK(error_of("[]").find("expected a JSON object") != std::string::npos);
  CHECK(error_of("{\"schema\": 7, \"materials\": []}").find("schema") != std::string::npos);

  json doc = builtin_doc();
  doc["materials"][2].erase("cation_density_m3");
  CHECK(error_of(doc.dump()).find("materials[2].cation_density_m3") != std::string::npos);

  doc = builtin_doc();
  doc["materials"][0].erase("isotopic_fraction_source");
  CHECK(error_of(doc.dump()).find("isotopic_fraction_source") != std::string::npos);

  doc = builtin_doc();
  doc["materials"][0]["isotopic_fraction"] = 1.5;
  CHECK(error_of(doc.dump()).find("isotopic_fraction") != std::string::npos);

  doc = builtin_doc();
  doc["materials"][2]["g_tensor"]["principal"] = {2.15, -2.15, 15.14};
  CHECK(error_of(doc.dump()).find("g_tensor") != std::string::npos);

  doc = builtin_doc();
  doc["materials"][0]["g_tensor"]["matrix"][0][1] = 3.0;
  CHECK(error_of(doc.dump()).find("g_tensor") != std::string::npos);

  doc = builtin_doc();
  doc["materials"][3]["name"] = "er_cawo4";
  CHECK(error_of(doc.dump()).find("duplicate") != std::string::npos);

  doc = builtin_doc();
  doc["materials"][0]["sweep_frame"] = "xyz";
  CHECK(error_of(doc.dump()).find("sweep_frame") != std::string::npos);
}

TEST_CASE("g_eff gates reject a transposed tensor") {
  json doc = builtin_doc();
  // Swapping D1 and b moves the in-plane maximum away from 133 deg.
  auto& m = doc["materials"][0]["g_tensor"]["matrix"];
  std::swap(m[0], m[2]);
  for (auto& row : m) std::swap(row[0], row[2]);
  CHECK(error_of(doc.dump()).find("g_eff_checks") != std::string::npos);
}

TEST_CASE("load errors") {
  CHECK_THROWS_AS(Registry::load("/nonexistent/registry.json"), InvalidInput);
}

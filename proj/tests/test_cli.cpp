#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "ffrate/decay_fit.hpp"
#include "ffrate/rate_engine.hpp"

using namespace ffrate;
using doctest::Approx;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("ffrate_test_" + name);
}

}  // namespace

TEST_CASE("materials list") {
  const Run r = run({"materials", "list"});
  CHECK(r.code == 0);
  CHECK(r.out == "er_yso_site1\ner_cawo4\ner_linbo3\nnd_yso\n");
}

TEST_CASE("rate record") {
  const Run r = run({"rate", "--material", "er_linbo3", "--theta", "0", "--conc", "10", "--gamma", "5"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["t_ff_s"].get<double>() == Approx(1.58e-2).epsilon(0.15));
  CHECK(j["gamma_convention"] == std::string(gamma_convention));
  CHECK(j["t_low_s"].is_null());
}

TEST_CASE("output is deterministic") {
  const std::vector<std::string> args = {"map", "-m", "er_yso_site1", "--grid", "37x19"};
  CHECK(run(args).out == run(args).out);
  const std::vector<std::string> mc = {"--seed", "9", "oracle", "xi", "--g", "1,2,3", "--big-theta",
                                       "40", "--samples", "20000"};
  CHECK(run(mc).out == run(mc).out);
}

TEST_CASE("csv and json carry the same numbers") {
  const std::vector<std::string> base = {"sweep", "-m", "er_yso_site1", "--step", "5", "--gamma-range",
                                         "material"};
  auto csv_args = base;
  csv_args.insert(csv_args.end(), {"--format", "csv"});
  auto json_args = base;
  json_args.insert(json_args.end(), {"--format", "json"});
  const auto rows = parse_csv(run(csv_args).out);
  const json j = json::parse(run(json_args).out);
  REQUIRE(rows.size() == 1 + j["rows"].size());
  CHECK(rows[0] == std::vector<std::string>{"angle_deg", "t_ff_s", "t_low_s", "t_high_s"});
  for (std::size_t i = 0; i < j["rows"].size(); ++i) {
    const json& row = j["rows"][i];
    CHECK(std::stod(rows[i + 1][0]) == row["angle_deg"].get<double>());
    CHECK(std::stod(rows[i + 1][1]) == row["t_ff_s"].get<double>());
    CHECK(std::stod(rows[i + 1][2]) == row["t_low_s"].get<double>());
    CHECK(std::stod(rows[i + 1][3]) == row["t_high_s"].get<double>());
  }
}

TEST_CASE("map csv and json agree") {
  const auto rows = parse_csv(run({"map", "-m", "er_cawo4", "--grid", "7x5"}).out);
  const json j = json::parse(run({"map", "-m", "er_cawo4", "--grid", "7x5", "--format", "json"}).out);
  REQUIRE(rows.size() == 1 + 7 * 5);
  CHECK(rows[0] == std::vector<std::string>{"phi_deg", "theta_deg", "t_ff_s"});
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t k = 0; k < 7; ++k) {
      const auto& row = rows[1 + i * 7 + k];
      CHECK(std::stod(row[0]) == j["phi_deg"][k].get<double>());
      CHECK(std::stod(row[1]) == j["theta_deg"][i].get<double>());
      CHECK(std::stod(row[2]) == j["t_ff_s"][i][k].get<double>());
    }
  }
}

TEST_CASE("unbounded lifetimes are null") {
  const Run r = run({"rate", "-m", "er_cawo4", "--conc", "0", "--format", "csv"});
  REQUIRE(r.code == 0);
  CHECK(parse_csv(r.out)[1][6] == "null");
  CHECK(json::parse(run({"rate", "-m", "er_cawo4", "--conc", "0"}).out)["t_ff_s"].is_null());
}

TEST_CASE("exit codes") {
  CHECK(run({}).code == 1);
  CHECK(run({"rate", "--bogus"}).code == 1);
  CHECK(run({"rate"}).code == 1);
  CHECK(run({"rate", "-m", "er_glass"}).code == 2);
  CHECK(run({"rate", "-m", "er_cawo4", "--gamma", "-1"}).code == 2);
  CHECK(run({"sweep", "-m", "er_cawo4", "--plane", "d1d2"}).code == 2);
  CHECK(run({"--registry", "/nonexistent.json", "materials", "list"}).code == 2);
  // An absurd sigma level turns any estimate into a failure.
  CHECK(run({"oracle", "xi", "--g", "1,2,3", "--samples", "1000", "--sigma", "1e-9"}).code == 3);
  CHECK(run({"oracle", "xi", "--g", "1,2,3", "--samples", "100000"}).code == 0);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("errors go to stderr only") {
  const Run r = run({"rate", "-m", "er_glass"});
  CHECK(r.out.empty());
  CHECK(r.err.find("unknown material") != std::string::npos);
}

TEST_CASE("--out replaces stdout") {
  const auto path = temp_path("out.csv");
  const Run r = run({"--out", path.string(), "sweep", "-m", "er_linbo3", "--step", "30"});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str() == run({"sweep", "-m", "er_linbo3", "--step", "30"}).out);
  std::filesystem::remove(path);
}

TEST_CASE("registry from the environment") {
  const auto path = temp_path("registry.json");
  {
    json doc = json::parse(builtin_registry().to_json());
    doc["materials"].erase(3);
    std::ofstream(path) << doc.dump();
  }
  ::setenv("FFRATE_REGISTRY", path.c_str(), 1);
  const Run r = run({"materials", "list"});
  ::unsetenv("FFRATE_REGISTRY");
  CHECK(r.out == "er_yso_site1\ner_cawo4\ner_linbo3\n");
  std::filesystem::remove(path);
}

TEST_CASE("oracle pair and placement") {
  const Run pair = run({"oracle", "pair", "--g", "0.5,2,9", "--big-theta", "70", "--big-phi", "20",
                        "--u", "0.3,-1,0.4"});
  REQUIRE(pair.code == 0);
  CHECK(json::parse(pair.out)["rel_error"].get<double>() < 1e-10);
  const Run place = run({"oracle", "placement", "-m", "er_linbo3", "--realizations", "10"});
  REQUIRE(place.code == 0);
  CHECK(json::parse(place.out)["partners"].get<int>() >= 1000);
}

TEST_CASE("concentration scan reports the threshold") {
  const Run r = run({"concscan", "-m", "er_linbo3", "--target", "10", "--format", "json"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["conc_for_target_ppm"].get<double>() == Approx(0.4).epsilon(0.25));
  CHECK(j["rows"].size() == 41);
}

TEST_CASE("fit from a file") {
  const auto path = temp_path("trace.csv");
  {
    decay::ModelParams p;
    p.components = {{0.4, 1e-3}};
    const auto tr = decay::synthesize_trace(p, log_spaced(1e-6, 1.0, 120), 0.01, 2);
    std::ofstream out(path);
    out << "t_s,signal\n";
    for (std::size_t i = 0; i < tr.size(); ++i) out << tr.t[i] << ',' << tr.y[i] << '\n';
  }
  const Run r = run({"fit", "--input", path.string()});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["n"] == 1);
  CHECK(j["tau_s"][0].get<double>() == Approx(1e-3).epsilon(0.05));
  CHECK(run({"fit", "--input", path.string(), "--threshold", "1e-9", "--nmax", "1"}).code == 3);
  CHECK(run({"fit", "--input", "/nonexistent.csv"}).code == 2);
  std::filesystem::remove(path);
}

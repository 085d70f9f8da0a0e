#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ffrate/constants.hpp"
#include "ffrate/coupling_factor.hpp"
#include "ffrate/decay_fit.hpp"
#include "ffrate/errors.hpp"
#include "ffrate/io.hpp"
#include "ffrate/lattice_sum.hpp"
#include "ffrate/materials.hpp"
#include "ffrate/mc_oracle.hpp"
#include "ffrate/rate_engine.hpp"

namespace ffrate::cli {
namespace {

using nlohmann::json;

struct Globals {
  std::string registry;
  std::string format;  // empty: per-command default
  std::uint64_t seed = 1;
  std::string out_path;
  int layers = 10;
  std::optional<double> gamma;
  std::string gamma_range;
  bool quiet = false;
};

struct Options {
  std::string material;
  double phi = 0.0;
  double theta = 0.0;
  double field_mt = 1.0;
  double conc = 10.0;
  // sweep
  std::string plane;
  double start = 0.0;
  std::optional<double> stop;
  double step = 1.0;
  // map
  std::string grid = "181x91";
  // concscan
  double conc_from = 0.01;
  double conc_to = 100.0;
  std::size_t points = 41;
  std::vector<double> conc_list;
  std::optional<double> target_s;
  // oracle
  std::vector<double> g;
  double big_theta = 0.0;
  double big_phi = 0.0;
  std::vector<double> u{0.0, 0.0, 1.0};
  std::uint64_t samples = 1'000'000;
  double sigma = 3.0;
  int realizations = 200;
  double box_m = 0.0;
  double cutoff_m = 0.0;
  // fit
  std::string input;
  double t1_opt_ms = 11.0;
  int n_max = 4;
  double threshold = 1e-3;
  double resolution_us = 10.0;
  // materials
  std::string name;
};

Registry load_registry(const Globals& g) {
  std::string path = g.registry;
  if (path.empty()) {
    if (const char* env = std::getenv("FFRATE_REGISTRY"); env && *env) path = env;
  }
  if (path.empty()) return builtin_registry();
  return Registry::load(path);
}

double parse_double(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw InvalidInput("cannot read " + what + " from '" + text + "'");
  }
}

std::optional<GammaRange> gamma_range(const Globals& g, const Material& m) {
  if (g.gamma_range.empty()) return std::nullopt;
  if (g.gamma_range == "material") return m.gamma_inh_range_mhz;
  const auto colon = g.gamma_range.find(':');
  if (colon == std::string::npos) throw InvalidInput("--gamma-range expects LO:HI or 'material'");
  GammaRange r{parse_double(g.gamma_range.substr(0, colon), "--gamma-range"),
               parse_double(g.gamma_range.substr(colon + 1), "--gamma-range")};
  if (!(r.lo_mhz > 0.0) || r.lo_mhz > r.hi_mhz) throw InvalidInput("--gamma-range needs 0 < LO <= HI");
  return r;
}

double gamma_of(const Globals& g, const Material& m) {
  const double v = g.gamma.value_or(m.gamma_inh_default_mhz);
  if (!(v > 0.0)) throw InvalidInput("--gamma must be > 0");
  return v;
}

Vec3 vec3_of(const std::vector<double>& v, const std::string& what) {
  if (v.size() != 3) throw InvalidInput(what + " expects three comma-separated values");
  return {v[0], v[1], v[2]};
}

bool want_json(const Globals& g, bool json_default) {
  if (g.format.empty()) return json_default;
  return g.format == "json";
}

void emit_json(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

void print_warnings(const Globals& g, std::ostream& err, const std::vector<std::string>& warnings) {
  if (g.quiet) return;
  for (const auto& w : warnings) err << "warning: " << w << '\n';
}

int cmd_rate(const Globals& g, const Options& o, std::ostream& out, std::ostream& err) {
  const Registry reg = load_registry(g);
  const RateEngine engine(reg.get(o.material), g.layers);
  RateQuery q;
  q.material = o.material;
  q.concentration_ppm = o.conc;
  q.field_t = o.field_mt * 1e-3;
  q.phi_deg = o.phi;
  q.theta_deg = o.theta;
  q.gamma_mhz = gamma_of(g, engine.material());
  q.gamma_range = gamma_range(g, engine.material());
  q.layers = g.layers;
  const RateResult r = engine.rate(q);
  print_warnings(g, err, r.warnings);
  if (want_json(g, true)) {
    emit_json(out, io::to_json(r));
  } else {
    io::write_rate_csv(out, r);
  }
  return ok;
}

int cmd_sweep(const Globals& g, const Options& o, std::ostream& out) {
  const Registry reg = load_registry(g);
  const RateEngine engine(reg.get(o.material), g.layers);
  const SweepPlane plane =
      o.plane.empty() ? default_plane(engine.material().sweep_frame) : sweep_plane_from_string(o.plane);
  const double stop = o.stop.value_or(180.0);
  const auto range = gamma_range(g, engine.material());
  const auto rows =
      engine.angular_sweep(plane, o.start, stop, o.step, o.conc, gamma_of(g, engine.material()), range);
  if (want_json(g, false)) {
    json j = io::sweep_json(rows, plane, range.has_value());
    j["material"] = o.material;
    j["concentration_ppm"] = o.conc;
    j["gamma_mhz"] = gamma_of(g, engine.material());
    emit_json(out, j);
  } else {
    io::write_sweep_csv(out, rows, range.has_value());
  }
  return ok;
}

int cmd_map(const Globals& g, const Options& o, std::ostream& out) {
  const Registry reg = load_registry(g);
  const RateEngine engine(reg.get(o.material), g.layers);
  const auto x = o.grid.find('x');
  if (x == std::string::npos) throw InvalidInput("--grid expects NPHIxNTHETA, e.g. 181x91");
  const double n_phi = parse_double(o.grid.substr(0, x), "--grid");
  const double n_theta = parse_double(o.grid.substr(x + 1), "--grid");
  if (n_phi < 2 || n_theta < 2 || n_phi != std::floor(n_phi) || n_theta != std::floor(n_theta)) {
    throw InvalidInput("--grid needs integers >= 2");
  }
  const LifetimeMap map = engine.lifetime_map(static_cast<std::size_t>(n_phi),
                                              static_cast<std::size_t>(n_theta), o.conc,
                                              gamma_of(g, engine.material()));
  if (want_json(g, false)) {
    json j = io::map_json(map);
    j["material"] = o.material;
    j["concentration_ppm"] = o.conc;
    j["gamma_mhz"] = gamma_of(g, engine.material());
    emit_json(out, j);
  } else {
    io::write_map_csv(out, map);
  }
  return ok;
}

int cmd_concscan(const Globals& g, const Options& o, std::ostream& out) {
  const Registry reg = load_registry(g);
  const RateEngine engine(reg.get(o.material), g.layers);
  std::vector<double> conc = o.conc_list;
  if (conc.empty()) {
    if (!(o.conc_from > 0.0) || !(o.conc_to >= o.conc_from) || o.points < 2) {
      throw InvalidInput("concentration range needs 0 < from <= to and points >= 2");
    }
    conc = log_spaced(o.conc_from, o.conc_to, o.points);
  }
  const double gamma = gamma_of(g, engine.material());
  const auto range = gamma_range(g, engine.material());
  const auto rows = engine.concentration_scan(conc, gamma, range);
  if (want_json(g, false)) {
    json j = io::scan_json(rows, range.has_value());
    const BestOrientation best = engine.best_orientation();
    j["material"] = o.material;
    j["gamma_mhz"] = gamma;
    j["best_orientation"] = {{"phi_deg", best.phi_deg}, {"theta_deg", best.theta_deg}, {"xi", best.xi}};
    if (o.target_s) {
      j["target_s"] = *o.target_s;
      j["conc_for_target_ppm"] = engine.concentration_for_lifetime(*o.target_s, gamma);
    }
    emit_json(out, j);
  } else {
    io::write_scan_csv(out, rows, range.has_value());
  }
  return ok;
}

oracle::OracleConfig oracle_config(const Globals& g, const Options& o) {
  oracle::OracleConfig c;
  c.samples = o.samples;
  c.seed = g.seed;
  c.sigma_level = o.sigma;
  c.realizations = o.realizations;
  c.box_size_m = o.box_m;
  c.cutoff_m = o.cutoff_m;
  c.layers = g.layers;
  c.validate();
  return c;
}

void emit_record(const Globals& g, std::ostream& out, const json& j) {
  if (want_json(g, true)) {
    emit_json(out, j);
  } else {
    io::write_record_csv(out, j);
  }
}

int cmd_oracle_xi(const Globals& g, const Options& o, std::ostream& out) {
  Vec3 values;
  EffectiveField eff;
  if (!o.material.empty()) {
    const Registry reg = load_registry(g);
    const PrincipalFrame frame = diagonalize_g(reg.get(o.material).g_tensor);
    values = frame.values;
    eff = effective_field(frame, direction_from_angles(o.phi, o.theta));
  } else {
    values = vec3_of(o.g, "--g");
    eff.theta = o.big_theta * constants::deg;
    eff.phi = o.big_phi * constants::deg;
  }
  const auto report = oracle::xi_monte_carlo(values, eff.theta, eff.phi, oracle_config(g, o));
  json j = io::to_json(report);
  j["g"] = {values.x(), values.y(), values.z()};
  j["big_theta_deg"] = eff.theta / constants::deg;
  j["big_phi_deg"] = eff.phi / constants::deg;
  j["seed"] = g.seed;
  emit_record(g, out, j);
  return report.pass ? ok : not_converged;
}

int cmd_oracle_pair(const Globals& g, const Options& o, std::ostream& out) {
  const Vec3 values = vec3_of(o.g, "--g");
  const Vec3 u = vec3_of(o.u, "--u");
  if (!(u.norm() > 0.0)) throw InvalidInput("--u must be non-zero");
  const Vec3 n = u.normalized();
  const double bt = o.big_theta * constants::deg;
  const double bp = o.big_phi * constants::deg;
  const auto brute = oracle::pair_element_bruteforce(values, bt, bp, n);
  const double theta = std::acos(std::clamp(n.z(), -1.0, 1.0));
  const double phi = std::atan2(n.y(), n.x());
  const double closed = coupling::matrix_element_a(values, bt, bp, theta, phi) -
                        coupling::matrix_element_b(values, bt, bp);
  const double rel = std::abs(brute - closed) / std::max(std::abs(closed), 1e-300);
  json j = {{"g", {values.x(), values.y(), values.z()}},
            {"big_theta_deg", o.big_theta},
            {"big_phi_deg", o.big_phi},
            {"u", {n.x(), n.y(), n.z()}},
            {"bruteforce_re", brute.real()},
            {"bruteforce_im", brute.imag()},
            {"closed_form", closed},
            {"rel_error", rel},
            {"pass", rel < 1e-10 || std::abs(brute - closed) < 1e-12}};
  emit_record(g, out, j);
  return j["pass"].get<bool>() ? ok : not_converged;
}

int cmd_oracle_placement(const Globals& g, const Options& o, std::ostream& out) {
  const Registry reg = load_registry(g);
  const Material& m = reg.get(o.material);
  const SpinDensity sd = spin_density(o.conc, m.cation_density, m.isotopic_fraction);
  const auto summary = oracle::random_placement_sum(sd.n_s, oracle_config(g, o));
  json j = io::to_json(summary);
  j["material"] = o.material;
  j["concentration_ppm"] = o.conc;
  j["seed"] = g.seed;
  emit_record(g, out, j);
  return ok;
}

int cmd_fit(const Globals& g, const Options& o, std::ostream& out, std::ostream& err) {
  decay::DecayTrace trace;
  if (o.input.empty() || o.input == "-") {
    throw InvalidInput("fit needs --input FILE");
  }
  std::ifstream in(o.input);
  if (!in) throw InvalidInput("cannot open '" + o.input + "'");
  trace = decay::read_trace_csv(in);
  decay::FitOptions opt;
  opt.t1_opt = o.t1_opt_ms * 1e-3;
  opt.n_max = o.n_max;
  opt.chi2_threshold = o.threshold;
  opt.resolution_s = o.resolution_us * 1e-6;
  const auto fit = decay::fit_decay(trace, opt);
  json j = io::to_json(fit);
  emit_record(g, out, j);
  if (!fit.converged && !g.quiet) {
    err << "warning: chi2 " << fit.chi2 << " did not drop below " << o.threshold << " for N <= "
        << o.n_max << '\n';
  }
  return fit.converged ? ok : not_converged;
}

int cmd_materials_list(const Globals& g, std::ostream& out) {
  const Registry reg = load_registry(g);
  if (want_json(g, false)) {
    emit_json(out, reg.list());
  } else {
    for (const auto& name : reg.list()) out << name << '\n';
  }
  return ok;
}

int cmd_materials_show(const Globals& g, const Options& o, std::ostream& out) {
  const Registry reg = load_registry(g);
  emit_record(g, out, io::to_json(reg.get(o.name)));
  return ok;
}

int cmd_materials_export(const Globals& g, std::ostream& out) {
  out << load_registry(g).to_json();
  return ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Orientation-dependent flip-flop lifetimes of anisotropic spin-1/2 dopants"};
  app.name("ffrate");
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  Options o;
  app.add_option("--registry", g.registry, "materials registry JSON (env FFRATE_REGISTRY)");
  app.add_option("--format", g.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--out", g.out_path, "write data here instead of stdout");
  app.add_option("--layers", g.layers, "lattice-sum radius in lattice units")->check(CLI::PositiveNumber);
  app.add_option("--gamma", g.gamma, "inhomogeneous linewidth, MHz");
  app.add_option("--gamma-range", g.gamma_range, "linewidth band LO:HI in MHz, or 'material'");
  app.add_flag("--quiet", g.quiet, "suppress warnings");

  auto add_material = [&](CLI::App* sub, bool required = true) {
    auto* opt = sub->add_option("--material,-m", o.material, "registry name");
    if (required) opt->required();
  };
  auto add_conc = [&](CLI::App* sub) {
    sub->add_option("--conc", o.conc, "dopant concentration, ppm")->capture_default_str();
  };

  auto* rate = app.add_subcommand("rate", "lifetime at one field orientation");
  add_material(rate);
  add_conc(rate);
  rate->add_option("--phi", o.phi, "azimuth, deg");
  rate->add_option("--theta", o.theta, "polar angle, deg");
  rate->add_option("--field", o.field_mt, "field magnitude, mT")->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "lifetime across the material's sweep plane");
  add_material(sweep);
  add_conc(sweep);
  sweep->add_option("--plane", o.plane, "d1d2 or ac (default from the material)");
  sweep->add_option("--start", o.start, "first angle, deg");
  sweep->add_option("--stop", o.stop, "last angle, deg (default 180)");
  sweep->add_option("--step", o.step, "angle step, deg")->capture_default_str();

  auto* map = app.add_subcommand("map", "lifetime over (phi, theta)");
  add_material(map);
  add_conc(map);
  map->add_option("--grid", o.grid, "NPHIxNTHETA grid points")->capture_default_str();

  auto* scan = app.add_subcommand("concscan", "best-orientation lifetime against concentration");
  add_material(scan);
  scan->add_option("--from", o.conc_from, "lowest concentration, ppm")->capture_default_str();
  scan->add_option("--to", o.conc_to, "highest concentration, ppm")->capture_default_str();
  scan->add_option("--points", o.points, "log-spaced points")->capture_default_str();
  scan->add_option("--conc-list", o.conc_list, "explicit concentrations, ppm")->delimiter(',');
  scan->add_option("--target", o.target_s, "report the concentration reaching this lifetime, s");

  auto* orc = app.add_subcommand("oracle", "brute-force checks of the closed forms");
  orc->require_subcommand(1);
  auto* oxi = orc->add_subcommand("xi", "Monte-Carlo Xi against the closed form");
  add_material(oxi, false);
  oxi->add_option("--phi", o.phi, "field azimuth in the crystal frame, deg");
  oxi->add_option("--theta", o.theta, "field polar angle in the crystal frame, deg");
  oxi->add_option("--g", o.g, "principal g values gx,gy,gz")->delimiter(',');
  oxi->add_option("--big-theta", o.big_theta, "effective-field polar angle, deg");
  oxi->add_option("--big-phi", o.big_phi, "effective-field azimuth, deg");
  oxi->add_option("--samples", o.samples, "Monte-Carlo samples")->capture_default_str();
  oxi->add_option("--sigma", o.sigma, "pass if |z| below this")->capture_default_str();
  oxi->get_option("--material")->excludes(oxi->get_option("--g"));

  auto* opair = orc->add_subcommand("pair", "explicit 4x4 matrix element against the closed form");
  opair->add_option("--g", o.g, "principal g values gx,gy,gz")->delimiter(',')->required();
  opair->add_option("--big-theta", o.big_theta, "effective-field polar angle, deg");
  opair->add_option("--big-phi", o.big_phi, "effective-field azimuth, deg");
  opair->add_option("--u", o.u, "inter-ion direction x,y,z")->delimiter(',');

  auto* oplace = orc->add_subcommand("placement", "random partner placement against the lattice sum");
  add_material(oplace);
  add_conc(oplace);
  oplace->add_option("--realizations", o.realizations, "independent placements")->capture_default_str();
  oplace->add_option("--box", o.box_m, "box edge, m (default 12 mean spacings)");
  oplace->add_option("--cutoff", o.cutoff_m, "closest partner, m (default 0.05 mean spacings)");

  auto* fit = app.add_subcommand("fit", "multi-exponential fit of a decay trace");
  fit->add_option("--input,-i", o.input, "CSV with t_s and signal columns")->required();
  fit->add_option("--t1-opt", o.t1_opt_ms, "fixed optical lifetime, ms")->capture_default_str();
  fit->add_option("--nmax", o.n_max, "largest N tried")->capture_default_str()->check(CLI::Range(1, 8));
  fit->add_option("--threshold", o.threshold, "chi2 acceptance")->capture_default_str();
  fit->add_option("--resolution", o.resolution_us, "shortest measurable lifetime, us")
      ->capture_default_str();

  auto* mats = app.add_subcommand("materials", "inspect the registry");
  mats->require_subcommand(1);
  auto* mlist = mats->add_subcommand("list", "material names");
  auto* mshow = mats->add_subcommand("show", "one material");
  mshow->add_option("name", o.name, "registry name")->required();
  auto* mexport = mats->add_subcommand("export", "the registry as JSON");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return usage;
  }

  std::ostringstream buffer;
  int code = ok;
  try {
    if (*rate) {
      code = cmd_rate(g, o, buffer, err);
    } else if (*sweep) {
      code = cmd_sweep(g, o, buffer);
    } else if (*map) {
      code = cmd_map(g, o, buffer);
    } else if (*scan) {
      code = cmd_concscan(g, o, buffer);
    } else if (*oxi) {
      if (o.material.empty() && o.g.empty()) throw InvalidInput("oracle xi needs --material or --g");
      code = cmd_oracle_xi(g, o, buffer);
    } else if (*opair) {
      code = cmd_oracle_pair(g, o, buffer);
    } else if (*oplace) {
      code = cmd_oracle_placement(g, o, buffer);
    } else if (*fit) {
      code = cmd_fit(g, o, buffer, err);
    } else if (*mlist) {
      code = cmd_materials_list(g, buffer);
    } else if (*mshow) {
      code = cmd_materials_show(g, o, buffer);
    } else if (*mexport) {
      code = cmd_materials_export(g, buffer);
    }
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return data_error;
  } catch (const NotConverged& e) {
    err << "error: " << e.what() << '\n';
    return not_converged;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return data_error;
  }

  if (g.out_path.empty()) {
    out << buffer.str();
  } else {
    std::ofstream file(g.out_path, std::ios::binary);
    if (!file || !(file << buffer.str())) {
      err << "error: cannot write '" << g.out_path << "'\n";
      return data_error;
    }
  }
  return code;
}

}  // namespace ffrate::cli

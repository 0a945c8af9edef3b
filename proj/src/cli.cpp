#include "ecp/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"

namespace ecp::cli {

Environment Environment::from_process() {
  Environment env;
  if (const char* s = std::getenv("ECP_SEED")) env.seed = s;
  return env;
}

namespace {

[[noreturn]] void config_error(const std::string& field, const std::string& what) {
  throw EcpError(ErrorKind::ConfigError, "field '" + field + "': " + what);
}

void reject_unknown(const Json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) config_error(where.empty() ? "<root>" : where, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) config_error(where.empty() ? key : where + "." + key, "unknown key");
  }
}

double number_at(const Json& obj, const std::string& key, const std::string& field) {
  const Json& v = obj.at(key);
  if (!v.is_number()) config_error(field, "expected a number");
  return v.get<double>();
}

std::int64_t integer_at(const Json& obj, const std::string& key, const std::string& field) {
  const Json& v = obj.at(key);
  if (!v.is_number_integer()) config_error(field, "expected an integer");
  return v.get<std::int64_t>();
}

int round_limit(const Json& obj, const std::string& key) {
  const std::int64_t v = integer_at(obj, key, key);
  if (v < 1 || v > 64) config_error(key, "must be in [1, 64]");
  return static_cast<int>(v);
}

analytics::CavitySetting parse_cavity(const Json& obj, std::optional<double>& omega) {
  reject_unknown(obj, "cavity", {"kappa", "kappa_s", "g", "gamma", "omega0", "omega_c", "omega_x", "omega", "convention"});
  analytics::CavitySetting setting;
  auto& p = setting.params;
  const std::pair<const char*, double*> fields[] = {{"kappa", &p.kappa},   {"kappa_s", &p.kappa_s},
                                                     {"g", &p.g},           {"gamma", &p.gamma},
                                                     {"omega0", &p.omega0}, {"omega_c", &p.omega_c},
                                                     {"omega_x", &p.omega_x}};
  for (const auto& [key, dst] : fields) {
    if (obj.contains(key)) *dst = number_at(obj, key, std::string("cavity.") + key);
  }
  if (obj.contains("omega")) omega = number_at(obj, "omega", "cavity.omega");
  if (obj.contains("convention")) {
    if (!obj["convention"].is_string()) config_error("cavity.convention", "expected a string");
    try {
      setting.convention = cavity::convention_from_string(obj["convention"].get<std::string>());
    } catch (const EcpError&) {
      config_error("cavity.convention", "must be 'verbatim' or 'corrected'");
    }
  }
  try {
    p.validate();
  } catch (const EcpError& e) {
    config_error("cavity", e.what());
  }
  return setting;
}

void parse_sweep(const Json& obj, analytics::SweepSpec& spec) {
  reject_unknown(obj, "sweep", {"alpha2", "alpha1_range", "points"});
  if (obj.contains("alpha2")) spec.alpha2 = number_at(obj, "alpha2", "sweep.alpha2");
  if (obj.contains("alpha1_range")) {
    const Json& r = obj["alpha1_range"];
    if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number()) {
      config_error("sweep.alpha1_range", "expected [lo, hi]");
    }
    spec.alpha1_lo = r[0].get<double>();
    spec.alpha1_hi = r[1].get<double>();
  }
  if (obj.contains("points")) {
    const std::int64_t n = integer_at(obj, "points", "sweep.points");
    if (n < 1) config_error("sweep.points", "must be >= 1");
    spec.n_points = static_cast<int>(n);
  }
}

protocol::WCoefficients coefficients_from(const std::vector<double>& v, const std::string& field) {
  if (v.size() != 3) config_error(field, "expected three coefficients");
  try {
    return protocol::WCoefficients::normalized(v[0], v[1], v[2]);
  } catch (const EcpError& e) {
    throw EcpError(ErrorKind::InvalidCoefficients, "field '" + field + "': " + e.what());
  }
}

}  // namespace

RunConfigFile parse_config(const Json& doc) {
  reject_unknown(doc, "", {"alpha", "max_rounds_alice", "max_rounds_charlie", "mode", "n_shots", "rng_seed",
                           "merge_heralds", "cavity", "sweep"});
  RunConfigFile rc;
  if (doc.contains("alpha")) {
    const Json& a = doc["alpha"];
    if (!a.is_array()) config_error("alpha", "expected an array of three numbers");
    std::vector<double> v;
    for (const auto& x : a) {
      if (!x.is_number()) config_error("alpha", "expected an array of three numbers");
      v.push_back(x.get<double>());
    }
    rc.alpha = coefficients_from(v, "alpha");
  }
  if (doc.contains("max_rounds_alice")) rc.protocol.max_rounds_alice = round_limit(doc, "max_rounds_alice");
  if (doc.contains("max_rounds_charlie")) rc.protocol.max_rounds_charlie = round_limit(doc, "max_rounds_charlie");
  if (doc.contains("rng_seed")) {
    if (!doc["rng_seed"].is_number_unsigned()) config_error("rng_seed", "expected a nonnegative integer");
    rc.protocol.rng_seed = doc["rng_seed"].get<std::uint64_t>();
  }

  std::string mode = "tree";
  if (doc.contains("mode")) {
    if (!doc["mode"].is_string()) config_error("mode", "expected \"tree\" or \"mc\"");
    mode = doc["mode"].get<std::string>();
    if (mode != "tree" && mode != "mc") config_error("mode", "expected \"tree\" or \"mc\"");
  }
  if (mode == "mc") {
    protocol::MonteCarlo mc{100000};
    if (doc.contains("n_shots")) {
      const std::int64_t n = integer_at(doc, "n_shots", "n_shots");
      if (n < 1) config_error("n_shots", "must be >= 1");
      mc.shots = static_cast<std::uint64_t>(n);
    }
    if (doc.contains("merge_heralds")) config_error("merge_heralds", "only applies to tree mode");
    rc.protocol.mode = mc;
  } else {
    if (doc.contains("n_shots")) config_error("n_shots", "only applies to mc mode");
    protocol::ExhaustiveTree tree;
    if (doc.contains("merge_heralds")) {
      if (!doc["merge_heralds"].is_boolean()) config_error("merge_heralds", "expected a boolean");
      tree.merge_heralds = doc["merge_heralds"].get<bool>();
    }
    rc.protocol.mode = tree;
  }

  if (doc.contains("cavity")) {
    rc.cavity = parse_cavity(doc["cavity"], rc.omega);
    rc.protocol.gate_mode = protocol::LossyCavity{rc.cavity->params, rc.cavity->convention, rc.omega};
    rc.sweep.cavity = rc.cavity;
  }
  if (doc.contains("sweep")) parse_sweep(doc["sweep"], rc.sweep);
  return rc;
}

RunConfigFile load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw EcpError(ErrorKind::ConfigError, "cannot open config file '" + path + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw EcpError(ErrorKind::ConfigError, "config file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

namespace {

std::vector<double> parse_list(const std::string& text, const std::string& flag, char sep = ',') {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || end != item.c_str() + item.size()) {
      throw EcpError(ErrorKind::ConfigError, "flag " + flag + ": cannot parse '" + item + "' as a number");
    }
    out.push_back(v);
  }
  return out;
}

std::pair<int, int> parse_pair(const std::string& text, const std::string& flag) {
  const auto v = parse_list(text, flag);
  if (v.size() != 2 || v[0] != std::floor(v[0]) || v[1] != std::floor(v[1])) {
    throw EcpError(ErrorKind::ConfigError, "flag " + flag + ": expected two integers 'a,b'");
  }
  return {static_cast<int>(v[0]), static_cast<int>(v[1])};
}

std::uint64_t parse_seed(const std::string& text, const std::string& source) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(text, &used, 0);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw EcpError(ErrorKind::ConfigError, source + ": '" + text + "' is not an unsigned 64-bit seed");
  }
}

analytics::CavitySetting cavity_from_flag(const std::string& text, const std::string& convention) {
  const auto v = parse_list(text, "--cavity");
  if (v.size() != 3) throw EcpError(ErrorKind::ConfigError, "flag --cavity: expected kappa_s,g,gamma");
  analytics::CavitySetting s;
  s.params.kappa_s = v[0];
  s.params.g = v[1];
  s.params.gamma = v[2];
  s.params.validate();
  if (!convention.empty()) s.convention = cavity::convention_from_string(convention);
  return s;
}

std::ostream& open_output(const std::string& path, std::ofstream& file, std::ostream& fallback) {
  if (path.empty() || path == "-") return fallback;
  file.open(path);
  if (!file) throw EcpError(ErrorKind::ConfigError, "cannot write '" + path + "'");
  return file;
}

struct SimulateFlags {
  std::string config, alpha, rounds, mode, cavity, convention, output, seed;
  std::uint64_t shots = 0;
  double omega = 0.0;
  bool merge = false;
};

int cmd_simulate(CLI::App& sub, const SimulateFlags& f, std::ostream& out, const Environment& env) {
  RunConfigFile rc = f.config.empty() ? RunConfigFile{} : load_config(f.config);
  protocol::ProtocolConfig cfg = rc.protocol;
  const bool seed_in_file = rc.protocol.rng_seed != 0;

  if (!sub.count("--seed") && env.seed && !seed_in_file) cfg.rng_seed = parse_seed(*env.seed, "ECP_SEED");
  if (sub.count("--seed")) cfg.rng_seed = parse_seed(f.seed, "flag --seed");

  std::optional<protocol::WCoefficients> alpha = rc.alpha;
  if (sub.count("--alpha")) alpha = coefficients_from(parse_list(f.alpha, "--alpha"), "--alpha");
  if (!alpha) throw EcpError(ErrorKind::ConfigError, "field 'alpha': required (use --alpha a1,a2,a3)");

  if (sub.count("--rounds")) std::tie(cfg.max_rounds_alice, cfg.max_rounds_charlie) = parse_pair(f.rounds, "--rounds");
  if (sub.count("--mode")) {
    if (f.mode == "mc") {
      if (!std::holds_alternative<protocol::MonteCarlo>(cfg.mode)) cfg.mode = protocol::MonteCarlo{100000};
    } else if (f.mode == "tree") {
      if (!std::holds_alternative<protocol::ExhaustiveTree>(cfg.mode)) cfg.mode = protocol::ExhaustiveTree{};
    } else {
      throw EcpError(ErrorKind::ConfigError, "flag --mode: expected tree or mc");
    }
  }
  if (sub.count("--shots")) {
    auto* mc = std::get_if<protocol::MonteCarlo>(&cfg.mode);
    if (!mc) throw EcpError(ErrorKind::ConfigError, "flag --shots: only valid with --mode mc");
    mc->shots = f.shots;
  }
  if (sub.count("--merge-heralds")) {
    auto* tree = std::get_if<protocol::ExhaustiveTree>(&cfg.mode);
    if (!tree) throw EcpError(ErrorKind::ConfigError, "flag --merge-heralds: only valid in tree mode");
    tree->merge_heralds = f.merge;
  }
  if (sub.count("--cavity")) {
    const auto s = cavity_from_flag(f.cavity, f.convention);
    cfg.gate_mode = protocol::LossyCavity{s.params, s.convention, rc.omega};
  } else if (sub.count("--convention")) {
    auto* lossy = std::get_if<protocol::LossyCavity>(&cfg.gate_mode);
    if (!lossy) throw EcpError(ErrorKind::ConfigError, "flag --convention: needs a cavity");
    lossy->convention = cavity::convention_from_string(f.convention);
  }
  if (sub.count("--omega-detuning")) {
    auto* lossy = std::get_if<protocol::LossyCavity>(&cfg.gate_mode);
    if (!lossy) throw EcpError(ErrorKind::ConfigError, "flag --omega-detuning: needs a cavity");
    lossy->omega = f.omega;
  }

  const protocol::ProtocolTrace trace = protocol::run_protocol(*alpha, cfg);
  std::ofstream file;
  std::ostream& dst = open_output(f.output, file, out);
  dst << to_json(trace).dump(2) << '\n';
  out << "total_success_probability=" << analytics::format_number(trace.total_success_probability) << '\n';
  return kExitOk;
}

struct SweepFlags {
  std::string config, range, cavity, convention, format = "csv", output;
  double alpha2 = 0.0;
  int points = 0;
};

int cmd_sweep(CLI::App& sub, const SweepFlags& f, std::ostream& out) {
  RunConfigFile rc = f.config.empty() ? RunConfigFile{} : load_config(f.config);
  analytics::SweepSpec spec = rc.sweep;
  if (sub.count("--alpha2")) spec.alpha2 = f.alpha2;
  if (sub.count("--alpha1-range")) {
    const auto v = parse_list(f.range, "--alpha1-range", ':');
    if (v.size() != 2) throw EcpError(ErrorKind::ConfigError, "flag --alpha1-range: expected lo:hi");
    spec.alpha1_lo = v[0];
    spec.alpha1_hi = v[1];
  }
  if (sub.count("--points")) spec.n_points = f.points;
  if (sub.count("--cavity")) {
    spec.cavity = cavity_from_flag(f.cavity, f.convention);
  } else if (sub.count("--convention")) {
    if (!spec.cavity) throw EcpError(ErrorKind::ConfigError, "flag --convention: needs --cavity");
    spec.cavity->convention = cavity::convention_from_string(f.convention);
  }
  if (f.format != "csv" && f.format != "json") {
    throw EcpError(ErrorKind::ConfigError, "flag --format: expected csv or json");
  }

  const auto points = analytics::sweep(spec);
  std::ofstream file;
  std::ostream& dst = open_output(f.output, file, out);
  if (f.format == "csv") {
    analytics::write_csv(dst, points);
  } else {
    dst << to_json(points).dump(2) << '\n';
  }
  return kExitOk;
}

struct VerifyFlags {
  int grid = 20;
  std::string depth = "4,4";
  double tol = 1e-10;
  std::string json;
};

int cmd_verify(const VerifyFlags& f, std::ostream& out, const Environment& env) {
  const auto [ka, kc] = parse_pair(f.depth, "--depth");
  if (ka < 1 || kc < 1 || ka > 8 || kc > 8) throw EcpError(ErrorKind::ConfigError, "flag --depth: each in [1, 8]");
  if (f.grid < 1) throw EcpError(ErrorKind::ConfigError, "flag --grid: must be >= 1");
  if (!(f.tol >= 0.0)) throw EcpError(ErrorKind::ConfigError, "flag --tol: must be >= 0");

  const auto reports = oracle::compare_all(oracle::simplex_grid(f.grid), ka, kc, {f.tol}, env.model);
  oracle::print_table(out, reports);
  if (!f.json.empty()) {
    std::ofstream file;
    open_output(f.json, file, out) << to_json(reports).dump(2) << '\n';
  }
  for (const auto& r : reports) {
    if (!r.pass) return kExitVerifyFailed;
  }
  return kExitOk;
}

struct CoeffsFlags {
  double kappa_s = 0.0, g = 0.0, gamma = 0.1, detuning = 0.0;
  std::string convention = "verbatim";
};

int cmd_coeffs(const CoeffsFlags& f, std::ostream& out) {
  cavity::CavityParams p;
  p.kappa_s = f.kappa_s;
  p.g = f.g;
  p.gamma = f.gamma;
  const auto conv = cavity::convention_from_string(f.convention);
  const auto sc = cavity::scatter_coefficients(p, f.detuning, conv);
  const auto op = cavity::lossy_operators(sc);
  Json j = to_json(sc);
  j["transmission_factor"] = op.transmission_factor();
  j["reflection_factor"] = op.reflection_factor();
  j["convention"] = cavity::to_string(conv);
  j["params"] = to_json(p);
  j["omega"] = f.detuning;
  out << j.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const Environment& env) {
  CLI::App app{"Exact simulator and closed-form calculator for single-photon W-state concentration", "ecp"};
  app.require_subcommand(1);

  SimulateFlags sim_f;
  auto* sim = app.add_subcommand("simulate", "Run the two-station protocol and emit its branch trace as JSON");
  sim->add_option("--config", sim_f.config, "JSON run-config file (flags override it)");
  sim->add_option("--alpha", sim_f.alpha, "a1,a2,a3 (normalized on read)");
  sim->add_option("--rounds", sim_f.rounds, "Round limits for Alice and Charlie, e.g. 1,1");
  sim->add_option("--mode", sim_f.mode, "tree or mc");
  sim->add_option("--shots", sim_f.shots, "Monte Carlo shots")->check(CLI::PositiveNumber);
  sim->add_option("--seed", sim_f.seed, "RNG seed (default: ECP_SEED, else 0)");
  sim->add_option("--cavity", sim_f.cavity, "kappa_s,g,gamma in units of kappa; enables the lossy gate");
  sim->add_option("--convention", sim_f.convention, "verbatim or corrected");
  sim->add_option("--omega-detuning", sim_f.omega, "Photon frequency relative to resonance");
  sim->add_flag("--merge-heralds", sim_f.merge, "Fold heralded detector pairs into one branch");
  sim->add_option("--output,-o", sim_f.output, "Trace file (default: stdout)");

  SweepFlags sw_f;
  auto* sw = app.add_subcommand("sweep", "Tabulate success probabilities against alpha1");
  sw->add_option("--config", sw_f.config, "JSON run-config file (flags override it)");
  sw->add_option("--alpha2", sw_f.alpha2, "Fixed alpha2 (default 1/sqrt3)");
  sw->add_option("--alpha1-range", sw_f.range, "lo:hi");
  sw->add_option("--points", sw_f.points, "Number of samples")->check(CLI::PositiveNumber);
  sw->add_option("--cavity", sw_f.cavity, "kappa_s,g,gamma in units of kappa");
  sw->add_option("--convention", sw_f.convention, "verbatim or corrected");
  sw->add_option("--format", sw_f.format, "csv or json");
  sw->add_option("--output,-o", sw_f.output, "Output file (default: stdout)");

  VerifyFlags ver_f;
  auto* ver = app.add_subcommand("verify", "Check every closed form against exhaustive branch enumeration");
  ver->add_option("--grid", ver_f.grid, "Simplex grid size N (N(N+1)/2 points)");
  ver->add_option("--depth", ver_f.depth, "Round depths for Alice and Charlie, e.g. 4,4");
  ver->add_option("--tol", ver_f.tol, "Absolute tolerance");
  ver->add_option("--json", ver_f.json, "Also write the reports as JSON");

  CoeffsFlags co_f;
  auto* co = app.add_subcommand("coeffs", "Print cavity scattering coefficients and correction factors");
  co->add_option("--kappa-s", co_f.kappa_s, "Side leakage rate");
  co->add_option("--g", co_f.g, "Coupling strength");
  co->add_option("--gamma", co_f.gamma, "Dipole decay rate");
  co->add_option("--omega-detuning", co_f.detuning, "Photon frequency relative to resonance");
  co->add_option("--convention", co_f.convention, "verbatim or corrected");

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.push_back("ecp");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (sim->parsed()) return cmd_simulate(*sim, sim_f, out, env);
    if (sw->parsed()) return cmd_sweep(*sw, sw_f, out);
    if (ver->parsed()) return cmd_verify(ver_f, out, env);
    if (co->parsed()) return cmd_coeffs(co_f, out);
  } catch (const EcpError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace ecp::cli

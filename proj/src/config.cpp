// SPDX-License-Identifier: Apache-2.0
#include "mmfdr/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace mmfdr {

std::string to_string(Mode m) {
  switch (m) {
    case Mode::kMc: return "mc";
    case Mode::kAsym: return "asym";
    case Mode::kBoth: return "both";
    case Mode::kOptimizeSe: return "optimize-se";
    case Mode::kOptimizeEe: return "optimize-ee";
  }
  return "asym";
}

Mode mode_from_string(const std::string& s) {
  static const std::map<std::string, Mode> m = {{"mc", Mode::kMc},
                                                {"asym", Mode::kAsym},
                                                {"both", Mode::kBoth},
                                                {"optimize-se", Mode::kOptimizeSe},
                                                {"optimize-ee", Mode::kOptimizeEe}};
  const auto it = m.find(s);
  if (it == m.end()) throw ConfigError("unknown mode '" + s + "'");
  return it->second;
}

const std::vector<std::string>& sweep_variables() {
  static const std::vector<std::string> v = {
      "N",    "N_R",  "N_T",  "N_R_split", "K",    "beta_EI", "beta_EI_db", "nu",
      "mu",   "nu_R", "mu_R", "E_T",       "E_T_db", "r0",    "r_ei",       "target_rate"};
  return v;
}

int default_dof(int K, int N) { return std::max(K, 2 * N / 3); }

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s;
}

double to_double(const std::string& s, int line) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ConfigError("expected a number, got '" + s + "'", line);
  }
  if (trim(s.substr(pos)) != "") throw ConfigError("expected a number, got '" + s + "'", line);
  return v;
}

std::uint64_t to_u64(const std::string& s, int line) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &pos);
  } catch (const std::exception&) {
    throw ConfigError("expected an unsigned integer, got '" + s + "'", line);
  }
  if (s.front() == '-' || trim(s.substr(pos)) != "")
    throw ConfigError("expected an unsigned integer, got '" + s + "'", line);
  return v;
}

long long to_int(const std::string& s, int line) {
  const double v = to_double(s, line);
  if (v != std::floor(v) || std::abs(v) > 9.0e15) throw ConfigError("expected an integer, got '" + s + "'", line);
  return static_cast<long long>(v);
}

std::vector<double> to_list(const std::string& s, int line) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(trim(item), line));
  if (out.empty()) throw ConfigError("empty list", line);
  return out;
}

bool to_bool(const std::string& s, int line) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("expected a boolean, got '" + s + "'", line);
}

struct KeySpec {
  const char* section;
  bool db_ok;
};

const std::map<std::string, KeySpec>& key_table() {
  static const std::map<std::string, KeySpec> t = {
      {"K", {"topology", false}},       {"N_S", {"topology", false}},
      {"N_D", {"topology", false}},     {"N_R", {"topology", false}},
      {"N_T", {"topology", false}},     {"scale_nodes", {"topology", false}},
      {"E_S", {"powers", true}},        {"E_S_max", {"powers", true}},
      {"E_R", {"powers", true}},        {"E_R_max", {"powers", true}},
      {"E_T", {"powers", true}},        {"nu_S", {"impairments", true}},
      {"nu_D", {"impairments", true}},  {"mu_D", {"impairments", true}},
      {"nu_R", {"impairments", true}},  {"mu_R", {"impairments", true}},
      {"r0", {"correlation", false}},   {"r_ei", {"correlation", false}},
      {"phase_seed", {"correlation", false}}, {"beta_SR", {"correlation", true}},
      {"beta_RD", {"correlation", true}}, {"beta_EI", {"correlation", true}},
      {"T", {"training", false}},       {"tau", {"training", false}},
      {"mode", {"mc", false}},          {"trials", {"mc", false}},
      {"seed", {"mc", false}},          {"workers", {"mc", false}},
      {"output", {"mc", false}},        {"sweep_var", {"mc", false}},
      {"sweep_values", {"mc", false}},  {"form", {"mc", false}},
      {"A_R", {"optimizer", false}},    {"A_T", {"optimizer", false}},
      {"L", {"optimizer", false}},      {"target_rate", {"optimizer", false}},
  };
  return t;
}

struct Entry {
  std::string value;
  bool db = false;
  int line = 0;
};

// scalar or per-pair list in linear units
std::vector<double> real_list(const Entry& e) {
  std::vector<double> v = to_list(e.value, e.line);
  if (e.db)
    for (double& x : v) x = db_to_lin(x);
  return v;
}

double real_scalar(const Entry& e) {
  const std::vector<double> v = real_list(e);
  if (v.size() != 1) throw ConfigError("expected a single value", e.line);
  return v.front();
}

std::vector<double> per_pair(const Entry& e, int K, const char* name) {
  std::vector<double> v = real_list(e);
  if (v.size() == 1) v.assign(K, v.front());
  if (int(v.size()) != K)
    throw ConfigError(std::string(name) + " needs 1 or K=" + std::to_string(K) + " entries", e.line);
  return v;
}

void refresh_scenario(SystemConfig& c, const ExperimentSpec& spec, double r0, double r_ei) {
  if (spec.scale_nodes && c.K >= 1) {
    c.N_S = std::max(1, c.N_R / c.K);
    c.N_D = std::max(1, c.N_T / c.K);
  }
  c.broadcast();
  assign_random_phases(c, r0, r_ei, spec.phase_seed);
}

}  // namespace

ExperimentSpec parse_config_text(const std::string& text) {
  static const std::set<std::string> sections = {"topology", "powers",   "impairments", "correlation",
                                                 "training", "mc",       "optimizer"};
  std::map<std::string, Entry> kv;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    if (const auto h = s.find('#'); h != std::string::npos) s = s.substr(0, h);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("malformed section header", line);
      section = trim(s.substr(1, s.size() - 2));
      if (!sections.count(section)) throw ConfigError("unknown section [" + section + "]", line);
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value", line);
    std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (section.empty()) throw ConfigError("key '" + key + "' outside any section", line);
    bool db = false;
    auto it = key_table().find(key);
    if (it == key_table().end() && key.size() > 3 && key.ends_with("_db")) {
      it = key_table().find(key.substr(0, key.size() - 3));
      if (it == key_table().end() || !it->second.db_ok) throw ConfigError("unknown key '" + key + "'", line);
      key = it->first;
      db = true;
    }
    if (it == key_table().end()) throw ConfigError("unknown key '" + key + "'", line);
    if (section != it->second.section)
      throw ConfigError("key '" + key + "' belongs in [" + it->second.section + "]", line);
    if (kv.count(key)) throw ConfigError("duplicate key '" + key + "'", line);
    if (value.empty()) throw ConfigError("missing value for '" + key + "'", line);
    kv[key] = {value, db, line};
  }

  const auto has = [&](const char* k) { return kv.count(k) > 0; };
  const auto get_int = [&](const char* k, long long dflt) {
    return has(k) ? to_int(kv[k].value, kv[k].line) : dflt;
  };

  ExperimentSpec spec;
  SystemConfig& c = spec.scenario;
  c.K = int(get_int("K", 1));
  if (c.K < 1) throw ConfigError("K must be >= 1", has("K") ? kv["K"].line : 0);
  c.N_S = int(get_int("N_S", 1));
  c.N_D = int(get_int("N_D", 1));
  c.N_R = int(get_int("N_R", 64));
  c.N_T = int(get_int("N_T", 64));
  if (has("scale_nodes")) spec.scale_nodes = to_bool(kv["scale_nodes"].value, kv["scale_nodes"].line);
  c.T = int(get_int("T", 300));
  c.tau = int(get_int("tau", 2));
  const int K = c.K;

  const double e5 = db_to_lin(5.0);
  c.E_S = has("E_S") ? per_pair(kv["E_S"], K, "E_S") : std::vector<double>(K, e5);
  c.E_S_max = has("E_S_max") ? per_pair(kv["E_S_max"], K, "E_S_max") : c.E_S;
  if (has("E_R")) {
    c.E_R = per_pair(kv["E_R"], K, "E_R");
  } else if (has("E_R_max")) {
    c.E_R.assign(K, real_scalar(kv["E_R_max"]) / K);
  } else {
    c.E_R.assign(K, e5);
  }
  c.E_R_max = has("E_R_max") ? real_scalar(kv["E_R_max"]) : c.sum_E_R();
  if (has("E_T")) c.E_T = real_scalar(kv["E_T"]);

  c.nu_S = has("nu_S") ? per_pair(kv["nu_S"], K, "nu_S") : std::vector<double>(K, 0.0);
  c.nu_D = has("nu_D") ? per_pair(kv["nu_D"], K, "nu_D") : std::vector<double>(K, 0.0);
  c.mu_D = has("mu_D") ? per_pair(kv["mu_D"], K, "mu_D") : std::vector<double>(K, 0.0);
  c.nu_R = has("nu_R") ? real_scalar(kv["nu_R"]) : 0.0;
  c.mu_R = has("mu_R") ? real_scalar(kv["mu_R"]) : 0.0;

  c.beta_SR = has("beta_SR") ? per_pair(kv["beta_SR"], K, "beta_SR") : std::vector<double>(K, 1.0);
  c.beta_RD = has("beta_RD") ? per_pair(kv["beta_RD"], K, "beta_RD") : std::vector<double>(K, 1.0);
  c.beta_EI = has("beta_EI") ? real_scalar(kv["beta_EI"]) : 1.0;
  if (has("r0")) spec.r0 = to_double(kv["r0"].value, kv["r0"].line);
  if (has("r_ei")) spec.r_ei = to_double(kv["r_ei"].value, kv["r_ei"].line);
  if (has("phase_seed")) spec.phase_seed = to_u64(kv["phase_seed"].value, kv["phase_seed"].line);

  if (has("mode")) {
    try {
      spec.mode = mode_from_string(kv["mode"].value);
    } catch (const ConfigError& e) {
      throw ConfigError(e.what(), kv["mode"].line);
    }
  }
  spec.trials = int(get_int("trials", 1000));
  if (has("seed")) spec.seed = to_u64(kv["seed"].value, kv["seed"].line);
  spec.workers = int(get_int("workers", 1));
  if (has("output")) spec.output = kv["output"].value;
  if (has("sweep_var")) spec.sweep_var = kv["sweep_var"].value;
  if (has("sweep_values")) spec.sweep_values = to_list(kv["sweep_values"].value, kv["sweep_values"].line);
  if (has("form")) {
    const std::string& f = kv["form"].value;
    if (f == "refined") spec.form = AsymForm::kRefined;
    else if (f == "leading") spec.form = AsymForm::kLeadingOrder;
    else throw ConfigError("form must be refined or leading", kv["form"].line);
  }
  spec.A_R = int(get_int("A_R", 0));
  spec.A_T = int(get_int("A_T", 0));
  spec.jdpo_L = int(get_int("L", 3));
  if (has("target_rate")) spec.target_rate = to_double(kv["target_rate"].value, kv["target_rate"].line);

  if (spec.r0 < 0.0 || spec.r0 > 1.0 || spec.r_ei < 0.0 || spec.r_ei > 1.0)
    throw ConfigError("correlation magnitudes must lie in [0, 1]");
  if (spec.scale_nodes) {
    c.N_S = std::max(1, c.N_R / K);
    c.N_D = std::max(1, c.N_T / K);
  }
  c.r_SR.assign(K, 0.0);
  c.r_RD.assign(K, 0.0);
  assign_random_phases(c, spec.r0, spec.r_ei, spec.phase_seed);
  spec.validate();
  return spec;
}

ExperimentSpec parse_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

std::string serialize(const ExperimentSpec& spec) {
  const SystemConfig& c = spec.scenario;
  std::ostringstream os;
  os << "[topology]\n"
     << "K = " << c.K << "\n"
     << "N_S = " << c.N_S << "\n"
     << "N_D = " << c.N_D << "\n"
     << "N_R = " << c.N_R << "\n"
     << "N_T = " << c.N_T << "\n"
     << "scale_nodes = " << (spec.scale_nodes ? "true" : "false") << "\n\n"
     << "[powers]\n"
     << "E_S = " << fmt_list(c.E_S) << "\n"
     << "E_S_max = " << fmt_list(c.E_S_max) << "\n"
     << "E_R = " << fmt_list(c.E_R) << "\n"
     << "E_R_max = " << fmt(c.E_R_max) << "\n"
     << "E_T = " << fmt(c.E_T) << "\n\n"
     << "[impairments]\n"
     << "nu_S = " << fmt_list(c.nu_S) << "\n"
     << "nu_D = " << fmt_list(c.nu_D) << "\n"
     << "mu_D = " << fmt_list(c.mu_D) << "\n"
     << "nu_R = " << fmt(c.nu_R) << "\n"
     << "mu_R = " << fmt(c.mu_R) << "\n\n"
     << "[correlation]\n"
     << "r0 = " << fmt(spec.r0) << "\n"
     << "r_ei = " << fmt(spec.r_ei) << "\n"
     << "phase_seed = " << spec.phase_seed << "\n"
     << "beta_SR = " << fmt_list(c.beta_SR) << "\n"
     << "beta_RD = " << fmt_list(c.beta_RD) << "\n"
     << "beta_EI = " << fmt(c.beta_EI) << "\n\n"
     << "[training]\n"
     << "T = " << c.T << "\n"
     << "tau = " << c.tau << "\n\n"
     << "[mc]\n"
     << "mode = " << to_string(spec.mode) << "\n"
     << "trials = " << spec.trials << "\n"
     << "seed = " << spec.seed << "\n"
     << "workers = " << spec.workers << "\n"
     << "form = " << (spec.form == AsymForm::kRefined ? "refined" : "leading") << "\n";
  if (!spec.output.empty()) os << "output = " << spec.output << "\n";
  if (!spec.sweep_var.empty()) {
    os << "sweep_var = " << spec.sweep_var << "\n"
       << "sweep_values = " << fmt_list(spec.sweep_values) << "\n";
  }
  os << "\n[optimizer]\n"
     << "A_R = " << spec.A_R << "\n"
     << "A_T = " << spec.A_T << "\n"
     << "L = " << spec.jdpo_L << "\n"
     << "target_rate = " << fmt(spec.target_rate) << "\n";
  return os.str();
}

SystemConfig scenario_at(const ExperimentSpec& spec, double v) {
  SystemConfig c = spec.scenario;
  double r0 = spec.r0, r_ei = spec.r_ei;
  const std::string& s = spec.sweep_var;
  const auto as_int = [&] {
    if (v != std::floor(v) || v < 1) throw ConfigError(s + " sweep values must be positive integers");
    return int(v);
  };
  if (s.empty() || s == "target_rate") {
  } else if (s == "N") {
    c.N_R = c.N_T = as_int();
  } else if (s == "N_R") {
    c.N_R = as_int();
  } else if (s == "N_T") {
    c.N_T = as_int();
  } else if (s == "N_R_split") {
    const int total = spec.scenario.N_R + spec.scenario.N_T;
    c.N_R = as_int();
    c.N_T = total - c.N_R;
    if (c.N_T < 1) throw ConfigError("N_R_split value leaves no transmit antennas");
  } else if (s == "K") {
    const int K = as_int();
    const double scale = double(K) / c.K;
    c.K = K;
    for (auto* vec : {&c.E_S, &c.E_S_max, &c.E_R, &c.nu_S, &c.nu_D, &c.mu_D, &c.beta_SR, &c.beta_RD})
      vec->assign(K, vec->front());
    c.E_R_max *= scale;
    c.r_SR.assign(K, 0.0);
    c.r_RD.assign(K, 0.0);
  } else if (s == "beta_EI") {
    c.beta_EI = v;
  } else if (s == "beta_EI_db") {
    c.beta_EI = db_to_lin(v);
  } else if (s == "nu") {
    c.set_all_nu_S(v);
    c.set_all_nu_D(v);
    c.nu_R = v;
  } else if (s == "mu") {
    c.set_all_mu_D(v);
    c.mu_R = v;
  } else if (s == "nu_R") {
    c.nu_R = v;
  } else if (s == "mu_R") {
    c.mu_R = v;
  } else if (s == "E_T") {
    c.E_T = v;
  } else if (s == "E_T_db") {
    c.E_T = db_to_lin(v);
  } else if (s == "r0") {
    r0 = v;
  } else if (s == "r_ei") {
    r_ei = v;
  } else {
    throw ConfigError("unknown sweep variable '" + s + "'");
  }
  refresh_scenario(c, spec, r0, r_ei);
  return c;
}

void ExperimentSpec::validate() const {
  try {
    scenario.validate();
  } catch (const InvalidParameter& e) {
    throw ConfigError(e.what());
  }
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (jdpo_L < 1) throw ConfigError("L must be >= 1");
  if (!sweep_var.empty()) {
    const auto& vars = sweep_variables();
    if (std::find(vars.begin(), vars.end(), sweep_var) == vars.end())
      throw ConfigError("unknown sweep variable '" + sweep_var + "'");
    if (sweep_values.empty()) throw ConfigError("sweep_var given without sweep_values");
  } else if (!sweep_values.empty()) {
    throw ConfigError("sweep_values given without sweep_var");
  }
  if (mode == Mode::kOptimizeEe && !(target_rate > 0.0) && sweep_var != "target_rate")
    throw ConfigError("optimize-ee needs target_rate > 0");
  const std::vector<double> pts = sweep_var.empty() ? std::vector<double>{0.0} : sweep_values;
  for (double v : pts) {
    SystemConfig c;
    try {
      c = scenario_at(*this, v);
      c.validate();
    } catch (const InvalidParameter& e) {
      throw ConfigError(std::string(e.what()) + " (sweep value " + fmt(v) + ")");
    }
    if (A_R != 0 && (A_R < c.K || A_R > c.N_R)) throw ConfigError("A_R must lie in [K, N_R]");
    if (A_T != 0 && (A_T < c.K || A_T > c.N_T)) throw ConfigError("A_T must lie in [K, N_T]");
  }
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> n = {"fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7"};
  return n;
}

namespace {

ExperimentSpec base_preset(int K, double e_db, double r0, double r_ei) {
  ExperimentSpec s;
  s.scenario = SystemConfig::uniform(K, 1, 1, 128, 128);
  s.scenario.set_all_E_S(db_to_lin(e_db));
  s.scenario.E_S_max = s.scenario.E_S;
  s.scenario.E_R_max = K * db_to_lin(e_db);
  s.scenario.set_all_E_R(s.scenario.E_R_max / K);
  s.scenario.E_T = db_to_lin(10.0);
  s.scenario.beta_EI = db_to_lin(5.0);
  s.r0 = r0;
  s.r_ei = r_ei;
  s.phase_seed = 1;
  s.trials = 200;
  return s;
}

void set_levels(SystemConfig& c, double nu, double mu) {
  c.set_all_nu_S(nu);
  c.set_all_nu_D(nu);
  c.nu_R = nu;
  c.set_all_mu_D(mu);
  c.mu_R = mu;
}

}  // namespace

Preset preset(const std::string& name) {
  Preset p;
  ExperimentSpec& s = p.spec;
  if (name == "fig1") {
    s = base_preset(10, 8.0, 0.2, 0.8);
    s.scenario.beta_EI = 1.0;
    s.scenario.set_all_nu_S(0.2 * 0.2);
    s.scenario.set_all_nu_D(0.2 * 0.2);
    s.scenario.set_all_mu_D(0.2 * 0.2);
    s.mode = Mode::kBoth;
    s.sweep_var = "N";
    s.sweep_values = {32, 64, 128};
    p.deviation = "relay arrays limited to N <= 128; one impairment level (nu_S = nu_D = mu_D = 0.2^2, relay ideal)";
  } else if (name == "fig2") {
    s = base_preset(10, 5.0, 0.2, 0.8);
    set_levels(s.scenario, 0.01 * 0.01, 0.01 * 0.01);
    s.scenario.nu_R = 0.05;
    s.scenario.mu_R = 0.05;
    s.scenario.N_T = 64;
    s.scale_nodes = true;
    s.mode = Mode::kAsym;
    s.sweep_var = "N_R";
    s.sweep_values = {32, 48, 64, 96, 128};
    p.caption_grid = {};
    p.deviation = "N_T fixed at 64 with N_R from N_T/2 to 2 N_T; relay levels nu_R = mu_R = 0.05";
  } else if (name == "fig3") {
    s = base_preset(10, 5.0, 0.4, 0.7);
    set_levels(s.scenario, 0.05, 0.05);
    s.scenario.N_S = s.scenario.N_D = 10;
    s.mode = Mode::kAsym;
    s.sweep_var = "K";
    s.sweep_values = {1, 2, 4, 8, 16, 32, 64};
    p.caption_grid = {200};
    p.deviation = "N_R = N_T = 128 instead of 200 (SE versus K)";
  } else if (name == "fig4") {
    s = base_preset(10, 5.0, 0.4, 0.7);
    set_levels(s.scenario, 0.05, 0.05);
    s.scale_nodes = true;
    s.mode = Mode::kAsym;
    s.sweep_var = "N";
    s.sweep_values = {32, 48, 64, 96, 128};
    s.target_rate = 3.0 * 10;
    p.caption_grid = {};
    p.deviation = "single hardware level nu = mu = 0.05; the required N is read off where rate_e2e crosses 3 per pair";
  } else if (name == "fig5") {
    s = base_preset(10, 5.0, 0.4, 0.7);
    set_levels(s.scenario, 0.05, 0.05);
    s.scenario.N_R = 64;
    s.scenario.N_T = 64;
    s.scale_nodes = true;
    s.mode = Mode::kOptimizeSe;
    s.sweep_var = "N_R_split";
    s.sweep_values = {32, 48, 64, 80, 96};
    p.caption_grid = {200};
    p.deviation = "N_R + N_T = 128 instead of 200";
  } else if (name == "fig6") {
    s = base_preset(10, 5.0, 0.4, 0.7);
    set_levels(s.scenario, 0.05, 0.05);
    s.scale_nodes = true;
    s.mode = Mode::kOptimizeSe;
    s.sweep_var = "beta_EI_db";
    s.sweep_values = {0, 5, 10, 15, 20, 25};
    p.caption_grid = {200};
    p.deviation = "N_R = N_T = 128 instead of up to 200";
  } else if (name == "fig7") {
    s = base_preset(10, 5.0, 0.2, 0.8);
    set_levels(s.scenario, 0.05, 0.05);
    s.scenario.beta_EI = db_to_lin(10.0);
    s.scenario.beta_SR = {0.818, 0.052, 1.01, 0.026, 0.016, 0.803, 0.051, 0.383, 2.85, 0.448};
    s.scenario.beta_RD = {1.187, 0.011, 0.724, 2.11, 0.580, 0.012, 0.147, 0.085, 0.434, 0.458};
    s.scenario.N_R = s.scenario.N_T = 64;
    s.scale_nodes = true;
    s.mode = Mode::kOptimizeEe;
    s.sweep_var = "target_rate";
    s.sweep_values = {5, 10, 15, 20};
    p.caption_grid = {};
    p.deviation = "N_R = N_T = 64";
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  refresh_scenario(s.scenario, s, s.r0, s.r_ei);
  s.validate();
  return p;
}

}  // namespace mmfdr

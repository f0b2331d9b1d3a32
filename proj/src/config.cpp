#include "qdg/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace qdg::config {

const std::vector<KeySpec>& key_registry() {
  static const std::vector<KeySpec> registry = {
      {"dotA.g", "0.10", "cavity coupling of dot A (meV)"},
      {"dotA.omega", "10.0", "Rabi frequency of the first drive on dot A (meV)"},
      {"dotA.omega_prime", "-1", "second-drive Rabi frequency; -1 mirrors dotA.omega"},
      {"dotA.delta_laser", "200.00", "first-drive detuning of dot A (meV)"},
      {"dotA.delta_laser_prime", "-1", "second-drive detuning; -1 mirrors dotA.delta_laser"},
      {"dotA.delta_cavity", "200.025", "cavity detuning of dot A (meV)"},
      {"dotB.g", "0.08", "cavity coupling of dot B (meV)"},
      {"dotB.omega", "13.75", "Rabi frequency of the first drive on dot B (meV)"},
      {"dotB.omega_prime", "-1", "second-drive Rabi frequency; -1 mirrors dotB.omega"},
      {"dotB.delta_laser", "220.00", "first-drive detuning of dot B (meV)"},
      {"dotB.delta_laser_prime", "-1", "second-drive detuning; -1 mirrors dotB.delta_laser"},
      {"dotB.delta_cavity", "220.025", "cavity detuning of dot B (meV)"},
      {"gate.delta", "0", "if > 0, set delta_cavity = delta_laser + this on both dots (meV)"},
      {"gate.phi", "1.5707963267948966", "target conditional phase (rad)"},
      {"gate.epsilon_mev", "0", "explicit drive amplitude; 0 derives it from the couplings"},
      {"cavity.gamma_g0", "1.0", "cavity decay rate in units of gamma0 = (5 ns)^-1"},
      {"cavity.gamma_mev", "-1", "cavity decay rate in meV; overrides cavity.gamma_g0 if >= 0"},
      {"fock.cutoff", "0", "Fock levels kept; 0 picks the smallest adequate cutoff"},
      {"model.lambda_match_tol", "1e-6", "allowed |lambda_A - lambda_B| before epsilon derivation fails (meV)"},
      {"model.ratio_threshold", "10", "detuning/coupling ratio floor for the regime report"},
      {"run.mode", "effective", "hamiltonian used by gate runs: effective or full"},
      {"run.seed", "42", "seed for the random initial-state set"},
      {"run.states", "500", "number of random initial states"},
      {"run.workers", "1", "worker threads for sweeps (results independent of the count)"},
      {"run.substeps", "200", "integrator substeps per fastest period"},
      {"run.strict", "false", "escalate truncation-unsafe runs to an error"},
      {"run.loops", "1", "loops sampled by `phases` and trajectory dumps"},
      {"run.samples", "1000", "path samples per loop for `phases`"},
      {"run.full_step_budget", "50000000", "state-step refusal threshold for full-mode gate runs"},
      {"sweep.gammas_g0", "0,0.5,1,1.5,2", "decay-sweep grid in units of gamma0"},
      {"sweep.zetas", "0,0.01,0.02,0.03,0.04", "fluctuation-sweep grid (relative)"},
      {"sweep.parameter", "epsilon", "fluctuated parameter: g, omega, delta_laser, delta_cavity, epsilon"},
      {"verify.scales", "1,2,4", "detuning-ratio multipliers for verify-effective"},
      {"verify.loops", "1", "loops integrated per verification point"},
      {"verify.substeps", "96", "full-mode substeps per fastest period in verify-effective"},
      {"verify.step_budget", "20000000", "full-mode step refusal threshold per verification point"},
      {"check.tolerance", "0", "override tolerance for `check`; 0 keeps per-check defaults"},
      {"check.inject_fault", "none", "fault hook for `check` self-tests: none or theta-sign"},
      {"out.path", "", "output CSV path; empty selects a per-command default"},
  };
  return registry;
}

Settings::Settings() {
  for (const auto& spec : key_registry()) values_[spec.key] = spec.default_value;
}

bool Settings::is_known(const std::string& key) const { return values_.count(key) != 0; }

void Settings::set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end()) {
    throw std::invalid_argument("unknown configuration key '" + key + "'");
  }
  it->second = value;
}

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

void Settings::load_file(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw std::invalid_argument("cannot open configuration file '" + path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(file, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                  ": expected `section.key = value`");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": empty key or value");
    }
    try {
      set(key, value);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

const std::string& Settings::raw(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw std::invalid_argument("unknown configuration key '" + key + "'");
  return it->second;
}

double Settings::number(const std::string& key) const {
  const std::string& v = raw(key);
  size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("key '" + key + "': '" + v + "' is not a number");
  }
  if (used != v.size()) {
    throw std::invalid_argument("key '" + key + "': trailing characters in '" + v + "'");
  }
  return out;
}

long Settings::integer(const std::string& key) const {
  const double v = number(key);
  const long out = std::lround(v);
  if (static_cast<double>(out) != v) {
    throw std::invalid_argument("key '" + key + "': expected an integer, got '" + raw(key) + "'");
  }
  return out;
}

std::uint64_t Settings::unsigned64(const std::string& key) const {
  const std::string& v = raw(key);
  try {
    return std::stoull(v);
  } catch (const std::exception&) {
    throw std::invalid_argument("key '" + key + "': '" + v + "' is not an unsigned integer");
  }
}

bool Settings::flag(const std::string& key) const {
  const std::string& v = raw(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::invalid_argument("key '" + key + "': '" + v + "' is not a boolean");
}

std::vector<double> Settings::number_list(const std::string& key) const {
  const std::string& v = raw(key);
  std::vector<double> out;
  std::stringstream stream(v);
  std::string item;
  while (std::getline(stream, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw std::invalid_argument("key '" + key + "': '" + item + "' is not a number");
    }
  }
  if (out.empty()) throw std::invalid_argument("key '" + key + "': empty list");
  return out;
}

RunSetup resolve_setup(const Settings& s) {
  RunSetup setup;

  auto fill_dot = [&](const std::string& prefix) {
    model::DotParams d;
    d.g = s.number(prefix + ".g");
    d.omega = s.number(prefix + ".omega");
    d.omega_prime = s.number(prefix + ".omega_prime");
    if (d.omega_prime < 0.0) d.omega_prime = d.omega;
    d.delta_laser = s.number(prefix + ".delta_laser");
    d.delta_laser_prime = s.number(prefix + ".delta_laser_prime");
    if (d.delta_laser_prime < 0.0) d.delta_laser_prime = d.delta_laser;
    d.delta_cavity = s.number(prefix + ".delta_cavity");
    return d;
  };
  setup.sys.dot_a = fill_dot("dotA");
  setup.sys.dot_b = fill_dot("dotB");

  const double delta_shortcut = s.number("gate.delta");
  if (delta_shortcut != 0.0) {
    setup.sys.dot_a.delta_cavity = setup.sys.dot_a.delta_laser + delta_shortcut;
    setup.sys.dot_b.delta_cavity = setup.sys.dot_b.delta_laser + delta_shortcut;
  }

  setup.gamma0 = model::gamma0_mev();
  const double gamma_mev = s.number("cavity.gamma_mev");
  setup.sys.gamma = gamma_mev >= 0.0 ? gamma_mev : s.number("cavity.gamma_g0") * setup.gamma0;
  if (setup.sys.gamma < 0.0) throw std::invalid_argument("cavity decay rate must be >= 0");

  setup.target_phi = s.number("gate.phi");

  model::DeriveOptions opts;
  opts.lambda_match_tol = s.number("model.lambda_match_tol");
  const double eps_override = s.number("gate.epsilon_mev");
  if (eps_override != 0.0) opts.epsilon_override = cd(eps_override, 0.0);

  // cutoff selection needs epsilon/delta, so derive on a placeholder first
  setup.sys.fock.cutoff = 16;
  setup.derived = model::derive_params(setup.sys, setup.target_phi, opts);

  const long cutoff = s.integer("fock.cutoff");
  if (cutoff == 0) {
    const double alpha_max = 4.0 * std::abs(setup.derived.epsilon) / std::abs(setup.derived.delta);
    setup.sys.fock.cutoff = core::adequate_cutoff(alpha_max);
  } else {
    setup.sys.fock.cutoff = static_cast<int>(cutoff);
  }
  setup.sys.fock.validate();
  return setup;
}

std::vector<std::pair<std::string, std::string>> parameter_snapshot(const Settings& s,
                                                                    const RunSetup& setup) {
  std::vector<std::pair<std::string, std::string>> out;
  auto num = [](double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  for (const char* key : {"dotA.g", "dotA.omega", "dotA.omega_prime", "dotA.delta_laser",
                          "dotA.delta_laser_prime", "dotA.delta_cavity", "dotB.g", "dotB.omega",
                          "dotB.omega_prime", "dotB.delta_laser", "dotB.delta_laser_prime",
                          "dotB.delta_cavity", "gate.delta", "gate.phi"}) {
    out.emplace_back(key, s.raw(key));
  }
  out.emplace_back("gamma_mev", num(setup.sys.gamma));
  out.emplace_back("fock_cutoff", std::to_string(setup.sys.fock.cutoff));
  out.emplace_back("epsilon_mev", num(setup.derived.epsilon.real()));
  out.emplace_back("delta_mev", num(setup.derived.delta));
  out.emplace_back("loops", std::to_string(setup.derived.loops));
  out.emplace_back("gate_time_inv_mev", num(setup.derived.gate_time));
  out.emplace_back("achieved_phi", num(setup.derived.phi));
  return out;
}

}  // namespace qdg::config

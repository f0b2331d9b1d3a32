#include "qdg/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <ostream>
#include <random>
#include <thread>

namespace qdg::experiments {

namespace {

// Index-sharded parallel loop; every index writes only its own slot, so the
// result is independent of the worker count.
void parallel_for(int n, int workers, const std::function<void(int)>& body) {
  if (workers <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int count = std::min(workers, n);
  pool.reserve(count);
  for (int w = 0; w < count; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

void format_number(std::string& line, double v, bool first = false) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), first ? "%.17g" : ",%.17g", v);
  line += buf;
}

}  // namespace

InitialStateSet generate_initial_states(std::uint64_t seed, int count) {
  if (count < 1) throw std::invalid_argument("generate_initial_states: count must be >= 1");
  InitialStateSet set;
  set.seed = seed;
  set.tuples.reserve(count);

  std::mt19937_64 rng(seed);
  // uniform in (0, 1]; (x >> 11) has 53 bits, +1 excludes zero for the log
  auto uniform = [&rng] { return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53; };
  auto normal_pair = [&](double& z1, double& z2) {
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double theta = 2.0 * kPi * uniform();
    z1 = r * std::cos(theta);
    z2 = r * std::sin(theta);
  };

  while (static_cast<int>(set.tuples.size()) < count) {
    Eigen::Vector4d v;
    normal_pair(v(0), v(1));
    normal_pair(v(2), v(3));
    const double norm = v.norm();
    if (norm < 1e-12) continue;  // essentially impossible, but cheap to guard
    set.tuples.push_back(v / norm);
  }
  return set;
}

Eigen::Vector4cd qubit_amplitudes(const Eigen::Vector4d& tuple) {
  // (x, y, z, w) multiply |ff>, |gf>, |fg>, |gg>; gate order is {ff, fg, gf, gg}
  Eigen::Vector4cd amps;
  amps << tuple(0), tuple(2), tuple(1), tuple(3);
  return amps;
}

Vector initial_composite_state(const Eigen::Vector4d& coeffs, const core::FockConfig& fock) {
  fock.validate();
  const Eigen::Vector4cd amps = qubit_amplitudes(coeffs);
  Vector psi = Vector::Zero(ham::composite_dim(fock.cutoff));
  for (int s = 0; s < 4; ++s) {
    const auto [la, lb] = ham::kSectorLevels[s];
    psi(ham::composite_index(la, lb, 0, fock.cutoff)) = amps(s);
  }
  return psi;
}

Vector target_state(const Eigen::Vector4d& coeffs, double phi, const core::FockConfig& fock) {
  fock.validate();
  const Eigen::Vector4cd amps = qubit_amplitudes(coeffs);
  const geom::IdealGate gate = geom::ideal_gate(phi, /*corrected=*/false);
  Vector psi = Vector::Zero(ham::composite_dim(fock.cutoff));
  for (int s = 0; s < 4; ++s) {
    const auto [la, lb] = ham::kSectorLevels[s];
    psi(ham::composite_index(la, lb, 0, fock.cutoff)) = gate.diagonal(s) * amps(s);
  }
  return psi;
}

RunMode parse_run_mode(const std::string& name) {
  if (name == "effective") return RunMode::kEffective;
  if (name == "full") return RunMode::kFull;
  throw std::invalid_argument("unknown run mode '" + name + "' (expected effective or full)");
}

std::string to_string(RunMode mode) {
  return mode == RunMode::kEffective ? "effective" : "full";
}

namespace {

std::array<std::vector<ham::DriveTone>, 4> sector_tone_table(
    const std::array<ham::DriveTone, 2>& dot_tones) {
  return {std::vector<ham::DriveTone>{},
          {dot_tones[1]},                 // fg: only dot B is in |g>
          {dot_tones[0]},                 // gf: only dot A
          {dot_tones[0], dot_tones[1]}};  // gg: both
}

}  // namespace

GateChannel compute_gate_channel(const std::array<ham::DriveTone, 2>& dot_tones, double gamma,
                                 int fock_cutoff, double horizon,
                                 const lindblad::IntegratorConfig& cfg, int workers) {
  const auto tones = sector_tone_table(dot_tones);
  lindblad::IntegratorConfig block_cfg = cfg;
  block_cfg.horizon = horizon;

  std::vector<std::pair<int, int>> pairs;
  for (int c = 0; c < 4; ++c) {
    for (int cp = c; cp < 4; ++cp) pairs.emplace_back(c, cp);
  }
  std::vector<lindblad::BlockResult> results(pairs.size());
  parallel_for(static_cast<int>(pairs.size()), workers, [&](int i) {
    const auto [c, cp] = pairs[i];
    results[i] =
        lindblad::evolve_coherence_block(tones[c], tones[cp], gamma, fock_cutoff, block_cfg);
  });

  GateChannel channel;
  for (size_t i = 0; i < pairs.size(); ++i) {
    const auto [c, cp] = pairs[i];
    const auto& res = results[i];
    channel.m(c, cp) = res.block(0, 0);
    channel.m(cp, c) = std::conj(res.block(0, 0));
    channel.steps = std::max(channel.steps, res.steps);
    if (c == cp) {
      channel.max_top_fock = std::max(channel.max_top_fock, res.max_top_fock);
      channel.max_trace_drift =
          std::max(channel.max_trace_drift, std::abs(res.block.trace().real() - 1.0));
    }
  }
  return channel;
}

double channel_fidelity(const GateChannel& channel, const Eigen::Vector4d& coeffs, double phi) {
  const Eigen::Vector4cd q = qubit_amplitudes(coeffs);
  const geom::IdealGate gate = geom::ideal_gate(phi, /*corrected=*/false);
  Eigen::Vector4cd a;
  for (int s = 0; s < 4; ++s) a(s) = std::conj(gate.diagonal(s)) * q(s) * q(s);
  cd f = 0.0;
  for (int c = 0; c < 4; ++c) {
    for (int cp = 0; cp < 4; ++cp) f += a(c) * std::conj(a(cp)) * channel.m(c, cp);
  }
  if (std::abs(f.imag()) > 1e-10) {
    throw NumericalContractError("channel_fidelity: imaginary residue " +
                                 std::to_string(f.imag()));
  }
  return f.real();
}

namespace {

GateFidelityResult summarize(std::vector<double> per_state) {
  GateFidelityResult out;
  out.per_state = std::move(per_state);
  const int n = static_cast<int>(out.per_state.size());
  double sum = 0.0;
  out.min = 1.0;
  for (double f : out.per_state) {
    sum += f;
    out.min = std::min(out.min, f);
  }
  out.mean = sum / n;
  double var = 0.0;
  for (double f : out.per_state) var += (f - out.mean) * (f - out.mean);
  if (n > 1) out.std_error = std::sqrt(var / (n - 1)) / std::sqrt(static_cast<double>(n));
  return out;
}

double tone_alpha_bound(const std::array<ham::DriveTone, 2>& tones, double gamma, double horizon) {
  // Worst-case displacement of the doubly-driven sector: each tone traces a
  // circle of radius |amp/freq| around a drifting center; decay only shrinks
  // it. The small additive term covers the decay-induced spiral offset.
  double bound = 0.0;
  for (const auto& tone : tones) {
    if (tone.frequency != 0.0) {
      bound += 2.0 * std::abs(tone.amplitude) / std::abs(tone.frequency);
    } else {
      bound += std::abs(tone.amplitude) * horizon;  // resonant drive: linear growth
    }
  }
  (void)gamma;
  return bound;
}

}  // namespace

GateFidelityResult run_gate_fidelity_tones(const std::array<ham::DriveTone, 2>& tones,
                                           double gamma, double horizon, double phi,
                                           const core::FockConfig& fock,
                                           const InitialStateSet& states, const RunOptions& opt) {
  if (states.tuples.empty()) throw std::invalid_argument("run_gate_fidelity: empty state set");
  core::require_adequate(fock, tone_alpha_bound(tones, gamma, horizon));

  lindblad::IntegratorConfig cfg;
  cfg.substeps_per_period = opt.substeps_per_period;
  cfg.strict = opt.strict;

  const GateChannel channel =
      compute_gate_channel(tones, gamma, fock.cutoff, horizon, cfg, opt.workers);
  if (opt.strict && channel.max_top_fock >= cfg.truncation_threshold) {
    throw NumericalContractError("run_gate_fidelity: truncation-unsafe channel (top occupation " +
                                 std::to_string(channel.max_top_fock) + ")");
  }

  std::vector<double> per_state(states.tuples.size());
  for (size_t i = 0; i < states.tuples.size(); ++i) {
    per_state[i] = channel_fidelity(channel, states.tuples[i], phi);
  }
  GateFidelityResult out = summarize(std::move(per_state));
  out.max_top_fock = channel.max_top_fock;
  out.max_trace_drift = channel.max_trace_drift;
  out.steps = channel.steps;
  return out;
}

namespace {

GateFidelityResult run_gate_fidelity_full(const model::SystemParams& sys,
                                          const model::DerivedParams& derived, double gamma,
                                          const InitialStateSet& states, const RunOptions& opt) {
  model::SystemParams run_sys = sys;
  run_sys.gamma = gamma;
  const ham::HamiltonianGenerator gen = ham::HamiltonianGenerator::full(run_sys);

  lindblad::IntegratorConfig cfg;
  cfg.substeps_per_period = opt.substeps_per_period;
  cfg.horizon = derived.gate_time;
  cfg.strict = opt.strict;

  const double dt = (2.0 * kPi / gen.fastest_frequency()) / cfg.substeps_per_period;
  const long steps_per_state = static_cast<long>(std::ceil(cfg.horizon / dt));
  const long total = steps_per_state * static_cast<long>(states.tuples.size());
  if (total > opt.full_step_budget) {
    throw std::invalid_argument(
        "run_gate_fidelity: full-mode run needs about " + std::to_string(total) +
        " integrator steps over " + std::to_string(states.tuples.size()) +
        " states, above the budget of " + std::to_string(opt.full_step_budget) +
        "; reduce detunings/loops or raise the budget");
  }

  std::vector<double> per_state(states.tuples.size());
  std::vector<lindblad::EvolveDiagnostics> diags(states.tuples.size());
  parallel_for(static_cast<int>(states.tuples.size()), opt.workers, [&](int i) {
    const Vector psi0 = initial_composite_state(states.tuples[i], sys.fock);
    const Matrix rho0 = psi0 * psi0.adjoint();
    auto res = lindblad::evolve(rho0, gen, gamma, cfg);
    const Vector target = target_state(states.tuples[i], derived.phi, sys.fock);
    per_state[i] = lindblad::fidelity(res.rho, target);
    diags[i] = res.diag;
  });

  GateFidelityResult out = summarize(std::move(per_state));
  for (const auto& d : diags) {
    out.max_top_fock = std::max(out.max_top_fock, d.max_top_fock);
    out.max_trace_drift = std::max(out.max_trace_drift, d.max_trace_drift);
    out.steps = std::max(out.steps, d.steps);
  }
  return out;
}

}  // namespace

GateFidelityResult run_gate_fidelity(const model::SystemParams& sys,
                                     const model::DerivedParams& derived, double gamma,
                                     const InitialStateSet& states, const RunOptions& opt) {
  if (opt.mode == RunMode::kFull) {
    return run_gate_fidelity_full(sys, derived, gamma, states, opt);
  }
  const ham::DriveTone tone{derived.epsilon, derived.delta};
  return run_gate_fidelity_tones({tone, tone}, gamma, derived.gate_time, derived.phi, sys.fock,
                                 states, opt);
}

void write_sweep_csv(std::ostream& os, const SweepTable& table) {
  for (const auto& [key, value] : table.metadata) {
    os << "# " << key << " = " << value << '\n';
  }
  os << "swept_value,mean_fidelity,std_error,min_fidelity,n_states\n";
  for (const auto& row : table.rows) {
    std::string line;
    format_number(line, row.swept_value, true);
    format_number(line, row.mean_fidelity);
    format_number(line, row.std_error);
    format_number(line, row.min_fidelity);
    line += "," + std::to_string(row.n_states);
    os << line << '\n';
  }
}

SweepTable sweep_decay(const model::SystemParams& sys, const model::DerivedParams& derived,
                       std::vector<double> gamma_grid, const InitialStateSet& states,
                       const RunOptions& opt) {
  if (gamma_grid.empty()) throw std::invalid_argument("sweep_decay: empty grid");
  std::sort(gamma_grid.begin(), gamma_grid.end());

  SweepTable table;
  table.rows.resize(gamma_grid.size());
  // rows run in order; the per-row channel integrations are the parallel unit
  for (size_t i = 0; i < gamma_grid.size(); ++i) {
    const GateFidelityResult res = run_gate_fidelity(sys, derived, gamma_grid[i], states, opt);
    table.rows[i] = {gamma_grid[i], res.mean, res.std_error, res.min,
                     static_cast<int>(states.tuples.size())};
  }
  return table;
}

FluctParameter parse_fluct_parameter(const std::string& name) {
  if (name == "g") return FluctParameter::kG;
  if (name == "omega") return FluctParameter::kOmega;
  if (name == "delta_laser") return FluctParameter::kDeltaLaser;
  if (name == "delta_cavity") return FluctParameter::kDeltaCavity;
  if (name == "epsilon") return FluctParameter::kEpsilon;
  throw std::invalid_argument("unknown fluctuation parameter '" + name +
                              "' (expected g, omega, delta_laser, delta_cavity or epsilon)");
}

std::string to_string(FluctParameter p) {
  switch (p) {
    case FluctParameter::kG: return "g";
    case FluctParameter::kOmega: return "omega";
    case FluctParameter::kDeltaLaser: return "delta_laser";
    case FluctParameter::kDeltaCavity: return "delta_cavity";
    case FluctParameter::kEpsilon: return "epsilon";
  }
  return "?";
}

std::array<ham::DriveTone, 2> fluctuated_tones(const model::SystemParams& sys,
                                               const model::DerivedParams& derived,
                                               FluctParameter parameter, double zeta) {
  if (zeta < 0.0 || zeta >= 1.0) {
    throw std::invalid_argument("fluctuation: zeta must lie in [0, 1)");
  }
  const double scale = 1.0 + zeta;

  if (parameter == FluctParameter::kEpsilon) {
    const ham::DriveTone tone{scale * derived.epsilon, derived.delta};
    return {tone, tone};
  }

  model::SystemParams p = sys;
  auto apply = [&](model::DotParams& d) {
    switch (parameter) {
      case FluctParameter::kG:
        d.g *= scale;
        break;
      case FluctParameter::kOmega:
        d.omega *= scale;
        d.omega_prime *= scale;
        break;
      case FluctParameter::kDeltaLaser:
        d.delta_laser *= scale;
        d.delta_laser_prime *= scale;
        break;
      case FluctParameter::kDeltaCavity:
        d.delta_cavity *= scale;
        break;
      case FluctParameter::kEpsilon:
        break;
    }
  };
  apply(p.dot_a);
  apply(p.dot_b);

  // The perturbed dots no longer share one amplitude or detuning difference,
  // so each keeps its own tone.
  return {ham::DriveTone{model::derive_lambda(p.dot_a),
                         p.dot_a.delta_cavity - p.dot_a.delta_laser},
          ham::DriveTone{model::derive_lambda(p.dot_b),
                         p.dot_b.delta_cavity - p.dot_b.delta_laser}};
}

SweepTable sweep_fluctuation(const model::SystemParams& sys, const model::DerivedParams& derived,
                             FluctParameter parameter, const std::vector<double>& zeta_grid,
                             const InitialStateSet& states, const RunOptions& opt) {
  if (zeta_grid.empty()) throw std::invalid_argument("sweep_fluctuation: empty grid");
  for (double z : zeta_grid) {
    if (z < 0.0 || z >= 1.0) throw std::invalid_argument("sweep_fluctuation: zeta must lie in [0, 1)");
  }
  std::vector<double> grid = zeta_grid;
  std::sort(grid.begin(), grid.end());

  SweepTable table;
  table.rows.resize(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) {
    const auto tones = fluctuated_tones(sys, derived, parameter, grid[i]);
    const GateFidelityResult res = run_gate_fidelity_tones(
        tones, sys.gamma, derived.gate_time, derived.phi, sys.fock, states, opt);
    table.rows[i] = {grid[i], res.mean, res.std_error, res.min,
                     static_cast<int>(states.tuples.size())};
  }
  return table;
}

model::SystemParams scale_detunings(const model::SystemParams& sys, double scale) {
  model::SystemParams out = sys;
  const double sq = std::sqrt(scale);
  auto apply = [&](model::DotParams& d) {
    const double delta_diff = d.delta_cavity - d.delta_laser;
    d.delta_laser *= scale;
    d.delta_laser_prime *= scale;
    d.delta_cavity = d.delta_laser + delta_diff;  // keep the loop frequency fixed
    d.omega *= sq;
    d.omega_prime *= sq;
  };
  apply(out.dot_a);
  apply(out.dot_b);
  return out;
}

bool VerifyReport::infidelity_monotone_decreasing() const {
  for (size_t i = 1; i < points.size(); ++i) {
    if (1.0 - points[i].overlap >= 1.0 - points[i - 1].overlap) return false;
  }
  return points.size() >= 2;
}

bool VerifyReport::leakage_within_bounds() const {
  for (const auto& p : points) {
    if (p.max_leakage > p.leakage_bound) return false;
  }
  return !points.empty();
}

VerifyReport verify_effective(const model::SystemParams& sys, double target_phi,
                              const VerifyOptions& opt) {
  VerifyReport report;
  const Eigen::Vector4d uniform_tuple(0.5, 0.5, 0.5, 0.5);

  for (double scale : opt.scales) {
    const model::SystemParams scaled = scale_detunings(sys, scale);
    const model::DerivedParams derived = model::derive_params(scaled, target_phi);
    const double horizon = static_cast<double>(opt.loops) * 2.0 * kPi / derived.delta;

    const ham::HamiltonianGenerator full_gen = ham::HamiltonianGenerator::full(scaled);
    const double dt_full = (2.0 * kPi / full_gen.fastest_frequency()) / opt.substeps_full;
    const long est_steps = static_cast<long>(std::ceil(horizon / dt_full));
    if (est_steps > opt.step_budget) {
      throw std::invalid_argument(
          "verify_effective: configuration needs about " + std::to_string(est_steps) +
          " full-mode steps, above the budget of " + std::to_string(opt.step_budget) +
          "; reduce the detuning ratio or the loop count");
    }

    VerifyPoint point;
    point.scale = scale;
    point.epsilon = derived.epsilon;
    point.full_steps = est_steps;
    point.leakage_bound =
        10.0 * std::pow(scaled.dot_a.omega / (2.0 * scaled.dot_a.delta_laser), 2);

    const Vector psi0 = initial_composite_state(uniform_tuple, scaled.fock);
    const int fock = scaled.fock.cutoff;

    lindblad::IntegratorConfig full_cfg;
    full_cfg.substeps_per_period = opt.substeps_full;
    full_cfg.horizon = horizon;
    full_cfg.observer_stride = static_cast<int>(std::max<long>(1, est_steps / 2000));

    double max_leak = 0.0;
    auto leak_observer = [&](double, const Vector& psi) {
      double leak = 0.0;
      for (int la = 0; la < ham::kDotDim; ++la) {
        for (int lb = 0; lb < ham::kDotDim; ++lb) {
          if (la != ham::kE && lb != ham::kE) continue;
          for (int n = 0; n < fock; ++n) {
            leak += std::norm(psi(ham::composite_index(la, lb, n, fock)));
          }
        }
      }
      max_leak = std::max(max_leak, leak);
    };
    const auto full_res = lindblad::evolve_state(psi0, full_gen, full_cfg, leak_observer);
    point.max_leakage = max_leak;

    lindblad::IntegratorConfig eff_cfg;
    eff_cfg.substeps_per_period = opt.substeps_effective;
    eff_cfg.horizon = horizon;
    const ham::HamiltonianGenerator eff_gen =
        ham::HamiltonianGenerator::effective(derived, scaled.fock);
    const auto eff_res = lindblad::evolve_state(psi0, eff_gen, eff_cfg);

    point.overlap = std::norm(eff_res.psi.dot(full_res.psi)) /
                    (eff_res.psi.squaredNorm() * full_res.psi.squaredNorm());
    for (int s = 0; s < 4; ++s) {
      const auto [la, lb] = ham::kSectorLevels[s];
      cd dot = 0.0;
      double norm_e = 0.0, norm_f = 0.0;
      for (int n = 0; n < fock; ++n) {
        const int idx = ham::composite_index(la, lb, n, fock);
        dot += std::conj(eff_res.psi(idx)) * full_res.psi(idx);
        norm_e += std::norm(eff_res.psi(idx));
        norm_f += std::norm(full_res.psi(idx));
      }
      point.sector_overlap[s] =
          norm_e > 0.0 && norm_f > 0.0 ? std::norm(dot) / (norm_e * norm_f) : 0.0;
    }
    report.points.push_back(point);
  }
  return report;
}

}  // namespace qdg::experiments

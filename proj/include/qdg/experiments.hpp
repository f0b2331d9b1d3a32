#ifndef QDG_EXPERIMENTS_HPP
#define QDG_EXPERIMENTS_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qdg/geometry.hpp"
#include "qdg/lindblad.hpp"

// Gate-level experiments: random-initial-state fidelity averaging, decay and
// fluctuation sweeps, and numerical certification of the effective model
// against the full Hamiltonian.

namespace qdg::experiments {

// Random qubit superpositions x|ff> + y|gf> + z|fg> + w|gg>, real and
// unit-norm. Regeneration from the same seed is bit-identical: the tuples
// come from std::mt19937_64 through a fixed Box-Muller transform (documented
// in the README), not from distribution classes with unspecified algorithms.
struct InitialStateSet {
  std::uint64_t seed = 0;
  std::vector<Eigen::Vector4d> tuples;  // (x, y, z, w)
};

InitialStateSet generate_initial_states(std::uint64_t seed, int count);

// Gate-order amplitudes {ff, fg, gf, gg} of an (x, y, z, w) tuple.
Eigen::Vector4cd qubit_amplitudes(const Eigen::Vector4d& tuple);

// (qubit state) (x) |vacuum> on the composite space.
Vector initial_composite_state(const Eigen::Vector4d& coeffs, const core::FockConfig& fock);

// Ideal (uncorrected) gate applied to the qubit state, tensored with vacuum.
Vector target_state(const Eigen::Vector4d& coeffs, double phi, const core::FockConfig& fock);

enum class RunMode { kEffective, kFull };
RunMode parse_run_mode(const std::string& name);
std::string to_string(RunMode mode);

// Vacuum-to-vacuum transfer coefficients of the gate channel, one per
// ordered sector pair: m(c,c') = <0| B^{cc'}(T) |0> where B^{cc'} evolves
// |0><0| under the two-sided sector dynamics. Because the effective
// Hamiltonian never couples sectors and the dissipator acts on the field
// alone, the fidelity of ANY initial qubit state is an exact bilinear form
// in these 16 numbers; they are integrated once per parameter point instead
// of re-integrating the composite density matrix per initial state.
struct GateChannel {
  Eigen::Matrix4cd m;
  double max_top_fock = 0.0;
  double max_trace_drift = 0.0;  // over the four diagonal sector blocks
  long steps = 0;
};

GateChannel compute_gate_channel(const std::array<ham::DriveTone, 2>& dot_tones, double gamma,
                                 int fock_cutoff, double horizon,
                                 const lindblad::IntegratorConfig& cfg, int workers = 1);

// Per-state fidelity from a channel: F = sum_cc' A_c conj(A_c') m(c,c'),
// A_c = conj(u_c) q_c^2 with u the target phases.
double channel_fidelity(const GateChannel& channel, const Eigen::Vector4d& coeffs, double phi);

struct GateFidelityResult {
  double mean = 0.0;
  double std_error = 0.0;  // sample std / sqrt(n)
  double min = 1.0;
  std::vector<double> per_state;
  double max_top_fock = 0.0;
  double max_trace_drift = 0.0;
  long steps = 0;
};

struct RunOptions {
  RunMode mode = RunMode::kEffective;
  int substeps_per_period = 200;
  bool strict = false;
  int workers = 1;
  // refusal threshold for explicit full-mode runs: integrator steps summed
  // over all initial states
  long full_step_budget = 50'000'000;
};

// Evolves (qubit (x) vacuum) to the scheduled gate time under cavity decay
// and averages the fidelity against the ideal target over the state set.
GateFidelityResult run_gate_fidelity(const model::SystemParams& sys,
                                     const model::DerivedParams& derived, double gamma,
                                     const InitialStateSet& states, const RunOptions& opt);

// As above but with explicit per-dot drive tones (used by fluctuation runs
// where the two dots no longer share one amplitude and frequency).
GateFidelityResult run_gate_fidelity_tones(const std::array<ham::DriveTone, 2>& tones,
                                           double gamma, double horizon, double phi,
                                           const core::FockConfig& fock,
                                           const InitialStateSet& states, const RunOptions& opt);

struct SweepRow {
  double swept_value = 0.0;
  double mean_fidelity = 0.0;
  double std_error = 0.0;
  double min_fidelity = 0.0;
  int n_states = 0;
};

struct SweepTable {
  std::vector<SweepRow> rows;
  std::vector<std::pair<std::string, std::string>> metadata;  // emitted in order
};

void write_sweep_csv(std::ostream& os, const SweepTable& table);

// One gate run per decay rate (meV), shared state set, rows ordered by rate.
SweepTable sweep_decay(const model::SystemParams& sys, const model::DerivedParams& derived,
                       std::vector<double> gamma_grid, const InitialStateSet& states,
                       const RunOptions& opt);

enum class FluctParameter { kG, kOmega, kDeltaLaser, kDeltaCavity, kEpsilon };
FluctParameter parse_fluct_parameter(const std::string& name);
std::string to_string(FluctParameter p);

// Scales the chosen parameter of BOTH dots by (1 + zeta) and re-derives the
// per-dot effective tones; the gate schedule and target stay at nominal (the
// perturbation is invisible to the operator).
std::array<ham::DriveTone, 2> fluctuated_tones(const model::SystemParams& sys,
                                               const model::DerivedParams& derived,
                                               FluctParameter parameter, double zeta);

SweepTable sweep_fluctuation(const model::SystemParams& sys, const model::DerivedParams& derived,
                             FluctParameter parameter, const std::vector<double>& zeta_grid,
                             const InitialStateSet& states, const RunOptions& opt);

// Full-vs-effective certification at increasing detuning ratios. At each
// scale s the laser/cavity detunings grow by s and the Rabi frequencies by
// sqrt(s) (the detuning difference is held fixed), so every neglected
// second-order term shrinks monotonically.
struct VerifyPoint {
  double scale = 1.0;
  cd epsilon{};
  double overlap = 0.0;  // |<psi_eff|psi_full>|^2 at the horizon
  std::array<double, 4> sector_overlap{};
  double max_leakage = 0.0;    // excited-level population, max over checkpoints
  double leakage_bound = 0.0;  // 10 (Omega / 2 Delta)^2 at this scale
  long full_steps = 0;
};

struct VerifyReport {
  std::vector<VerifyPoint> points;
  bool infidelity_monotone_decreasing() const;
  bool leakage_within_bounds() const;
};

struct VerifyOptions {
  int loops = 1;
  std::vector<double> scales = {1.0, 2.0, 4.0};
  int substeps_full = 96;
  int substeps_effective = 200;
  long step_budget = 20'000'000;  // refuse configurations above this estimate
};

VerifyReport verify_effective(const model::SystemParams& sys, double target_phi,
                              const VerifyOptions& opt);

// Scaled copy of the system used by one verification point.
model::SystemParams scale_detunings(const model::SystemParams& sys, double scale);

}  // namespace qdg::experiments

#endif  // QDG_EXPERIMENTS_HPP

#ifndef QDG_LINDBLAD_HPP
#define QDG_LINDBLAD_HPP

#include <functional>
#include <iosfwd>
#include <vector>

#include "qdg/hamiltonian.hpp"
#include "qdg/types.hpp"

// Master-equation integration with cavity photon loss,
//   rho' = -i[H(t), rho] + (gamma/2)(2 a rho a^dag - a^dag a rho - rho a^dag a),
// plus scalar per-sector oracles used to cross-check it.

namespace qdg::lindblad {

struct IntegratorConfig {
  double dt = 0.0;                  // 1/meV; 0 = derive from substeps_per_period
  int substeps_per_period = 200;    // of the generator's fastest phase
  double horizon = 0.0;             // 1/meV
  bool renormalize_trace = false;   // off by default; drift is a correctness signal
  bool strict = false;              // escalate truncation-unsafe runs to an error
  double truncation_threshold = 1e-6;
  int check_stride = 64;            // steps between hermiticity/occupation checks
  int observer_stride = 0;          // 0 = no observer calls
};

struct EvolveDiagnostics {
  double max_trace_drift = 0.0;
  double max_top_fock = 0.0;  // max over checkpoints of the top-two-level population
  double max_hermiticity_error = 0.0;
  long steps = 0;
  bool truncation_safe = true;
};

struct EvolveResult {
  Matrix rho;
  EvolveDiagnostics diag;
};

using Observer = std::function<void(double t, const Matrix& rho)>;

// Fixed-step RK4 on the full density matrix over the generator's space.
EvolveResult evolve(const Matrix& rho0, const ham::HamiltonianGenerator& gen, double gamma,
                    const IntegratorConfig& cfg, const Observer& observer = {});

// Unitary state-vector integration (gamma = 0 dynamics only).
struct EvolveStateResult {
  Vector psi;
  double max_norm_drift = 0.0;
  long steps = 0;
};
using StateObserver = std::function<void(double t, const Vector& psi)>;
EvolveStateResult evolve_state(const Vector& psi0, const ham::HamiltonianGenerator& gen,
                               const IntegratorConfig& cfg, const StateObserver& observer = {});

// Two-sided evolution of one field-space block
//   B' = -i(H_row B - B H_col) + gamma D[a] B
// with H_side(t) = f(t) a + f(t)^* a^dag, f(t) = -sum_k amp_k e^{i freq_k t}.
// With row == col tones and B(0) a density matrix this is the master equation
// restricted to one qubit sector; off-diagonal (row != col) blocks carry the
// inter-sector coherences. Cost is O(N^2) per step.
struct BlockResult {
  Matrix block;
  double max_top_fock = 0.0;
  long steps = 0;
};
BlockResult evolve_coherence_block(const std::vector<ham::DriveTone>& row_tones,
                                   const std::vector<ham::DriveTone>& col_tones, double gamma,
                                   int fock_cutoff, const IntegratorConfig& cfg,
                                   const Matrix* rho0 = nullptr);

// Adaptive Dormand-Prince integration of the scalar branch amplitude
//   alpha' = i c eps^* e^{-i delta t} - (gamma/2) alpha,  alpha(0) = 0,
// the mean-field drift of the damped driven cavity in sector weight c.
struct BranchResult {
  cd alpha{};
  long steps = 0;
  long rejected = 0;
};
BranchResult branch_oracle(int c, cd epsilon, double delta, double gamma, double t);

// <psi| rho |psi>; the imaginary residue must stay below 1e-10.
double fidelity(const Matrix& rho, const Vector& target);

struct DensityCheck {
  double trace_error = 0.0;
  double hermiticity_error = 0.0;  // relative
  double min_eigenvalue = 0.0;
};
DensityCheck check_density(const Matrix& rho);

// Diagnostics over the composite dot(x)dot(x)field space.
double sector_population(const Matrix& rho, ham::Sector sector, int fock_cutoff);
cd sector_mean_a(const Matrix& rho, ham::Sector sector, int fock_cutoff);  // tr-normalized
double top_fock_population(const Matrix& rho, int fock_cutoff);

// checkpoint time, trace, sector populations, per-sector <a>, top-Fock weight
void write_trajectory_header(std::ostream& os);
void write_trajectory_row(std::ostream& os, double t, const Matrix& rho, int fock_cutoff);

}  // namespace qdg::lindblad

#endif  // QDG_LINDBLAD_HPP

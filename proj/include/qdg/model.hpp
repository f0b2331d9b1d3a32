#ifndef QDG_MODEL_HPP
#define QDG_MODEL_HPP

#include <optional>
#include <string>
#include <vector>

#include "qdg/core.hpp"
#include "qdg/types.hpp"

// Physical parameter bookkeeping, unit conversion, operating-regime
// validation and derivation of the effective-model quantities.

namespace qdg::model {

// One quantum dot driven by the cavity and two classical fields.
// All energies in meV.
struct DotParams {
  double g = 0.0;                  // cavity coupling
  double omega = 0.0;              // Rabi frequency of the first drive
  double omega_prime = 0.0;        // Rabi frequency of the second drive
  double delta_laser = 0.0;        // detuning of the first drive
  double delta_laser_prime = 0.0;  // detuning of the second drive
  double delta_cavity = 0.0;       // detuning of the cavity mode
};

struct SystemParams {
  DotParams dot_a;
  DotParams dot_b;
  double gamma = 0.0;  // cavity decay rate, meV
  core::FockConfig fock{};
  double hbar_mev_ps = kHbarMeVPs;
};

// Quantities derived from SystemParams for a scheduled gate.
struct DerivedParams {
  cd lambda_a{};
  cd lambda_b{};
  cd epsilon{};          // common drive amplitude used by the effective model
  double delta = 0.0;    // cavity/drive detuning difference, meV
  long loops = 0;        // number of closed phase-space loops
  double gate_time = 0.0;     // 1/meV
  double gate_time_ps = 0.0;  // same, in ps
  double phi = 0.0;           // conditional phase achieved by the schedule
  double phi_rel_error = 0.0;
  bool epsilon_explicit = false;
};

// Second-order cavity-drive coupling for one dot:
// conj(omega) * g / 4 * (1/delta_laser + 1/delta_cavity).
cd derive_lambda(cd omega, double g, double delta_laser, double delta_cavity);
cd derive_lambda(const DotParams& dot);

struct RegimeTolerances {
  double equality_rel_tol = 1e-6;   // for |Omega| = |Omega'| and Delta = Delta'
  double ratio_threshold = 10.0;    // detuning / coupling and Omega / g floors
  double delta_match_tol = 1e-9;    // meV, for the common detuning difference
};

struct ConditionCheck {
  int id = 0;
  std::string label;
  bool pass = false;
  double measured = 0.0;
  double threshold = 0.0;
};

struct ValidationReport {
  std::vector<ConditionCheck> checks;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

// Checks the five operating-regime conditions. Advisory: failures are
// reported, never thrown, so out-of-regime configurations can still run.
ValidationReport validate_regime(const SystemParams& sys, const RegimeTolerances& tol = {});

struct Schedule {
  long loops = 0;
  double gate_time = 0.0;  // 1/meV
  double phi = 0.0;        // achieved conditional phase
  double rel_error = 0.0;  // |phi - target| / target
};

// Picks the integer loop count whose accumulated phase is closest to
// target_phi, with gate_time = 2*pi*loops/delta.
Schedule gate_schedule(cd epsilon, double delta, double target_phi);

struct DeriveOptions {
  double lambda_match_tol = 1e-6;  // meV
  std::optional<cd> epsilon_override;
};

// Full derivation: lambdas, common epsilon (mean of the two lambdas unless
// overridden), detuning difference, loop schedule.
DerivedParams derive_params(const SystemParams& sys, double target_phi,
                            const DeriveOptions& opt = {});

enum class UnitConversion {
  kEnergyMevToAngularPerPs,
  kAngularPerPsToEnergyMev,
  kTimeInvMevToPs,
  kPsToTimeInvMev,
  kRatePerNsToMev,
  kMevToRatePerNs,
};

double convert_units(double value, UnitConversion kind, double hbar_mev_ps = kHbarMeVPs);

// (5 ns)^-1 expressed in meV; the reference cavity decay rate.
double gamma0_mev(double hbar_mev_ps = kHbarMeVPs);

}  // namespace qdg::model

#endif  // QDG_MODEL_HPP

#include "qdg/model.hpp"

#include <cmath>

namespace qdg::model {

cd derive_lambda(cd omega, double g, double delta_laser, double delta_cavity) {
  if (delta_laser == 0.0 || delta_cavity == 0.0) {
    throw std::invalid_argument("derive_lambda: zero detuning");
  }
  return std::conj(omega) * g / 4.0 * (1.0 / delta_laser + 1.0 / delta_cavity);
}

cd derive_lambda(const DotParams& dot) {
  return derive_lambda(cd(dot.omega, 0.0), dot.g, dot.delta_laser, dot.delta_cavity);
}

namespace {

bool rel_equal(double a, double b, double rel_tol) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return std::abs(a - b) <= rel_tol * std::max(scale, 1e-300);
}

}  // namespace

ValidationReport validate_regime(const SystemParams& sys, const RegimeTolerances& tol) {
  ValidationReport report;
  const DotParams* dots[] = {&sys.dot_a, &sys.dot_b};
  const char* names[] = {"A", "B"};

  for (int j = 0; j < 2; ++j) {
    const DotParams& d = *dots[j];
    report.checks.push_back({1, std::string("|Omega_") + names[j] + "| = |Omega'_" + names[j] + "|",
                             rel_equal(std::abs(d.omega), std::abs(d.omega_prime), tol.equality_rel_tol),
                             std::abs(std::abs(d.omega) - std::abs(d.omega_prime)),
                             tol.equality_rel_tol * std::abs(d.omega)});
    report.checks.push_back({2, std::string("Delta_") + names[j] + " = Delta'_" + names[j],
                             rel_equal(d.delta_laser, d.delta_laser_prime, tol.equality_rel_tol),
                             std::abs(d.delta_laser - d.delta_laser_prime),
                             tol.equality_rel_tol * std::abs(d.delta_laser)});
    const double min_detuning = std::min(std::abs(d.delta_laser), std::abs(d.delta_laser_prime));
    const double max_coupling =
        std::max({std::abs(d.g), std::abs(d.omega), std::abs(d.omega_prime)});
    const double ratio = max_coupling > 0.0 ? min_detuning / max_coupling : 0.0;
    report.checks.push_back({3, std::string("large detuning, dot ") + names[j],
                             ratio >= tol.ratio_threshold, ratio, tol.ratio_threshold});
    const double omega_over_g = std::abs(d.g) > 0.0 ? std::abs(d.omega) / std::abs(d.g) : 0.0;
    report.checks.push_back({5, std::string("|Omega_") + names[j] + "| >> |g_" + names[j] + "|",
                             omega_over_g >= tol.ratio_threshold, omega_over_g,
                             tol.ratio_threshold});
  }

  const double delta_a = sys.dot_a.delta_cavity - sys.dot_a.delta_laser;
  const double delta_b = sys.dot_b.delta_cavity - sys.dot_b.delta_laser;
  report.checks.push_back({4, "common detuning difference",
                           std::abs(delta_a - delta_b) <= tol.delta_match_tol,
                           std::abs(delta_a - delta_b), tol.delta_match_tol});
  return report;
}

Schedule gate_schedule(cd epsilon, double delta, double target_phi) {
  if (delta == 0.0) throw std::invalid_argument("gate_schedule: zero detuning");
  if (delta < 0.0) {
    throw std::invalid_argument("gate_schedule: detuning difference must be positive");
  }
  const double eps2 = std::norm(epsilon);
  if (eps2 == 0.0) throw std::invalid_argument("gate_schedule: zero drive amplitude");
  if (target_phi <= 0.0) throw std::invalid_argument("gate_schedule: target phase must be positive");

  const double phase_per_loop = 2.0 * kPi * eps2 / (delta * delta);
  const long loops = std::lround(target_phi / phase_per_loop);
  if (loops < 1) {
    throw std::invalid_argument(
        "gate_schedule: loop count rounds to zero (drive amplitude too large relative to "
        "detuning for the requested phase)");
  }
  Schedule s;
  s.loops = loops;
  s.gate_time = 2.0 * kPi * static_cast<double>(loops) / delta;
  s.phi = phase_per_loop * static_cast<double>(loops);
  s.rel_error = std::abs(s.phi - target_phi) / target_phi;
  return s;
}

DerivedParams derive_params(const SystemParams& sys, double target_phi, const DeriveOptions& opt) {
  DerivedParams out;
  out.lambda_a = derive_lambda(sys.dot_a);
  out.lambda_b = derive_lambda(sys.dot_b);

  const double delta_a = sys.dot_a.delta_cavity - sys.dot_a.delta_laser;
  const double delta_b = sys.dot_b.delta_cavity - sys.dot_b.delta_laser;
  if (std::abs(delta_a - delta_b) > 1e-9) {
    throw std::invalid_argument("derive_params: detuning differences disagree between dots (" +
                                std::to_string(delta_a) + " vs " + std::to_string(delta_b) + ")");
  }
  out.delta = delta_a;

  if (opt.epsilon_override) {
    out.epsilon = *opt.epsilon_override;
    out.epsilon_explicit = true;
  } else {
    if (std::abs(out.lambda_a - out.lambda_b) > opt.lambda_match_tol) {
      throw std::invalid_argument(
          "derive_params: lambda mismatch " + std::to_string(std::abs(out.lambda_a - out.lambda_b)) +
          " meV exceeds tolerance (adjust Rabi frequencies or set an explicit drive amplitude)");
    }
    out.epsilon = 0.5 * (out.lambda_a + out.lambda_b);
  }

  const Schedule s = gate_schedule(out.epsilon, out.delta, target_phi);
  out.loops = s.loops;
  out.gate_time = s.gate_time;
  out.gate_time_ps = s.gate_time * sys.hbar_mev_ps;
  out.phi = s.phi;
  out.phi_rel_error = s.rel_error;
  return out;
}

double convert_units(double value, UnitConversion kind, double hbar) {
  switch (kind) {
    case UnitConversion::kEnergyMevToAngularPerPs:
      return value / hbar;
    case UnitConversion::kAngularPerPsToEnergyMev:
      return value * hbar;
    case UnitConversion::kTimeInvMevToPs:
      return value * hbar;
    case UnitConversion::kPsToTimeInvMev:
      return value / hbar;
    case UnitConversion::kRatePerNsToMev:
      return value * 1e-3 * hbar;
    case UnitConversion::kMevToRatePerNs:
      return value / (1e-3 * hbar);
  }
  throw std::invalid_argument("convert_units: unknown conversion kind");
}

double gamma0_mev(double hbar) { return convert_units(0.2, UnitConversion::kRatePerNsToMev, hbar); }

}  // namespace qdg::model

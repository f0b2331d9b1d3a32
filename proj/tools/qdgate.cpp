// qdgate: simulator for a two-qubit geometric phase gate realized by two
// quantum dots in a lossy single-mode cavity. Subcommands reproduce the
// analytic conditional paths, single gate runs, decay/fluctuation sweeps and
// the full-vs-effective certification.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "qdg/config.hpp"
#include "qdg/experiments.hpp"
#include "qdg/version.hpp"

namespace {

using namespace qdg;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;           // configuration / user error
constexpr int kExitNumerical = 2;       // numerical-contract failure
constexpr int kExitToleranceInduced = 3;  // check failed only under an overridden tolerance

std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;  // collected --<key> values, "key=value"
};

config::Settings build_settings(const CommonArgs& args) {
  config::Settings settings;
  if (!args.config_path.empty()) settings.load_file(args.config_path);
  for (const auto& item : args.overrides) {
    const auto eq = item.find('=');
    settings.set(item.substr(0, eq), item.substr(eq + 1));
  }
  return settings;
}

void add_key_flags(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "configuration file (section.key = value)");
  for (const auto& spec : config::key_registry()) {
    const std::string name = std::string("--") + spec.key;
    const std::string key = spec.key;
    cmd->add_option_function<std::string>(
           name, [&args, key](const std::string& v) { args.overrides.push_back(key + "=" + v); },
           spec.help)
        ->expected(1);
  }
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open output file '" + path + "'");
  return out;
}

void print_schedule(const config::RunSetup& setup) {
  const auto& d = setup.derived;
  std::cout << "epsilon = " << fmt9(d.epsilon.real()) << " meV  (lambda_A = "
            << fmt9(std::abs(d.lambda_a)) << ", lambda_B = " << fmt9(std::abs(d.lambda_b))
            << ")\n";
  std::cout << "delta = " << fmt9(d.delta) << " meV\n";
  std::cout << "loops = " << d.loops << ", T = " << fmt9(d.gate_time)
            << " /meV = " << fmt9(d.gate_time_ps) << " ps = " << fmt9(d.gate_time_ps * 1e-3)
            << " ns\n";
  std::cout << "achieved phi = " << fmt9(d.phi) << " rad (target " << fmt9(setup.target_phi)
            << ", rel error " << fmt9(d.phi_rel_error) << ")\n";
}

experiments::RunOptions run_options(const config::Settings& s) {
  experiments::RunOptions opt;
  opt.mode = experiments::parse_run_mode(s.raw("run.mode"));
  opt.substeps_per_period = static_cast<int>(s.integer("run.substeps"));
  opt.strict = s.flag("run.strict");
  opt.workers = static_cast<int>(s.integer("run.workers"));
  opt.full_step_budget = s.integer("run.full_step_budget");
  return opt;
}

// ---------------------------------------------------------------- phases --

int cmd_phases(const config::Settings& s) {
  const config::RunSetup setup = config::resolve_setup(s);
  const int loops = static_cast<int>(s.integer("run.loops"));
  const int samples = static_cast<int>(s.integer("run.samples"));
  const geom::PathRecord record =
      geom::sample_path(setup.derived.epsilon, setup.derived.delta, loops, samples);

  const std::string path = s.raw("out.path").empty() ? "phases.csv" : s.raw("out.path");
  auto out = open_output(path);
  geom::write_path_csv(out, record);
  std::cout << "wrote " << path << " (" << record.times.size() << " rows, " << loops
            << " loops)\n";
  return kExitOk;
}

// ------------------------------------------------------------------ gate --

int cmd_gate(const config::Settings& s) {
  const config::RunSetup setup = config::resolve_setup(s);
  const auto report = model::validate_regime(setup.sys, {.ratio_threshold =
                                                             s.number("model.ratio_threshold")});
  std::cout << "mode = " << s.raw("run.mode") << ", fock cutoff = " << setup.sys.fock.cutoff
            << ", regime check: " << (report.all_pass() ? "pass" : "OUT OF REGIME (advisory)")
            << "\n";
  print_schedule(setup);
  std::cout << "gamma = " << fmt9(setup.sys.gamma) << " meV = " << fmt9(setup.sys.gamma / setup.gamma0)
            << " gamma0\n";

  const auto states = experiments::generate_initial_states(s.unsigned64("run.seed"),
                                                           static_cast<int>(s.integer("run.states")));
  const auto opt = run_options(s);
  const auto result =
      experiments::run_gate_fidelity(setup.sys, setup.derived, setup.sys.gamma, states, opt);

  std::cout << "mean fidelity = " << fmt9(result.mean) << " (std error " << fmt9(result.std_error)
            << ", min " << fmt9(result.min) << ", states " << states.tuples.size() << ", seed "
            << states.seed << ")\n";
  std::cout << "trace drift = " << fmt9(result.max_trace_drift)
            << ", top Fock occupation = " << fmt9(result.max_top_fock) << ", steps = "
            << result.steps << "\n";

  // published reference values for the two working points of this system
  const double delta = setup.derived.delta;
  const double gamma_rel = setup.sys.gamma / setup.gamma0;
  auto near = [](double a, double b, double tol) { return std::abs(a - b) <= tol; };
  double reference = -1.0;
  if (near(delta, 0.025, 1e-9) && near(gamma_rel, 1.0, 1e-6)) reference = 0.9998;
  if (near(delta, 0.025, 1e-9) && near(gamma_rel, 2.0, 1e-6)) reference = 0.9996;
  if (near(delta, 0.2, 1e-9) && near(gamma_rel, 1.0, 1e-6)) reference = 0.9995;
  if (near(delta, 0.2, 1e-9) && near(gamma_rel, 2.0, 1e-6)) reference = 0.9988;
  if (reference > 0.0) {
    std::cout << "reference mean fidelity reported for this working point: " << fmt9(reference)
              << " (difference " << fmt9((result.mean - reference) * 100.0) << " pp)\n";
  }

  if (!s.raw("out.path").empty()) {
    // trajectory of the uniform superposition state under the composite
    // integrator; heavy for long schedules, so report the step count first
    const ham::HamiltonianGenerator gen =
        opt.mode == experiments::RunMode::kFull
            ? ham::HamiltonianGenerator::full(setup.sys)
            : ham::HamiltonianGenerator::effective(setup.derived, setup.sys.fock);
    lindblad::IntegratorConfig cfg;
    cfg.substeps_per_period = opt.substeps_per_period;
    cfg.horizon = setup.derived.gate_time;
    cfg.strict = opt.strict;
    const double dt = (2.0 * kPi / gen.fastest_frequency()) / cfg.substeps_per_period;
    const long est = static_cast<long>(std::ceil(cfg.horizon / dt));
    cfg.observer_stride = static_cast<int>(std::max<long>(1, est / 2000));
    std::cout << "trajectory dump: ~" << est << " integrator steps on a " << gen.dim()
              << "-dim space\n";

    auto out = open_output(s.raw("out.path"));
    lindblad::write_trajectory_header(out);
    const int fock = setup.sys.fock.cutoff;
    const Vector psi0 =
        experiments::initial_composite_state(Eigen::Vector4d(0.5, 0.5, 0.5, 0.5), setup.sys.fock);
    const Matrix rho0 = psi0 * psi0.adjoint();
    lindblad::evolve(rho0, gen, setup.sys.gamma, cfg, [&](double t, const Matrix& rho) {
      lindblad::write_trajectory_row(out, t, rho, fock);
    });
    std::cout << "wrote " << s.raw("out.path") << "\n";
  }
  return kExitOk;
}

// ----------------------------------------------------------------- sweep --

void attach_metadata(experiments::SweepTable& table, const std::string& kind,
                     const config::Settings& s, const config::RunSetup& setup) {
  table.metadata.emplace_back("tool", std::string("qdgate ") + kVersion);
  table.metadata.emplace_back("kind", kind);
  table.metadata.emplace_back("mode", s.raw("run.mode"));
  table.metadata.emplace_back("seed", s.raw("run.seed"));
  table.metadata.emplace_back("states", s.raw("run.states"));
  if (kind == "fluctuation") {
    table.metadata.emplace_back("parameter", s.raw("sweep.parameter"));
    table.metadata.emplace_back("gamma_g0", fmt9(setup.sys.gamma / setup.gamma0));
  }
  for (auto& [k, v] : config::parameter_snapshot(s, setup)) table.metadata.emplace_back(k, v);
}

int cmd_sweep_decay(const config::Settings& s) {
  const config::RunSetup setup = config::resolve_setup(s);
  const auto states = experiments::generate_initial_states(s.unsigned64("run.seed"),
                                                           static_cast<int>(s.integer("run.states")));
  std::vector<double> grid;
  for (double g0_multiple : s.number_list("sweep.gammas_g0")) {
    grid.push_back(g0_multiple * setup.gamma0);
  }
  auto table = experiments::sweep_decay(setup.sys, setup.derived, grid, states, run_options(s));
  // report the grid back in gamma0 units
  for (size_t i = 0; i < table.rows.size(); ++i) table.rows[i].swept_value /= setup.gamma0;
  attach_metadata(table, "decay", s, setup);

  const std::string path = s.raw("out.path").empty() ? "sweep_decay.csv" : s.raw("out.path");
  auto out = open_output(path);
  experiments::write_sweep_csv(out, table);
  std::cout << "wrote " << path << " (" << table.rows.size() << " rows)\n";
  for (const auto& row : table.rows) {
    std::cout << "  gamma/gamma0 = " << fmt9(row.swept_value)
              << "  mean F = " << fmt9(row.mean_fidelity) << "\n";
  }
  return kExitOk;
}

int cmd_sweep_fluct(const config::Settings& s) {
  const config::RunSetup setup = config::resolve_setup(s);
  const auto states = experiments::generate_initial_states(s.unsigned64("run.seed"),
                                                           static_cast<int>(s.integer("run.states")));
  const auto parameter = experiments::parse_fluct_parameter(s.raw("sweep.parameter"));
  auto table = experiments::sweep_fluctuation(setup.sys, setup.derived, parameter,
                                              s.number_list("sweep.zetas"), states, run_options(s));
  attach_metadata(table, "fluctuation", s, setup);

  const std::string path = s.raw("out.path").empty() ? "sweep_fluct.csv" : s.raw("out.path");
  auto out = open_output(path);
  experiments::write_sweep_csv(out, table);
  std::cout << "wrote " << path << " (" << table.rows.size() << " rows, parameter "
            << s.raw("sweep.parameter") << ")\n";
  for (const auto& row : table.rows) {
    std::cout << "  zeta = " << fmt9(row.swept_value) << "  mean F = " << fmt9(row.mean_fidelity)
              << "\n";
  }
  return kExitOk;
}

// ------------------------------------------------------- verify-effective --

int cmd_verify_effective(const config::Settings& s) {
  const config::RunSetup setup = config::resolve_setup(s);
  experiments::VerifyOptions opt;
  opt.loops = static_cast<int>(s.integer("verify.loops"));
  opt.scales = s.number_list("verify.scales");
  opt.substeps_full = static_cast<int>(s.integer("verify.substeps"));
  opt.step_budget = s.integer("verify.step_budget");

  const auto report = experiments::verify_effective(setup.sys, setup.target_phi, opt);
  std::cout << "scale  epsilon(meV)  overlap        infidelity    max_leakage   leakage_bound\n";
  for (const auto& p : report.points) {
    std::cout << fmt9(p.scale) << "  " << fmt9(std::abs(p.epsilon)) << "  " << fmt9(p.overlap)
              << "  " << fmt9(1.0 - p.overlap) << "  " << fmt9(p.max_leakage) << "  "
              << fmt9(p.leakage_bound) << "\n";
  }
  std::cout << "infidelity monotone decreasing: "
            << (report.infidelity_monotone_decreasing() ? "yes" : "NO") << "\n";
  std::cout << "leakage within bounds: " << (report.leakage_within_bounds() ? "yes" : "NO")
            << "\n";
  return kExitOk;
}

// ----------------------------------------------------------------- check --

struct CheckResult {
  std::string name;
  bool pass = false;
  double residual = 0.0;
  double tolerance = 0.0;
  double default_tolerance = 0.0;
  double seconds = 0.0;
};

int cmd_check(const config::Settings& s) {
  const double tol_override = s.number("check.tolerance");
  const std::string fault = s.raw("check.inject_fault");
  if (fault != "none" && fault != "theta-sign") {
    throw std::invalid_argument("check.inject_fault must be none or theta-sign");
  }

  std::vector<CheckResult> results;
  auto run_check = [&](const std::string& name, double default_tol,
                       const std::function<double()>& residual_fn) {
    CheckResult r;
    r.name = name;
    r.default_tolerance = default_tol;
    r.tolerance = tol_override > 0.0 ? tol_override : default_tol;
    const auto start = std::chrono::steady_clock::now();
    r.residual = residual_fn();
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.pass = r.residual <= r.tolerance;
    results.push_back(r);
  };

  const cd eps(2.5e-3, 0.0);
  const double delta = 0.025;

  run_check("bch-displacement", 1e-7, [] {
    // D(a)D(b) = e^{i Im(a conj(b))} D(a+b) on the low-lying block
    std::mt19937_64 rng(1234);
    auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0; };
    const core::FockConfig fock{40};
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      const cd a(uniform(), uniform());
      const cd b(uniform(), uniform());
      const Matrix lhs = core::displacement_matrix(a, fock) * core::displacement_matrix(b, fock);
      const Matrix rhs = std::exp(cd(0.0, std::imag(a * std::conj(b)))) *
                         core::displacement_matrix(a + b, fock);
      worst = std::max(worst, core::max_abs(Matrix(lhs.block(0, 0, 10, 10) - rhs.block(0, 0, 10, 10))));
    }
    return worst;
  });

  run_check("loop-closure", 1e-12 * std::abs(eps) / delta, [&] {
    double worst = 0.0;
    for (int l = 1; l <= 10; ++l) {
      const auto a = geom::alpha_closed_form(eps, delta, 2.0 * kPi * l / delta);
      worst = std::max({worst, std::abs(a.fg), std::abs(a.gf), std::abs(a.gg)});
    }
    return worst;
  });

  run_check("phase-ratio", 1e-12, [&] {
    // phi_gg / phi_fg = 4 at all times
    std::mt19937_64 rng(99);
    auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      const double t = uniform() * 10.0 * 2.0 * kPi / delta + 0.3;
      auto p = geom::phases_closed_form(eps, delta, t);
      if (fault == "theta-sign") p.theta_gg = -p.theta_gg;  // fault-injection hook
      const double gg = p.fg + p.gf + p.theta_gg;
      worst = std::max(worst, std::abs(gg - 4.0 * p.fg) / std::abs(4.0 * p.fg));
    }
    return worst;
  });

  run_check("damped-cavity", 1e-7, [] {
    // <a>(t) = a0 e^{-gamma t / 2} with the drive off
    const core::FockConfig fock{15};
    const auto gen = ham::HamiltonianGenerator::field_only(fock);
    const cd alpha0(0.3, 0.0);
    const Vector coh = core::coherent_state(alpha0, fock).amplitudes;
    const double gamma = 0.05, horizon = 40.0;
    lindblad::IntegratorConfig cfg;
    cfg.dt = 0.02;
    cfg.horizon = horizon;
    const auto res = lindblad::evolve(Matrix(coh * coh.adjoint()), gen, gamma, cfg);
    const Matrix a_op = core::fock_annihilation(fock);
    const cd mean = (res.rho * a_op).trace();
    return std::abs(mean - alpha0 * std::exp(-gamma * horizon / 2.0));
  });

  run_check("trace-preservation", 1e-9, [&] {
    const core::FockConfig fock{12};
    model::DerivedParams derived;
    derived.epsilon = eps;
    derived.delta = delta;
    const auto gen = ham::HamiltonianGenerator::effective(derived, fock);
    lindblad::IntegratorConfig cfg;
    cfg.horizon = 2.0 * 2.0 * kPi / delta;
    const Vector psi0 =
        experiments::initial_composite_state(Eigen::Vector4d(0.5, 0.5, 0.5, 0.5), fock);
    const auto res = lindblad::evolve(Matrix(psi0 * psi0.adjoint()), gen, model::gamma0_mev(), cfg);
    return res.diag.max_trace_drift;
  });

  run_check("quadrature-convergence", 1e-6, [&] {
    // polyline loop phase converges to the closed form as O(1/n^2)
    const double t_loop = 2.0 * kPi / delta;
    const double exact = geom::phases_closed_form(eps, delta, t_loop).fg;
    auto polyline_error = [&](int n) {
      std::vector<cd> path(n + 1);
      for (int k = 0; k <= n; ++k) {
        path[k] = geom::alpha_closed_form(eps, delta, t_loop * k / n).fg;
      }
      return std::abs(geom::total_phase_polyline(path).total_phase - exact);
    };
    const double e1 = polyline_error(4000), e2 = polyline_error(8000);
    // conservative order check folded into one residual: ratio must be ~4
    return (e1 / e2 >= 3.0 && e2 < 1e-8) ? 0.0 : 1.0;
  });

  bool any_fail = false;
  bool all_failures_tolerance_induced = tol_override > 0.0;
  for (const auto& r : results) {
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << "  residual = " << fmt9(r.residual)
              << "  tolerance = " << fmt9(r.tolerance) << "  (" << fmt9(r.seconds * 1e3)
              << " ms)\n";
    if (!r.pass) {
      any_fail = true;
      if (r.residual > r.default_tolerance) all_failures_tolerance_induced = false;
    }
  }
  if (!any_fail) {
    std::cout << "all checks passed\n";
    return kExitOk;
  }
  if (all_failures_tolerance_induced) {
    std::cout << "failures are tolerance-induced (all residuals pass the default tolerances)\n";
    return kExitToleranceInduced;
  }
  return kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-dot cavity geometric phase gate simulator"};
  app.require_subcommand(1);

  CommonArgs args;
  const struct {
    const char* name;
    const char* help;
    int (*fn)(const config::Settings&);
  } commands[] = {
      {"phases", "emit the analytic conditional path/phase time series as CSV", cmd_phases},
      {"gate", "run one gate simulation and print fidelity and diagnostics", cmd_gate},
      {"sweep-decay", "mean fidelity versus cavity decay rate", cmd_sweep_decay},
      {"sweep-fluct", "mean fidelity versus a common parameter fluctuation", cmd_sweep_fluct},
      {"verify-effective", "compare full and effective dynamics at rising detuning ratios",
       cmd_verify_effective},
      {"check", "run the cross-module invariant suite", cmd_check},
  };
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    add_key_flags(sub, args);
    sub->callback([&args, &c] {
      const config::Settings settings = build_settings(args);
      std::exit(c.fn(settings));
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  } catch (const NumericalContractError& e) {
    std::cerr << "numerical contract violated: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const TruncationError& e) {
    std::cerr << "truncation error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}

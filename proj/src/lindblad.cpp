#include "qdg/lindblad.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include <Eigen/Eigenvalues>

namespace qdg::lindblad {

namespace {

// Step count/size from the config and the generator's fastest phase. The
// default policy keeps at least substeps_per_period points per period, which
// stays far inside the period/50 stability floor.
std::pair<long, double> step_plan(const IntegratorConfig& cfg, double fastest_frequency) {
  if (cfg.horizon <= 0.0) throw std::invalid_argument("integrator: horizon must be positive");
  double dt = cfg.dt;
  if (dt <= 0.0) {
    if (fastest_frequency <= 0.0) {
      throw std::invalid_argument("integrator: explicit dt required when the generator is static");
    }
    dt = (2.0 * kPi / fastest_frequency) / cfg.substeps_per_period;
  }
  const long steps = std::max<long>(1, static_cast<long>(std::ceil(cfg.horizon / dt - 1e-12)));
  return {steps, cfg.horizon / static_cast<double>(steps)};
}

// gamma * (a rho a^dag - (n rho + rho n)/2) on the composite space, using the
// field-fastest index layout: idx = block * N + n.
void add_dissipator(const Matrix& rho, double gamma, int fock_cutoff, Matrix& out) {
  if (gamma == 0.0) return;
  const Eigen::Index dim = rho.rows();
  const int nn = fock_cutoff;

  for (Eigen::Index i = 0; i < dim; ++i) {
    const int ni = static_cast<int>(i) % nn;
    for (Eigen::Index j = 0; j < dim; ++j) {
      const int nj = static_cast<int>(j) % nn;
      cd val = -0.5 * gamma * static_cast<double>(ni + nj) * rho(i, j);
      if (ni + 1 < nn && nj + 1 < nn) {
        val += gamma * std::sqrt(static_cast<double>((ni + 1) * (nj + 1))) * rho(i + 1, j + 1);
      }
      out(i, j) += val;
    }
  }
}

struct LindbladRhs {
  const ham::HamiltonianGenerator& gen;
  double gamma;
  Matrix h;  // scratch

  void operator()(double t, const Matrix& rho, Matrix& out) {
    h = gen.evaluate(t);
    out.noalias() = cd(0.0, -1.0) * (h * rho);
    out.noalias() += cd(0.0, 1.0) * (rho * h);
    add_dissipator(rho, gamma, gen.fock().cutoff, out);
  }
};

}  // namespace

EvolveResult evolve(const Matrix& rho0, const ham::HamiltonianGenerator& gen, double gamma,
                    const IntegratorConfig& cfg, const Observer& observer) {
  if (rho0.rows() != gen.dim() || rho0.cols() != gen.dim()) {
    throw std::invalid_argument("evolve: state dimension does not match the generator");
  }
  const auto [steps, dt] = step_plan(cfg, gen.fastest_frequency());

  EvolveResult result;
  result.rho = rho0;
  result.diag.steps = steps;

  LindbladRhs rhs{gen, gamma, Matrix()};
  Matrix k1(gen.dim(), gen.dim()), k2(gen.dim(), gen.dim()), k3(gen.dim(), gen.dim()),
      k4(gen.dim(), gen.dim()), tmp(gen.dim(), gen.dim());

  const int fock = gen.fock().cutoff;
  auto inspect = [&](const Matrix& rho) {
    result.diag.max_trace_drift =
        std::max(result.diag.max_trace_drift, std::abs(rho.trace().real() - 1.0));
    result.diag.max_top_fock = std::max(result.diag.max_top_fock, top_fock_population(rho, fock));
  };
  auto inspect_hermiticity = [&](const Matrix& rho) {
    const double scale = std::max(core::max_abs(rho), 1e-300);
    result.diag.max_hermiticity_error =
        std::max(result.diag.max_hermiticity_error, core::max_abs(Matrix(rho - rho.adjoint())) / scale);
  };

  inspect(result.rho);
  inspect_hermiticity(result.rho);
  if (observer && cfg.observer_stride > 0) observer(0.0, result.rho);

  double t = 0.0;
  for (long s = 0; s < steps; ++s) {
    rhs(t, result.rho, k1);
    tmp = result.rho + (0.5 * dt) * k1;
    rhs(t + 0.5 * dt, tmp, k2);
    tmp = result.rho + (0.5 * dt) * k2;
    rhs(t + 0.5 * dt, tmp, k3);
    tmp = result.rho + dt * k3;
    rhs(t + dt, tmp, k4);
    result.rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += dt;

    if (cfg.renormalize_trace) {
      const double tr = result.rho.trace().real();
      if (tr > 0.0) result.rho /= tr;
    }
    inspect(result.rho);
    if (cfg.check_stride > 0 && (s % cfg.check_stride == 0 || s + 1 == steps)) {
      inspect_hermiticity(result.rho);
    }
    if (observer && cfg.observer_stride > 0 && ((s + 1) % cfg.observer_stride == 0 || s + 1 == steps)) {
      observer(t, result.rho);
    }
  }

  result.diag.truncation_safe = result.diag.max_top_fock < cfg.truncation_threshold;
  if (cfg.strict && !result.diag.truncation_safe) {
    throw NumericalContractError(
        "evolve: top Fock levels reached population " + std::to_string(result.diag.max_top_fock) +
        " (threshold " + std::to_string(cfg.truncation_threshold) + "); raise the cutoff");
  }
  return result;
}

EvolveStateResult evolve_state(const Vector& psi0, const ham::HamiltonianGenerator& gen,
                               const IntegratorConfig& cfg, const StateObserver& observer) {
  if (psi0.size() != gen.dim()) {
    throw std::invalid_argument("evolve_state: state dimension does not match the generator");
  }
  const auto [steps, dt] = step_plan(cfg, gen.fastest_frequency());

  EvolveStateResult result;
  result.psi = psi0;
  result.steps = steps;

  auto rhs = [&](double t, const Vector& psi) -> Vector {
    Vector out = Vector::Zero(psi.size());
    gen.apply(t, psi, out);
    out *= cd(0.0, -1.0);
    return out;
  };

  double t = 0.0;
  if (observer && cfg.observer_stride > 0) observer(0.0, result.psi);
  for (long s = 0; s < steps; ++s) {
    const Vector k1 = rhs(t, result.psi);
    const Vector k2 = rhs(t + 0.5 * dt, result.psi + (0.5 * dt) * k1);
    const Vector k3 = rhs(t + 0.5 * dt, result.psi + (0.5 * dt) * k2);
    const Vector k4 = rhs(t + dt, result.psi + dt * k3);
    result.psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += dt;
    result.max_norm_drift = std::max(result.max_norm_drift, std::abs(result.psi.norm() - 1.0));
    if (observer && cfg.observer_stride > 0 && ((s + 1) % cfg.observer_stride == 0 || s + 1 == steps)) {
      observer(t, result.psi);
    }
  }
  return result;
}

namespace {

cd tone_sum(const std::vector<ham::DriveTone>& tones, double t) {
  cd f = 0.0;
  for (const auto& tone : tones) f -= tone.amplitude * std::exp(cd(0.0, tone.frequency * t));
  return f;
}

// Ladder scale factors reused across all stages of one block run.
struct BlockWorkspace {
  std::vector<double> sq;  // sq[k] = sqrt(k), k = 0..n

  explicit BlockWorkspace(int n) : sq(n + 1) {
    for (int k = 0; k <= n; ++k) sq[k] = std::sqrt(static_cast<double>(k));
  }
};

// out = -i (H_row B - B H_col) + gamma D[a] B with tridiagonal H sides.
// Raw column-major kernel; this runs millions of times per sweep point.
void block_rhs(cd f_row, cd f_col, double gamma, const BlockWorkspace& ws, const Matrix& b,
               Matrix& out) {
  const int n = static_cast<int>(b.rows());
  const double* sq = ws.sq.data();
  const cd* bp = b.data();
  cd* op = out.data();

  const cd mi(0.0, -1.0);
  const cd a_dn = mi * f_row;             // sqrt(r+1) B(r+1, c)
  const cd a_up = mi * std::conj(f_row);  // sqrt(r)   B(r-1, c)
  const cd c_lo = -mi * f_col;            // sqrt(c)   B(r, c-1)
  const cd c_hi = -mi * std::conj(f_col); // sqrt(c+1) B(r, c+1)

  for (int c = 0; c < n; ++c) {
    const cd* bc = bp + static_cast<size_t>(c) * n;
    const cd* bl = c > 0 ? bc - n : nullptr;
    const cd* br = c + 1 < n ? bc + n : nullptr;
    cd* oc = op + static_cast<size_t>(c) * n;
    const double scm = sq[c] ;
    const double scp = sq[c + 1];

    for (int r = 0; r < n; ++r) {
      cd v = r + 1 < n ? a_dn * (sq[r + 1] * bc[r + 1]) : cd(0.0, 0.0);
      if (r > 0) v += a_up * (sq[r] * bc[r - 1]);
      if (bl) v += c_lo * (scm * bl[r]);
      if (br) v += c_hi * (scp * br[r]);
      if (gamma != 0.0) {
        v -= (0.5 * gamma * (r + c)) * bc[r];
        if (r + 1 < n && br) v += (gamma * sq[r + 1] * scp) * br[r + 1];
      }
      oc[r] = v;
    }
  }
}

}  // namespace

BlockResult evolve_coherence_block(const std::vector<ham::DriveTone>& row_tones,
                                   const std::vector<ham::DriveTone>& col_tones, double gamma,
                                   int fock_cutoff, const IntegratorConfig& cfg,
                                   const Matrix* rho0) {
  double fastest = 0.0;
  for (const auto& tone : row_tones) fastest = std::max(fastest, std::abs(tone.frequency));
  for (const auto& tone : col_tones) fastest = std::max(fastest, std::abs(tone.frequency));
  IntegratorConfig plan_cfg = cfg;
  if (plan_cfg.dt <= 0.0 && fastest <= 0.0) {
    // undriven block: only the slow decay timescale remains
    plan_cfg.dt = cfg.horizon / cfg.substeps_per_period;
  }
  const auto [steps, dt] = step_plan(plan_cfg, fastest);

  BlockResult result;
  result.steps = steps;
  if (rho0) {
    result.block = *rho0;
  } else {
    result.block = Matrix::Zero(fock_cutoff, fock_cutoff);
    result.block(0, 0) = 1.0;
  }

  const BlockWorkspace ws(fock_cutoff);
  Matrix k1(fock_cutoff, fock_cutoff), k2(fock_cutoff, fock_cutoff), k3(fock_cutoff, fock_cutoff),
      k4(fock_cutoff, fock_cutoff), tmp(fock_cutoff, fock_cutoff);

  auto inspect = [&](const Matrix& b) {
    const double top = std::abs(b(fock_cutoff - 1, fock_cutoff - 1)) +
                       std::abs(b(fock_cutoff - 2, fock_cutoff - 2));
    result.max_top_fock = std::max(result.max_top_fock, top);
  };

  double t = 0.0;
  inspect(result.block);
  for (long s = 0; s < steps; ++s) {
    block_rhs(tone_sum(row_tones, t), tone_sum(col_tones, t), gamma, ws, result.block, k1);
    tmp = result.block + (0.5 * dt) * k1;
    block_rhs(tone_sum(row_tones, t + 0.5 * dt), tone_sum(col_tones, t + 0.5 * dt), gamma, ws, tmp, k2);
    tmp = result.block + (0.5 * dt) * k2;
    block_rhs(tone_sum(row_tones, t + 0.5 * dt), tone_sum(col_tones, t + 0.5 * dt), gamma, ws, tmp, k3);
    tmp = result.block + dt * k3;
    block_rhs(tone_sum(row_tones, t + dt), tone_sum(col_tones, t + dt), gamma, ws, tmp, k4);
    result.block += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += dt;
    inspect(result.block);
  }
  return result;
}

BranchResult branch_oracle(int c, cd epsilon, double delta, double gamma, double t_final) {
  if (c < 0) throw std::invalid_argument("branch_oracle: negative sector weight");
  BranchResult result;
  if (c == 0 || t_final == 0.0) return result;

  // Dormand-Prince 5(4) coefficients
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                      a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                      a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                      b6 = 11.0 / 84;
  static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                      e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  auto rhs = [&](double t, cd alpha) {
    return cd(0.0, 1.0) * static_cast<double>(c) * std::conj(epsilon) *
               std::exp(cd(0.0, -delta * t)) -
           0.5 * gamma * alpha;
  };

  const double abs_tol = 1e-14, rel_tol = 1e-12;
  double h = delta != 0.0 ? (2.0 * kPi / std::abs(delta)) / 100.0 : t_final / 100.0;
  h = std::min(h, t_final);
  cd alpha = 0.0;
  double t = 0.0;
  cd k1 = rhs(t, alpha);
  while (t < t_final) {
    h = std::min(h, t_final - t);
    const cd k2 = rhs(t + a21 * h, alpha + h * (a21 * k1));
    const cd k3 = rhs(t + 0.3 * h, alpha + h * (a31 * k1 + a32 * k2));
    const cd k4 = rhs(t + 0.8 * h, alpha + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const cd k5 = rhs(t + 8.0 / 9.0 * h, alpha + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const cd k6 = rhs(t + h, alpha + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const cd next = alpha + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const cd k7 = rhs(t + h, next);
    const cd err_c = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double tol = abs_tol + rel_tol * std::max(std::abs(alpha), std::abs(next));
    const double err = std::abs(err_c);

    if (err <= tol) {
      t += h;
      alpha = next;
      k1 = k7;
      ++result.steps;
    } else {
      ++result.rejected;
    }
    const double factor = err > 0.0 ? 0.9 * std::pow(tol / err, 0.2) : 5.0;
    h *= std::clamp(factor, 0.2, 5.0);
    if (result.steps + result.rejected > 100000000L) {
      throw std::runtime_error("branch_oracle: step limit exceeded");
    }
  }
  result.alpha = alpha;
  return result;
}

double fidelity(const Matrix& rho, const Vector& target) {
  if (rho.rows() != target.size() || rho.cols() != target.size()) {
    throw std::invalid_argument("fidelity: dimension mismatch");
  }
  const cd value = (target.adjoint() * rho * target)(0, 0);
  if (std::abs(value.imag()) > 1e-10) {
    throw NumericalContractError("fidelity: imaginary residue " + std::to_string(value.imag()));
  }
  return value.real();
}

DensityCheck check_density(const Matrix& rho) {
  DensityCheck out;
  out.trace_error = std::abs(rho.trace().real() - 1.0);
  const double scale = std::max(core::max_abs(rho), 1e-300);
  out.hermiticity_error = core::max_abs(Matrix(rho - rho.adjoint())) / scale;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (rho + rho.adjoint()));
  out.min_eigenvalue = solver.eigenvalues().minCoeff();
  return out;
}

double sector_population(const Matrix& rho, ham::Sector sector, int fock_cutoff) {
  const auto [la, lb] = ham::kSectorLevels[sector];
  double pop = 0.0;
  for (int n = 0; n < fock_cutoff; ++n) {
    pop += rho(ham::composite_index(la, lb, n, fock_cutoff),
               ham::composite_index(la, lb, n, fock_cutoff))
               .real();
  }
  return pop;
}

cd sector_mean_a(const Matrix& rho, ham::Sector sector, int fock_cutoff) {
  const auto [la, lb] = ham::kSectorLevels[sector];
  cd mean = 0.0;
  double pop = 0.0;
  for (int n = 0; n < fock_cutoff; ++n) {
    const int idx = ham::composite_index(la, lb, n, fock_cutoff);
    pop += rho(idx, idx).real();
    if (n + 1 < fock_cutoff) {
      // tr(rho_sector a) picks the first superdiagonal of the field block
      mean += std::sqrt(static_cast<double>(n + 1)) *
              rho(ham::composite_index(la, lb, n + 1, fock_cutoff), idx);
    }
  }
  return pop > 1e-300 ? mean / pop : cd(0.0, 0.0);
}

double top_fock_population(const Matrix& rho, int fock_cutoff) {
  const Eigen::Index dim = rho.rows();
  double pop = 0.0;
  for (Eigen::Index base = 0; base < dim; base += fock_cutoff) {
    pop += rho(base + fock_cutoff - 1, base + fock_cutoff - 1).real() +
           rho(base + fock_cutoff - 2, base + fock_cutoff - 2).real();
  }
  return pop;
}

void write_trajectory_header(std::ostream& os) {
  os << "t_inv_mev,trace,pop_ff,pop_fg,pop_gf,pop_gg,"
        "a_ff_re,a_ff_im,a_fg_re,a_fg_im,a_gf_re,a_gf_im,a_gg_re,a_gg_im,top_fock\n";
}

void write_trajectory_row(std::ostream& os, double t, const Matrix& rho, int fock_cutoff) {
  char buf[48];
  auto put = [&](double v, bool first = false) {
    std::snprintf(buf, sizeof(buf), first ? "%.17g" : ",%.17g", v);
    os << buf;
  };
  put(t, true);
  put(rho.trace().real());
  for (int s = 0; s < 4; ++s) {
    put(sector_population(rho, static_cast<ham::Sector>(s), fock_cutoff));
  }
  for (int s = 0; s < 4; ++s) {
    const cd mean = sector_mean_a(rho, static_cast<ham::Sector>(s), fock_cutoff);
    put(mean.real());
    put(mean.imag());
  }
  put(top_fock_population(rho, fock_cutoff));
  os << '\n';
}

}  // namespace qdg::lindblad

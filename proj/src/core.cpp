#include "qdg/core.hpp"

#include <cmath>

namespace qdg::core {

int adequate_cutoff(double alpha_max) {
  double a = std::abs(alpha_max);
  return static_cast<int>(std::ceil(a * a + 6.0 * a + 10.0));
}

void require_adequate(const FockConfig& cfg, cd alpha) {
  cfg.validate();
  const double a = std::abs(alpha);
  const double need = a * a + 6.0 * a + 10.0;
  if (static_cast<double>(cfg.cutoff) < need) {
    throw TruncationError("Fock cutoff " + std::to_string(cfg.cutoff) +
                          " too small for displacement |alpha| = " + std::to_string(a) +
                          " (need >= " + std::to_string(need) + ")");
  }
}

Matrix fock_annihilation(const FockConfig& cfg) {
  cfg.validate();
  Matrix a = Matrix::Zero(cfg.cutoff, cfg.cutoff);
  for (int n = 1; n < cfg.cutoff; ++n) {
    a(n - 1, n) = std::sqrt(static_cast<double>(n));
  }
  return a;
}

Matrix fock_number(const FockConfig& cfg) {
  cfg.validate();
  Matrix n = Matrix::Zero(cfg.cutoff, cfg.cutoff);
  for (int k = 0; k < cfg.cutoff; ++k) n(k, k) = static_cast<double>(k);
  return n;
}

Matrix tensor(std::span<const Matrix> ops) {
  if (ops.empty()) throw std::invalid_argument("tensor: empty factor list");
  for (const auto& op : ops) {
    if (op.rows() != op.cols()) {
      throw std::invalid_argument("tensor: non-square factor (" + std::to_string(op.rows()) +
                                  "x" + std::to_string(op.cols()) + ")");
    }
  }
  Matrix out = ops[0];
  for (size_t i = 1; i < ops.size(); ++i) {
    const Matrix& b = ops[i];
    Matrix next(out.rows() * b.rows(), out.cols() * b.cols());
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
      for (Eigen::Index c = 0; c < out.cols(); ++c) {
        next.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = out(r, c) * b;
      }
    }
    out = std::move(next);
  }
  return out;
}

Matrix tensor(const Matrix& a, const Matrix& b) {
  const Matrix ops[] = {a, b};
  return tensor(std::span<const Matrix>(ops, 2));
}

Matrix tensor(const Matrix& a, const Matrix& b, const Matrix& c) {
  const Matrix ops[] = {a, b, c};
  return tensor(std::span<const Matrix>(ops, 3));
}

Matrix expm(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("expm: non-square matrix");
  const Eigen::Index n = a.rows();

  // Scale so the Taylor series converges fast, then square back.
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();  // infinity norm
  int squarings = 0;
  if (norm > 0.5) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  }
  const Matrix b = a / std::pow(2.0, squarings);

  Matrix result = Matrix::Identity(n, n);
  Matrix term = Matrix::Identity(n, n);
  for (int k = 1; k <= 40; ++k) {
    term = (term * b) / static_cast<double>(k);
    result += term;
    if (max_abs(term) < 1e-18) break;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

Matrix displacement_matrix(cd alpha, const FockConfig& cfg) {
  require_adequate(cfg, alpha);
  const Matrix a = fock_annihilation(cfg);
  const Matrix gen = alpha * a.adjoint() - std::conj(alpha) * a;
  return expm(gen);
}

CoherentState coherent_state(cd alpha, const FockConfig& cfg) {
  require_adequate(cfg, alpha);
  Vector amps(cfg.cutoff);
  // log-domain recurrence keeps large-n factorials finite
  cd term = std::exp(cd(-0.5 * std::norm(alpha), 0.0));
  amps(0) = term;
  for (int n = 1; n < cfg.cutoff; ++n) {
    term *= alpha / std::sqrt(static_cast<double>(n));
    amps(n) = term;
  }
  const double top_two = std::norm(amps(cfg.cutoff - 1)) + std::norm(amps(cfg.cutoff - 2));
  amps.normalize();
  return {std::move(amps), top_two};
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

bool is_hermitian(const Matrix& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(max_abs(m), 1e-300);
  return max_abs(Matrix(m - m.adjoint())) <= rel_tol * scale;
}

}  // namespace qdg::core

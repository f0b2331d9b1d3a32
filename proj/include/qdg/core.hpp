#ifndef QDG_CORE_HPP
#define QDG_CORE_HPP

#include <span>
#include <vector>

#include "qdg/types.hpp"

// Dense complex operator construction over truncated Fock and dot spaces.
// Operators and states are plain Eigen matrices/vectors; everything here is
// a pure function of its inputs.

namespace qdg::core {

// Truncated harmonic-oscillator space with levels 0..cutoff-1.
struct FockConfig {
  int cutoff = 2;

  void validate() const {
    if (cutoff < 2) throw std::invalid_argument("Fock cutoff must be at least 2");
  }
};

// Smallest cutoff that keeps the tail of a coherent state with |amplitude|
// = alpha_max below ~1e-10.
int adequate_cutoff(double alpha_max);

// Throws TruncationError unless |alpha|^2 + 6|alpha| + 10 <= cutoff.
void require_adequate(const FockConfig& cfg, cd alpha);

// Annihilation operator: entry (n-1, n) = sqrt(n).
Matrix fock_annihilation(const FockConfig& cfg);

// Number operator diag(0, 1, ..., N-1).
Matrix fock_number(const FockConfig& cfg);

// Kronecker product of the factors in the given order (first factor is the
// slowest index). All factors must be square.
Matrix tensor(std::span<const Matrix> ops);
Matrix tensor(const Matrix& a, const Matrix& b);
Matrix tensor(const Matrix& a, const Matrix& b, const Matrix& c);

// Matrix exponential by scaling-and-squaring with a Taylor kernel.
// Intended for the small, well-conditioned generators used here.
Matrix expm(const Matrix& a);

// exp(alpha a^dag - alpha^* a) on the truncated space.
Matrix displacement_matrix(cd alpha, const FockConfig& cfg);

struct CoherentState {
  Vector amplitudes;           // normalized
  double top_two_population;   // weight on the two highest levels before renormalization
};

// Coherent state with amplitudes e^{-|a|^2/2} a^n / sqrt(n!), renormalized.
CoherentState coherent_state(cd alpha, const FockConfig& cfg);

// max_ij |m_ij|
double max_abs(const Matrix& m);

// max |M - M^dag| <= tol * max|M|
bool is_hermitian(const Matrix& m, double rel_tol = 1e-12);

}  // namespace qdg::core

#endif  // QDG_CORE_HPP

#ifndef QDG_HAMILTONIAN_HPP
#define QDG_HAMILTONIAN_HPP

#include <array>
#include <vector>

#include "qdg/core.hpp"
#include "qdg/model.hpp"
#include "qdg/types.hpp"

// Interaction-picture Hamiltonians on the composite dotA (x) dotB (x) field
// space. Each dot is a 3-level system with ordered basis {g, f, e}; the qubit
// lives in {g, f} and e is only virtually populated.

namespace qdg::ham {

inline constexpr int kDotDim = 3;
inline constexpr int kG = 0;
inline constexpr int kF = 1;
inline constexpr int kE = 2;

// Two-qubit sectors in gate order. The sector weight is the number of dots
// in |g>, which sets how strongly that sector drives the cavity.
enum Sector : int { kFF = 0, kFG = 1, kGF = 2, kGG = 3 };
inline constexpr std::array<int, 4> kSectorWeight = {0, 1, 1, 2};

// Dot-level pair (levelA, levelB) of each gate sector.
inline constexpr std::array<std::array<int, 2>, 4> kSectorLevels = {{{kF, kF}, {kF, kG}, {kG, kF}, {kG, kG}}};

inline int composite_dim(int fock_cutoff) { return kDotDim * kDotDim * fock_cutoff; }

inline int composite_index(int level_a, int level_b, int n, int fock_cutoff) {
  return (level_a * kDotDim + level_b) * fock_cutoff + n;
}

// One rotating drive term of the effective model: amplitude * e^{i freq t}.
struct DriveTone {
  cd amplitude{};       // meV
  double frequency{};   // meV
};

// Time-dependent Hamiltonian assembled from static operator blocks with
// scalar phase coefficients, H(t) = sum_k c_k(t) B_k + h.c. Construction
// caches the blocks once; evaluate() costs O(dim^2) per call.
class HamiltonianGenerator {
 public:
  enum class Mode { kFull, kEffective, kFieldOnly };

  static HamiltonianGenerator full(const model::SystemParams& sys);

  // Effective displacement Hamiltonian with one tone per dot. The nominal
  // gate uses the same (epsilon, delta) tone on both dots.
  static HamiltonianGenerator effective(const DriveTone& tone_a, const DriveTone& tone_b,
                                        const core::FockConfig& fock);
  static HamiltonianGenerator effective(const model::DerivedParams& derived,
                                        const core::FockConfig& fock);

  // Bare field space with H = 0 (decay-only dynamics).
  static HamiltonianGenerator field_only(const core::FockConfig& fock);

  Matrix evaluate(double t) const;

  // out = H(t) psi without materializing H; the hot path for state vectors.
  void apply(double t, const Vector& psi, Vector& out) const;

  Mode mode() const { return mode_; }
  int dim() const { return dim_; }
  const core::FockConfig& fock() const { return fock_; }

  // Largest oscillation frequency present; sets the integrator step policy.
  double fastest_frequency() const;

  // Annihilation operator embedded on this generator's space.
  const Matrix& field_annihilation() const { return field_a_; }

  // Per-dot effective tones (effective mode only).
  const std::array<DriveTone, 2>& tones() const { return tones_; }

 private:
  HamiltonianGenerator() = default;

  struct Term {
    cd amplitude;
    double frequency;
    Matrix block;
  };

  Mode mode_ = Mode::kFieldOnly;
  int dim_ = 0;
  core::FockConfig fock_{};
  std::vector<Term> terms_;
  Matrix field_a_;
  std::array<DriveTone, 2> tones_{};
};

// Single-shot builders matching the generator output.
Matrix full_hamiltonian(const model::SystemParams& sys, double t);
Matrix effective_hamiltonian(const model::DerivedParams& derived, const core::FockConfig& fock,
                             double t);

}  // namespace qdg::ham

#endif  // QDG_HAMILTONIAN_HPP

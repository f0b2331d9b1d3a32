#include "qdg/hamiltonian.hpp"

#include <cmath>

namespace qdg::ham {

namespace {

Matrix dot_identity() { return Matrix::Identity(kDotDim, kDotDim); }

Matrix raising_op() {
  Matrix s = Matrix::Zero(kDotDim, kDotDim);
  s(kE, kG) = 1.0;  // |e><g|
  return s;
}

Matrix ground_projector() {
  Matrix p = Matrix::Zero(kDotDim, kDotDim);
  p(kG, kG) = 1.0;
  return p;
}

}  // namespace

HamiltonianGenerator HamiltonianGenerator::full(const model::SystemParams& sys) {
  sys.fock.validate();
  HamiltonianGenerator gen;
  gen.mode_ = Mode::kFull;
  gen.fock_ = sys.fock;
  gen.dim_ = composite_dim(sys.fock.cutoff);

  const core::FockConfig& fock = sys.fock;
  const Matrix a = core::fock_annihilation(fock);
  const Matrix id_f = Matrix::Identity(fock.cutoff, fock.cutoff);
  const Matrix id_d = dot_identity();
  const Matrix sp = raising_op();

  const Matrix cavity_a = core::tensor(sp, id_d, a);   // sigmaA+ a
  const Matrix cavity_b = core::tensor(id_d, sp, a);   // sigmaB+ a
  const Matrix drive_a = core::tensor(sp, id_d, id_f); // sigmaA+
  const Matrix drive_b = core::tensor(id_d, sp, id_f); // sigmaB+

  const model::DotParams* dots[] = {&sys.dot_a, &sys.dot_b};
  const Matrix* cavity_ops[] = {&cavity_a, &cavity_b};
  const Matrix* drive_ops[] = {&drive_a, &drive_b};
  for (int j = 0; j < 2; ++j) {
    const model::DotParams& d = *dots[j];
    gen.terms_.push_back({cd(d.g, 0.0), d.delta_cavity, *cavity_ops[j]});
    gen.terms_.push_back({cd(d.omega / 2.0, 0.0), d.delta_laser, *drive_ops[j]});
    gen.terms_.push_back({cd(d.omega_prime / 2.0, 0.0), -d.delta_laser_prime, *drive_ops[j]});
  }
  gen.field_a_ = core::tensor(id_d, id_d, a);
  return gen;
}

HamiltonianGenerator HamiltonianGenerator::effective(const DriveTone& tone_a,
                                                     const DriveTone& tone_b,
                                                     const core::FockConfig& fock) {
  fock.validate();
  HamiltonianGenerator gen;
  gen.mode_ = Mode::kEffective;
  gen.fock_ = fock;
  gen.dim_ = composite_dim(fock.cutoff);
  gen.tones_ = {tone_a, tone_b};

  const Matrix a = core::fock_annihilation(fock);
  const Matrix id_d = dot_identity();
  const Matrix pg = ground_projector();

  const Matrix proj_a = core::tensor(pg, id_d, a);  // |g>A<g| a
  const Matrix proj_b = core::tensor(id_d, pg, a);  // |g>B<g| a
  gen.terms_.push_back({-tone_a.amplitude, tone_a.frequency, proj_a});
  gen.terms_.push_back({-tone_b.amplitude, tone_b.frequency, proj_b});
  gen.field_a_ = core::tensor(id_d, id_d, a);
  return gen;
}

HamiltonianGenerator HamiltonianGenerator::effective(const model::DerivedParams& derived,
                                                     const core::FockConfig& fock) {
  const DriveTone tone{derived.epsilon, derived.delta};
  return effective(tone, tone, fock);
}

HamiltonianGenerator HamiltonianGenerator::field_only(const core::FockConfig& fock) {
  fock.validate();
  HamiltonianGenerator gen;
  gen.mode_ = Mode::kFieldOnly;
  gen.fock_ = fock;
  gen.dim_ = fock.cutoff;
  gen.field_a_ = core::fock_annihilation(fock);
  return gen;
}

Matrix HamiltonianGenerator::evaluate(double t) const {
  Matrix upper = Matrix::Zero(dim_, dim_);
  for (const auto& term : terms_) {
    const cd phase = std::exp(cd(0.0, term.frequency * t));
    upper.noalias() += (term.amplitude * phase) * term.block;
  }
  return upper + upper.adjoint();
}

void HamiltonianGenerator::apply(double t, const Vector& psi, Vector& out) const {
  out.setZero();
  for (const auto& term : terms_) {
    const cd coeff = term.amplitude * std::exp(cd(0.0, term.frequency * t));
    out.noalias() += coeff * (term.block * psi);
    out.noalias() += std::conj(coeff) * (term.block.adjoint() * psi);
  }
}

double HamiltonianGenerator::fastest_frequency() const {
  double fastest = 0.0;
  for (const auto& term : terms_) fastest = std::max(fastest, std::abs(term.frequency));
  return fastest;
}

Matrix full_hamiltonian(const model::SystemParams& sys, double t) {
  return HamiltonianGenerator::full(sys).evaluate(t);
}

Matrix effective_hamiltonian(const model::DerivedParams& derived, const core::FockConfig& fock,
                             double t) {
  return HamiltonianGenerator::effective(derived, fock).evaluate(t);
}

}  // namespace qdg::ham

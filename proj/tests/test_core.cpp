#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qdg/core.hpp"

using namespace qdg;
using core::FockConfig;

namespace {

cd random_unit_complex(std::mt19937_64& rng) {
  auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0; };
  return {uniform(), uniform()};
}

Matrix random_matrix(int n, std::mt19937_64& rng) {
  Matrix m(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) m(r, c) = random_unit_complex(rng);
  return m;
}

}  // namespace

TEST_CASE("annihilation operator ladder elements") {
  const Matrix a = core::fock_annihilation(FockConfig{4});
  CHECK(a(1, 2).real() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(a(0, 1).real() == doctest::Approx(1.0));
  CHECK(core::max_abs(Matrix(a.triangularView<Eigen::Lower>())) == 0.0);

  // vacuum is annihilated
  Vector vac = Vector::Zero(4);
  vac(0) = 1.0;
  CHECK(Vector(a * vac).norm() == 0.0);

  // a|3> = sqrt(3)|2>
  const Matrix a5 = core::fock_annihilation(FockConfig{5});
  Vector three = Vector::Zero(5);
  three(3) = 1.0;
  const Vector lowered = a5 * three;
  CHECK(std::abs(lowered(2) - std::sqrt(3.0)) < 1e-15);
  CHECK(lowered.norm() == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
}

TEST_CASE("commutator [a, a^dag] = 1 below the truncation edge") {
  const int n = 9;
  const Matrix a = core::fock_annihilation(FockConfig{n});
  const Matrix comm = a * a.adjoint() - a.adjoint() * a;
  // exact up to the 2-ulp rounding of sqrt(n)^2
  for (int k = 0; k < n - 1; ++k) CHECK(std::abs(comm(k, k) - cd(1.0, 0.0)) <= 1e-15 * (k + 1));
  // the top diagonal entry is the known truncation artifact
  CHECK(comm(n - 1, n - 1).real() == doctest::Approx(1.0 - n));
}

TEST_CASE("tensor product basics") {
  const Matrix i2 = Matrix::Identity(2, 2);
  CHECK(core::max_abs(Matrix(core::tensor(i2, i2) - Matrix::Identity(4, 4))) == 0.0);

  std::mt19937_64 rng(7);
  const Matrix x = random_matrix(3, rng);
  const Matrix y = random_matrix(3, rng);
  const Matrix i3 = Matrix::Identity(3, 3);

  SUBCASE("mixed product") {
    const Matrix lhs = core::tensor(x, i3) * core::tensor(i3, y);
    CHECK(core::max_abs(Matrix(lhs - core::tensor(x, y))) < 1e-14);
  }
  SUBCASE("trace factorizes") {
    const cd lhs = core::tensor(x, y).trace();
    const cd rhs = x.trace() * y.trace();
    CHECK(std::abs(lhs - rhs) < 1e-13);
  }
  SUBCASE("non-square factor rejected") {
    Matrix bad(2, 3);
    bad.setZero();
    const Matrix ops[] = {i2, bad};
    CHECK_THROWS_AS(core::tensor(std::span<const Matrix>(ops, 2)), std::invalid_argument);
  }
}

TEST_CASE("matrix exponential sanity") {
  // diagonal case has an elementwise closed form
  Matrix d = Matrix::Zero(3, 3);
  d(0, 0) = cd(0.3, -0.2);
  d(1, 1) = cd(-1.0, 0.5);
  d(2, 2) = cd(2.0, 1.0);
  const Matrix e = core::expm(d);
  for (int k = 0; k < 3; ++k) {
    CHECK(std::abs(e(k, k) - std::exp(d(k, k))) < 1e-13 * std::abs(std::exp(d(k, k))));
  }

  // exp(A) exp(-A) = 1
  std::mt19937_64 rng(11);
  const Matrix m = random_matrix(6, rng);
  CHECK(core::max_abs(Matrix(core::expm(m) * core::expm(Matrix(-m)) - Matrix::Identity(6, 6))) <
        1e-12);
}

TEST_CASE("displacement operator") {
  SUBCASE("zero displacement is the identity") {
    const Matrix d = core::displacement_matrix(0.0, FockConfig{12});
    CHECK(core::max_abs(Matrix(d - Matrix::Identity(12, 12))) < 1e-15);
  }

  SUBCASE("displaced vacuum has the right mean occupation") {
    const FockConfig fock{20};
    const cd alpha(0.3, 0.0);
    const Vector psi = core::displacement_matrix(alpha, fock) * Vector::Unit(20, 0);
    const Matrix n_op = core::fock_number(fock);
    const cd mean = psi.adjoint() * n_op * psi;
    CHECK(std::abs(mean.real() - std::norm(alpha)) < 1e-8);
  }

  SUBCASE("composition picks up the phase-space area phase") {
    // displace by 1 first, then by i: the product picks up e^{i Im(i * 1)} = e^{i}
    const FockConfig fock{40};
    const Matrix lhs = core::displacement_matrix(cd(0.0, 1.0), fock) *
                       core::displacement_matrix(cd(1.0, 0.0), fock);
    const Matrix rhs =
        std::exp(cd(0.0, 1.0)) * core::displacement_matrix(cd(1.0, 1.0), fock);
    CHECK(core::max_abs(Matrix(lhs.block(0, 0, 10, 10) - rhs.block(0, 0, 10, 10))) < 1e-8);
  }

  SUBCASE("unitarity on the low block") {
    std::mt19937_64 rng(23);
    for (int k = 0; k < 10; ++k) {
      const cd alpha = random_unit_complex(rng);
      const FockConfig fock{40};
      const Matrix d = core::displacement_matrix(alpha, fock);
      const Matrix gram = d.adjoint() * d;
      const int half = 20;
      CHECK(core::max_abs(Matrix(gram.block(0, 0, half, half) - Matrix::Identity(half, half))) <
            1e-7);
    }
  }

  SUBCASE("inadequate cutoff is rejected") {
    CHECK_THROWS_AS(core::displacement_matrix(cd(2.0, 0.0), FockConfig{10}), TruncationError);
  }
}

TEST_CASE("coherent state construction") {
  SUBCASE("alpha = 0 is the vacuum") {
    const auto coh = core::coherent_state(0.0, FockConfig{10});
    CHECK(std::abs(coh.amplitudes(0) - 1.0) < 1e-15);
    CHECK(coh.amplitudes.tail(9).norm() == 0.0);
  }

  SUBCASE("mean occupation is |alpha|^2") {
    const FockConfig fock{15};
    const auto coh = core::coherent_state(cd(0.5, 0.0), fock);
    const cd mean = coh.amplitudes.adjoint() * core::fock_number(fock) * coh.amplitudes;
    CHECK(std::abs(mean.real() - 0.25) < 1e-9);
    CHECK(std::abs(coh.amplitudes.norm() - 1.0) < 1e-10);
  }

  SUBCASE("matches the displaced vacuum") {
    const FockConfig fock{20};
    const cd alpha(0.4, 0.0);
    const Vector displaced = core::displacement_matrix(alpha, fock) * Vector::Unit(20, 0);
    const cd overlap = core::coherent_state(alpha, fock).amplitudes.adjoint() * displaced;
    CHECK(std::abs(overlap - cd(1.0, 0.0)) < 1e-8);
  }
}

TEST_CASE("bch composition property over random pairs") {
  std::mt19937_64 rng(31);
  const FockConfig fock{40};
  for (int k = 0; k < 20; ++k) {
    const cd alpha = random_unit_complex(rng);
    const cd beta = random_unit_complex(rng);
    const Matrix lhs = core::displacement_matrix(alpha, fock) * core::displacement_matrix(beta, fock);
    const Matrix rhs = std::exp(cd(0.0, std::imag(alpha * std::conj(beta)))) *
                       core::displacement_matrix(alpha + beta, fock);
    CHECK(core::max_abs(Matrix(lhs.block(0, 0, 10, 10) - rhs.block(0, 0, 10, 10))) < 1e-7);
  }
}

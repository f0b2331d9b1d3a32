#ifndef QDG_TYPES_HPP
#define QDG_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qdg {

using cd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// hbar in meV*ps. Internal unit system: hbar = 1, energies in meV,
// times in 1/meV; ps and ns appear only at I/O boundaries.
inline constexpr double kHbarMeVPs = 0.65821195;

// Thrown when a requested displacement/coherent amplitude exceeds what the
// configured Fock cutoff can represent.
class TruncationError : public std::runtime_error {
 public:
  explicit TruncationError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when an evolved state violates a numerical contract (trace drift,
// truncation safety in strict mode, and similar).
class NumericalContractError : public std::runtime_error {
 public:
  explicit NumericalContractError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qdg

#endif  // QDG_TYPES_HPP

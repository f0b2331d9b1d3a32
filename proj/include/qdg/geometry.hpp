#ifndef QDG_GEOMETRY_HPP
#define QDG_GEOMETRY_HPP

#include <iosfwd>
#include <span>
#include <vector>

#include "qdg/types.hpp"

// Closed-form conditional displacement paths, accumulated loop phases, and
// the ideal diagonal gate they generate.

namespace qdg::geom {

// Phase-space amplitudes of the three driven sectors at time t.
struct AlphaTriple {
  cd fg{};
  cd gf{};
  cd gg{};
};

// Accumulated phases (rad) at time t. Phases are not wrapped so multi-loop
// accumulation stays visible.
struct PhaseTuple {
  double fg = 0.0;
  double gf = 0.0;
  double theta_gg = 0.0;  // cross term of the doubly-driven sector
  double gg = 0.0;        // fg + gf + theta_gg
};

AlphaTriple alpha_closed_form(cd epsilon, double delta, double t);
PhaseTuple phases_closed_form(cd epsilon, double delta, double t);

struct PolylinePhase {
  double total_phase = 0.0;   // rad; loop phase when the path closes
  cd net_displacement{};
};

// Composes short straight displacement segments between consecutive path
// points; O(n) via a running conjugate sum.
PolylinePhase total_phase_polyline(std::span<const cd> path);

// Diagonal two-qubit gate on ordered basis {ff, fg, gf, gg}.
struct IdealGate {
  double phi = 0.0;
  bool corrected = false;
  Eigen::Vector4cd diagonal;

  Eigen::Matrix4cd matrix() const { return diagonal.asDiagonal(); }
};

// Uncorrected: diag(1, e^{-i phi}, e^{-i phi}, e^{-4i phi}).
// Corrected (a e^{+i phi} local phase per dot in |g>): diag(1, 1, 1, e^{-2i phi}).
IdealGate ideal_gate(double phi, bool corrected);

// Sampled time series of the conditional paths and phases.
struct PathRecord {
  std::vector<double> times;  // 1/meV, increasing
  std::vector<cd> alpha_fg;
  std::vector<cd> alpha_gf;
  std::vector<cd> alpha_gg;
  std::vector<double> phi_fg;
  std::vector<double> phi_gf;
  std::vector<double> theta_gg;
  std::vector<double> phi_gg;
};

// Samples `loops` closed loops with `samples_per_loop` points per loop
// (plus the t = 0 row). loops = 0 yields an empty record.
PathRecord sample_path(cd epsilon, double delta, int loops, int samples_per_loop);

// Header: t_inv_mev,t_ps,alpha_fg_re,... Full 17-digit precision.
void write_path_csv(std::ostream& os, const PathRecord& record, double hbar_mev_ps = kHbarMeVPs);

}  // namespace qdg::geom

#endif  // QDG_GEOMETRY_HPP

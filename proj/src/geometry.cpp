#include "qdg/geometry.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace qdg::geom {

AlphaTriple alpha_closed_form(cd epsilon, double delta, double t) {
  if (delta == 0.0) throw std::invalid_argument("alpha_closed_form: zero detuning");
  const cd one_loop = std::exp(cd(0.0, -delta * t)) - 1.0;
  const cd fg = -(std::conj(epsilon) / delta) * one_loop;
  return {fg, fg, 2.0 * fg};
}

PhaseTuple phases_closed_form(cd epsilon, double delta, double t) {
  if (delta == 0.0) throw std::invalid_argument("phases_closed_form: zero detuning");
  const double eps2 = std::norm(epsilon);
  const double base = -(eps2 / delta) * (t - std::sin(delta * t) / delta);
  PhaseTuple p;
  p.fg = base;
  p.gf = base;
  p.theta_gg = 2.0 * base;
  p.gg = p.fg + p.gf + p.theta_gg;
  return p;
}

PolylinePhase total_phase_polyline(std::span<const cd> path) {
  if (path.size() < 2) {
    throw std::invalid_argument("total_phase_polyline: need at least 2 path points");
  }
  double theta = 0.0;
  cd conj_sum = 0.0;  // sum of conj(previous segments)
  cd net = 0.0;
  for (size_t m = 1; m < path.size(); ++m) {
    const cd seg = path[m] - path[m - 1];
    if (m >= 2) theta += std::imag(seg * conj_sum);
    conj_sum += std::conj(seg);
    net += seg;
  }
  return {theta, net};
}

IdealGate ideal_gate(double phi, bool corrected) {
  IdealGate g;
  g.phi = phi;
  g.corrected = corrected;
  if (corrected) {
    g.diagonal << 1.0, 1.0, 1.0, std::exp(cd(0.0, -2.0 * phi));
  } else {
    const cd single = std::exp(cd(0.0, -phi));
    g.diagonal << 1.0, single, single, std::exp(cd(0.0, -4.0 * phi));
  }
  return g;
}

PathRecord sample_path(cd epsilon, double delta, int loops, int samples_per_loop) {
  if (delta == 0.0) throw std::invalid_argument("sample_path: zero detuning");
  if (loops < 0 || samples_per_loop < 1) {
    throw std::invalid_argument("sample_path: invalid sampling request");
  }
  PathRecord rec;
  if (loops == 0) return rec;

  const double period = 2.0 * kPi / delta;
  const long total = static_cast<long>(loops) * samples_per_loop;
  rec.times.reserve(total + 1);
  for (long k = 0; k <= total; ++k) {
    // sample loop closure times exactly
    const long loop = k / samples_per_loop;
    const long within = k % samples_per_loop;
    const double t = static_cast<double>(loop) * period +
                     static_cast<double>(within) / samples_per_loop * period;
    const AlphaTriple a = alpha_closed_form(epsilon, delta, t);
    const PhaseTuple p = phases_closed_form(epsilon, delta, t);
    rec.times.push_back(t);
    rec.alpha_fg.push_back(a.fg);
    rec.alpha_gf.push_back(a.gf);
    rec.alpha_gg.push_back(a.gg);
    rec.phi_fg.push_back(p.fg);
    rec.phi_gf.push_back(p.gf);
    rec.theta_gg.push_back(p.theta_gg);
    rec.phi_gg.push_back(p.gg);
  }
  return rec;
}

namespace {

void append_full(std::string& line, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), ",%.17g", v);
  line += buf;
}

}  // namespace

void write_path_csv(std::ostream& os, const PathRecord& record, double hbar_mev_ps) {
  os << "t_inv_mev,t_ps,alpha_fg_re,alpha_fg_im,alpha_gf_re,alpha_gf_im,"
        "alpha_gg_re,alpha_gg_im,phi_fg,phi_gf,theta_gg,phi_gg\n";
  for (size_t k = 0; k < record.times.size(); ++k) {
    char head[40];
    std::snprintf(head, sizeof(head), "%.17g", record.times[k]);
    std::string line = head;
    append_full(line, record.times[k] * hbar_mev_ps);
    append_full(line, record.alpha_fg[k].real());
    append_full(line, record.alpha_fg[k].imag());
    append_full(line, record.alpha_gf[k].real());
    append_full(line, record.alpha_gf[k].imag());
    append_full(line, record.alpha_gg[k].real());
    append_full(line, record.alpha_gg[k].imag());
    append_full(line, record.phi_fg[k]);
    append_full(line, record.phi_gf[k]);
    append_full(line, record.theta_gg[k]);
    append_full(line, record.phi_gg[k]);
    os << line << '\n';
  }
}

}  // namespace qdg::geom

#pragma once

#include "trisac/admm/state.hpp"
#include "trisac/tensorops.hpp"

// Closed-form minimizers of the per-copy augmented subproblems and the
// matched dual-ascent steps. Every function here is certified against an
// independent finite-difference stationarity oracle; derivations that differ
// from naive transcriptions are catalogued in SIGNS.md, with the transcribed
// variants kept behind `alt`.
//
// Conventions: channels arrive noise-normalized (divided by the noise std),
// so SINR constraints read  threshold * (interference + 1) - signal <= 0 and
// the sensing floor compares gamma against a plain SNR. Complex stationarity
// is with respect to the conjugate coordinates; real variables use ordinary
// gradients, which puts a /2 on their linear multiplier terms.

namespace trisac::admm {

/// Projected ascent step shared by every inequality multiplier.
inline double step_ineq(double mul, double t, double gap) { return pos(mul + t * gap); }

/// SCA lower bound of |amp|^2 linearized around amp_r; tight at amp_r and
/// below |amp|^2 everywhere since |amp - amp_r|^2 >= 0.
inline double sca_power_lb(cplx amp, cplx amp_r) {
  return 2.0 * (std::conj(amp_r) * amp).real() - std::norm(amp_r);
}

// ---------------------------------------------------------------- floor ----

/// Sensing-floor master: maximize gamma against its consensus couplings.
inline double update_gamma(double rho, const rvec& eta, const rvec& err) {
  require(eta.size() == err.size() && eta.size() > 0, "update_gamma: size mismatch");
  return (1.0 + rho * (eta + err).sum()) / (static_cast<double>(eta.size()) * rho);
}

// -------------------------------------------------------------- masters ----

/// Master update: plain mean of copy+error over every coupled family, the
/// minimizer of the total squared consensus penalty. Projections (split
/// nonnegativity, schedule box) are applied by the caller afterwards.
template <typename T>
T average_master(const std::vector<const T*>& copies, const std::vector<const T*>& errors) {
  require(!copies.empty() && copies.size() == errors.size(), "average_master: size mismatch");
  T acc = *copies[0] + *errors[0];
  for (std::size_t i = 1; i < copies.size(); ++i) acc += *copies[i] + *errors[i];
  return acc / static_cast<double>(copies.size());
}

/// Floor copy at sensing receiver u.
inline double update_sense_floor(double gamma, double err, double lambda) {
  return gamma - err - 0.5 * lambda;
}

// ---------------------------------------------------- element power caps ----

/// ||x .* mask||^2, optionally with an extra real weight.
inline double masked_power(const cvec& x, const rvec& mask) {
  return (x.array() * mask.array()).matrix().squaredNorm();
}
inline double masked_power(const cvec& x, const rvec& mask, const rvec& wt) {
  return (x.array() * mask.array() * wt.array()).matrix().squaredNorm();
}

/// BS precoder copy with element row n's power cap: diagonal shrink on the
/// masked entries.
inline cvec update_w_power(const cvec& base, const rvec& mask, double theta) {
  return (base.array() / (1.0 + theta * mask.array())).matrix();
}

/// Forward precoder copy with element row n's cap; the diagonal carries the
/// squared schedule weight (the transcribed first-power variant is kept for
/// comparison and fails stationarity off binary schedules).
inline cvec update_f_power(const cvec& base, const rvec& mask, const rvec& sched, double iota,
                           bool alt = false) {
  rvec w = alt ? (mask.array() * sched.array().abs()).matrix().eval()
               : (mask.array() * sched.array().square()).matrix().eval();
  return (base.array() / (1.0 + iota * w.array())).matrix();
}

/// Schedule copy with element row n's cap (same structure: the diagonal
/// carries the squared precoder magnitudes).
inline rvec update_p_power(const rvec& base, const rvec& mask, const cvec& vec_t, double delta,
                           bool alt = false) {
  rvec w = alt ? (mask.array() * vec_t.array().abs()).matrix().eval()
               : (mask.array() * vec_t.array().abs2()).matrix().eval();
  return (base.array() / (1.0 + delta * w.array())).matrix();
}

// ------------------------------------------------------- CUE rate floors ----

/// Data of CUE k's rate-floor copy of W: normalized stacked channel, stream
/// index (1-based), SINR thresholds and current multipliers.
struct w_rate_problem {
  cvec hs;       // h_k / noise std, length n
  int k = 1;     // private stream of this CUE (1-based)
  double t1 = 0.0;  // private-rate SINR threshold
  double t3 = 0.0;  // common-rate SINR threshold
  double mu = 0.0;  // private-rate multiplier
  double pi = 0.0;  // common-rate multiplier
};

/// Rate-floor copy of W: per-stream-block rank-1 systems solved in closed
/// form (Sherman-Morrison). `base` is master minus error, `prev` the SCA
/// expansion point.
inline cmat update_w_rate(const w_rate_problem& pb, const cmat& base, const cmat& prev) {
  const int cols = static_cast<int>(base.cols());
  const double h2 = pb.hs.squaredNorm();
  cmat out(base.rows(), cols);
  for (int i = 0; i < cols; ++i) {
    cvec rhs = base.col(i);
    if (i == pb.k) rhs += pb.mu * pb.hs * pb.hs.dot(prev.col(pb.k));
    if (i == 0) rhs += pb.pi * pb.hs * pb.hs.dot(prev.col(0));
    double coef = 0.0;
    if (i >= 1) coef = pb.mu * pb.t1 * (i != pb.k ? 1.0 : 0.0) + pb.pi * pb.t3;
    if (coef > 0.0)
      out.col(i) = rhs - (coef * pb.hs.dot(rhs) / (1.0 + coef * h2)) * pb.hs;
    else
      out.col(i) = rhs;
  }
  return out;
}

/// Linearized private-rate constraint value at x (surrogate signal power).
inline double w_rate_private_gap(const w_rate_problem& pb, const cmat& x, const cmat& prev) {
  double interf = 0.0;
  for (int i = 1; i < x.cols(); ++i)
    if (i != pb.k) interf += std::norm(pb.hs.dot(x.col(i)));
  const double lb = sca_power_lb(pb.hs.dot(x.col(pb.k)), pb.hs.dot(prev.col(pb.k)));
  return pb.t1 * (interf + 1.0) - lb;
}

/// Linearized common-rate constraint value at x.
inline double w_rate_common_gap(const w_rate_problem& pb, const cmat& x, const cmat& prev) {
  double interf = 0.0;
  for (int i = 1; i < x.cols(); ++i) interf += std::norm(pb.hs.dot(x.col(i)));
  const double lb = sca_power_lb(pb.hs.dot(x.col(0)), pb.hs.dot(prev.col(0)));
  return pb.t3 * (interf + 1.0) - lb;
}

// ----------------------------------------------------- DUE link (F side) ----

/// Data of the DUE m link copy of F_k. `jother(j)` collects the other CUEs'
/// contributions to DUE block j's amplitude at receiver m.
struct f_due_problem {
  cvec gs;      // stacked normalized g_{k,m}, length n*M
  rvec y;       // schedule copy of this (m,k) pair, length n*M
  cvec omega;   // nulling coupling, length n*M
  cvec jother;  // cross-CUE amplitudes per block, length M
  double tau = 0.0;  // link-SINR multiplier
  double t2 = 0.0;   // DUE SINR threshold
  int m = 1;         // served DUE (1-based)
  int n = 1;         // elements per block
};

/// Scheduled per-block beam vector v_j = gs .* y restricted to block j.
inline cvec f_due_beam(const f_due_problem& pb, int j) {
  cvec v = cvec::Zero(pb.gs.size());
  v.segment((j - 1) * pb.n, pb.n) = pb.gs.segment((j - 1) * pb.n, pb.n)
                                        .cwiseProduct(pb.y.segment((j - 1) * pb.n, pb.n).cast<cplx>());
  return v;
}

/// Block amplitude S_j(x) = v_j^H x + jother_j.
inline cplx f_due_amp(const f_due_problem& pb, const cvec& x, int j) {
  const auto lo = (j - 1) * pb.n;
  const cvec vj =
      pb.gs.segment(lo, pb.n).cwiseProduct(pb.y.segment(lo, pb.n).cast<cplx>().eval());
  return vj.dot(x.segment(lo, pb.n)) + pb.jother(j - 1);
}

/// Off-link nulling residual (1 - y) .* x over block m.
inline cvec link_null_residual(const rvec& y, const cvec& x, int m, int n) {
  cvec r = cvec::Zero(x.size());
  r.segment((m - 1) * n, n) = ((1.0 - y.segment((m - 1) * n, n).array()) *
                               x.segment((m - 1) * n, n).array())
                                  .matrix();
  return r;
}

/// DUE link copy of F_k: block m keeps only the proximal pull plus the SCA
/// signal push; interfering blocks solve rank-1 shrink systems.
inline cvec update_f_due(const f_due_problem& pb, const cvec& base, const cvec& prev) {
  const int blocks = static_cast<int>(pb.jother.size());
  cvec rhs = base;
  // nulling coupling acts on the served block only
  rhs.segment((pb.m - 1) * pb.n, pb.n) -=
      pb.omega.segment((pb.m - 1) * pb.n, pb.n)
          .cwiseProduct((1.0 - pb.y.segment((pb.m - 1) * pb.n, pb.n).array()).matrix().cast<cplx>());
  const cplx amp_r = f_due_amp(pb, prev, pb.m);
  cvec out(base.size());
  for (int j = 1; j <= blocks; ++j) {
    const auto lo = (j - 1) * pb.n;
    const cvec vj = pb.gs.segment(lo, pb.n).cwiseProduct(pb.y.segment(lo, pb.n).cast<cplx>().eval());
    cvec r = rhs.segment(lo, pb.n);
    if (j == pb.m) {
      r += pb.tau * amp_r * vj;  // surrogate push toward the served DUE
      out.segment(lo, pb.n) = r;
    } else {
      const double c = pb.tau * pb.t2;
      r -= c * pb.jother(j - 1) * vj;
      if (c > 0.0 && vj.squaredNorm() > 0.0)
        out.segment(lo, pb.n) = r - (c * vj.dot(r) / (1.0 + c * vj.squaredNorm())) * vj;
      else
        out.segment(lo, pb.n) = r;
    }
  }
  return out;
}

/// Linearized DUE-SINR constraint value at x.
inline double f_due_gap(const f_due_problem& pb, const cvec& x, const cvec& prev) {
  const int blocks = static_cast<int>(pb.jother.size());
  double interf = 0.0;
  for (int j = 1; j <= blocks; ++j)
    if (j != pb.m) interf += std::norm(f_due_amp(pb, x, j));
  const double lb = sca_power_lb(f_due_amp(pb, x, pb.m), f_due_amp(pb, prev, pb.m));
  return pb.t2 * (interf + 1.0) - lb;
}

// ---------------------------------------------- DUE link (schedule side) ----

/// Data of the DUE m schedule copy for CUE k. The beam here is the conjugated
/// precoder-weighted channel; the split term couples to the allocation copy.
struct p_due_problem {
  cvec gs;           // stacked normalized g_{k,m}
  cvec vec_d;        // link copy of vec(F_k) for this (m,k)
  cvec varpi;        // nulling coupling
  rvec split_alloc;  // split copy f of this (m,k), length n*M
  cvec jother;       // cross-CUE amplitudes per block
  double sigma = 0.0;  // split-floor multiplier
  double o = 0.0;      // link-SINR multiplier
  double t2 = 0.0;     // DUE SINR threshold
  int m = 1;
  int n = 1;
};

inline cvec p_due_beam(const p_due_problem& pb, int j) {
  const auto lo = (j - 1) * pb.n;
  cvec w = cvec::Zero(pb.gs.size());
  w.segment(lo, pb.n) = pb.gs.segment(lo, pb.n).conjugate().cwiseProduct(pb.vec_d.segment(lo, pb.n));
  return w;
}

/// Block amplitude as a function of the real schedule: S_j(y) = w_j^T y + J_j.
inline cplx p_due_amp(const p_due_problem& pb, const rvec& y, int j) {
  const auto lo = (j - 1) * pb.n;
  const cvec wj =
      pb.gs.segment(lo, pb.n).conjugate().cwiseProduct(pb.vec_d.segment(lo, pb.n));
  const auto ys = y.segment(lo, pb.n);
  return cplx(wj.real().dot(ys), wj.imag().dot(ys)) + pb.jother(j - 1);
}

/// DUE link copy of the schedule: real rank-2 shrink per interfering block
/// (Woodbury on [Re w, Im w]), proximal elsewhere.
inline rvec update_p_due(const p_due_problem& pb, const rvec& base, const rvec& prev) {
  const int blocks = static_cast<int>(pb.jother.size());
  rvec rhs = base;
  const auto ml = (pb.m - 1) * pb.n;
  // nulling + split couplings act on the served block / its lead entry
  rhs.segment(ml, pb.n) +=
      (pb.varpi.segment(ml, pb.n).conjugate().cwiseProduct(pb.vec_d.segment(ml, pb.n))).real();
  rhs(ml) += 0.5 * pb.sigma * pb.split_alloc(ml);
  const cplx amp_r = p_due_amp(pb, prev, pb.m);
  rvec out(base.size());
  for (int j = 1; j <= blocks; ++j) {
    const auto lo = (j - 1) * pb.n;
    const cvec wj = pb.gs.segment(lo, pb.n).conjugate().cwiseProduct(pb.vec_d.segment(lo, pb.n));
    rvec r = rhs.segment(lo, pb.n);
    if (j == pb.m) {
      r += pb.o * (std::conj(amp_r) * wj.array()).real().matrix();
      out.segment(lo, pb.n) = r;
    } else {
      const double c = pb.o * pb.t2;
      r -= c * (std::conj(pb.jother(j - 1)) * wj.array()).real().matrix();
      if (c > 0.0 && wj.squaredNorm() > 0.0) {
        Eigen::Matrix<double, Eigen::Dynamic, 2> u(pb.n, 2);
        u.col(0) = wj.real();
        u.col(1) = wj.imag();
        Eigen::Matrix2d cap = Eigen::Matrix2d::Identity() + c * u.transpose() * u;
        out.segment(lo, pb.n) = r - c * u * cap.ldlt().solve(u.transpose() * r);
      } else {
        out.segment(lo, pb.n) = r;
      }
    }
  }
  return out;
}

/// Linearized DUE-SINR constraint value at schedule y.
inline double p_due_gap(const p_due_problem& pb, const rvec& y, const rvec& prev) {
  const int blocks = static_cast<int>(pb.jother.size());
  double interf = 0.0;
  for (int j = 1; j <= blocks; ++j)
    if (j != pb.m) interf += std::norm(p_due_amp(pb, y, j));
  const double lb = sca_power_lb(p_due_amp(pb, y, pb.m), p_due_amp(pb, prev, pb.m));
  return pb.t2 * (interf + 1.0) - lb;
}

// ----------------------------------------------------------- rate splits ----

/// Split copy under the within-common cap: shrink along the scheduled leads.
inline rvec update_c_split(const rvec& base, const rvec& q_lead, double chi) {
  return base - 0.5 * chi * q_lead;
}

/// Split copy under DUE m's floor: push along the scheduled lead (the
/// transcribed variant flips this sign and starves the floor; see SIGNS.md).
inline rvec update_c_due(const rvec& base, const rvec& y_lead, double phis, bool alt = false) {
  return alt ? (base - 0.5 * phis * y_lead).eval() : (base + 0.5 * phis * y_lead).eval();
}

/// Schedule copy under the box and the within-common cap.
inline rvec update_p_split(const rvec& base, const rvec& r_lead, double nu, const rvec& box_lo,
                           const rvec& box_hi, bool clip) {
  rvec q = base - 0.5 * nu * r_lead + 0.5 * box_lo - 0.5 * box_hi;
  if (clip) q = q.cwiseMax(0.0).cwiseMin(1.0);
  return q;
}

// -------------------------------------------------------- sensing floors ----

/// Data of the sensing-floor schedule copy for (u,k): matched direction and
/// the other CUEs' aggregate echo amplitude.
struct p_sense_problem {
  cvec a;            // conj(zs_{k,u}) .* vec(V_uk), length n*M
  cplx rest = 0.0;   // sum over other CUEs of their echo amplitudes
  double vartheta = 0.0;
};

inline cplx p_sense_amp(const p_sense_problem& pb, const rvec& x) {
  return cplx(pb.a.real().dot(x), pb.a.imag().dot(x)) + pb.rest;
}

/// Schedule copy pulled along the matched sensing direction (the transcribed
/// variant drops the conjugation; see SIGNS.md).
inline rvec update_p_sense(const p_sense_problem& pb, const rvec& base, const rvec& prev,
                           bool alt = false) {
  const cplx amp_r = p_sense_amp(pb, prev);
  const cvec dir = alt ? (amp_r * pb.a.array()).matrix().eval()
                       : (std::conj(amp_r) * pb.a.array()).matrix().eval();
  return base + pb.vartheta * dir.real();
}

/// Data of the sensing-floor precoder copy for (u,k).
struct f_sense_problem {
  cvec s;           // zs_{k,u} .* x_uk, length n*M
  cplx rest = 0.0;  // other CUEs' aggregate echo amplitude
  double kappa = 0.0;
};

inline cplx f_sense_amp(const f_sense_problem& pb, const cvec& v) {
  return pb.s.dot(v) + pb.rest;
}

/// Precoder copy pulled along the matched sensing direction.
inline cvec update_f_sense(const f_sense_problem& pb, const cvec& base, const cvec& prev) {
  return base + pb.kappa * f_sense_amp(pb, prev) * pb.s;
}

/// Linearized sensing-floor gap eta - lb(|echo|^2) used by the pull
/// multipliers (equals eta - SNR when evaluated at the expansion point).
inline double sense_gap(double eta, double snr) { return eta - snr; }

}  // namespace trisac::admm

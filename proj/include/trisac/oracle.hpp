#pragma once

#include <functional>

#include <json.hpp>

#include "trisac/admm/updates.hpp"
#include "trisac/metrics.hpp"
#include "trisac/rng.hpp"

// Independent numerical certification of every closed-form subproblem update.
// Each case builds a small random instance, evaluates the subproblem
// Lagrangian with its own explicit-slicing arithmetic (no calls into the
// update kernels' algebra), runs the production update, and checks
// first-order stationarity by central finite differences. A projected
// gradient descent (numeric_prox) provides a second, derivative-free route
// for spot checks.

namespace trisac::oracle {

using scalar_fn = std::function<double(const rvec&)>;

/// [Re(v); Im(v)] flattening so complex variables differentiate as reals.
inline rvec pack(const cvec& v) {
  rvec out(2 * v.size());
  out.head(v.size()) = v.real();
  out.tail(v.size()) = v.imag();
  return out;
}

inline cvec unpack_c(const rvec& x) {
  const auto n = x.size() / 2;
  cvec v(n);
  v.real() = x.head(n);
  v.imag() = x.tail(n);
  return v;
}

/// Central-difference gradient with per-coordinate steps h*(1+|x_i|).
inline rvec finite_diff_grad(const scalar_fn& f, const rvec& x, double h = 1.0e-5) {
  rvec g(x.size());
  rvec xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double hi = h * (1.0 + std::abs(x(i)));
    const double xi = x(i);
    xp(i) = xi + hi;
    const double fp = f(xp);
    xp(i) = xi - hi;
    const double fm = f(xp);
    xp(i) = xi;
    g(i) = (fp - fm) / (2.0 * hi);
  }
  return g;
}

/// Projected gradient descent with Armijo backtracking; derivative-free
/// reference minimizer for the subproblem objectives.
inline rvec numeric_prox(const scalar_fn& f, const std::function<rvec(const rvec&)>& project,
                         const rvec& x0, double tol = 1.0e-8, int max_iter = 10000) {
  rvec x = project(x0);
  for (int it = 0; it < max_iter; ++it) {
    const rvec g = finite_diff_grad(f, x);
    if ((x - project(x - g)).norm() <= tol * (1.0 + x.norm())) break;
    const double fx = f(x);
    double t = 1.0;
    rvec xn = project(x - t * g);
    while (t > 1.0e-18 && f(xn) > fx - 1.0e-4 * g.dot(x - xn)) {
      t *= 0.5;
      xn = project(x - t * g);
    }
    if ((xn - x).norm() == 0.0) break;
    x = xn;
  }
  return x;
}

inline rvec identity_projection(const rvec& x) { return x; }

struct verification_case {
  std::string subproblem;
  int instance = 0;
  double grad_norm = 0.0;
  double tol = 0.0;
  bool pass = false;
};

struct verification_report {
  std::vector<verification_case> cases;
  bool metrics_match = false;

  bool all_pass() const {
    if (!metrics_match) return false;
    for (const auto& c : cases)
      if (!c.pass) return false;
    return true;
  }
};

inline nlohmann::json report_to_json(const verification_report& rep) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : rep.cases)
    arr.push_back({{"subproblem", c.subproblem},
                   {"instance", c.instance},
                   {"grad_norm", c.grad_norm},
                   {"tol", c.tol},
                   {"pass", c.pass}});
  return {{"all_pass", rep.all_pass()}, {"metrics_match", rep.metrics_match}, {"cases", arr}};
}

// ------------------------------------------------------------------------
// explicit-slicing metric re-implementations (mask-free reference path)
// ------------------------------------------------------------------------

inline double explicit_cue_private_rate(const channel_set& cs, const primal_state& st,
                                        const radio_params& rp, int k) {
  const int K = cs.num_cues, N = cs.n;
  std::vector<cplx> s(K + 1, 0.0);
  for (int i = 0; i <= K; ++i)
    for (int e = 0; e < N; ++e) s[i] += std::conj(cs.h[k](e)) * st.W(e, i);
  double interf = rp.noise_cue_w;
  for (int i = 1; i <= K; ++i)
    if (i != k + 1) interf += std::norm(s[i]);
  return std::log2(1.0 + std::norm(s[k + 1]) / interf);
}

inline double explicit_cue_common_rate(const channel_set& cs, const primal_state& st,
                                       const radio_params& rp, int k) {
  const int K = cs.num_cues, N = cs.n;
  std::vector<cplx> s(K + 1, 0.0);
  for (int i = 0; i <= K; ++i)
    for (int e = 0; e < N; ++e) s[i] += std::conj(cs.h[k](e)) * st.W(e, i);
  double interf = rp.noise_cue_w;
  for (int i = 1; i <= K; ++i) interf += std::norm(s[i]);
  return std::log2(1.0 + std::norm(s[0]) / interf);
}

inline double explicit_due_rate(const channel_set& cs, const primal_state& st,
                                const radio_params& rp, int m) {
  const int K = cs.num_cues, M = cs.num_dues, N = cs.n;
  std::vector<cplx> s(M, 0.0);
  for (int j = 0; j < M; ++j)
    for (int k = 0; k < K; ++k)
      for (int e = 0; e < N; ++e)
        s[j] += std::conj(cs.g[k][m](e)) * st.F[k](e, j) * st.p[k](j * N + e);
  double interf = rp.noise_due_w;
  for (int j = 0; j < M; ++j)
    if (j != m) interf += std::norm(s[j]);
  const double link = std::log2(1.0 + std::norm(s[m]) / interf);
  double split = 0.0;
  for (int k = 0; k < K; ++k) split += st.p[k](m * N) * st.c[k](m * N);
  return std::min(split, link);
}

inline double explicit_rmi(const channel_set& cs, const primal_state& st, const radio_params& rp,
                           int u) {
  const int K = cs.num_cues, M = cs.num_dues, N = cs.n;
  cplx amp = 0.0;
  for (int k = 0; k < K; ++k)
    for (int m = 0; m < M; ++m)
      for (int e = 0; e < N; ++e)
        amp += std::conj(cs.z[k][m][u](e)) * st.F[k](e, m) * st.p[k](m * N + e);
  return std::log2(1.0 + std::norm(amp) / rp.noise_sense_w);
}

/// Random tiny scenarios: the masked production metrics must agree with the
/// explicit-slicing path to near machine precision.
inline bool metrics_crosscheck(std::uint64_t seed, int trials = 20) {
  for (int t = 0; t < trials; ++t) {
    substream rng(seed, 0x6D63ULL, t);
    geometry geo;
    geo.bs = {0.0, 0.0, 30.0 + 10.0 * rng.uniform()};
    const int K = 1 + static_cast<int>(rng.uniform() * 2.0);
    const int M = 1 + static_cast<int>(rng.uniform() * 2.0);
    for (int k = 0; k < K; ++k)
      geo.cues.push_back({100.0 * rng.uniform() - 50.0, 100.0 * rng.uniform() - 50.0, 10.0});
    for (int m = 0; m < M; ++m)
      geo.dues.push_back({200.0 * rng.uniform() - 100.0, 200.0 * rng.uniform() - 100.0, 5.0});
    radio_params rp;
    rp.grid_rows = 2;
    rp.grid_cols = 1 + static_cast<int>(rng.uniform() * 2.0);
    const channel_set cs = synthesize_channels(geo, rp, seed + 1000 + t);
    primal_state st;
    const int N = rp.n();
    st.W = 1.0e-5 * unvec(rng.cnormal_vec(N * (K + 1)), N, K + 1);
    for (int k = 0; k < K; ++k) {
      st.F.push_back(1.0e-5 * unvec(rng.cnormal_vec(N * M), N, M));
      rvec p(N * M), c(N * M);
      for (int i = 0; i < N * M; ++i) {
        p(i) = rng.uniform();
        c(i) = rng.uniform();
      }
      st.p.push_back(p);
      st.c.push_back(c);
    }
    auto close = [](double a, double b) {
      return std::abs(a - b) <= 1.0e-9 * (1.0 + std::max(std::abs(a), std::abs(b)));
    };
    for (int k = 0; k < K; ++k) {
      const auto pr = cue_rates(cs, st, rp, k);
      if (!close(pr.private_bits, explicit_cue_private_rate(cs, st, rp, k))) return false;
      if (!close(pr.common_bits, explicit_cue_common_rate(cs, st, rp, k))) return false;
    }
    for (int m = 0; m < M; ++m) {
      if (!close(due_rate(cs, st, rp, m), explicit_due_rate(cs, st, rp, m))) return false;
      if (!close(due_link_rate(cs, st, rp, m), due_link_rate_ratio_form(cs, st, rp, m)))
        return false;
    }
    for (int u = 0; u < K; ++u)
      if (!close(rmi(cs, st, rp, u), explicit_rmi(cs, st, rp, u))) return false;
  }
  return true;
}

// ------------------------------------------------------------------------
// stationarity cases
// ------------------------------------------------------------------------

namespace detail {

inline double urand(substream& r, double lo, double hi) { return lo + (hi - lo) * r.uniform(); }

inline int irand(substream& r, int lo, int hi) {
  return lo + static_cast<int>(r.uniform() * (hi - lo + 1)) % (hi - lo + 1);
}

inline rvec uvec(substream& r, Eigen::Index n, double lo, double hi) {
  rvec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = urand(r, lo, hi);
  return v;
}

/// Checks one candidate point against one explicit Lagrangian.
inline verification_case check_point(const std::string& id, int inst, const scalar_fn& lagr,
                                     const rvec& point, double tol_scale) {
  verification_case vc;
  vc.subproblem = id;
  vc.instance = inst;
  vc.tol = tol_scale * (1.0 + point.norm());
  vc.grad_norm = finite_diff_grad(lagr, point).norm();
  vc.pass = vc.grad_norm <= vc.tol;
  return vc;
}

inline constexpr double tol_plain = 1.0e-6;
inline constexpr double tol_sca = 1.0e-5;

}  // namespace detail

/// Runs the full stationarity suite: every subproblem update, `per_case`
/// random instances each, plus the metric cross-check.
inline verification_report run_verification_suite(int per_case = 5,
                                                  std::uint64_t seed = 20240901ULL) {
  using namespace detail;
  verification_report rep;
  auto add = [&rep](verification_case vc) { rep.cases.push_back(std::move(vc)); };

  for (int inst = 0; inst < per_case; ++inst) {
    // ---- floor master ----
    {
      substream r(seed, 1, inst);
      const int U = irand(r, 1, 3);
      const double rho = urand(r, 0.5, 2.0);
      const rvec eta = uvec(r, U, -1.0, 1.0), err = uvec(r, U, -1.0, 1.0);
      const double gh = admm::update_gamma(rho, eta, err);
      auto lagr = [&](const rvec& x) {
        double acc = -x(0);
        for (int u = 0; u < U; ++u) acc += 0.5 * rho * std::pow(x(0) - eta(u) - err(u), 2.0);
        return acc;
      };
      rvec pt(1);
      pt(0) = gh;
      add(check_point("gamma", inst, lagr, pt, tol_plain));
    }

    // ---- variable masters (complex and real averaging) ----
    auto complex_master_case = [&](const char* id, std::uint64_t tag, int min_f, int max_f) {
      substream r(seed, tag, inst);
      const int rows = irand(r, 2, 3), cols = irand(r, 2, 3), fams = irand(r, min_f, max_f);
      std::vector<cmat> cps, ers;
      for (int f = 0; f < fams; ++f) {
        cps.push_back(unvec(r.cnormal_vec(rows * cols), rows, cols));
        ers.push_back(unvec(r.cnormal_vec(rows * cols), rows, cols));
      }
      std::vector<const cmat*> cp, er;
      for (int f = 0; f < fams; ++f) {
        cp.push_back(&cps[f]);
        er.push_back(&ers[f]);
      }
      const cmat xh = admm::average_master(cp, er);
      auto lagr = [&](const rvec& x) {
        const cmat xm = unvec(unpack_c(x), rows, cols);
        double acc = 0.0;
        for (int f = 0; f < fams; ++f) acc += (xm - (cps[f] + ers[f])).squaredNorm();
        return acc;
      };
      add(check_point(id, inst, lagr, pack(vec_of(xh)), tol_plain));
    };
    auto real_master_case = [&](const char* id, std::uint64_t tag, int min_f, int max_f) {
      substream r(seed, tag, inst);
      const Eigen::Index n = irand(r, 2, 6);
      const int fams = irand(r, min_f, max_f);
      std::vector<rvec> cps, ers;
      for (int f = 0; f < fams; ++f) {
        cps.push_back(uvec(r, n, 0.1, 1.0));
        ers.push_back(uvec(r, n, -0.05, 0.05));
      }
      std::vector<const rvec*> cp, er;
      for (int f = 0; f < fams; ++f) {
        cp.push_back(&cps[f]);
        er.push_back(&ers[f]);
      }
      const rvec xh = admm::average_master(cp, er);
      auto lagr = [&](const rvec& x) {
        double acc = 0.0;
        for (int f = 0; f < fams; ++f) acc += (x - (cps[f] + ers[f])).squaredNorm();
        return acc;
      };
      add(check_point(id, inst, lagr, xh, tol_plain));
    };
    complex_master_case("master_w", 2, 3, 6);
    complex_master_case("master_f", 16, 4, 8);
    real_master_case("master_c", 3, 2, 4);
    real_master_case("master_p", 17, 5, 9);

    // ---- sensing-floor copy ----
    {
      substream r(seed, 4, inst);
      const double gamma = urand(r, -1.0, 2.0), err = urand(r, -1.0, 1.0);
      const double lambda = urand(r, 0.0, 1.5), is = urand(r, 0.0, 2.0);
      const double eh = admm::update_sense_floor(gamma, err, lambda);
      auto lagr = [&](const rvec& x) {
        return std::pow(x(0) - (gamma - err), 2.0) + lambda * (x(0) - is);
      };
      rvec pt(1);
      pt(0) = eh;
      add(check_point("sense_floor", inst, lagr, pt, tol_plain));
    }

    // ---- BS element power copy ----
    {
      substream r(seed, 5, inst);
      const int N = irand(r, 2, 4), K = irand(r, 1, 2), nsel = irand(r, 1, N);
      const double theta = urand(r, 0.0, 1.5), pt_w = urand(r, 0.5, 2.0);
      const cvec base = r.cnormal_vec(N * (K + 1));
      const rvec mask = make_mask(mask_kind::element_w, nsel, N, K).v;
      const cvec xh = admm::update_w_power(base, mask, theta);
      auto lagr = [&](const rvec& x) {
        const cvec xc = unpack_c(x);
        double power = 0.0;
        for (int b = 0; b <= K; ++b) power += std::norm(xc(b * N + nsel - 1));
        return (xc - base).squaredNorm() + theta * (power - pt_w);
      };
      add(check_point("w_power", inst, lagr, pack(xh), tol_plain));
    }

    // ---- CUE element power copy (precoder side) ----
    {
      substream r(seed, 6, inst);
      const int N = irand(r, 2, 4), M = irand(r, 1, 2), nsel = irand(r, 1, N);
      const double iota = urand(r, 0.0, 1.5), pt_w = urand(r, 0.5, 2.0);
      const cvec base = r.cnormal_vec(N * M);
      const rvec sched = uvec(r, N * M, 0.0, 1.0);
      const rvec mask = make_mask(mask_kind::element_f, nsel, N, M).v;
      const cvec xh = admm::update_f_power(base, mask, sched, iota);
      auto lagr = [&](const rvec& x) {
        const cvec xc = unpack_c(x);
        double power = 0.0;
        for (int b = 0; b < M; ++b) {
          const int e = b * N + nsel - 1;
          power += sched(e) * sched(e) * std::norm(xc(e));
        }
        return (xc - base).squaredNorm() + iota * (power - pt_w);
      };
      add(check_point("f_power", inst, lagr, pack(xh), tol_plain));
    }

    // ---- CUE rate-floor copy of W ----
    {
      substream r(seed, 7, inst);
      const int N = irand(r, 2, 4), K = irand(r, 1, 2), ksel = irand(r, 1, K);
      admm::w_rate_problem pb;
      pb.hs = r.cnormal_vec(N);
      pb.k = ksel;
      pb.t1 = urand(r, 0.05, 1.0);
      pb.t3 = urand(r, 0.05, 1.0);
      pb.mu = urand(r, 0.0, 1.5);
      pb.pi = urand(r, 0.0, 1.5);
      const cmat base = unvec(r.cnormal_vec(N * (K + 1)), N, K + 1);
      const cmat prev = unvec(r.cnormal_vec(N * (K + 1)), N, K + 1);
      const cmat xh = admm::update_w_rate(pb, base, prev);
      auto amp = [&](const cmat& x, int col) {
        cplx a = 0.0;
        for (int e = 0; e < N; ++e) a += std::conj(pb.hs(e)) * x(e, col);
        return a;
      };
      auto lagr = [&](const rvec& x) {
        const cmat xm = unvec(unpack_c(x), N, K + 1);
        double interf_priv = 0.0, interf_all = 0.0;
        for (int i = 1; i <= K; ++i) {
          const double pw = std::norm(amp(xm, i));
          interf_all += pw;
          if (i != ksel) interf_priv += pw;
        }
        const cplx ak_r = amp(prev, ksel), ac_r = amp(prev, 0);
        const double lb_k = 2.0 * (std::conj(ak_r) * amp(xm, ksel)).real() - std::norm(ak_r);
        const double lb_c = 2.0 * (std::conj(ac_r) * amp(xm, 0)).real() - std::norm(ac_r);
        return (xm - base).squaredNorm() + pb.mu * (pb.t1 * (interf_priv + 1.0) - lb_k) +
               pb.pi * (pb.t3 * (interf_all + 1.0) - lb_c);
      };
      add(check_point("w_rate", inst, lagr, pack(vec_of(xh)), tol_sca));
    }

    // ---- DUE link copy of F ----
    {
      substream r(seed, 8, inst);
      const int N = irand(r, 2, 3), M = irand(r, 1, 2), msel = irand(r, 1, M);
      admm::f_due_problem pb;
      pb.gs = r.cnormal_vec(N * M);
      pb.y = uvec(r, N * M, 0.0, 1.0);
      pb.omega = 0.5 * r.cnormal_vec(N * M);
      pb.jother = 0.5 * r.cnormal_vec(M);
      pb.tau = urand(r, 0.0, 1.5);
      pb.t2 = urand(r, 0.05, 1.0);
      pb.m = msel;
      pb.n = N;
      const cvec base = r.cnormal_vec(N * M);
      const cvec prev = r.cnormal_vec(N * M);
      const cvec xh = admm::update_f_due(pb, base, prev);
      auto amp = [&](const cvec& x, int j) {
        cplx a = pb.jother(j - 1);
        for (int e = 0; e < N; ++e) {
          const int i = (j - 1) * N + e;
          a += std::conj(pb.gs(i)) * pb.y(i) * x(i);
        }
        return a;
      };
      auto lagr = [&](const rvec& x) {
        const cvec xc = unpack_c(x);
        double interf = 0.0;
        for (int j = 1; j <= M; ++j)
          if (j != msel) interf += std::norm(amp(xc, j));
        const cplx ar = amp(prev, msel);
        const double lb = 2.0 * (std::conj(ar) * amp(xc, msel)).real() - std::norm(ar);
        double nullterm = 0.0;
        for (int e = 0; e < N; ++e) {
          const int i = (msel - 1) * N + e;
          nullterm += 2.0 * (std::conj(pb.omega(i)) * ((1.0 - pb.y(i)) * xc(i))).real();
        }
        return (xc - base).squaredNorm() + nullterm +
               pb.tau * (pb.t2 * (interf + 1.0) - lb);
      };
      add(check_point("f_due", inst, lagr, pack(xh), tol_sca));
    }

    // ---- DUE link copy of the schedule ----
    {
      substream r(seed, 9, inst);
      const int N = irand(r, 2, 3), M = irand(r, 1, 2), msel = irand(r, 1, M);
      admm::p_due_problem pb;
      pb.gs = r.cnormal_vec(N * M);
      pb.vec_d = r.cnormal_vec(N * M);
      pb.varpi = 0.5 * r.cnormal_vec(N * M);
      pb.split_alloc = uvec(r, N * M, 0.0, 1.0);
      pb.jother = 0.5 * r.cnormal_vec(M);
      pb.sigma = urand(r, 0.0, 1.5);
      pb.o = urand(r, 0.0, 1.5);
      pb.t2 = urand(r, 0.05, 1.0);
      pb.m = msel;
      pb.n = N;
      const double rest = urand(r, 0.0, 0.5);
      const double r2 = urand(r, 0.1, 1.0);
      const rvec base = uvec(r, N * M, -0.5, 1.0);
      const rvec prev = uvec(r, N * M, 0.0, 1.0);
      const rvec yh = admm::update_p_due(pb, base, prev);
      auto amp = [&](const rvec& y, int j) {
        cplx a = pb.jother(j - 1);
        for (int e = 0; e < N; ++e) {
          const int i = (j - 1) * N + e;
          a += std::conj(pb.gs(i)) * pb.vec_d(i) * y(i);
        }
        return a;
      };
      auto lagr = [&](const rvec& y) {
        double interf = 0.0;
        for (int j = 1; j <= M; ++j)
          if (j != msel) interf += std::norm(amp(y, j));
        const cplx ar = amp(prev, msel);
        const double lb = 2.0 * (std::conj(ar) * amp(y, msel)).real() - std::norm(ar);
        double nullterm = 0.0;
        for (int e = 0; e < N; ++e) {
          const int i = (msel - 1) * N + e;
          nullterm += 2.0 * (std::conj(pb.varpi(i)) * ((1.0 - y(i)) * pb.vec_d(i))).real();
        }
        const double split = y((msel - 1) * N) * pb.split_alloc((msel - 1) * N);
        return (y - base).squaredNorm() + nullterm + pb.sigma * (r2 - split - rest) +
               pb.o * (pb.t2 * (interf + 1.0) - lb);
      };
      add(check_point("p_due", inst, lagr, yh, tol_sca));
    }

    // ---- split copies ----
    {
      substream r(seed, 10, inst);
      const int N = irand(r, 2, 3), M = irand(r, 1, 3);
      const double chi = urand(r, 0.0, 1.5), rc = urand(r, 0.5, 3.0);
      const rvec base = uvec(r, N * M, 0.0, 1.0), q = uvec(r, N * M, 0.0, 1.0);
      const rvec d1 = make_mask(mask_kind::element_f, 1, N, M).v;
      const rvec rh = admm::update_c_split(base, q.cwiseProduct(d1), chi);
      auto lagr = [&](const rvec& x) {
        double cap = -rc;
        for (int b = 0; b < M; ++b) cap += q(b * N) * x(b * N);
        return (x - base).squaredNorm() + chi * cap;
      };
      add(check_point("c_split", inst, lagr, rh, tol_plain));
    }
    {
      substream r(seed, 11, inst);
      const int N = irand(r, 2, 3), M = irand(r, 1, 3), msel = irand(r, 1, M);
      const double phis = urand(r, 0.0, 1.5), r2 = urand(r, 0.1, 1.0),
                   rest = urand(r, 0.0, 0.5);
      const rvec base = uvec(r, N * M, 0.0, 1.0), y = uvec(r, N * M, 0.0, 1.0);
      const rvec em = make_mask(mask_kind::due_lead, msel, N, M).v;
      const rvec fh = admm::update_c_due(base, y.cwiseProduct(em), phis);
      auto lagr = [&](const rvec& x) {
        return (x - base).squaredNorm() +
               phis * (r2 - y((msel - 1) * N) * x((msel - 1) * N) - rest);
      };
      add(check_point("c_due", inst, lagr, fh, tol_plain));
    }
    {
      substream r(seed, 12, inst);
      const int N = irand(r, 2, 3), M = irand(r, 1, 3);
      const double nu = urand(r, 0.0, 1.5), rc = urand(r, 0.5, 3.0);
      const rvec base = uvec(r, N * M, 0.0, 1.0), rr = uvec(r, N * M, 0.0, 1.0);
      const rvec zlo = uvec(r, N * M, 0.0, 1.0), zhi = uvec(r, N * M, 0.0, 1.0);
      const rvec d1 = make_mask(mask_kind::element_f, 1, N, M).v;
      const rvec qh = admm::update_p_split(base, rr.cwiseProduct(d1), nu, zlo, zhi, false);
      auto lagr = [&](const rvec& x) {
        double cap = -rc;
        for (int b = 0; b < M; ++b) cap += rr(b * N) * x(b * N);
        return (x - base).squaredNorm() + nu * cap - zlo.dot(x) +
               zhi.dot((x.array() - 1.0).matrix());
      };
      add(check_point("p_split", inst, lagr, qh, tol_plain));
    }

    // ---- CUE element power copy (schedule side) ----
    {
      substream r(seed, 13, inst);
      const int N = irand(r, 2, 4), M = irand(r, 1, 2), nsel = irand(r, 1, N);
      const double delta = urand(r, 0.0, 1.5), pt_w = urand(r, 0.5, 2.0);
      const rvec base = uvec(r, N * M, 0.0, 1.0);
      const cvec vt = r.cnormal_vec(N * M);
      const rvec mask = make_mask(mask_kind::element_f, nsel, N, M).v;
      const rvec xh = admm::update_p_power(base, mask, vt, delta);
      auto lagr = [&](const rvec& x) {
        double power = 0.0;
        for (int b = 0; b < M; ++b) {
          const int e = b * N + nsel - 1;
          power += std::norm(vt(e)) * x(e) * x(e);
        }
        return (x - base).squaredNorm() + delta * (power - pt_w);
      };
      add(check_point("p_power", inst, lagr, xh, tol_plain));
    }

    // ---- sensing-floor copies ----
    {
      substream r(seed, 14, inst);
      const int NM = irand(r, 2, 6);
      admm::p_sense_problem pb;
      pb.a = r.cnormal_vec(NM);
      pb.rest = r.cnormal(0.25);
      pb.vartheta = urand(r, 0.0, 1.5);
      const double eta = urand(r, 0.0, 2.0);
      const rvec base = uvec(r, NM, 0.0, 1.0), prev = uvec(r, NM, 0.0, 1.0);
      const rvec xh = admm::update_p_sense(pb, base, prev);
      auto tot = [&](const rvec& x) {
        cplx a = pb.rest;
        for (int e = 0; e < NM; ++e) a += pb.a(e) * x(e);
        return a;
      };
      auto lagr = [&](const rvec& x) {
        const cplx tr = tot(prev);
        const double lb = 2.0 * (std::conj(tr) * tot(x)).real() - std::norm(tr);
        return (x - base).squaredNorm() + pb.vartheta * (eta - lb);
      };
      add(check_point("p_sense", inst, lagr, xh, tol_sca));
    }
    {
      substream r(seed, 15, inst);
      const int NM = irand(r, 2, 6);
      admm::f_sense_problem pb;
      pb.s = r.cnormal_vec(NM);
      pb.rest = r.cnormal(0.25);
      pb.kappa = urand(r, 0.0, 1.5);
      const double eta = urand(r, 0.0, 2.0);
      const cvec base = r.cnormal_vec(NM), prev = r.cnormal_vec(NM);
      const cvec vh = admm::update_f_sense(pb, base, prev);
      auto tot = [&](const cvec& v) {
        cplx a = pb.rest;
        for (int e = 0; e < NM; ++e) a += std::conj(pb.s(e)) * v(e);
        return a;
      };
      auto lagr = [&](const rvec& x) {
        const cvec v = unpack_c(x);
        const cplx tr = tot(prev);
        const double lb = 2.0 * (std::conj(tr) * tot(v)).real() - std::norm(tr);
        return (v - base).squaredNorm() + pb.kappa * (eta - lb);
      };
      add(check_point("f_sense", inst, lagr, pack(vh), tol_sca));
    }
  }

  rep.metrics_match = metrics_crosscheck(seed + 77);
  return rep;
}

}  // namespace trisac::oracle

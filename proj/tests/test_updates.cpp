#include <catch_amalgamated.hpp>

#include "trisac/admm/updates.hpp"
#include "trisac/oracle.hpp"

using namespace trisac;
using oracle::finite_diff_grad;
using oracle::identity_projection;
using oracle::numeric_prox;
using oracle::pack;
using oracle::unpack_c;

TEST_CASE("floor master matches the worked example") {
  rvec eta(2), err(2);
  eta << 1.0, 1.0;
  err << 0.0, 0.0;
  CHECK(admm::update_gamma(2.0, eta, err) == Catch::Approx(1.25));
  CHECK_THROWS_AS(admm::update_gamma(2.0, eta, rvec::Zero(3)), std::invalid_argument);
}

TEST_CASE("floor copy closed form") {
  CHECK(admm::update_sense_floor(2.0, 0.5, 1.0) == Catch::Approx(1.0));
}

TEST_CASE("inequality multiplier steps project onto the nonnegative ray") {
  CHECK(admm::step_ineq(0.5, 1.0, -2.0) == 0.0);
  CHECK(admm::step_ineq(0.5, 1.0, 0.25) == Catch::Approx(0.75));
  CHECK(admm::step_ineq(0.0, 0.3, -1.0) == 0.0);
}

TEST_CASE("surrogate power bound dominates and is tight") {
  substream r(31, 1);
  for (int t = 0; t < 200; ++t) {
    const cplx amp = r.cnormal(2.0), ref = r.cnormal(2.0);
    CHECK(admm::sca_power_lb(amp, ref) <= std::norm(amp) + 1e-12);
    CHECK(admm::sca_power_lb(ref, ref) == Catch::Approx(std::norm(ref)).epsilon(1e-12));
  }
}

TEST_CASE("element power shrinks agree with the numerical minimizer") {
  substream r(32, 1);
  const int N = 3, K = 1;
  const cvec base = r.cnormal_vec(N * (K + 1));
  const rvec mask = make_mask(mask_kind::element_w, 2, N, K).v;
  const double theta = 0.8;
  const cvec closed = admm::update_w_power(base, mask, theta);
  auto lagr = [&](const rvec& x) {
    const cvec xc = unpack_c(x);
    return (xc - base).squaredNorm() +
           theta * (xc.cwiseProduct(mask.cast<cplx>()).squaredNorm());
  };
  const rvec numeric = numeric_prox(lagr, identity_projection, pack(base));
  CHECK((pack(closed) - numeric).norm() < 1e-6 * (1.0 + numeric.norm()));
}

TEST_CASE("schedule box copy equals the projected numerical minimizer") {
  substream r(33, 1);
  const int N = 2, M = 2;
  rvec base(N * M), lead(N * M), zlo(N * M), zhi(N * M);
  for (int i = 0; i < N * M; ++i) {
    base(i) = 2.0 * r.uniform() - 0.5;
    zlo(i) = r.uniform();
    zhi(i) = r.uniform();
  }
  lead = make_mask(mask_kind::element_f, 1, N, M).v * 0.7;
  const double nu = 0.9;
  const rvec closed = admm::update_p_split(base, lead, nu, zlo, zhi, true);
  auto lagr = [&](const rvec& x) {
    return (x - base).squaredNorm() + nu * lead.dot(x) - zlo.dot(x) +
           zhi.dot((x.array() - 1.0).matrix());
  };
  auto box = [](const rvec& x) { return x.cwiseMax(0.0).cwiseMin(1.0).eval(); };
  const rvec numeric = numeric_prox(lagr, box, box(base));
  CHECK((closed - numeric).norm() < 1e-6 * (1.0 + numeric.norm()));
}

TEST_CASE("rate-floor precoder copy agrees with the numerical minimizer") {
  substream r(34, 1);
  const int N = 2, K = 1;
  admm::w_rate_problem pb;
  pb.hs = r.cnormal_vec(N);
  pb.k = 1;
  pb.t1 = 0.4;
  pb.t3 = 0.3;
  pb.mu = 0.7;
  pb.pi = 0.5;
  const cmat base = unvec(r.cnormal_vec(N * (K + 1)), N, K + 1);
  const cmat prev = unvec(r.cnormal_vec(N * (K + 1)), N, K + 1);
  const cmat closed = admm::update_w_rate(pb, base, prev);
  auto lagr = [&](const rvec& x) {
    const cmat xm = unvec(unpack_c(x), N, K + 1);
    return (xm - base).squaredNorm() +
           pb.mu * admm::w_rate_private_gap(pb, xm, prev) +
           pb.pi * admm::w_rate_common_gap(pb, xm, prev);
  };
  const rvec numeric = numeric_prox(lagr, identity_projection, pack(vec_of(base)));
  CHECK((pack(vec_of(closed)) - numeric).norm() < 2e-5 * (1.0 + numeric.norm()));
}

TEST_CASE("link copies agree with the numerical minimizer") {
  substream r(35, 1);
  const int N = 2, M = 2;
  admm::f_due_problem pb;
  pb.gs = r.cnormal_vec(N * M);
  rvec y(N * M);
  for (int i = 0; i < N * M; ++i) y(i) = r.uniform();
  pb.y = y;
  pb.omega = 0.3 * r.cnormal_vec(N * M);
  pb.jother = 0.3 * r.cnormal_vec(M);
  pb.tau = 0.6;
  pb.t2 = 0.2;
  pb.m = 1;
  pb.n = N;
  const cvec base = r.cnormal_vec(N * M);
  const cvec prev = r.cnormal_vec(N * M);
  const cvec closed = admm::update_f_due(pb, base, prev);
  auto lagr = [&](const rvec& x) {
    const cvec xc = unpack_c(x);
    double nullterm = 0.0;
    for (int e = 0; e < N; ++e)
      nullterm += 2.0 * (std::conj(pb.omega(e)) * ((1.0 - pb.y(e)) * xc(e))).real();
    return (xc - base).squaredNorm() + nullterm + pb.tau * admm::f_due_gap(pb, xc, prev);
  };
  const rvec numeric = numeric_prox(lagr, identity_projection, pack(base));
  CHECK((pack(closed) - numeric).norm() < 2e-5 * (1.0 + numeric.norm()));

  admm::p_due_problem pq;
  pq.gs = pb.gs;
  pq.vec_d = prev;
  pq.varpi = 0.3 * r.cnormal_vec(N * M);
  rvec alloc(N * M);
  for (int i = 0; i < N * M; ++i) alloc(i) = r.uniform();
  pq.split_alloc = alloc;
  pq.jother = pb.jother;
  pq.sigma = 0.4;
  pq.o = 0.5;
  pq.t2 = 0.2;
  pq.m = 1;
  pq.n = N;
  rvec pbase(N * M), pprev(N * M);
  for (int i = 0; i < N * M; ++i) {
    pbase(i) = r.uniform();
    pprev(i) = r.uniform();
  }
  const rvec pclosed = admm::update_p_due(pq, pbase, pprev);
  auto plagr = [&](const rvec& x) {
    double nullterm = 0.0;
    for (int e = 0; e < N; ++e)
      nullterm += 2.0 * (std::conj(pq.varpi(e)) * ((1.0 - x(e)) * pq.vec_d(e))).real();
    const double split = x(0) * pq.split_alloc(0);
    return (x - pbase).squaredNorm() + nullterm - pq.sigma * split +
           pq.o * admm::p_due_gap(pq, x, pprev);
  };
  const rvec pnumeric = numeric_prox(plagr, identity_projection, pbase);
  CHECK((pclosed - pnumeric).norm() < 2e-5 * (1.0 + pnumeric.norm()));
}

TEST_CASE("variant transcriptions fail stationarity away from binary schedules") {
  substream r(36, 1);
  const int N = 3, M = 2, nsel = 1;
  const cvec base = r.cnormal_vec(N * M);
  const rvec mask = make_mask(mask_kind::element_f, nsel, N, M).v;
  rvec sched(N * M);
  for (int i = 0; i < N * M; ++i) sched(i) = 0.3 + 0.4 * r.uniform();  // fractional
  const double iota = 1.1;
  auto lagr = [&](const cvec& xc) {
    double power = 0.0;
    for (int b = 0; b < M; ++b) {
      const int e = b * N + nsel - 1;
      power += sched(e) * sched(e) * std::norm(xc(e));
    }
    return (xc - base).squaredNorm() + iota * power;
  };
  auto grad_norm = [&](const cvec& at) {
    return finite_diff_grad([&](const rvec& x) { return lagr(unpack_c(x)); }, pack(at)).norm();
  };
  const cvec derived = admm::update_f_power(base, mask, sched, iota, false);
  const cvec variant = admm::update_f_power(base, mask, sched, iota, true);
  CHECK(grad_norm(derived) < 1e-6 * (1.0 + pack(derived).norm()));
  CHECK(grad_norm(variant) > 1e-3);

  // with a binary schedule both forms coincide
  rvec bin(N * M);
  for (int i = 0; i < N * M; ++i) bin(i) = r.uniform() < 0.5 ? 0.0 : 1.0;
  const cvec a = admm::update_f_power(base, mask, bin, iota, false);
  const cvec b = admm::update_f_power(base, mask, bin, iota, true);
  CHECK((a - b).norm() == 0.0);
}

TEST_CASE("variant split-floor sign starves the floor") {
  substream r(37, 1);
  const int N = 2, M = 2, msel = 1;
  rvec base(N * M), y(N * M);
  for (int i = 0; i < N * M; ++i) {
    base(i) = r.uniform();
    y(i) = 0.3 + 0.7 * r.uniform();
  }
  const rvec em = make_mask(mask_kind::due_lead, msel, N, M).v;
  const double phis = 0.9, r2 = 0.4, rest = 0.1;
  auto lagr = [&](const rvec& x) {
    return (x - base).squaredNorm() + phis * (r2 - y(0) * x(0) - rest);
  };
  const rvec derived = admm::update_c_due(base, y.cwiseProduct(em), phis, false);
  const rvec variant = admm::update_c_due(base, y.cwiseProduct(em), phis, true);
  CHECK(finite_diff_grad(lagr, derived).norm() < 1e-6 * (1.0 + derived.norm()));
  CHECK(finite_diff_grad(lagr, variant).norm() > 1e-3);
  CHECK(variant(0) < base(0));  // pushes allocation down instead of up
}

TEST_CASE("variant sensing pull drops the conjugation and misses stationarity") {
  substream r(38, 1);
  const int NM = 4;
  admm::p_sense_problem pb;
  pb.a = r.cnormal_vec(NM);
  pb.rest = r.cnormal(0.25);
  pb.vartheta = 0.8;
  rvec base(NM), prev(NM);
  for (int i = 0; i < NM; ++i) {
    base(i) = r.uniform();
    prev(i) = r.uniform();
  }
  const double eta = 1.0;
  auto lagr = [&](const rvec& x) {
    const cplx tot_prev = admm::p_sense_amp(pb, prev);
    const double lb = admm::sca_power_lb(admm::p_sense_amp(pb, x), tot_prev);
    return (x - base).squaredNorm() + pb.vartheta * (eta - lb);
  };
  const rvec derived = admm::update_p_sense(pb, base, prev, false);
  const rvec variant = admm::update_p_sense(pb, base, prev, true);
  CHECK(finite_diff_grad(lagr, derived).norm() < 1e-5 * (1.0 + derived.norm()));
  CHECK(finite_diff_grad(lagr, variant).norm() > 1e-3);
}

TEST_CASE("master averaging is the consensus minimizer") {
  substream r(39, 1);
  std::vector<rvec> cps, ers;
  for (int f = 0; f < 4; ++f) {
    rvec c(3), e(3);
    for (int i = 0; i < 3; ++i) {
      c(i) = r.uniform();
      e(i) = 0.1 * r.uniform();
    }
    cps.push_back(c);
    ers.push_back(e);
  }
  std::vector<const rvec*> cp, er;
  for (int f = 0; f < 4; ++f) {
    cp.push_back(&cps[f]);
    er.push_back(&ers[f]);
  }
  const rvec avg = admm::average_master(cp, er);
  rvec manual = rvec::Zero(3);
  for (int f = 0; f < 4; ++f) manual += cps[f] + ers[f];
  manual /= 4.0;
  CHECK((avg - manual).norm() == Catch::Approx(0.0).margin(1e-15));
}

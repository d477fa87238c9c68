#include <sstream>

#include <catch_amalgamated.hpp>

#include "trisac/admm/solver.hpp"

using namespace trisac;

namespace {

struct small_problem {
  geometry geo;
  radio_params rp;
  rate_thresholds th;
  solver_config cfg;
  channel_set cs;
};

small_problem make_small(std::uint64_t seed) {
  small_problem s;
  s.geo.cues = {{45.0, 35.0, 10.0}, {-40.0, 25.0, 10.0}};
  s.geo.dues = {{130.0, 40.0, 5.0}, {-30.0, 140.0, 5.0}};
  s.rp.grid_rows = 2;
  s.rp.grid_cols = 2;
  s.th.r1_bits = s.th.r2_bits = s.th.r3_bits = 0.05;
  s.cfg.max_iters = 60;
  s.cfg.min_iters = 10;
  s.cs = synthesize_channels(s.geo, s.rp, seed);
  return s;
}

void perturb_copies(solver& sv, std::uint64_t seed) {
  substream r(seed, 0xCC);
  consensus_state& c = sv.mutable_copies();
  for (auto& w : c.w_rate) w += 0.3 * unvec(r.cnormal_vec(w.size()), w.rows(), w.cols());
  for (auto& w : c.w_power) w += 0.3 * unvec(r.cnormal_vec(w.size()), w.rows(), w.cols());
  for (auto& fk : c.f_due)
    for (auto& f : fk) f += 0.3 * unvec(r.cnormal_vec(f.size()), f.rows(), f.cols());
  for (auto& pk : c.p_due)
    for (auto& p : pk)
      for (Eigen::Index i = 0; i < p.size(); ++i) p(i) += 0.2 * (r.uniform() - 0.5);
  for (auto& ck : c.c_due)
    for (auto& cc : ck)
      for (Eigen::Index i = 0; i < cc.size(); ++i) cc(i) += 0.2 * r.uniform();
  for (Eigen::Index u = 0; u < c.sense_floor.size(); ++u)
    c.sense_floor(u) += 0.5 * (r.uniform() - 0.5);
}

}  // namespace

TEST_CASE("pure consensus collapses to the copy average in one round") {
  small_problem s = make_small(101);
  s.cfg.pure_consensus = true;
  s.cfg.clip_box = false;  // keep the math linear so the mean is exact
  solver sv(s.cs, s.rp, s.th, s.cfg);
  perturb_copies(sv, 7);

  // expected master W: plain average of the perturbed copies
  const consensus_state before = sv.copies();
  const int K = s.cs.num_cues, N = s.cs.n, M = s.cs.num_dues, U = s.cs.num_sensors();
  cmat expect_w = cmat::Zero(N, K + 1);
  for (const auto& w : before.w_rate) expect_w += w;
  for (const auto& w : before.w_power) expect_w += w;
  expect_w /= static_cast<double>(K + N);

  sv.step();
  CHECK((sv.masters().W - expect_w).norm() < 1e-12 * (1.0 + expect_w.norm()));

  // per-variable denominators: F averages N+M+U copies, p averages 1+M+N+U
  cmat expect_f = cmat::Zero(N, M);
  for (int n = 0; n < N; ++n) expect_f += before.f_power[n][0];
  for (int m = 0; m < M; ++m) expect_f += before.f_due[m][0];
  for (int u = 0; u < U; ++u) expect_f += before.f_sense[u][0];
  expect_f /= static_cast<double>(N + M + U);
  CHECK((sv.masters().F[0] - expect_f).norm() < 1e-12 * (1.0 + expect_f.norm()));

  rvec expect_p = before.p_split[0];
  for (int m = 0; m < M; ++m) expect_p += before.p_due[m][0];
  for (int n = 0; n < N; ++n) expect_p += before.p_power[n][0];
  for (int u = 0; u < U; ++u) expect_p += before.p_sense[u][0];
  expect_p /= static_cast<double>(1 + M + N + U);
  CHECK((sv.masters().p[0] - expect_p).norm() < 1e-12 * (1.0 + expect_p.norm()));

  const auto res = sv.residuals();
  for (double v : res) CHECK(v < 1e-9);
}

TEST_CASE("pure consensus stays collapsed over many rounds") {
  small_problem s = make_small(103);
  s.cfg.pure_consensus = true;
  solver sv(s.cs, s.rp, s.th, s.cfg);
  perturb_copies(sv, 9);
  double worst = 0.0;
  for (int r = 0; r < 20; ++r) {
    sv.step();
    if (r >= 1) {
      const auto res = sv.residuals();
      worst = std::max(worst, *std::max_element(res.begin(), res.end()));
    }
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("solve is deterministic and internally consistent") {
  const small_problem s = make_small(202);
  solver a(s.cs, s.rp, s.th, s.cfg);
  solver b(s.cs, s.rp, s.th, s.cfg);
  const solve_result ra = a.solve();
  const solve_result rb = b.solve();
  std::ostringstream ca, cb;
  write_trace_csv(ra.trace, ca);
  write_trace_csv(rb.trace, cb);
  REQUIRE(ca.str() == cb.str());
  CHECK(ra.iterations == static_cast<int>(ra.trace.size()));
  CHECK(ra.objective_bits == Catch::Approx(objective(a.channels(), ra.state, s.rp)));
  // recovered schedules are binary and consistent with the state
  for (int k = 0; k < s.cs.num_cues; ++k)
    for (int m = 0; m < s.cs.num_dues; ++m) {
      const int rho = ra.schedule.rho(k, m);
      CHECK((rho == 0 || rho == 1));
      CHECK(ra.state.p[k](m * s.cs.n) == static_cast<double>(rho));
    }
}

TEST_CASE("trace schema stays stable") {
  const small_problem s = make_small(203);
  solver sv(s.cs, s.rp, s.th, s.cfg);
  const solve_result res = sv.solve();
  std::ostringstream os;
  write_trace_csv(res.trace, os);
  const std::string head = os.str().substr(0, os.str().find('\n'));
  CHECK(head ==
        "iteration,objective_bits,max_residual,res_sense_floor,res_w_rate,res_w_power,"
        "res_f_power,res_f_due,res_f_sense,res_p_split,res_p_due,res_p_power,res_p_sense,"
        "res_c_split,res_c_due,min_rate_slack,wall_time_ms");
  // timing-free traces zero the wall-time column
  for (const auto& row : res.trace) CHECK(row.wall_time_ms == 0.0);
  for (const auto& row : res.trace) {
    CHECK(std::isfinite(row.objective_bits));
    CHECK(row.max_residual >= 0.0);
  }
}

TEST_CASE("solver rejects inconsistent setups gracefully") {
  const small_problem s = make_small(204);
  solver sv(s.cs, s.rp, s.th, s.cfg);
  CHECK(sv.iteration() == 0);
  sv.step();
  CHECK(sv.iteration() == 1);
}

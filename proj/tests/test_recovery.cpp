#include <catch_amalgamated.hpp>

#include "trisac/recovery.hpp"
#include "trisac/rng.hpp"

using namespace trisac;

TEST_CASE("schedule rounding follows block means") {
  rvec p(4);
  p << 0.6, 0.6, 0.2, 0.4;
  const rvec r = recover_schedule(p, 2);
  CHECK(r(0) == 1.0);
  CHECK(r(1) == 1.0);
  CHECK(r(2) == 0.0);
  CHECK(r(3) == 0.0);
  // threshold comparison is inclusive
  rvec q(2);
  q << 0.5, 0.5;
  CHECK(recover_schedule(q, 2)(0) == 1.0);
  CHECK_THROWS_AS(recover_schedule(p, 3), std::invalid_argument);
  CHECK_THROWS_AS(recover_schedule(p, 2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(recover_schedule(p, 2, 1.0), std::invalid_argument);
}

TEST_CASE("rounding is idempotent, threshold-monotone and binary-exact") {
  substream r(17, 1);
  for (int t = 0; t < 60; ++t) {
    const int n = 2 + t % 3, blocks = 1 + t % 4;
    rvec p(n * blocks);
    for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = r.uniform();
    const rvec once = recover_schedule(p, n, 0.5);
    const rvec twice = recover_schedule(once, n, 0.5);
    REQUIRE((once.array() == twice.array()).all());
    // a block on at a high threshold stays on at a lower one
    const rvec lo = recover_schedule(p, n, 0.3);
    const rvec hi = recover_schedule(p, n, 0.7);
    REQUIRE((lo.array() >= hi.array()).all());
    // binary block-constant inputs are fixed points at any threshold
    REQUIRE((recover_schedule(once, n, 0.11).array() == once.array()).all());
    REQUIRE((recover_schedule(once, n, 0.93).array() == once.array()).all());
  }
}

TEST_CASE("state recovery nulls dropped links exactly") {
  substream r(19, 2);
  const int N = 3, K = 2, M = 3;
  primal_state st;
  st.W = unvec(r.cnormal_vec(N * (K + 1)), N, K + 1);
  for (int k = 0; k < K; ++k) {
    st.F.push_back(unvec(r.cnormal_vec(N * M), N, M));
    rvec p(N * M), c(N * M);
    for (int i = 0; i < N * M; ++i) {
      p(i) = r.uniform();
      c(i) = r.uniform();
    }
    st.p.push_back(p);
    st.c.push_back(c);
  }
  const schedule_matrix sm = recover_state(st);
  REQUIRE(sm.rho.rows() == K);
  REQUIRE(sm.rho.cols() == M);
  int links = 0;
  for (int k = 0; k < K; ++k)
    for (int m = 0; m < M; ++m) {
      links += sm.rho(k, m);
      if (sm.rho(k, m) == 0) {
        REQUIRE(st.F[k].col(m).norm() == 0.0);
        REQUIRE(st.p[k].segment(m * N, N).norm() == 0.0);
      } else {
        REQUIRE((st.p[k].segment(m * N, N).array() == 1.0).all());
      }
      // off-link residual (1 - p) .* f vanishes identically
      const rvec fmag = st.F[k].col(m).cwiseAbs();
      const rvec resid = (1.0 - st.p[k].segment(m * N, N).array()) * fmag.array();
      REQUIRE(resid.cwiseAbs().maxCoeff() == 0.0);
    }
  CHECK(sm.links() == links);
}

TEST_CASE("schedule serializations") {
  schedule_matrix sm;
  sm.rho = Eigen::MatrixXi(1, 2);
  sm.rho << 1, 0;
  CHECK(schedule_to_csv(sm) == "cue,due,established\n1,1,1\n1,2,0\n");
  const nlohmann::json j = schedule_to_json(sm);
  CHECK(j.at("links").get<int>() == 1);
  CHECK(j.at("rho")[0][1].get<int>() == 0);
}

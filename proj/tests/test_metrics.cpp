#include <catch_amalgamated.hpp>

#include "trisac/metrics.hpp"
#include "trisac/oracle.hpp"

using namespace trisac;

namespace {

struct tiny_case {
  geometry geo;
  radio_params rp;
  channel_set cs;
  primal_state st;
};

tiny_case make_tiny(std::uint64_t seed, double scale = 1.0e-5) {
  tiny_case t;
  t.geo.cues = {{40.0, 30.0, 10.0}, {-35.0, 20.0, 10.0}};
  t.geo.dues = {{120.0, 40.0, 5.0}, {-20.0, 150.0, 5.0}};
  t.rp.grid_rows = 2;
  t.rp.grid_cols = 2;
  t.cs = synthesize_channels(t.geo, t.rp, seed);
  const int N = t.rp.n(), K = t.cs.num_cues, M = t.cs.num_dues;
  substream r(seed, 0xAB);
  t.st.W = scale * unvec(r.cnormal_vec(N * (K + 1)), N, K + 1);
  for (int k = 0; k < K; ++k) {
    t.st.F.push_back(scale * unvec(r.cnormal_vec(N * M), N, M));
    rvec p(N * M), c(N * M);
    for (int i = 0; i < N * M; ++i) {
      p(i) = r.uniform();
      c(i) = 0.2 * r.uniform();
    }
    t.st.p.push_back(p);
    t.st.c.push_back(c);
  }
  t.st.gamma = 0.0;
  return t;
}

}  // namespace

TEST_CASE("rate threshold helpers") {
  CHECK(sinr_threshold(1.0) == Catch::Approx(1.0));
  CHECK(sinr_threshold(0.1) == Catch::Approx(0.0717734625362931));
  CHECK(sinr_threshold(0.0) == 0.0);
  CHECK(dbm_to_watts(-90.0) == Catch::Approx(1.0e-12));
  CHECK(dbm_to_watts(30.0) == Catch::Approx(1.0));
}

TEST_CASE("masked metrics agree with explicit slicing") {
  const tiny_case t = make_tiny(21);
  for (int k = 0; k < t.cs.num_cues; ++k) {
    const auto pr = cue_rates(t.cs, t.st, t.rp, k);
    CHECK(pr.private_bits ==
          Catch::Approx(oracle::explicit_cue_private_rate(t.cs, t.st, t.rp, k)).epsilon(1e-12));
    CHECK(pr.common_bits ==
          Catch::Approx(oracle::explicit_cue_common_rate(t.cs, t.st, t.rp, k)).epsilon(1e-12));
  }
  for (int m = 0; m < t.cs.num_dues; ++m)
    CHECK(due_rate(t.cs, t.st, t.rp, m) ==
          Catch::Approx(oracle::explicit_due_rate(t.cs, t.st, t.rp, m)).epsilon(1e-12));
  for (int u = 0; u < t.cs.num_sensors(); ++u)
    CHECK(rmi(t.cs, t.st, t.rp, u) ==
          Catch::Approx(oracle::explicit_rmi(t.cs, t.st, t.rp, u)).epsilon(1e-12));
  CHECK(oracle::metrics_crosscheck(2024));
}

TEST_CASE("link rate forms coincide") {
  const tiny_case t = make_tiny(33);
  for (int m = 0; m < t.cs.num_dues; ++m)
    CHECK(due_link_rate(t.cs, t.st, t.rp, m) ==
          Catch::Approx(due_link_rate_ratio_form(t.cs, t.st, t.rp, m)).epsilon(1e-12));
}

TEST_CASE("delivered DUE rate is the min of split and link") {
  tiny_case t = make_tiny(44);
  for (auto& c : t.st.c) c.setConstant(100.0);  // split far above the link
  for (int m = 0; m < t.cs.num_dues; ++m)
    CHECK(due_rate(t.cs, t.st, t.rp, m) ==
          Catch::Approx(due_link_rate(t.cs, t.st, t.rp, m)));
  for (auto& c : t.st.c) c.setConstant(0.0);  // nothing forwarded
  for (int m = 0; m < t.cs.num_dues; ++m) CHECK(due_rate(t.cs, t.st, t.rp, m) == 0.0);
}

TEST_CASE("objective is the worst-receiver mutual information") {
  const tiny_case t = make_tiny(55);
  double worst = std::numeric_limits<double>::infinity();
  for (int u = 0; u < t.cs.num_sensors(); ++u)
    worst = std::min(worst, rmi(t.cs, t.st, t.rp, u));
  CHECK(objective(t.cs, t.st, t.rp) == worst);
}

TEST_CASE("feasibility report flags the offending constraints") {
  tiny_case t = make_tiny(66, 1.0e-6);
  rate_thresholds th;
  th.r1_bits = th.r2_bits = th.r3_bits = 0.0;  // relaxed floors
  for (auto& p : t.st.p) p.setOnes();          // box + nulling satisfied exactly
  for (auto& c : t.st.c) c.setZero();          // split within anything
  const constraint_report ok = check_feasibility(t.cs, t.st, t.rp, th);
  CHECK(ok.all_satisfied());
  CHECK(ok.min_slack("off_link_null") == 0.0);

  primal_state bad = t.st;
  bad.W *= 1.0e7;  // blows the per-element cap
  bad.p[0](0) = 1.5;
  const constraint_report rep = check_feasibility(t.cs, bad, t.rp, th);
  CHECK(!rep.all_satisfied());
  CHECK(rep.min_slack("bs_element_power") < 0.0);
  CHECK(rep.min_slack("schedule_box") < 0.0);
  bool saw_box = false;
  for (const auto& e : rep.entries)
    if (e.constraint_id == "schedule_box" && e.indices == std::vector<int>{1})
      saw_box = !e.satisfied;
  CHECK(saw_box);
}

TEST_CASE("state serialization round-trips exactly") {
  const tiny_case t = make_tiny(77);
  const nlohmann::json j = state_to_json(t.st);
  const primal_state back = state_from_json(nlohmann::json::parse(j.dump()));
  CHECK(back.gamma == t.st.gamma);
  CHECK((back.W.array() == t.st.W.array()).all());
  for (int k = 0; k < t.st.num_cues(); ++k) {
    CHECK((back.F[k].array() == t.st.F[k].array()).all());
    CHECK((back.c[k].array() == t.st.c[k].array()).all());
    CHECK((back.p[k].array() == t.st.p[k].array()).all());
  }
}

TEST_CASE("report serialization carries the verdict") {
  const tiny_case t = make_tiny(88, 1.0e-6);
  rate_thresholds th;
  th.r1_bits = th.r2_bits = th.r3_bits = 5.0;  // impossible floors
  const nlohmann::json j = report_to_json(check_feasibility(t.cs, t.st, t.rp, th));
  CHECK(j.at("all_satisfied").get<bool>() == false);
  CHECK(j.at("constraints").size() > 0);
}

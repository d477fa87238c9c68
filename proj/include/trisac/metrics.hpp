#pragma once

#include <json.hpp>

#include "trisac/channel.hpp"
#include "trisac/common.hpp"
#include "trisac/tensorops.hpp"

namespace trisac {

/// One candidate transceiver design: BS precoder W (common stream first),
/// per-CUE forward precoders F[k] (n x M), stacked rate splits c[k] and
/// schedule weights p[k] (both length n*M), and the sensing floor gamma.
struct primal_state {
  cmat W;
  std::vector<cmat> F;
  std::vector<rvec> c;
  std::vector<rvec> p;
  double gamma = 0.0;

  int n() const { return static_cast<int>(W.rows()); }
  int num_cues() const { return static_cast<int>(W.cols()) - 1; }
  int num_dues() const { return F.empty() ? 0 : static_cast<int>(F.front().cols()); }
};

/// QoS floors (bits/s/Hz) and the per-element transmit power cap (Watts).
struct rate_thresholds {
  double r1_bits = 0.1;  // CUE private-message rate floor
  double r2_bits = 0.1;  // DUE rate floor
  double r3_bits = 0.1;  // common-stream rate floor
  double pt_watts = 1.0;
};

/// Received amplitude of every stream at CUE k: index 0 the common stream,
/// 1..K the private streams. Computed through the stacked mask formalism.
inline cvec cue_signal(const channel_set& cs, const cmat& w, int k) {
  const int K = cs.num_cues;
  const cvec ht = cs.h_stacked(k);
  const cvec vw = vec_of(w);
  cvec s(K + 1);
  for (int i = 0; i <= K; ++i) {
    const auto mask = make_mask(mask_kind::stream, i, cs.n, K);
    s(i) = ht.dot(vw.cwiseProduct(mask.v.cast<cplx>()));
  }
  return s;
}

/// Combined forward amplitude of DUE block j at DUE m's receiver, summed over
/// the CUE transmitters and weighted by the relaxed schedule.
inline cvec due_signal(const channel_set& cs, const primal_state& st, int m) {
  const int M = cs.num_dues;
  cvec s = cvec::Zero(M);
  for (int j = 0; j < M; ++j) {
    const auto mask = make_mask(mask_kind::due, j + 1, cs.n, M);
    for (int k = 0; k < cs.num_cues; ++k) {
      const cvec x =
          vec_of(st.F[k]).cwiseProduct(mask.v.cast<cplx>()).cwiseProduct(st.p[k].cast<cplx>());
      s(j) += cs.g_stacked(k, m).dot(x);
    }
  }
  return s;
}

/// Echo amplitude aggregated at sensing receiver u over all CUE transmitters
/// and scheduled DUE reflectors.
inline cplx sense_signal(const channel_set& cs, const primal_state& st, int u) {
  cplx acc = 0.0;
  for (int k = 0; k < cs.num_cues; ++k) {
    for (int m = 0; m < cs.num_dues; ++m) {
      const auto mask = make_mask(mask_kind::due, m + 1, cs.n, cs.num_dues);
      const cvec x =
          vec_of(st.F[k]).cwiseProduct(mask.v.cast<cplx>()).cwiseProduct(st.p[k].cast<cplx>());
      acc += cs.z_stacked(k, u).dot(x);
    }
  }
  return acc;
}

struct cue_rate_pair {
  double common_bits;    // rate at which CUE k decodes the shared stream
  double private_bits;   // CUE k's own message rate
};

/// Downlink rates at CUE k: the common stream is decoded against all private
/// streams, the private stream against the other CUEs' private streams.
inline cue_rate_pair cue_rates(const channel_set& cs, const primal_state& st,
                               const radio_params& rp, int k) {
  const cvec s = cue_signal(cs, st.W, k);
  const int K = cs.num_cues;
  double priv_total = 0.0;
  for (int i = 1; i <= K; ++i) priv_total += std::norm(s(i));
  const double sig_c = std::norm(s(0));
  const double sig_k = std::norm(s(k + 1));
  const double common = std::log2(1.0 + sig_c / (priv_total + rp.noise_cue_w));
  const double privat = std::log2(1.0 + sig_k / (priv_total - sig_k + rp.noise_cue_w));
  return {common, privat};
}

/// Forward-link rate of DUE m in plain SINR form.
inline double due_link_rate(const channel_set& cs, const primal_state& st,
                            const radio_params& rp, int m) {
  const cvec s = due_signal(cs, st, m);
  double interf = 0.0;
  for (int j = 0; j < cs.num_dues; ++j)
    if (j != m) interf += std::norm(s(j));
  return std::log2(1.0 + std::norm(s(m)) / (interf + rp.noise_due_w));
}

/// Same link rate written as a total-over-interference ratio; kept for
/// comparison (see SIGNS.md) and equal to due_link_rate up to rounding.
inline double due_link_rate_ratio_form(const channel_set& cs, const primal_state& st,
                                       const radio_params& rp, int m) {
  const cvec s = due_signal(cs, st, m);
  double total = 0.0, interf = 0.0;
  for (int j = 0; j < cs.num_dues; ++j) {
    total += std::norm(s(j));
    if (j != m) interf += std::norm(s(j));
  }
  return std::log2((total + rp.noise_due_w) / (interf + rp.noise_due_w));
}

/// Split rate forwarded to DUE m: sum over CUEs of the scheduled lead-entry
/// split allocations.
inline double due_split_rate(const channel_set& cs, const primal_state& st, int m) {
  double acc = 0.0;
  const auto lead = make_mask(mask_kind::due_lead, m + 1, cs.n, cs.num_dues);
  for (int k = 0; k < cs.num_cues; ++k)
    acc += st.p[k].cwiseProduct(lead.v).dot(st.c[k]);
  return acc;
}

/// Delivered rate of DUE m: the forwarded split total, capped by the link.
inline double due_rate(const channel_set& cs, const primal_state& st, const radio_params& rp,
                       int m) {
  return std::min(due_split_rate(cs, st, m), due_link_rate(cs, st, rp, m));
}

/// Radar mutual information at sensing receiver u (bits).
inline double rmi(const channel_set& cs, const primal_state& st, const radio_params& rp, int u) {
  const cplx s = sense_signal(cs, st, u);
  return std::log2(1.0 + std::norm(s) / rp.noise_sense_w);
}

/// Max-min objective: worst-receiver radar mutual information.
inline double objective(const channel_set& cs, const primal_state& st, const radio_params& rp) {
  double worst = std::numeric_limits<double>::infinity();
  for (int u = 0; u < cs.num_sensors(); ++u) worst = std::min(worst, rmi(cs, st, rp, u));
  return worst;
}

/// Network sum rate: CUE message rates plus delivered DUE rates.
inline double sum_rate(const channel_set& cs, const primal_state& st, const radio_params& rp) {
  double acc = 0.0;
  for (int k = 0; k < cs.num_cues; ++k) acc += cue_rates(cs, st, rp, k).private_bits;
  for (int m = 0; m < cs.num_dues; ++m) acc += due_rate(cs, st, rp, m);
  return acc;
}

struct feas_tolerances {
  double rate_bits = 1.0e-3;
  double power_w = 1.0e-6;
  double box = 1.0e-9;
  double equality = 1.0e-9;
};

struct constraint_entry {
  std::string constraint_id;
  std::vector<int> indices;  // 1-based, empty for scalar constraints
  double slack;              // >= 0 means satisfied exactly
  bool satisfied;
};

struct constraint_report {
  std::vector<constraint_entry> entries;

  bool all_satisfied() const {
    for (const auto& e : entries)
      if (!e.satisfied) return false;
    return true;
  }
  double min_slack(const std::string& id) const {
    double s = std::numeric_limits<double>::infinity();
    for (const auto& e : entries)
      if (e.constraint_id == id) s = std::min(s, e.slack);
    return s;
  }
};

/// Evaluates every design constraint with a signed slack (nonnegative means
/// satisfied with margin). Rate slacks are in bits, power slacks in Watts.
inline constraint_report check_feasibility(const channel_set& cs, const primal_state& st,
                                           const radio_params& rp, const rate_thresholds& th,
                                           const feas_tolerances& tol = {}) {
  constraint_report rep;
  const int K = cs.num_cues, M = cs.num_dues, N = cs.n;
  auto push = [&rep](std::string id, std::vector<int> idx, double slack, double tolv) {
    rep.entries.push_back({std::move(id), std::move(idx), slack, slack >= -tolv});
  };

  for (int k = 0; k < K; ++k) {
    const auto r = cue_rates(cs, st, rp, k);
    push("cue_rate", {k + 1}, r.private_bits - th.r1_bits, tol.rate_bits);
    push("common_rate", {k + 1}, r.common_bits - th.r3_bits, tol.rate_bits);
    double split = 0.0;
    const auto d1 = make_mask(mask_kind::element_f, 1, N, M);
    split = st.p[k].cwiseProduct(d1.v).dot(st.c[k]);
    push("split_within_common", {k + 1}, r.common_bits - split, tol.rate_bits);
    push("split_nonneg", {k + 1}, st.c[k].minCoeff(), tol.box);
    push("schedule_box", {k + 1},
         std::min(st.p[k].minCoeff(), (1.0 - st.p[k].array()).minCoeff()), tol.box);
  }

  for (int m = 0; m < M; ++m)
    push("due_rate", {m + 1}, due_rate(cs, st, rp, m) - th.r2_bits, tol.rate_bits);

  const cvec vw = vec_of(st.W);
  for (int n = 1; n <= N; ++n) {
    const auto cn = make_mask(mask_kind::element_w, n, N, K);
    const double pw = vw.cwiseProduct(cn.v.cast<cplx>()).squaredNorm();
    push("bs_element_power", {n}, th.pt_watts - pw, tol.power_w);
  }
  for (int k = 0; k < K; ++k) {
    const cvec vf = vec_of(st.F[k]);
    for (int n = 1; n <= N; ++n) {
      const auto dn = make_mask(mask_kind::element_f, n, N, M);
      const double pw =
          vf.cwiseProduct(dn.v.cast<cplx>()).cwiseProduct(st.p[k].cast<cplx>()).squaredNorm();
      push("cue_element_power", {n, k + 1}, th.pt_watts - pw, tol.power_w);
    }
    for (int m = 1; m <= M; ++m) {
      const auto bm = make_mask(mask_kind::due, m, N, M);
      const double viol = ((1.0 - st.p[k].array()) * vec_of(st.F[k]).array().abs() * bm.v.array())
                              .maxCoeff();
      push("off_link_null", {m, k + 1}, -viol, tol.equality);
    }
  }
  return rep;
}

inline nlohmann::json report_to_json(const constraint_report& rep) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : rep.entries) {
    arr.push_back({{"constraint_id", e.constraint_id},
                   {"indices", e.indices},
                   {"slack", e.slack},
                   {"satisfied", e.satisfied}});
  }
  return {{"all_satisfied", rep.all_satisfied()}, {"constraints", arr}};
}

inline nlohmann::json state_to_json(const primal_state& st) {
  nlohmann::json j;
  j["gamma"] = st.gamma;
  j["n"] = st.n();
  j["num_cues"] = st.num_cues();
  j["num_dues"] = st.num_dues();
  j["W"] = cvec_to_json(vec_of(st.W));
  for (const auto& f : st.F) j["F"].push_back(cvec_to_json(vec_of(f)));
  for (const auto& c : st.c) j["c"].push_back(std::vector<double>(c.begin(), c.end()));
  for (const auto& p : st.p) j["p"].push_back(std::vector<double>(p.begin(), p.end()));
  return j;
}

inline primal_state state_from_json(const nlohmann::json& j) {
  primal_state st;
  st.gamma = j.at("gamma").get<double>();
  const int n = j.at("n").get<int>();
  const int K = j.at("num_cues").get<int>();
  const int M = j.at("num_dues").get<int>();
  st.W = unvec(cvec_from_json(j.at("W")), n, K + 1);
  for (const auto& f : j.at("F")) st.F.push_back(unvec(cvec_from_json(f), n, M));
  for (const auto& c : j.at("c")) {
    std::vector<double> v = c.get<std::vector<double>>();
    st.c.push_back(Eigen::Map<const rvec>(v.data(), static_cast<Eigen::Index>(v.size())));
  }
  for (const auto& p : j.at("p")) {
    std::vector<double> v = p.get<std::vector<double>>();
    st.p.push_back(Eigen::Map<const rvec>(v.data(), static_cast<Eigen::Index>(v.size())));
  }
  return st;
}

}  // namespace trisac

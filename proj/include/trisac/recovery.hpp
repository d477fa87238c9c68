#pragma once

#include <sstream>

#include <json.hpp>

#include "trisac/common.hpp"
#include "trisac/metrics.hpp"

namespace trisac {

/// Binary CUE->DUE schedule, rho(k,m) = 1 when the link is established.
struct schedule_matrix {
  Eigen::MatrixXi rho;

  int links() const { return rho.sum(); }
};

/// Rounds one relaxed stacked schedule vector: receiver block m becomes all
/// ones when its mean weight reaches `threshold`, otherwise all zeros.
inline rvec recover_schedule(const rvec& p, int n, double threshold = 0.5) {
  require(n >= 1 && p.size() % n == 0, "recover_schedule: length not a block multiple");
  require(threshold > 0.0 && threshold < 1.0, "recover_schedule: threshold must be in (0,1)");
  const int blocks = static_cast<int>(p.size()) / n;
  rvec out = rvec::Zero(p.size());
  for (int m = 0; m < blocks; ++m)
    if (p.segment(m * n, n).sum() >= threshold * n) out.segment(m * n, n).setOnes();
  return out;
}

/// Rounds every CUE's schedule and reports the binary link matrix.
inline schedule_matrix recover_all(std::vector<rvec>& p, int n, double threshold = 0.5) {
  schedule_matrix sm;
  const int K = static_cast<int>(p.size());
  const int M = K > 0 ? static_cast<int>(p[0].size()) / n : 0;
  sm.rho = Eigen::MatrixXi::Zero(K, M);
  for (int k = 0; k < K; ++k) {
    p[k] = recover_schedule(p[k], n, threshold);
    for (int m = 0; m < M; ++m) sm.rho(k, m) = p[k]((Eigen::Index)m * n) > 0.5 ? 1 : 0;
  }
  return sm;
}

/// Zeroes forward-precoder columns of dropped links so the off-link nulling
/// constraint holds exactly after rounding.
inline void enforce_schedule(std::vector<cmat>& F, const schedule_matrix& sm) {
  for (int k = 0; k < static_cast<int>(F.size()); ++k)
    for (int m = 0; m < sm.rho.cols(); ++m)
      if (sm.rho(k, m) == 0) F[k].col(m).setZero();
}

/// Rounds the schedule inside a full design and re-nulls dropped links.
inline schedule_matrix recover_state(primal_state& st, double threshold = 0.5) {
  const schedule_matrix sm = recover_all(st.p, st.n(), threshold);
  enforce_schedule(st.F, sm);
  return sm;
}

inline nlohmann::json schedule_to_json(const schedule_matrix& sm) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index k = 0; k < sm.rho.rows(); ++k) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index m = 0; m < sm.rho.cols(); ++m) row.push_back(sm.rho(k, m));
    rows.push_back(row);
  }
  return {{"links", sm.links()}, {"rho", rows}};
}

/// Link list CSV: one row per (CUE, DUE) pair with its established flag.
inline std::string schedule_to_csv(const schedule_matrix& sm) {
  std::ostringstream out;
  out << "cue,due,established\n";
  for (Eigen::Index k = 0; k < sm.rho.rows(); ++k)
    for (Eigen::Index m = 0; m < sm.rho.cols(); ++m)
      out << (k + 1) << ',' << (m + 1) << ',' << sm.rho(k, m) << '\n';
  return out.str();
}

}  // namespace trisac

#pragma once

#include "trisac/channel.hpp"
#include "trisac/metrics.hpp"

namespace trisac {

/// Per-constraint-family multiplier step scales; the effective step of family
/// f is the constant step0 * scale_f (constraints are preconditioned by their
/// curvature scales inside the solver, so constant steps are stable).
struct step_scales {
  double sense_floor = 1.0;  // sensing-floor coupling at each receiver
  double bs_power = 1.0;     // BS per-element power cap
  double cue_power = 1.0;    // CUE per-element power caps (precoder and schedule sides)
  double rate = 1.0;         // CUE private/common rate floors
  double due_sinr = 1.0;     // DUE forward-link SINR floors (precoder and schedule sides)
  double null_eq = 1.0;      // off-link nulling equality couplings
  double due_split = 1.0;    // DUE split-rate floors
  double split_cap = 1.0;    // split-total-within-common caps
  double box = 1.0;          // schedule box bounds
  double sense_pull = 1.0;   // sensing-floor pulls on forward precoder / schedule
};

struct solver_config {
  double rho = 1.0;             // consensus weight in the floor subproblem
  double step0 = 0.1;           // base multiplier step (constant across iterations)
  step_scales scales{};
  int max_iters = 400;
  int min_iters = 30;
  double epsilon = 1.0e-3;      // fractional objective-decrease stop
  double consensus_tol = 1.0e-2;
  double recovery_threshold = 0.5;
  bool clip_box = true;         // project schedule copies/masters onto [0,1]
  bool alt_forms = false;       // variant update transcriptions (see SIGNS.md)
  bool pure_consensus = false;  // freeze all multipliers at zero (averaging test mode)
  bool record_timing = false;   // emit real wall_time_ms in traces (off keeps traces byte-stable)
};

/// Consensus copies of the master variables, one family per constraint group.
/// Copies are named master_role: w_* copy the BS precoder, f_* the forward
/// precoders, p_* the schedules, c_* the splits.
struct consensus_state {
  rvec sense_floor;                    // [u] floor copy of gamma
  std::vector<cmat> w_rate;            // [k] W copy tied to CUE k's rate floors
  std::vector<cmat> w_power;           // [n] W copy tied to BS element n's power cap
  std::vector<std::vector<cmat>> f_power;  // [n][k] F_k copy, element power cap
  std::vector<std::vector<cmat>> f_due;    // [m][k] F_k copy, DUE m link constraints
  std::vector<std::vector<cmat>> f_sense;  // [u][k] F_k copy, sensing floor at u
  std::vector<rvec> p_split;               // [k] schedule copy, box + split cap
  std::vector<std::vector<rvec>> p_due;    // [m][k] schedule copy, DUE m constraints
  std::vector<std::vector<rvec>> p_power;  // [n][k] schedule copy, element power cap
  std::vector<std::vector<rvec>> p_sense;  // [u][k] schedule copy, sensing floor
  std::vector<rvec> c_split;               // [k] split copy, split cap
  std::vector<std::vector<rvec>> c_due;    // [m][k] split copy, DUE m split floor
};

/// Scaled consensus error terms (one per copy) and inequality multipliers
/// (projected nonnegative except the complex nulling couplings).
struct dual_state {
  // error terms, mirroring consensus_state
  rvec err_sense_floor;
  std::vector<cmat> err_w_rate;
  std::vector<cmat> err_w_power;
  std::vector<std::vector<cmat>> err_f_power;
  std::vector<std::vector<cmat>> err_f_due;
  std::vector<std::vector<cmat>> err_f_sense;
  std::vector<rvec> err_p_split;
  std::vector<std::vector<rvec>> err_p_due;
  std::vector<std::vector<rvec>> err_p_power;
  std::vector<std::vector<rvec>> err_p_sense;
  std::vector<rvec> err_c_split;
  std::vector<std::vector<rvec>> err_c_due;

  // inequality multipliers
  rvec mul_sense_floor;   // [u]   floor >= sensing power at u
  rvec mul_bs_power;      // [n]   BS element power cap
  rmat mul_cue_power_f;   // (n,k) CUE element power cap, precoder side
  rmat mul_cue_power_p;   // (n,k) CUE element power cap, schedule side
  rvec mul_private_rate;  // [k]   CUE private rate floor
  rvec mul_common_rate;   // [k]   common-stream rate floor
  rmat mul_due_sinr_f;    // (m,k) DUE link SINR floor, precoder side
  rmat mul_due_sinr_p;    // (m,k) DUE link SINR floor, schedule side
  rmat mul_due_split_p;   // (m,k) DUE split floor, schedule side
  rmat mul_due_split_c;   // (m,k) DUE split floor, split side
  rvec mul_split_cap_c;   // [k]   split total within common rate, split side
  rvec mul_split_cap_p;   // [k]   split total within common rate, schedule side
  std::vector<rvec> mul_box_lo;  // [k] schedule >= 0
  std::vector<rvec> mul_box_hi;  // [k] schedule <= 1
  rmat mul_sense_p;       // (u,k) sensing floor pull, schedule side
  rmat mul_sense_f;       // (u,k) sensing floor pull, precoder side

  // complex couplings of the off-link nulling equalities (unprojected)
  std::vector<std::vector<cvec>> mul_null_f;  // [m][k]
  std::vector<std::vector<cvec>> mul_null_p;  // [m][k]
};

}  // namespace trisac

#pragma once

#include <fstream>

#include <json.hpp>

#include "trisac/admm/state.hpp"

namespace trisac {

/// Configuration problem tied to a named field, reported with exit code 2 by
/// the command-line tools.
struct validation_error : std::runtime_error {
  explicit validation_error(const std::string& field, const std::string& why)
      : std::runtime_error(field + ": " + why) {}
};

/// One experiment: scenario, QoS thresholds, solver knobs, sweep request.
/// Default-constructed it reproduces the reference urban scenario (three
/// CUEs, five DUEs, 3 GHz, 4x4 grids, -90 dBm noise, 1 W element caps).
struct experiment_config {
  geometry geo = geometry::default_scenario();
  radio_params radio{};
  rate_thresholds thresholds{};
  solver_config solver{};
  std::string sweep_axis = "none";  // none | n | pt
  std::vector<double> sweep_values;
  std::vector<std::uint64_t> seeds = {1};
  std::string out_dir = "out";
};

namespace detail_cfg {

inline Eigen::Vector3d vec3(const nlohmann::json& a, const std::string& field) {
  if (!a.is_array() || a.size() != 3) throw validation_error(field, "expected [x, y, z]");
  return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace detail_cfg

inline void validate_config(const experiment_config& c) {
  if (c.thresholds.pt_watts <= 0.0)
    throw validation_error("thresholds.pt_watts", "must be positive");
  if (c.thresholds.r1_bits < 0.0) throw validation_error("thresholds.r1_bits", "must be >= 0");
  if (c.thresholds.r2_bits < 0.0) throw validation_error("thresholds.r2_bits", "must be >= 0");
  if (c.thresholds.r3_bits < 0.0) throw validation_error("thresholds.r3_bits", "must be >= 0");
  if (c.radio.carrier_freq_hz <= 0.0)
    throw validation_error("scenario.carrier_freq_hz", "must be positive");
  if (c.radio.grid_rows < 1 || c.radio.grid_cols < 1)
    throw validation_error("scenario.grid_rows/grid_cols", "must be >= 1");
  if (c.radio.rician_k < 0.0) throw validation_error("scenario.rician_factor", "must be >= 0");
  if (c.radio.rcs_m2 <= 0.0) throw validation_error("scenario.rcs_m2", "must be positive");
  if (c.geo.cues.empty()) throw validation_error("scenario.cue_positions", "must be nonempty");
  if (c.geo.dues.empty()) throw validation_error("scenario.due_positions", "must be nonempty");
  if (c.solver.rho <= 0.0) throw validation_error("solver.rho", "must be positive");
  if (c.solver.step0 <= 0.0) throw validation_error("solver.step0", "must be positive");
  if (c.solver.epsilon <= 0.0) throw validation_error("solver.epsilon", "must be positive");
  if (c.solver.consensus_tol <= 0.0)
    throw validation_error("solver.consensus_tol", "must be positive");
  if (c.solver.max_iters < 1) throw validation_error("solver.max_iters", "must be >= 1");
  if (c.solver.min_iters < 1 || c.solver.min_iters > c.solver.max_iters)
    throw validation_error("solver.min_iters", "must be in [1, max_iters]");
  if (c.solver.recovery_threshold <= 0.0 || c.solver.recovery_threshold >= 1.0)
    throw validation_error("solver.recovery_threshold", "must be in (0, 1)");
  if (c.seeds.empty()) throw validation_error("seeds", "must be nonempty");
  if (c.sweep_axis != "none" && c.sweep_axis != "n" && c.sweep_axis != "pt")
    throw validation_error("sweep.axis", "must be one of none|n|pt");
  if (c.sweep_axis != "none" && c.sweep_values.empty())
    throw validation_error("sweep.values", "must be nonempty when an axis is set");
  for (double v : c.sweep_values) {
    if (c.sweep_axis == "pt" && v <= 0.0)
      throw validation_error("sweep.values", "powers must be positive");
    if (c.sweep_axis == "n") {
      const int n = static_cast<int>(std::lround(v));
      const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
      if (n < 1 || side * side != n)
        throw validation_error("sweep.values", "element counts must be perfect squares");
    }
  }
}

inline experiment_config config_from_json(const nlohmann::json& j) {
  using detail_cfg::read;
  experiment_config c;
  if (j.contains("scenario")) {
    const auto& s = j.at("scenario");
    if (s.contains("bs_position")) c.geo.bs = detail_cfg::vec3(s.at("bs_position"), "scenario.bs_position");
    if (s.contains("cue_positions")) {
      c.geo.cues.clear();
      for (const auto& p : s.at("cue_positions"))
        c.geo.cues.push_back(detail_cfg::vec3(p, "scenario.cue_positions"));
    }
    if (s.contains("due_positions")) {
      c.geo.dues.clear();
      for (const auto& p : s.at("due_positions"))
        c.geo.dues.push_back(detail_cfg::vec3(p, "scenario.due_positions"));
    }
    read(s, "carrier_freq_hz", c.radio.carrier_freq_hz);
    read(s, "bandwidth_hz", c.radio.bandwidth_hz);
    read(s, "rician_factor", c.radio.rician_k);
    read(s, "rcs_m2", c.radio.rcs_m2);
    read(s, "grid_rows", c.radio.grid_rows);
    read(s, "grid_cols", c.radio.grid_cols);
    if (s.contains("noise_dbm")) {
      const double w = dbm_to_watts(s.at("noise_dbm").get<double>());
      c.radio.noise_cue_w = c.radio.noise_due_w = c.radio.noise_sense_w = w;
    }
  }
  if (j.contains("thresholds")) {
    const auto& t = j.at("thresholds");
    read(t, "r1_bits", c.thresholds.r1_bits);
    read(t, "r2_bits", c.thresholds.r2_bits);
    read(t, "r3_bits", c.thresholds.r3_bits);
    read(t, "pt_watts", c.thresholds.pt_watts);
  }
  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    read(s, "rho", c.solver.rho);
    read(s, "step0", c.solver.step0);
    read(s, "max_iters", c.solver.max_iters);
    read(s, "min_iters", c.solver.min_iters);
    read(s, "epsilon", c.solver.epsilon);
    read(s, "consensus_tol", c.solver.consensus_tol);
    read(s, "recovery_threshold", c.solver.recovery_threshold);
    read(s, "clip_box", c.solver.clip_box);
    read(s, "alt_forms", c.solver.alt_forms);
    read(s, "pure_consensus", c.solver.pure_consensus);
    read(s, "record_timing", c.solver.record_timing);
    if (s.contains("scales")) {
      const auto& sc = s.at("scales");
      read(sc, "sense_floor", c.solver.scales.sense_floor);
      read(sc, "bs_power", c.solver.scales.bs_power);
      read(sc, "cue_power", c.solver.scales.cue_power);
      read(sc, "rate", c.solver.scales.rate);
      read(sc, "due_sinr", c.solver.scales.due_sinr);
      read(sc, "null_eq", c.solver.scales.null_eq);
      read(sc, "due_split", c.solver.scales.due_split);
      read(sc, "split_cap", c.solver.scales.split_cap);
      read(sc, "box", c.solver.scales.box);
      read(sc, "sense_pull", c.solver.scales.sense_pull);
    }
  }
  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    read(s, "axis", c.sweep_axis);
    if (s.contains("values")) c.sweep_values = s.at("values").get<std::vector<double>>();
  }
  if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
  validate_config(c);
  return c;
}

inline experiment_config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("config", "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw validation_error("config", std::string("parse error: ") + e.what());
  }
  return config_from_json(j);
}

inline nlohmann::json config_to_json(const experiment_config& c) {
  nlohmann::json s;
  s["bs_position"] = {c.geo.bs.x(), c.geo.bs.y(), c.geo.bs.z()};
  for (const auto& p : c.geo.cues) s["cue_positions"].push_back({p.x(), p.y(), p.z()});
  for (const auto& p : c.geo.dues) s["due_positions"].push_back({p.x(), p.y(), p.z()});
  s["carrier_freq_hz"] = c.radio.carrier_freq_hz;
  s["bandwidth_hz"] = c.radio.bandwidth_hz;
  s["noise_dbm"] = 10.0 * std::log10(c.radio.noise_cue_w) + 30.0;
  s["rician_factor"] = c.radio.rician_k;
  s["rcs_m2"] = c.radio.rcs_m2;
  s["grid_rows"] = c.radio.grid_rows;
  s["grid_cols"] = c.radio.grid_cols;
  nlohmann::json t{{"r1_bits", c.thresholds.r1_bits},
                   {"r2_bits", c.thresholds.r2_bits},
                   {"r3_bits", c.thresholds.r3_bits},
                   {"pt_watts", c.thresholds.pt_watts}};
  nlohmann::json so{{"rho", c.solver.rho},
                    {"step0", c.solver.step0},
                    {"max_iters", c.solver.max_iters},
                    {"min_iters", c.solver.min_iters},
                    {"epsilon", c.solver.epsilon},
                    {"consensus_tol", c.solver.consensus_tol},
                    {"recovery_threshold", c.solver.recovery_threshold},
                    {"clip_box", c.solver.clip_box},
                    {"alt_forms", c.solver.alt_forms},
                    {"pure_consensus", c.solver.pure_consensus},
                    {"record_timing", c.solver.record_timing}};
  return {{"scenario", s},
          {"thresholds", t},
          {"solver", so},
          {"sweep", {{"axis", c.sweep_axis}, {"values", c.sweep_values}}},
          {"seeds", c.seeds},
          {"out_dir", c.out_dir}};
}

}  // namespace trisac

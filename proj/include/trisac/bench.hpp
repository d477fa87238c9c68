#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "trisac/admm/solver.hpp"
#include "trisac/config.hpp"

namespace trisac {

/// One solved instance inside a sweep or convergence batch.
struct run_record {
  double axis_value = 0.0;
  std::uint64_t seed = 0;
  double sum_rate_bits = 0.0;
  double maxmin_rmi_bits = 0.0;
  int links = 0;
  int iterations = 0;
  bool converged = false;
  double wall_time_ms = 0.0;
};

namespace detail_bench {

inline void apply_grid(experiment_config& cfg, int total_elements) {
  const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(total_elements))));
  cfg.radio.grid_rows = side;
  cfg.radio.grid_cols = side;
}

struct solved_instance {
  channel_set ch;
  solve_result res;
};

inline solved_instance run_one(const experiment_config& cfg, std::uint64_t seed) {
  solved_instance out;
  out.ch = synthesize_channels(cfg.geo, cfg.radio, seed);
  solver s(out.ch, cfg.radio, cfg.thresholds, cfg.solver);
  out.res = s.solve();
  return out;
}

inline std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

inline void write_state_artifacts(const std::string& dir, const std::string& stem,
                                  const experiment_config& cfg, std::uint64_t seed,
                                  const solve_result& res) {
  {
    nlohmann::json j = state_to_json(res.state);
    j["seed"] = seed;
    j["config"] = config_to_json(cfg);
    std::ofstream out(join_path(dir, stem + "_state.json"));
    out << j.dump(2) << "\n";
  }
  {
    std::ofstream out(join_path(dir, stem + "_schedule.json"));
    out << schedule_to_json(res.schedule).dump(2) << "\n";
  }
  {
    std::ofstream out(join_path(dir, stem + "_links.csv"));
    out << schedule_to_csv(res.schedule);
  }
  {
    std::ofstream out(join_path(dir, stem + "_report.json"));
    out << report_to_json(res.report).dump(2) << "\n";
  }
}

/// Least-squares slope of log(y) against log(x); used for scaling checks.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(std::max(y[i], 1e-12));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  return den == 0.0 ? 0.0 : (n * sxy - sx * sy) / den;
}

}  // namespace detail_bench

/// Solves the configured scenario for every seed and writes one trace CSV,
/// state/schedule/report JSON and a link CSV per seed into cfg.out_dir.
inline std::vector<run_record> run_convergence(const experiment_config& cfg, std::ostream& log) {
  std::filesystem::create_directories(cfg.out_dir);
  std::vector<run_record> out;
  const int n = cfg.radio.n();
  for (const std::uint64_t seed : cfg.seeds) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto [ch, res] = detail_bench::run_one(cfg, seed);
    const auto t1 = std::chrono::steady_clock::now();
    const std::string stem = "n" + std::to_string(n) + "_seed" + std::to_string(seed);
    {
      std::ofstream trace(detail_bench::join_path(cfg.out_dir, "trace_" + stem + ".csv"));
      write_trace_csv(res.trace, trace);
    }
    detail_bench::write_state_artifacts(cfg.out_dir, stem, cfg, seed, res);
    run_record r;
    r.axis_value = n;
    r.seed = seed;
    r.sum_rate_bits = sum_rate(ch, res.state, cfg.radio);
    r.maxmin_rmi_bits = res.objective_bits;
    r.links = res.schedule.links();
    r.iterations = res.iterations;
    r.converged = res.converged;
    r.wall_time_ms =
        std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(t1 - t0).count();
    out.push_back(r);
    log << "converge n=" << n << " seed=" << seed << " iters=" << r.iterations
        << " objective_bits=" << fmt_g17(r.maxmin_rmi_bits) << " links=" << r.links
        << (r.converged ? "" : " (max iters)") << "\n";
  }
  return out;
}

/// Sweeps one axis ("n": square transmit grids, "pt": per-element power cap),
/// solving every (value, seed) pair.  Writes per-run rows plus a seed-averaged
/// summary row per value to sweep_<axis>.csv in cfg.out_dir.
inline std::vector<run_record> run_sweep(experiment_config cfg, const std::string& axis,
                                         const std::vector<double>& values, std::ostream& log) {
  std::filesystem::create_directories(cfg.out_dir);
  std::vector<run_record> rows;
  std::ofstream csv(detail_bench::join_path(cfg.out_dir, "sweep_" + axis + ".csv"));
  csv << "axis,value,seed,sum_rate_bits,maxmin_rmi_bits,links,iterations,wall_time_ms\n";
  for (const double v : values) {
    experiment_config c = cfg;
    if (axis == "n")
      detail_bench::apply_grid(c, static_cast<int>(std::lround(v)));
    else if (axis == "pt")
      c.thresholds.pt_watts = v;
    else
      throw validation_error("sweep.axis", "must be one of n|pt");
    double avg_sum = 0, avg_rmi = 0, avg_links = 0, avg_ms = 0;
    for (const std::uint64_t seed : c.seeds) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto [ch, res] = detail_bench::run_one(c, seed);
      const auto t1 = std::chrono::steady_clock::now();
      run_record r;
      r.axis_value = v;
      r.seed = seed;
      r.sum_rate_bits = sum_rate(ch, res.state, c.radio);
      r.maxmin_rmi_bits = res.objective_bits;
      r.links = res.schedule.links();
      r.iterations = res.iterations;
      r.converged = res.converged;
      r.wall_time_ms =
          std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(t1 - t0).count();
      rows.push_back(r);
      csv << axis << "," << fmt_g17(v) << "," << seed << "," << fmt_g17(r.sum_rate_bits) << ","
          << fmt_g17(r.maxmin_rmi_bits) << "," << r.links << "," << r.iterations << ","
          << fmt_g17(r.wall_time_ms) << "\n";
      avg_sum += r.sum_rate_bits;
      avg_rmi += r.maxmin_rmi_bits;
      avg_links += r.links;
      avg_ms += r.wall_time_ms;
    }
    const double ns = static_cast<double>(c.seeds.size());
    csv << axis << "," << fmt_g17(v) << ",mean," << fmt_g17(avg_sum / ns) << ","
        << fmt_g17(avg_rmi / ns) << "," << fmt_g17(avg_links / ns) << ",,"
        << fmt_g17(avg_ms / ns) << "\n";
    log << "sweep " << axis << "=" << v << " mean sum_rate=" << fmt_g17(avg_sum / ns)
        << " mean rmi=" << fmt_g17(avg_rmi / ns) << " mean links=" << avg_links / ns << "\n";
  }
  return rows;
}

struct timing_record {
  int n = 0;
  int dues = 0;
  int iterations = 0;
  double total_ms = 0.0;
  double per_iter_ms = 0.0;
};

/// Measures wall time against transmit array size (square grids) and against
/// the number of device pairs, writing timing_n.csv / timing_m.csv plus a
/// timing_summary.json with fitted log-log slopes of per-iteration time.
inline nlohmann::json run_timing(experiment_config cfg, std::ostream& log) {
  std::filesystem::create_directories(cfg.out_dir);
  cfg.solver.record_timing = true;
  const std::uint64_t seed = cfg.seeds.front();
  std::vector<double> xs, ys;
  auto measure = [&](const experiment_config& c) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto [ch, res] = detail_bench::run_one(c, seed);
    const auto t1 = std::chrono::steady_clock::now();
    timing_record t;
    t.n = c.radio.n();
    t.dues = static_cast<int>(c.geo.dues.size());
    t.iterations = res.iterations;
    t.total_ms =
        std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(t1 - t0).count();
    t.per_iter_ms = t.total_ms / std::max(1, t.iterations);
    return t;
  };

  std::vector<int> n_values = {16, 36, 64};
  if (cfg.sweep_axis == "n" && !cfg.sweep_values.empty()) {
    n_values.clear();
    for (double v : cfg.sweep_values) n_values.push_back(static_cast<int>(std::lround(v)));
  }
  nlohmann::json summary;
  {
    std::ofstream csv(detail_bench::join_path(cfg.out_dir, "timing_n.csv"));
    csv << "n,iterations,total_ms,per_iter_ms\n";
    xs.clear();
    ys.clear();
    for (int n : n_values) {
      experiment_config c = cfg;
      detail_bench::apply_grid(c, n);
      const timing_record t = measure(c);
      csv << t.n << "," << t.iterations << "," << fmt_g17(t.total_ms) << ","
          << fmt_g17(t.per_iter_ms) << "\n";
      xs.push_back(t.n);
      ys.push_back(t.per_iter_ms);
      log << "timing n=" << t.n << " iters=" << t.iterations
          << " per_iter_ms=" << fmt_g17(t.per_iter_ms) << "\n";
    }
    summary["slope_n"] = detail_bench::loglog_slope(xs, ys);
  }
  {
    std::ofstream csv(detail_bench::join_path(cfg.out_dir, "timing_m.csv"));
    csv << "dues,iterations,total_ms,per_iter_ms\n";
    xs.clear();
    ys.clear();
    const std::size_t max_m = cfg.geo.dues.size();
    for (std::size_t m = 2; m <= max_m; ++m) {
      experiment_config c = cfg;
      c.geo.dues.assign(cfg.geo.dues.begin(), cfg.geo.dues.begin() + m);
      const timing_record t = measure(c);
      csv << t.dues << "," << t.iterations << "," << fmt_g17(t.total_ms) << ","
          << fmt_g17(t.per_iter_ms) << "\n";
      xs.push_back(static_cast<double>(m));
      ys.push_back(t.per_iter_ms);
      log << "timing m=" << m << " iters=" << t.iterations
          << " per_iter_ms=" << fmt_g17(t.per_iter_ms) << "\n";
    }
    summary["slope_m"] = detail_bench::loglog_slope(xs, ys);
  }
  {
    std::ofstream out(detail_bench::join_path(cfg.out_dir, "timing_summary.json"));
    out << summary.dump(2) << "\n";
  }
  log << "slope_n=" << fmt_g17(summary["slope_n"].get<double>())
      << " slope_m=" << fmt_g17(summary["slope_m"].get<double>()) << "\n";
  return summary;
}

}  // namespace trisac

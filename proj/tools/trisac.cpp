// Command-line front end: convergence runs, axis sweeps, timing studies,
// update-rule verification against the numeric oracle, and feasibility checks
// of dumped solutions.
#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "trisac/trisac.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_validation = 2;
constexpr int exit_oracle = 3;

struct common_opts {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

trisac::experiment_config resolve_config(const common_opts& o) {
  trisac::experiment_config cfg =
      o.config_path.empty() ? trisac::experiment_config{} : trisac::load_config(o.config_path);
  if (o.seed_set) cfg.seeds = {o.seed};
  if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
  trisac::validate_config(cfg);
  return cfg;
}

void add_common(CLI::App* cmd, common_opts& o) {
  cmd->add_option("--config", o.config_path, "experiment config JSON (omit for defaults)");
  cmd->add_option("--out", o.out_dir, "output directory (overrides config)");
  cmd->add_option("--seed", o.seed, "single seed (overrides config seed list)")
      ->each([&o](const std::string&) { o.seed_set = true; });
}

int cmd_verify(const std::string& out_dir, int per_case, std::uint64_t seed) {
  const trisac::oracle::verification_report rep =
      trisac::oracle::run_verification_suite(per_case, seed);
  int failed = 0;
  for (const auto& c : rep.cases) {
    if (!c.pass) {
      ++failed;
      std::cerr << "verify FAIL " << c.subproblem << "#" << c.instance
                << " grad_norm=" << trisac::fmt_g17(c.grad_norm) << " tol=" << c.tol << "\n";
    }
  }
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream out(std::filesystem::path(out_dir) / "verification.json");
    out << trisac::oracle::report_to_json(rep).dump(2) << "\n";
  }
  std::cout << "verify: " << (rep.cases.size() - failed) << "/" << rep.cases.size()
            << " stationarity cases passed, metrics crosscheck "
            << (rep.metrics_match ? "passed" : "FAILED") << "\n";
  return rep.all_pass() ? exit_ok : exit_oracle;
}

int cmd_check(const std::string& state_path, const std::string& config_path) {
  std::ifstream in(state_path);
  if (!in) throw trisac::validation_error("state", "cannot open " + state_path);
  nlohmann::json j;
  in >> j;
  const trisac::primal_state st = trisac::state_from_json(j);
  trisac::experiment_config cfg;
  if (!config_path.empty())
    cfg = trisac::load_config(config_path);
  else if (j.contains("config"))
    cfg = trisac::config_from_json(j.at("config"));
  else
    throw trisac::validation_error("config", "no --config given and state has no embedded config");
  if (!j.contains("seed"))
    throw trisac::validation_error("state", "missing seed; cannot rebuild channels");
  const auto seed = j.at("seed").get<std::uint64_t>();
  const trisac::channel_set ch = trisac::synthesize_channels(cfg.geo, cfg.radio, seed);
  const trisac::constraint_report rep =
      trisac::check_feasibility(ch, st, cfg.radio, cfg.thresholds, trisac::feas_tolerances{});
  std::cout << trisac::report_to_json(rep).dump(2) << "\n";
  std::cerr << "check: " << (rep.all_satisfied() ? "feasible" : "INFEASIBLE")
            << " (seed=" << seed << ")\n";
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"distributed beamforming and scheduling experiments"};
  app.require_subcommand(1);

  common_opts converge_o, sweep_o, timing_o;
  std::string sweep_axis;
  std::vector<double> sweep_values;

  CLI::App* converge = app.add_subcommand("converge", "solve and dump traces per seed");
  add_common(converge, converge_o);

  CLI::App* sweep = app.add_subcommand("sweep", "solve across an axis of values");
  add_common(sweep, sweep_o);
  sweep->add_option("--axis", sweep_axis, "sweep axis: n (array size) or pt (element power)")
      ->check(CLI::IsMember({"n", "pt"}));
  sweep->add_option("--values", sweep_values, "comma-separated axis values")->delimiter(',');

  CLI::App* timing = app.add_subcommand("timing", "wall-time scaling study");
  add_common(timing, timing_o);

  std::string verify_out;
  int verify_cases = 5;
  std::uint64_t verify_seed = 20240901ull;
  CLI::App* verify = app.add_subcommand("verify", "numeric stationarity audit of update rules");
  verify->add_option("--out", verify_out, "directory for verification.json");
  verify->add_option("--cases", verify_cases, "instances per subproblem")->check(CLI::PositiveNumber);
  verify->add_option("--seed", verify_seed, "audit seed");

  std::string check_state, check_config;
  CLI::App* check = app.add_subcommand("check", "feasibility report for a dumped state");
  check->add_option("--state", check_state, "state JSON produced by converge")->required();
  check->add_option("--config", check_config, "config JSON (defaults to the one embedded in state)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? exit_ok : exit_validation;
  }

  try {
    if (converge->parsed()) {
      const trisac::experiment_config cfg = resolve_config(converge_o);
      trisac::run_convergence(cfg, std::cout);
      return exit_ok;
    }
    if (sweep->parsed()) {
      trisac::experiment_config cfg = resolve_config(sweep_o);
      if (!sweep_axis.empty()) cfg.sweep_axis = sweep_axis;
      if (!sweep_values.empty()) cfg.sweep_values = sweep_values;
      if (cfg.sweep_axis == "none" || cfg.sweep_values.empty())
        throw trisac::validation_error("sweep.axis", "sweep needs --axis and --values");
      trisac::validate_config(cfg);
      trisac::run_sweep(cfg, cfg.sweep_axis, cfg.sweep_values, std::cout);
      return exit_ok;
    }
    if (timing->parsed()) {
      const trisac::experiment_config cfg = resolve_config(timing_o);
      trisac::run_timing(cfg, std::cout);
      return exit_ok;
    }
    if (verify->parsed()) return cmd_verify(verify_out, verify_cases, verify_seed);
    if (check->parsed()) return cmd_check(check_state, check_config);
  } catch (const trisac::validation_error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return exit_validation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_validation;
  }
  return exit_ok;
}

#include <catch_amalgamated.hpp>

#include "trisac/config.hpp"

using namespace trisac;

TEST_CASE("empty config yields the reference scenario") {
  const experiment_config c = config_from_json(nlohmann::json::object());
  CHECK(c.geo.num_cues() == 3);
  CHECK(c.geo.num_dues() == 5);
  CHECK(c.radio.n() == 16);
  CHECK(c.radio.noise_cue_w == Catch::Approx(1.0e-12));
  CHECK(c.thresholds.pt_watts == 1.0);
  CHECK(c.solver.epsilon == Catch::Approx(1.0e-3));
  REQUIRE(c.seeds.size() == 1);
  CHECK(c.seeds[0] == 1);
  CHECK(c.sweep_axis == "none");
}

TEST_CASE("validation errors name the offending field") {
  auto field_of = [](nlohmann::json j) -> std::string {
    try {
      config_from_json(std::move(j));
    } catch (const validation_error& e) {
      return e.what();
    }
    return "";
  };
  CHECK(field_of({{"thresholds", {{"pt_watts", -1.0}}}}).find("thresholds.pt_watts") !=
        std::string::npos);
  CHECK(field_of({{"solver", {{"rho", 0.0}}}}).find("solver.rho") != std::string::npos);
  CHECK(field_of({{"solver", {{"recovery_threshold", 1.0}}}}).find("solver.recovery_threshold") !=
        std::string::npos);
  CHECK(field_of({{"sweep", {{"axis", "n"}, {"values", {15.0}}}}}).find("sweep.values") !=
        std::string::npos);
  CHECK(field_of({{"sweep", {{"axis", "pt"}, {"values", {-0.5}}}}}).find("sweep.values") !=
        std::string::npos);
  CHECK(field_of({{"sweep", {{"axis", "watts"}, {"values", {1.0}}}}}).find("sweep.axis") !=
        std::string::npos);
  CHECK(field_of({{"seeds", nlohmann::json::array()}}).find("seeds") != std::string::npos);
  CHECK(field_of({{"scenario", {{"cue_positions", nlohmann::json::array()}}}})
            .find("scenario.cue_positions") != std::string::npos);
}

TEST_CASE("noise is specified in dBm") {
  const experiment_config c = config_from_json({{"scenario", {{"noise_dbm", -90.0}}}});
  CHECK(c.radio.noise_cue_w == Catch::Approx(1.0e-12));
  CHECK(c.radio.noise_due_w == Catch::Approx(1.0e-12));
  CHECK(c.radio.noise_sense_w == Catch::Approx(1.0e-12));
}

TEST_CASE("perfect-square grids are accepted on the n axis") {
  const experiment_config c = config_from_json(
      {{"sweep", {{"axis", "n"}, {"values", {16.0, 36.0, 64.0}}}}});
  CHECK(c.sweep_values.size() == 3);
}

TEST_CASE("config serialization round-trips the scenario") {
  experiment_config c;
  c.thresholds.r2_bits = 0.25;
  c.solver.max_iters = 123;
  c.seeds = {4, 5};
  c.sweep_axis = "pt";
  c.sweep_values = {0.5, 1.0};
  const experiment_config back = config_from_json(config_to_json(c));
  CHECK(back.thresholds.r2_bits == Catch::Approx(0.25));
  CHECK(back.solver.max_iters == 123);
  CHECK(back.seeds == std::vector<std::uint64_t>{4, 5});
  CHECK(back.sweep_axis == "pt");
  CHECK(back.geo.num_dues() == c.geo.num_dues());
  CHECK(back.radio.noise_cue_w == Catch::Approx(c.radio.noise_cue_w));
}

TEST_CASE("missing config files raise a validation error") {
  CHECK_THROWS_AS(load_config("/nonexistent/path.json"), validation_error);
}

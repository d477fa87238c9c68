#include <catch_amalgamated.hpp>

#include "trisac/channel.hpp"

using namespace trisac;

TEST_CASE("mix64 matches the splitmix64 reference stream") {
  CHECK(mix64(0) == 0xE220A8397B1DCDAFULL);
  CHECK(mix64(1) != mix64(0));
}

TEST_CASE("substreams are deterministic and coordinate-separated") {
  substream a(42, 1, 2, 3), b(42, 1, 2, 3), c(42, 1, 2, 4);
  CHECK(a.normal() == b.normal());
  CHECK(a.cnormal() == b.cnormal());
  CHECK(a.uniform() != c.uniform());
}

TEST_CASE("complex gaussian draws have the requested variance") {
  substream r(5, 9);
  const int n = 20000;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += std::norm(r.cnormal(2.0));
  CHECK(acc / n == Catch::Approx(2.0).epsilon(0.05));
}

TEST_CASE("steering vector has unit modulus and the planar phase law") {
  const cvec a0 = steering_vector(0.0, 0.3, 3, 2);
  CHECK((a0.array() - cplx(1.0, 0.0)).abs().maxCoeff() == Catch::Approx(0.0).margin(1e-15));

  const double th = pi_v / 3.0, ph = pi_v / 4.0;
  const cvec a = steering_vector(th, ph, 2, 2);
  CHECK(a.squaredNorm() == Catch::Approx(4.0));
  const double u = std::sin(th) * std::cos(ph), v = std::sin(th) * std::sin(ph);
  const cplx expect = std::polar(1.0, -pi_v * u) * std::polar(1.0, -2.0 * pi_v * v);
  CHECK(std::abs(a(1 * 2 + 1) - expect) < 1e-14);
}

TEST_CASE("bearings and path gain") {
  const bearing b = bearing_between({0, 0, 50}, {3, 4, 50});
  CHECK(b.theta == Catch::Approx(pi_v / 2.0));
  CHECK(b.phi == Catch::Approx(std::atan2(4.0, 3.0)));
  CHECK(b.dist == Catch::Approx(5.0));
  CHECK_THROWS_AS(bearing_between({1, 1, 1}, {1, 1, 1}), std::invalid_argument);
  CHECK(path_gain(100.0, 0.1) == Catch::Approx(7.957747154594767e-05));
}

TEST_CASE("reflection variance matches the worked example") {
  // rcs 1 m^2, 10 cm carrier, 100 m out and back
  CHECK(reflection_var(1.0, 0.1, 100.0, 100.0) == Catch::Approx(5.0393e-14).epsilon(1e-3));
  CHECK(reflection_var(1.0, 0.1, 200.0, 100.0) <
        reflection_var(1.0, 0.1, 100.0, 100.0));
}

TEST_CASE("rician channel power concentrates on the path gain") {
  radio_params rp;
  rp.grid_rows = 2;
  rp.grid_cols = 2;
  const Eigen::Vector3d tx{0, 0, 10}, rx{60, 0, 5};
  const double pg = path_gain((rx - tx).norm(), rp.wavelength());
  double acc = 0.0;
  const int draws = 3000;
  for (int i = 0; i < draws; ++i) {
    substream r(11, 1, i);
    acc += rician_channel(tx, rx, rp, r).squaredNorm();
  }
  CHECK(acc / (draws * rp.n()) == Catch::Approx(pg * pg).epsilon(0.05));
}

TEST_CASE("sensing channel power concentrates on the reflection variance") {
  radio_params rp;
  rp.grid_rows = 2;
  rp.grid_cols = 2;
  const Eigen::Vector3d tx{0, 0, 10}, refl{80, 10, 5}, rx{-30, 20, 10};
  const double var = reflection_var(rp.rcs_m2, rp.wavelength(), (refl - tx).norm(),
                                    (rx - refl).norm());
  double acc = 0.0;
  const int draws = 4000;
  for (int i = 0; i < draws; ++i) {
    substream r(13, 2, i);
    acc += sensing_channel(tx, refl, rx, rp, r).squaredNorm();
  }
  CHECK(acc / (draws * rp.n()) == Catch::Approx(var).epsilon(0.1));
}

TEST_CASE("line-of-sight gain decays with distance") {
  radio_params rp;
  const double n1 = los_channel({0, 0, 50}, {100, 0, 10}, rp).norm();
  const double n2 = los_channel({0, 0, 50}, {300, 0, 10}, rp).norm();
  CHECK(n1 > n2);
}

TEST_CASE("channel synthesis is reproducible and extension-stable") {
  const geometry geo = geometry::default_scenario();
  radio_params rp;
  rp.grid_rows = 2;
  rp.grid_cols = 2;
  const channel_set a = synthesize_channels(geo, rp, 77);
  const channel_set b = synthesize_channels(geo, rp, 77);
  const channel_set c = synthesize_channels(geo, rp, 78);
  CHECK((a.g[1][2].array() == b.g[1][2].array()).all());
  CHECK((a.z[0][1][2].array() == b.z[0][1][2].array()).all());
  CHECK(!(a.g[1][2].array() == c.g[1][2].array()).all());

  geometry ext = geo;
  ext.dues.push_back({10.0, 10.0, 5.0});
  const channel_set d = synthesize_channels(ext, rp, 77);
  for (int k = 0; k < a.num_cues; ++k)
    for (int m = 0; m < a.num_dues; ++m) {
      REQUIRE((a.g[k][m].array() == d.g[k][m].array()).all());
      for (int u = 0; u < a.num_cues; ++u)
        REQUIRE((a.z[k][m][u].array() == d.z[k][m][u].array()).all());
    }
}

TEST_CASE("channel dump and load round-trip exactly") {
  geometry geo = geometry::default_scenario();
  geo.dues.resize(2);
  radio_params rp;
  rp.grid_rows = 2;
  rp.grid_cols = 2;
  const channel_set a = synthesize_channels(geo, rp, 5);
  const channel_set b = load_channels(dump_channels(a, geo));
  REQUIRE(b.n == a.n);
  REQUIRE(b.seed == a.seed);
  for (int k = 0; k < a.num_cues; ++k) {
    REQUIRE((a.h[k].array() == b.h[k].array()).all());
    for (int m = 0; m < a.num_dues; ++m) {
      REQUIRE((a.g[k][m].array() == b.g[k][m].array()).all());
      for (int u = 0; u < a.num_cues; ++u)
        REQUIRE((a.z[k][m][u].array() == b.z[k][m][u].array()).all());
    }
  }
}

TEST_CASE("stacked channel views agree with manual blocks") {
  geometry geo = geometry::default_scenario();
  radio_params rp;
  rp.grid_rows = 2;
  rp.grid_cols = 2;
  const channel_set cs = synthesize_channels(geo, rp, 3);
  const cvec hs = cs.h_stacked(1);
  REQUIRE(hs.size() == rp.n() * (cs.num_cues + 1));
  CHECK((hs.segment(2 * rp.n(), rp.n()).array() == cs.h[1].array()).all());
  const cvec zz = cs.z_stacked(2, 0);
  CHECK((zz.segment(3 * rp.n(), rp.n()).array() == cs.z[2][3][0].array()).all());
}

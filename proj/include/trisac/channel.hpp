#pragma once

#include <json.hpp>

#include "trisac/common.hpp"
#include "trisac/rng.hpp"
#include "trisac/tensorops.hpp"

namespace trisac {

/// Node positions in meters. One base station, K cellular users (CUEs, which
/// carry the transmissive-surface transceivers), M device receivers (DUEs).
struct geometry {
  Eigen::Vector3d bs{0.0, 0.0, 50.0};
  std::vector<Eigen::Vector3d> cues;
  std::vector<Eigen::Vector3d> dues;

  int num_cues() const { return static_cast<int>(cues.size()); }
  int num_dues() const { return static_cast<int>(dues.size()); }

  static geometry default_scenario() {
    geometry g;
    g.cues = {{50.0, 50.0, 10.0}, {-50.0, 50.0, 10.0}, {0.0, -50.0 * std::sqrt(2.0), 10.0}};
    g.dues = {{150.0, 50.0, 5.0},
              {25.0, 200.0, 5.0},
              {-25.0, 200.0, 5.0},
              {-150.0, -50.0, 5.0},
              {0.0, -150.0 * std::sqrt(2.0), 5.0}};
    return g;
  }
};

/// Radio-layer constants. Noise powers are total in-band Watts.
struct radio_params {
  double carrier_freq_hz = 3.0e9;
  double bandwidth_hz = 2.0e7;
  double noise_cue_w = 1.0e-12;    // at CUE message receivers
  double noise_due_w = 1.0e-12;    // at DUE receivers
  double noise_sense_w = 1.0e-12;  // at CUE sensing receivers
  double rician_k = 3.0;           // linear Rician factor of CUE->DUE links
  double rcs_m2 = 1.0;             // radar cross-section of sensed DUEs
  int grid_rows = 4;               // transmissive-surface grid
  int grid_cols = 4;

  double wavelength() const { return speed_of_light / carrier_freq_hz; }
  int n() const { return grid_rows * grid_cols; }
};

/// Uniform planar array steering vector: Kronecker product of the row factor
/// exp(-j*pi*sin(theta)cos(phi)*r) and the column factor
/// exp(-j*2*pi*sin(theta)sin(phi)*c); element (r,c) sits at index r*nc + c.
inline cvec steering_vector(double theta, double phi, int nr, int nc) {
  require(nr >= 1 && nc >= 1, "steering_vector: grid must be >= 1x1");
  const double u = std::sin(theta) * std::cos(phi);
  const double v = std::sin(theta) * std::sin(phi);
  cvec a(nr * nc);
  for (int r = 0; r < nr; ++r) {
    const cplx row = std::polar(1.0, -pi_v * u * r);
    for (int c = 0; c < nc; ++c) a(r * nc + c) = row * std::polar(1.0, -2.0 * pi_v * v * c);
  }
  return a;
}

/// Departure angles and range from `from` toward `to`: phi = atan2(dy,dx),
/// theta measured from the vertical axis.
struct bearing {
  double theta;
  double phi;
  double dist;
};

inline bearing bearing_between(const Eigen::Vector3d& from, const Eigen::Vector3d& to) {
  const Eigen::Vector3d d = to - from;
  const double dist = d.norm();
  require(dist > 0.0, "bearing_between: coincident nodes");
  return {std::acos(d.z() / dist), std::atan2(d.y(), d.x()), dist};
}

/// Free-space amplitude gain lambda/(4*pi*d).
inline double path_gain(double dist_m, double wavelength_m) {
  return wavelength_m / (4.0 * pi_v * dist_m);
}

/// Line-of-sight downlink channel: path gain times the steering vector of the
/// transmit surface aimed at the receiver.
inline cvec los_channel(const Eigen::Vector3d& tx, const Eigen::Vector3d& rx,
                        const radio_params& rp) {
  const bearing b = bearing_between(tx, rx);
  return path_gain(b.dist, rp.wavelength()) * steering_vector(b.theta, b.phi, rp.grid_rows, rp.grid_cols);
}

/// Rician fading channel: path gain times the K-factor mix of the aimed
/// steering vector and an iid CN(0,1) scattered component.
inline cvec rician_channel(const Eigen::Vector3d& tx, const Eigen::Vector3d& rx,
                           const radio_params& rp, substream& rng) {
  const bearing b = bearing_between(tx, rx);
  const cvec los = steering_vector(b.theta, b.phi, rp.grid_rows, rp.grid_cols);
  const cvec nlos = rng.cnormal_vec(rp.n());
  const double k = rp.rician_k;
  return path_gain(b.dist, rp.wavelength()) *
         (std::sqrt(k / (1.0 + k)) * los + std::sqrt(1.0 / (1.0 + k)) * nlos);
}

/// Round-trip reflection power of a sensed node: rcs * lambda^2 /
/// ((4pi)^3 * d_tx^2 * d_rx^2).
inline double reflection_var(double rcs_m2, double wavelength_m, double d_tx, double d_rx) {
  const double c = std::pow(4.0 * pi_v, 3.0);
  return rcs_m2 * wavelength_m * wavelength_m / (c * d_tx * d_tx * d_rx * d_rx);
}

/// Echo channel for transmitter tx -> reflector -> sensing receiver rx: a
/// CN(0, reflection_var) coefficient, the return-path phase, and the transmit
/// steering vector toward the reflector.
inline cvec sensing_channel(const Eigen::Vector3d& tx, const Eigen::Vector3d& reflector,
                            const Eigen::Vector3d& rx, const radio_params& rp, substream& rng) {
  const bearing out = bearing_between(tx, reflector);
  const double d_back = (rx - reflector).norm();
  const cplx alpha = rng.cnormal(reflection_var(rp.rcs_m2, rp.wavelength(), out.dist, d_back));
  const cplx back_phase = std::polar(1.0, -2.0 * pi_v * d_back / rp.wavelength());
  return alpha * back_phase * steering_vector(out.theta, out.phi, rp.grid_rows, rp.grid_cols);
}

/// All synthesized channels of one scenario draw, plus their stacked forms.
/// Sensing receivers are the CUEs themselves (U = K).
struct channel_set {
  std::uint64_t seed = 0;
  int n = 0, num_cues = 0, num_dues = 0;

  std::vector<cvec> h;                            // [k]: BS -> CUE k, length n
  std::vector<std::vector<cvec>> g;               // [k][m]: CUE k -> DUE m
  std::vector<std::vector<std::vector<cvec>>> z;  // [k][m][u]: CUE k -> DUE m -> CUE u echo

  int num_sensors() const { return num_cues; }

  /// h_k repeated over the common + K private stream blocks.
  cvec h_stacked(int k) const { return repeat_channel(h[k], num_cues + 1); }
  /// g_{k,m} repeated over the M receiver blocks.
  cvec g_stacked(int k, int m) const { return repeat_channel(g[k][m], num_dues); }
  /// z_{k,1..M,u} concatenated over receiver blocks.
  cvec z_stacked(int k, int u) const {
    std::vector<cvec> blocks;
    blocks.reserve(num_dues);
    for (int m = 0; m < num_dues; ++m) blocks.push_back(z[k][m][u]);
    return stack_blocks(blocks);
  }
};

namespace detail {
inline constexpr std::uint64_t tag_g = 0x67ULL;  // 'g'
inline constexpr std::uint64_t tag_z = 0x7AULL;  // 'z'
}  // namespace detail

/// Draws every channel of the scenario from per-link substreams of `seed`.
/// Bit-exactly reproducible; enlarging the node sets keeps existing draws.
inline channel_set synthesize_channels(const geometry& geo, const radio_params& rp,
                                       std::uint64_t seed) {
  require(geo.num_cues() >= 1 && geo.num_dues() >= 1, "synthesize_channels: empty geometry");
  channel_set cs;
  cs.seed = seed;
  cs.n = rp.n();
  cs.num_cues = geo.num_cues();
  cs.num_dues = geo.num_dues();

  cs.h.resize(cs.num_cues);
  for (int k = 0; k < cs.num_cues; ++k) cs.h[k] = los_channel(geo.bs, geo.cues[k], rp);

  cs.g.assign(cs.num_cues, std::vector<cvec>(cs.num_dues));
  for (int k = 0; k < cs.num_cues; ++k)
    for (int m = 0; m < cs.num_dues; ++m) {
      substream rng(seed, detail::tag_g, k + 1, m + 1);
      cs.g[k][m] = rician_channel(geo.cues[k], geo.dues[m], rp, rng);
    }

  cs.z.assign(cs.num_cues,
              std::vector<std::vector<cvec>>(cs.num_dues, std::vector<cvec>(cs.num_cues)));
  for (int k = 0; k < cs.num_cues; ++k)
    for (int m = 0; m < cs.num_dues; ++m)
      for (int u = 0; u < cs.num_cues; ++u) {
        substream rng(seed, detail::tag_z, k + 1, m + 1, u + 1);
        cs.z[k][m][u] = sensing_channel(geo.cues[k], geo.dues[m], geo.cues[u], rp, rng);
      }
  return cs;
}

inline nlohmann::json cvec_to_json(const cvec& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    arr.push_back({v(i).real(), v(i).imag()});
  return arr;
}

inline cvec cvec_from_json(const nlohmann::json& arr) {
  cvec v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = cplx(arr[i][0].get<double>(), arr[i][1].get<double>());
  return v;
}

/// Channel dump: keys "h/k", "g/k/m", "z/k/m/u" (1-based) with [re,im] pairs.
inline nlohmann::json dump_channels(const channel_set& cs, const geometry& geo) {
  nlohmann::json j;
  j["seed"] = cs.seed;
  j["n"] = cs.n;
  j["num_cues"] = cs.num_cues;
  j["num_dues"] = cs.num_dues;
  nlohmann::json jg;
  jg["bs"] = {geo.bs.x(), geo.bs.y(), geo.bs.z()};
  for (const auto& p : geo.cues) jg["cues"].push_back({p.x(), p.y(), p.z()});
  for (const auto& p : geo.dues) jg["dues"].push_back({p.x(), p.y(), p.z()});
  j["geometry"] = jg;
  for (int k = 0; k < cs.num_cues; ++k) {
    j["h/" + std::to_string(k + 1)] = cvec_to_json(cs.h[k]);
    for (int m = 0; m < cs.num_dues; ++m) {
      j["g/" + std::to_string(k + 1) + "/" + std::to_string(m + 1)] = cvec_to_json(cs.g[k][m]);
      for (int u = 0; u < cs.num_cues; ++u)
        j["z/" + std::to_string(k + 1) + "/" + std::to_string(m + 1) + "/" +
          std::to_string(u + 1)] = cvec_to_json(cs.z[k][m][u]);
    }
  }
  return j;
}

inline channel_set load_channels(const nlohmann::json& j) {
  channel_set cs;
  cs.seed = j.at("seed").get<std::uint64_t>();
  cs.n = j.at("n").get<int>();
  cs.num_cues = j.at("num_cues").get<int>();
  cs.num_dues = j.at("num_dues").get<int>();
  cs.h.resize(cs.num_cues);
  cs.g.assign(cs.num_cues, std::vector<cvec>(cs.num_dues));
  cs.z.assign(cs.num_cues,
              std::vector<std::vector<cvec>>(cs.num_dues, std::vector<cvec>(cs.num_cues)));
  for (int k = 0; k < cs.num_cues; ++k) {
    cs.h[k] = cvec_from_json(j.at("h/" + std::to_string(k + 1)));
    for (int m = 0; m < cs.num_dues; ++m) {
      cs.g[k][m] =
          cvec_from_json(j.at("g/" + std::to_string(k + 1) + "/" + std::to_string(m + 1)));
      for (int u = 0; u < cs.num_cues; ++u)
        cs.z[k][m][u] = cvec_from_json(j.at("z/" + std::to_string(k + 1) + "/" +
                                            std::to_string(m + 1) + "/" + std::to_string(u + 1)));
    }
  }
  return cs;
}

}  // namespace trisac

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace trisac {

using cplx = std::complex<double>;
using cvec = Eigen::VectorXcd;
using cmat = Eigen::MatrixXcd;
using rvec = Eigen::VectorXd;
using rmat = Eigen::MatrixXd;

inline constexpr double pi_v = 3.14159265358979323846;
inline constexpr double speed_of_light = 299792458.0;

/// SINR level a stream must reach so its rate log2(1 + SINR) meets `rate_bits`.
inline double sinr_threshold(double rate_bits) { return std::exp2(rate_bits) - 1.0; }

/// Alternative transcription of the same threshold (exponent shifted into the
/// power); retained only for comparison tests, see SIGNS.md.
inline double sinr_threshold_shifted(double rate_bits) { return std::exp2(rate_bits - 1.0); }

/// dBm -> Watts.
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

/// max(x, 0), the projection used by every inequality multiplier update.
inline double pos(double x) { return x > 0.0 ? x : 0.0; }

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace trisac

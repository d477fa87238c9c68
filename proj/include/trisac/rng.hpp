#pragma once

#include <cstdint>
#include <random>

#include "trisac/common.hpp"

namespace trisac {

/// splitmix64 finalizer; mixes stream coordinates into independent seeds.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Deterministic per-link random substream. Each (tag,a,b,c) coordinate gets
/// its own generator derived from the master seed, so adding receivers or
/// users never perturbs previously drawn channels.
class substream {
 public:
  substream(std::uint64_t master_seed, std::uint64_t tag, std::uint64_t a = 0,
            std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t s = mix64(master_seed);
    s = mix64(s ^ tag);
    s = mix64(s ^ a);
    s = mix64(s ^ b);
    s = mix64(s ^ c);
    eng_.seed(s);
  }

  double normal() { return normal_(eng_); }
  double uniform() { return uniform_(eng_); }

  /// CN(0, var): circularly symmetric complex Gaussian scalar.
  cplx cnormal(double var = 1.0) {
    const double s = std::sqrt(var / 2.0);
    const double re = s * normal();
    const double im = s * normal();
    return {re, im};
  }

  /// Vector of iid CN(0, var) entries.
  cvec cnormal_vec(Eigen::Index n, double var = 1.0) {
    cvec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = cnormal(var);
    return v;
  }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace trisac

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>

namespace aggsim {

// splitmix64 scrambler. All randomness in the project goes through this so
// that populations and experiments are reproducible bit-for-bit across
// platforms and worker counts (the standard <random> distributions are
// implementation-defined).
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Stable seed derivation: children streams stay fixed when unrelated
// components (e.g. additional population sizes) are added to a sweep.
inline std::uint64_t seed_mix(std::uint64_t base, std::uint64_t a,
                              std::uint64_t b = 0) {
  return mix64(mix64(base ^ mix64(a)) ^ mix64(b ^ 0x5851F42D4C957F2Dull));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }

  // Exponential(1); argument of log lies in (0, 1].
  double exponential() { return -std::log(1.0 - uniform01()); }

  double gaussian() {
    double u1 = 1.0 - uniform01();
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.283185307179586476925286766559 * u2);
  }

  Eigen::VectorXd uniform_vec(int n, double lo, double hi) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = uniform(lo, hi);
    return v;
  }

  Eigen::VectorXd gaussian_vec(int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = gaussian();
    return v;
  }

  // Uniform point on the unit simplex via normalized exponentials.
  Eigen::VectorXd simplex(int n) {
    Eigen::VectorXd v(n);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      v[i] = exponential();
      sum += v[i];
    }
    if (sum <= 0.0) return Eigen::VectorXd::Constant(n, 1.0 / n);
    return v / sum;
  }

 private:
  std::uint64_t state_;
};

}  // namespace aggsim

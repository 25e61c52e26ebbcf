#pragma once
// Deterministic random streams.  All sampling is built on splitmix64 so that
// results are bit-identical across platforms and standard libraries; the
// distributions in <random> are not guaranteed to be, so uniforms and normals
// are generated by hand here.

#include <cmath>
#include <cstdint>
#include <string>

#include <Eigen/Dense>

namespace mongelab {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Hash a label into a stream id so that independent regions/strata get
/// decorrelated substreams of the same master seed.
inline std::uint64_t stream_seed(std::uint64_t master, const std::string& label,
                                 std::uint64_t index = 0) {
  std::uint64_t h = master ^ 0x243f6a8885a308d3ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  h ^= index + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  std::uint64_t s = h;
  splitmix64(s);  // burn one step to decouple nearby labels
  return s;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {
    // Warm up so that small seeds do not produce correlated leading draws.
    splitmix64(state_);
    splitmix64(state_);
  }

  std::uint64_t next_u64() { return splitmix64(state_); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Standard normal via Box-Muller (one value per call; the pair's second
  /// member is discarded to keep the stream layout simple and reproducible).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  Eigen::VectorXd normal_vector(int d) {
    Eigen::VectorXd v(d);
    for (int i = 0; i < d; ++i) v[i] = normal();
    return v;
  }

  /// Uniform on the unit sphere S^{d-1}.
  Eigen::VectorXd unit_vector(int d) {
    Eigen::VectorXd v = normal_vector(d);
    double n = v.norm();
    while (n < 1e-300) {
      v = normal_vector(d);
      n = v.norm();
    }
    return v / n;
  }

  /// Uniform in the ball of given radius (volume measure).
  Eigen::VectorXd ball_point(int d, double radius = 1.0) {
    double r = radius * std::pow(uniform(), 1.0 / d);
    return r * unit_vector(d);
  }

  /// Uniform in the shell a <= |x| <= b (volume measure).
  Eigen::VectorXd shell_point(int d, double a, double b) {
    double ad = std::pow(a, d), bd = std::pow(b, d);
    double r = std::pow(ad + uniform() * (bd - ad), 1.0 / d);
    return r * unit_vector(d);
  }

 private:
  std::uint64_t state_;
};

}  // namespace mongelab

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace profilebench {

/// Deterministic counter-seedable RNG (splitmix64 core, Box-Muller normals).
/// Every draw sequence is a pure function of the seed, so per-sample streams
/// keyed by (base_seed, id) are reproducible and order-independent.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(mix(seed ^ kGolden)) {}

  /// Seed of the independent stream for `stream_id` under `base_seed`.
  static std::uint64_t stream_seed(std::uint64_t base_seed, std::uint64_t stream_id) {
    return mix(mix(base_seed) ^ mix(stream_id + kGolden));
  }

  static Rng from_stream(std::uint64_t base_seed, std::uint64_t stream_id) {
    return Rng(stream_seed(base_seed, stream_id));
  }

  std::uint64_t next_u64() {
    state_ += kGolden;
    return mix(state_);
  }

  /// Uniform double in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t uniform_int(std::uint64_t n) { return next_u64() % n; }

  /// Standard normal via Box-Muller (one spare cached).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * kPi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  /// N(0, sigma^2) truncated to [-clip, clip] by rejection (no clamping).
  double truncated_normal(double sigma, double clip) {
    for (int attempt = 0; attempt < kMaxRejectionTries; ++attempt) {
      double x = sigma * normal();
      if (x >= -clip && x <= clip) return x;
    }
    throw std::runtime_error("truncated_normal: rejection budget exhausted");
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
  static constexpr double kPi = 3.141592653589793238462643383279502884;
  static constexpr int kMaxRejectionTries = 10000;

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace profilebench

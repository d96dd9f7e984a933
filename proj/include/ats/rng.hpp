#pragma once

#include <cstdint>
#include <random>

namespace ats {

// Deterministic random source. Every stochastic routine in the library takes
// an explicit 64-bit seed and draws from its own stream; independent
// substreams are derived with SplitMix64 so parallel consumers (scenario
// paths, sweep cells) never share state and results do not depend on thread
// count. Normal variates go through the inverse CDF rather than
// std::normal_distribution, whose output sequence is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Independent stream identified by (seed, stream); stable across platforms.
  static Rng substream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  double normal(double mu, double sigma);

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }

 private:
  std::mt19937_64 engine_;
};

// SplitMix64 finalizer; used for seed derivation.
std::uint64_t mix64(std::uint64_t x);

// Inverse standard normal CDF (Acklam's rational approximation polished with
// one Halley step); |error| < 1e-13 over (0, 1).
double normal_quantile(double p);

// Standard normal CDF via erfc.
double normal_cdf(double x);

}  // namespace ats

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace rmt {

// Identifies one random stream. Independent Monte Carlo samples get distinct
// stream indices under a shared master seed; the (master, stream) -> sequence
// mapping is the fixed function documented on CounterRng, so any run is
// reproducible from its seeds alone, independent of scheduling.
struct SeedSpec {
  std::uint64_t master = 0;
  std::uint64_t stream = 0;
};

// Stream layout used by the Monte Carlo drivers: sample m of a run with base
// stream s draws from stream s + kStreamStride*m + role, where role 0 is the
// primary matrix, role 1 an auxiliary matrix (the Gaussian-divisible V) and
// role 2 scalar jitter (energy averaging). Callers that need several
// independent runs should space their base streams accordingly.
inline constexpr std::uint64_t kStreamStride = 4;

inline constexpr SeedSpec substream(SeedSpec seed, std::uint64_t sample,
                                    std::uint64_t role = 0) {
  return {seed.master, seed.stream + kStreamStride * sample + role};
}

namespace detail {

// SplitMix64 finalizer (Steele, Lea, Flood 2014).
inline constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

}  // namespace detail

// Counter-based generator: output n of stream (master, stream) is
//
//   key = mix(mix(master + G) ^ (stream + 0x8CB92BA72F3D8DD7))
//   u_n = mix(key + n * G),   n = 1, 2, ...
//
// with G the 64-bit golden-ratio constant and mix the SplitMix64 finalizer.
// Pure function of (seed, n): streams can be replayed or split freely.
class CounterRng {
 public:
  explicit CounterRng(SeedSpec seed)
      : key_(detail::splitmix64_mix(
            detail::splitmix64_mix(seed.master + detail::kGolden) ^
            (seed.stream + 0x8CB92BA72F3D8DD7ULL))) {}

  std::uint64_t next_u64() {
    counter_ += detail::kGolden;
    return detail::splitmix64_mix(key_ + counter_);
  }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1]; safe under log().
  double uniform01_open_below() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Standard normal pair via the Box-Muller transform (no std::distribution:
  // the output must be a fixed function of the stream).
  void normal_pair(double& g0, double& g1) {
    const double r = std::sqrt(-2.0 * std::log(uniform01_open_below()));
    const double t = 2.0 * std::numbers::pi * uniform01();
    g0 = r * std::cos(t);
    g1 = r * std::sin(t);
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double g0, g1;
    normal_pair(g0, g1);
    spare_ = g1;
    have_spare_ = true;
    return g0;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace rmt

#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace rcsp {

/// Stream tags used when deriving counter-based substreams.
enum class Stream : std::uint64_t {
  kEnvironment = 1,
  kActuation = 2,
  kProcess = 3,
  kObservation = 4,
  kConjecture = 5,
  kObstacleState = 6,
  kScenarioNoise = 7,
  kValidation = 8,
  kBootstrap = 9,
};

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Hashes a base seed and a tuple of counters into an independent substream
/// seed. Results depend only on the arguments, never on call order.
std::uint64_t derive_seed(std::uint64_t seed, Stream stream,
                          std::initializer_list<std::uint64_t> counters = {});

/// Seeded random source with platform-independent transforms.
///
/// The engine is std::mt19937_64 (its output sequence is fixed by the
/// standard); uniform and normal variates are produced here rather than by
/// the <random> distributions, whose algorithms vary between library vendors.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, Stream stream,
      std::initializer_list<std::uint64_t> counters = {})
      : engine_(derive_seed(seed, stream, counters)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform();

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; the spare variate is cached.
  double normal();

  /// Uniform integer in [0, n), unbiased. n must be positive.
  std::size_t uniform_index(std::size_t n);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace rcsp

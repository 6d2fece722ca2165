#include "rcsp/random.hpp"

#include <cmath>
#include <numbers>

namespace rcsp {

std::uint64_t derive_seed(std::uint64_t seed, Stream stream,
                          std::initializer_list<std::uint64_t> counters) {
  std::uint64_t h = mix64(seed ^ 0x5851f42d4c957f2dULL);
  h = mix64(h ^ static_cast<std::uint64_t>(stream));
  for (std::uint64_t c : counters) {
    h = mix64(h ^ mix64(c + 0x2545f4914f6cdd1dULL));
  }
  return h;
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(phi);
  has_spare_ = true;
  return r * std::cos(phi);
}

std::size_t Rng::uniform_index(std::size_t n) {
  // Rejection on the top of the range keeps every index equally likely.
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
  std::uint64_t x = 0;
  do {
    x = engine_();
  } while (x >= limit);
  return static_cast<std::size_t>(x % bound);
}

}  // namespace rcsp

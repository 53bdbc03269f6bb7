#include "copronn/random.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "copronn/error.hpp"

namespace copronn {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept {
  // splitmix64 finalizer over the combined words
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t uniform_index(Rng& rng, std::uint64_t bound) {
  if (bound == 0) fail(ErrorKind::PreconditionFailed, "uniform_index needs a positive bound");
  // rejection sampling on the largest multiple of bound
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - (std::numeric_limits<std::uint64_t>::max() % bound);
  std::uint64_t draw = rng();
  while (draw >= limit) draw = rng();
  return draw % bound;
}

double uniform_open_closed(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

double standard_normal(Rng& rng) {
  const double u1 = uniform_open_closed(rng);
  const double u2 = uniform_open_closed(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace copronn

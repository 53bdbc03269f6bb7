#pragma once

#include <cstdint>
#include <random>

namespace copronn {

// std::uniform_int_distribution and std::normal_distribution are
// implementation-defined, so outputs would differ between standard libraries.
// The helpers below only consume raw mt19937_64 words, whose sequence is fixed
// by the standard.

using Rng = std::mt19937_64;

/// Derives an independent stream seed from a base seed and a stream tag.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept;

/// Uniform integer in [0, bound). bound must be > 0.
std::uint64_t uniform_index(Rng& rng, std::uint64_t bound);

/// Uniform double in (0, 1].
double uniform_open_closed(Rng& rng);

/// Standard normal draw (Box-Muller, one value per call).
double standard_normal(Rng& rng);

// Stream tags so each consumer of the manifest seed draws from its own stream.
inline constexpr std::uint64_t kStreamCoPronnPartitions = 1;
inline constexpr std::uint64_t kStreamBaselinePartitions = 2;
inline constexpr std::uint64_t kStreamTrainerInit = 3;

}  // namespace copronn

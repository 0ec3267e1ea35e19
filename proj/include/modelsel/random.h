#ifndef MODELSEL_RANDOM_H_
#define MODELSEL_RANDOM_H_

#include <cstdint>
#include <random>

namespace modelsel {

using Rng = std::mt19937_64;

// Independent stream for (seed, stream_id); used to give every simulated
// request its own randomness.
inline Rng MakeSubstream(std::uint64_t seed, std::uint64_t stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id),
                    static_cast<std::uint32_t>(stream_id >> 32)};
  return Rng(seq);
}

// Normal(mean, stddev) clamped at zero. stddev == 0 returns mean exactly
// without consuming randomness.
inline double SampleNonNegativeNormal(Rng& rng, double mean, double stddev) {
  if (stddev == 0.0) return mean < 0.0 ? 0.0 : mean;
  std::normal_distribution<double> dist(mean, stddev);
  const double x = dist(rng);
  return x < 0.0 ? 0.0 : x;
}

}  // namespace modelsel

#endif  // MODELSEL_RANDOM_H_

#pragma once

#include <cstdint>

namespace beslift {

// Counter-based generator: output i depends only on (seed, i), so corpora are
// reproducible regardless of evaluation order and streams can be split freely.
struct CounterRng {
  std::uint64_t seed = 0;

  static constexpr std::uint64_t golden = 0x9E3779B97F4A7C15ull;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t bits(std::uint64_t counter) const {
    return mix(seed + (counter + 1) * golden);
  }

  // uniform in [0, 1)
  double uniform(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  double uniform(std::uint64_t counter, double lo, double hi) const {
    return lo + (hi - lo) * uniform(counter);
  }

  std::int64_t uniform_int(std::uint64_t counter, std::int64_t lo,
                           std::int64_t hi) const {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<std::int64_t>(bits(counter) % span);
  }

  // independent substream
  CounterRng stream(std::uint64_t id) const { return CounterRng{mix(seed ^ (id * golden))}; }
};

}  // namespace beslift

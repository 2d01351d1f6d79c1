#pragma once

#include <cstdint>

// Deterministic, platform-independent random numbers for the multistart
// equilibrium searches. std::uniform_real_distribution is implementation
// defined, which would break the byte-identical reproducibility contract,
// so we draw through an explicit splitmix64 generator instead.
namespace cotrap {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {
    // Warm up so that small seeds do not produce correlated first draws.
    splitmix64(state_);
    splitmix64(state_);
  }

  // Derive an independent stream, e.g. one per search restart.
  static Rng substream(std::uint64_t master_seed, std::uint64_t index) {
    std::uint64_t s = master_seed;
    std::uint64_t mixed = splitmix64(s) ^ (index * 0xd6e8feb86659fd93ULL);
    return Rng(mixed);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(splitmix64(state_) >> 11) * 0x1.0p-53;
  }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t state_;
};

}  // namespace cotrap

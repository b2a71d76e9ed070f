#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

// Deterministic RNG utilities. All randomness in the library flows through
// Stream objects whose seeds are derived from a single master seed with a
// stateless mix, so results never depend on evaluation order or thread
// scheduling. Hand-rolled (splitmix64 + Box-Muller) rather than <random> so
// that trajectories are bit-stable across standard library implementations.

namespace drr::rng {

// splitmix64 finalizer (Steele, Lea, Flood 2014). Stateless: maps u64 -> u64.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derive an independent sub-seed from (master, tag, a, b). Used as a
// counter-based scheme: e.g. tag = stream kind, a = agent, b = epoch.
inline std::uint64_t derive(std::uint64_t master, std::uint64_t tag,
                            std::uint64_t a = 0, std::uint64_t b = 0) {
  std::uint64_t s = mix64(master ^ (0xd6e8feb86659fd93ULL * (tag + 1)));
  s = mix64(s ^ (0xa0761d6478bd642fULL * (a + 1)));
  s = mix64(s ^ (0xe7037ed1a0b428dbULL * (b + 1)));
  return s;
}

// Stream tags (keep stable: they are part of the reproducibility contract).
enum : std::uint64_t {
  kTagPermutation = 1,  // per-(agent, epoch) reshuffling permutations
  kTagSampling = 2,     // per-(agent, epoch) with-replacement draws (DSGD/SGD)
  kTagInit = 3,         // initial iterates
  kTagProblem = 4,      // problem/data generation
  kTagRep = 5,          // per-repetition master seeds
  kTagGraph = 6,        // Erdos-Renyi edge sampling
  kTagCheck = 7,        // theory-check internal sampling
};

class Stream {
 public:
  explicit Stream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Unbiased integer in [0, bound) by rejection.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return v % bound;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller (polar form avoided to keep draw count fixed).
  double next_gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 == 0.0) u1 = next_unit();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  // Fisher-Yates.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace drr::rng

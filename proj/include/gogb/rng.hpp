#pragma once
// Deterministic splitmix64 generator. Standard-library distributions are
// implementation-defined, so anything feeding reproducible experiment
// manifests draws from this instead.

#include <cstdint>

namespace gogb {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : s_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (s_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n); n > 0. Modulo bias is irrelevant at our sizes.
  int below(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }
  int range(int lo, int hi) { return lo + below(hi - lo + 1); }  // inclusive
  bool coin() { return next() & 1u; }

 private:
  std::uint64_t s_;
};

}  // namespace gogb

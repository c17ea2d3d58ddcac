#pragma once

#include <cstdint>
#include <random>

namespace greypath {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stream i of a master seed. Streams are indexed by work block, never by
// worker, so output does not depend on how blocks are scheduled.
inline Rng make_stream(std::uint64_t master_seed, std::uint64_t stream_index) {
  return Rng(master_seed ^ splitmix64(stream_index));
}

// Derives an unrelated master seed for a second, independent estimator
// (e.g. the right-hand side of an identity check).
constexpr std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t tag) noexcept {
  return splitmix64(master_seed ^ splitmix64(tag ^ 0x5bd1e995ULL));
}

// Standard-normal source that owns its distribution state alongside the engine.
class NormalSource {
 public:
  explicit NormalSource(Rng& rng) : rng_(rng) {}
  double operator()() { return dist_(rng_); }
  Rng& engine() { return rng_; }

 private:
  Rng& rng_;
  std::normal_distribution<double> dist_{0.0, 1.0};
};

}  // namespace greypath

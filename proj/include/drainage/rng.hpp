#pragma once

#include <cstdint>

// Counter-based randomness. Every random quantity in a simulation is a pure
// function of (seed, stream label, integer coordinates), so an unbounded
// lattice can be queried lazily and reproducibly with no stored state.

namespace drainage {

// splitmix64 finalizer; full-avalanche 64-bit permutation.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Stream labels keep the independent uniform collections disjoint.
enum class Stream : std::uint64_t {
  kOpenness = 0x6f70656e,      // site openness field
  kTieBreak = 0x74696562,      // per-ordered-pair tie breaks
  kSampler = 0x73616d70,       // direct step-law sampling
  kCouplingU1u = 0xc0117101,   // the four coupling collections
  kCouplingU2u = 0xc0117102,
  kCouplingU1v = 0xc0117103,
  kCouplingU2v = 0xc0117104,
  kReplica = 0x7265706c,       // master-seed -> replica-seed derivation
};

// Incremental keyed hash over 64-bit words.
class KeyedHash {
 public:
  KeyedHash(std::uint64_t seed, Stream stream)
      : h_(mix64(seed ^ mix64(static_cast<std::uint64_t>(stream)))) {}

  KeyedHash& absorb(std::uint64_t w) {
    h_ = mix64(h_ ^ w);
    return *this;
  }
  KeyedHash& absorb(std::int64_t w) { return absorb(static_cast<std::uint64_t>(w)); }
  KeyedHash& absorb(int w) { return absorb(static_cast<std::uint64_t>(static_cast<std::int64_t>(w))); }

  std::uint64_t value() const { return mix64(h_); }

  // Uniform on (0,1]; 53-bit resolution.
  double uniform() const {
    return static_cast<double>((value() >> 11) + 1) * 0x1.0p-53;
  }

 private:
  std::uint64_t h_;
};

// Derived seed for replica i of an experiment with the given master seed.
inline std::uint64_t replica_seed(std::uint64_t master, std::uint64_t i) {
  return KeyedHash(master, Stream::kReplica).absorb(i).value();
}

// Small sequential stream for consumers that just need a run of uniforms
// (the step-law sampler). Counter-based underneath.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed), counter_(0) {}

  double uniform() {
    return KeyedHash(seed_, Stream::kSampler).absorb(counter_++).uniform();
  }
  std::uint64_t next_u64() {
    return KeyedHash(seed_, Stream::kSampler).absorb(counter_++).value();
  }
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_;
};

}  // namespace drainage

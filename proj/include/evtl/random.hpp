#pragma once

// Reproducible randomness: every consumer gets its own engine derived from a
// master seed and a path of integer labels, so results never depend on the
// order in which workers draw.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace evtl {

using Engine = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// A node in the tree of substreams. Children are derived by hashing; the
/// engine for a node is seeded from its key alone.
class StreamKey {
public:
  constexpr explicit StreamKey(std::uint64_t seed) noexcept : key_(splitmix64(seed)) {}

  constexpr StreamKey child(std::uint64_t label) const noexcept {
    return StreamKey(Raw{}, splitmix64(key_ ^ splitmix64(label + 0x632be59bd9b4e019ULL)));
  }
  constexpr StreamKey child(std::initializer_list<std::uint64_t> path) const noexcept {
    StreamKey k = *this;
    for (auto label : path) k = k.child(label);
    return k;
  }

  Engine engine() const {
    std::seed_seq seq{static_cast<std::uint32_t>(key_), static_cast<std::uint32_t>(key_ >> 32)};
    return Engine(seq);
  }

  constexpr std::uint64_t value() const noexcept { return key_; }

private:
  struct Raw {};
  constexpr StreamKey(Raw, std::uint64_t key) noexcept : key_(key) {}

  std::uint64_t key_;
};

/// Per-run substreams for trajectory simulation plus a separate branch for
/// monitor-side sampling (atom distributions).
class RandomnessPlan {
public:
  explicit RandomnessPlan(std::uint64_t master_seed) : master_seed_(master_seed), root_(master_seed) {}

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  Engine run_stream(std::uint64_t run) const { return root_.child({kRuns, run}).engine(); }
  StreamKey monitor_key() const { return root_.child(kMonitor); }

private:
  static constexpr std::uint64_t kRuns = 1;
  static constexpr std::uint64_t kMonitor = 2;

  std::uint64_t master_seed_;
  StreamKey root_;
};

/// Normal draw parameterised by variance; a zero variance yields the mean.
inline double draw_normal(Engine& rng, double mean, double variance) {
  if (variance <= 0.0) return mean;
  std::normal_distribution<double> dist(mean, std::sqrt(variance));
  return dist(rng);
}

} // namespace evtl

#pragma once

// Random number contract.
//
// Engine: std::mt19937_64 seeded with a single 64-bit word.
// Gaussian transform: std::normal_distribution<double> (libstdc++ uses the
// Marsaglia polar method). Draws are bit-reproducible for a fixed seed within
// one standard library; nothing is promised across toolchains.
//
// Substreams: replication i of an experiment with master seed s uses the
// engine seeded with substream_seed(s, i), so a replication's draws do not
// depend on how replications are scheduled across threads.

#include <cstdint>
#include <random>
#include <span>

namespace sdde {

/// SplitMix64 finalizer (Steele, Lea & Flood 2014).
constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// seed_i = splitmix64(master ^ splitmix64(i)).
constexpr std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index));
}

/// Named stream tags so limit-law draws never share a substream with path
/// replications of the same experiment.
enum class Stream : std::uint64_t {
  Paths = 0x70617468ULL,   // "path"
  Limit = 0x6c696d74ULL,   // "limt"
  Mixing = 0x6d697867ULL,  // "mixg"
};

constexpr std::uint64_t stream_seed(std::uint64_t master, Stream s) {
  return splitmix64(master + splitmix64(static_cast<std::uint64_t>(s)));
}

class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

  double operator()() { return normal_(engine_); }

  /// Fills out with independent N(0, sd^2) draws.
  void fill(std::span<double> out, double sd) {
    for (double& v : out) v = sd * normal_(engine_);
  }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace sdde

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace witlab {

// Counter-based pseudo-random stream.  A stream is identified by a (seed,
// purpose) pair; draws walk a counter through SplitMix64, so results are
// platform-independent and independent streams can be handed to parallel
// workers without shared state.
class RngStream {
 public:
  RngStream() : key_(0) {}
  RngStream(std::uint64_t seed, const std::string& purpose)
      : key_(mix(seed ^ 0x9e3779b97f4a7c15ULL) ^ fnv1a(purpose)) {}

  // Derive an independent child stream (e.g. per trajectory, per round).
  RngStream substream(std::uint64_t index) const {
    RngStream s;
    s.key_ = mix(key_ ^ mix(index + 0x632be59bd9b4e019ULL));
    return s;
  }
  RngStream substream(const std::string& purpose) const {
    RngStream s;
    s.key_ = mix(key_ ^ fnv1a(purpose));
    return s;
  }

  std::uint64_t next_u64() { return mix(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Index drawn according to a probability vector (assumed normalized).
  int pick(const std::vector<double>& probs) {
    double u = uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
      acc += probs[i];
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
  }

  // Uniform integer in [0, n).
  int uniform_int(int n) { return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n)); }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  static std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    return h;
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace witlab

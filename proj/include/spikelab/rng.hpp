#pragma once

#include <cstdint>

namespace spikelab {

// Counter-based random stream: every draw is a stateless hash of (key, counter),
// so streams split with distinct salts are independent and runs are reproducible
// across platforms and thread schedules.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t key) : key_(key) {}

  RandomStream split(std::uint64_t salt) const {
    return RandomStream(mix(key_ ^ mix(salt + 0x632be59bd9b4e019ULL)));
  }

  std::uint64_t next_u64() { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  // uniform in [0,1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace spikelab

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ugr {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Seeded generator with hand-written distribution transforms, so a fixed seed
// gives the same stream on every platform (std:: distributions are
// implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // uniform on the open interval (0,1); 53-bit resolution, never exactly 0 or 1
  double uniform01() { return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53; }

  double exponential(double rate) { return -std::log(uniform01()) / rate; }

  // Seed for an independent substream. Replication i of a simulation uses
  // substream(seed, i), making results independent of evaluation order.
  static std::uint64_t substream(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(seed ^ splitmix64(index + 0x5851f42d4c957f2dull));
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace ugr

#ifndef SHAPEDENS_RNG_HPP_
#define SHAPEDENS_RNG_HPP_

#include <cstdint>

namespace shapedens {

/// Counter-based uniform stream. Stateless: draw i of the stream keyed by
/// `seed` is mix64(seed + (i+1) * GOLDEN), where mix64 is the SplitMix64
/// finalizer. Every draw is a pure function of (seed, i), so streams can be
/// evaluated in any order or in parallel with identical results.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

/// Draw i from stream `seed`, mapped to the open interval (0, 1):
/// the top 53 bits of the mixed word, offset by half an ulp.
inline double uniform_open(std::uint64_t seed, std::uint64_t i) {
  std::uint64_t v = mix64(seed + (i + 1) * kGolden);
  return (static_cast<double>(v >> 11) + 0.5) * 0x1.0p-53;
}

/// Independent sub-stream seed for (size index, replication) pairs.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t size_index,
                                 std::uint64_t replication) {
  std::uint64_t h = mix64(base + (size_index + 1) * kGolden);
  return mix64(h + (replication + 1) * 0xD1B54A32D192ED03ULL);
}

/// Small convenience wrapper when sequential draws are wanted.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  double next() { return uniform_open(seed_, counter_++); }

  /// Uniform in (lo, hi).
  double next(double lo, double hi) { return lo + (hi - lo) * next(); }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace shapedens

#endif  // SHAPEDENS_RNG_HPP_

#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>

namespace mlgb {

/// Philox4x32-10 block function (Salmon et al., SC'11). Maps a 128-bit
/// counter and 64-bit key to 128 pseudo-random bits.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

/// Distinguishes independent random streams derived from one seed.
enum class StreamTag : std::uint32_t {
  kSpheres = 1,
  kPoints,
  kEdges,
  kSplit,
  kNoise,
  kInit,
  kLossSample,
  kNeighborSample,
  kWalk,
  kSkipGram,
  kTest,
};

/// Counter-based random stream. A stream is identified by (seed, tag, a, b);
/// draws are a pure function of that identity and the draw index, so any
/// element of any stream can be reproduced without replaying others.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream(std::uint64_t seed, StreamTag tag, std::uint32_t a = 0, std::uint32_t b = 0) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        tag_(static_cast<std::uint32_t>(tag)),
        a_(a),
        b_(b) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) noexcept;

  double normal() noexcept;

  /// Single uniform for the pair (a, b) of the given stream: the first draw of
  /// stream (seed, tag, a, b). Used for per-pair edge decisions.
  static double pair_uniform(std::uint64_t seed, StreamTag tag, std::uint32_t a,
                             std::uint32_t b) noexcept;

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint32_t tag_;
  std::uint32_t a_;
  std::uint32_t b_;
  std::uint32_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// In-place Fisher-Yates shuffle driven by a RandomStream.
template <typename T>
void shuffle(std::span<T> values, RandomStream& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace mlgb

#pragma once

#include <cstdint>

namespace partab {

/// MINSTD linear congruential generator: state' = 16807 * state mod (2^31 - 1).
/// Fixed here (rather than the host library's rand) so branch assignment and
/// formula generation are bit-identical on every platform.
class Minstd {
 public:
  static constexpr std::uint64_t kModulus = 2147483647;  // 2^31 - 1
  static constexpr std::uint64_t kMultiplier = 16807;

  /// Maps an arbitrary 64-bit seed into the generator's state range
  /// [1, kModulus - 1].
  explicit Minstd(std::uint64_t seed) : state_(seed % (kModulus - 1) + 1) {}

  /// Advances the state and returns it; values are in [1, kModulus - 1].
  std::uint32_t next() {
    state_ = (kMultiplier * state_) % kModulus;
    return static_cast<std::uint32_t>(state_);
  }

  /// next() reduced to [0, bound).
  std::uint32_t next_below(std::uint32_t bound) { return next() % bound; }

  /// First output of a generator seeded with max(seed, 1); the quantity
  /// branch-to-job assignment derives its per-block offset from.
  static std::uint32_t first_output(std::uint64_t seed) {
    if (seed == 0) seed = 1;
    return static_cast<std::uint32_t>((kMultiplier * (seed % kModulus)) % kModulus);
  }

 private:
  std::uint64_t state_;
};

}  // namespace partab

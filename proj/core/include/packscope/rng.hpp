#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace packscope {

/// FNV-1a, 64-bit variant.
[[nodiscard]] constexpr std::uint64_t fnv1a64(std::string_view text) noexcept {
  std::uint64_t hash = 0xCBF29CE484222325ULL;
  for (char c : text) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001B3ULL;
  }
  return hash;
}

/// Sub-stream seed: `seed XOR fnv1a64(purpose)`.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t seed, std::string_view purpose) noexcept;

/// Indexed sub-stream: `seed XOR fnv1a64(purpose + ":" + index)`.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t seed, std::string_view purpose,
                                        std::uint64_t index) noexcept;

/**
 * xorshift64* generator.
 *
 * State update: x ^= x >> 12; x ^= x << 25; x ^= x >> 27.
 * Output: x * 0x2545F4914F6CDD1D.
 * A zero seed is replaced by 0x9E3779B97F4A7C15 since the all-zero state is a fixed point.
 */
class Xorshift64Star {
 public:
  using result_type = std::uint64_t;

  static constexpr std::uint64_t kZeroSeedReplacement = 0x9E3779B97F4A7C15ULL;

  explicit Xorshift64Star(std::uint64_t seed) noexcept
      : state_(seed == 0 ? kZeroSeedReplacement : seed) {}

  std::uint64_t next() noexcept {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545F4914F6CDD1DULL;
  }

  std::uint64_t operator()() noexcept { return next(); }
  static constexpr std::uint64_t min() noexcept { return 0; }
  static constexpr std::uint64_t max() noexcept { return ~std::uint64_t{0}; }

  /// Uniform double in [0, 1) from the top 53 bits.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Integer in [0, bound) by modulo reduction; bound must be non-zero.
  std::uint64_t below(std::uint64_t bound) noexcept { return next() % bound; }

  [[nodiscard]] std::uint64_t state() const noexcept { return state_; }

 private:
  std::uint64_t state_;
};

}  // namespace packscope

#pragma once

// Keyed, counter-based random streams for reproducible Monte-Carlo runs.
//
// The k-th draw of a stream is a pure function of (key, k), so substreams can
// be handed to workers in any order without changing the values they produce.
// The output function is the splitmix64 finalizer; normals use an explicit
// Box-Muller so sequences are identical across platforms (std::normal_
// distribution is implementation-defined).

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace rsma {

namespace detail {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

}  // namespace detail

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t key) noexcept : key_(key) {}

  static RandomStream seeded(std::uint64_t seed) noexcept {
    return RandomStream(detail::mix64(seed + detail::kGolden));
  }

  // Independent child stream. Tags form a hierarchy: a substream's draws never
  // collide with the parent's or with a sibling's.
  [[nodiscard]] RandomStream substream(std::uint64_t tag) const noexcept {
    return RandomStream(detail::mix64(key_ + detail::mix64(tag + detail::kGolden)));
  }

  std::uint64_t next_u64() noexcept {
    return detail::mix64(key_ + ++counter_ * detail::kGolden);
  }

  // Uniform on [0, 1), 53-bit resolution.
  double next_uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard normal, one value per two uniforms.
  double next_normal() noexcept {
    const double r = std::sqrt(-2.0 * std::log(uniform_open()));
    return r * std::cos(2.0 * std::numbers::pi * next_uniform());
  }

  // Circularly symmetric complex Gaussian with zero mean and unit variance,
  // i.e. E[|z|^2] = 1.
  std::complex<double> next_cgauss() noexcept {
    const double r = std::sqrt(-std::log(uniform_open()));
    const double phi = 2.0 * std::numbers::pi * next_uniform();
    return {r * std::cos(phi), r * std::sin(phi)};
  }

 private:
  // Uniform on (0, 1]; keeps log() finite.
  double uniform_open() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace rsma

#pragma once

// Platform-stable randomness. std::mt19937_64 output is fixed by the
// standard; the distributions are not, so sampling helpers live here.

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>

namespace scorekeeping {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// One-shot mix of a 64-bit value (splitmix64 finaliser).
std::uint64_t mix64(std::uint64_t value) noexcept;

/// FNV-1a, 64-bit.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;
std::uint64_t fnv1a64(std::span<const unsigned char> bytes) noexcept;

/// Uniform integer in [0, bound) by rejection sampling. bound > 0.
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound);

/// Uniform double in [0, 1) with 53 random bits.
double unit_double(Rng& rng) noexcept;

/// Uniform double in [lo, hi).
double uniform_real(Rng& rng, double lo, double hi) noexcept;

template <typename T>
void shuffle(std::span<T> items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(rng, i));
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

std::string hex64(std::uint64_t value);

}  // namespace scorekeeping

// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace opsai::game {

inline constexpr std::uint64_t kSplitMixGamma = 0x9e3779b97f4a7c15ULL;

/// The splitmix64 finalizer applied to `x + gamma`: the first output of a
/// generator whose state is `x`.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  std::uint64_t z = x + kSplitMixGamma;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic 64-bit generator. Plain value; copy it to fork a stream.
struct SplitMix64 {
  std::uint64_t state = 0;

  constexpr std::uint64_t next() noexcept {
    std::uint64_t out = splitmix64(state);
    state += kSplitMixGamma;
    return out;
  }

  /// Uniform integer in [0, bound). bound must be nonzero.
  constexpr std::uint64_t below(std::uint64_t bound) noexcept {
    return next() % bound;
  }

  /// Uniform real in [0, 1) from the top 53 bits.
  double unit() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  bool operator==(const SplitMix64&) const = default;
};

}  // namespace opsai::game

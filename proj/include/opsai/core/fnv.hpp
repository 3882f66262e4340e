// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace opsai {

inline constexpr std::uint64_t kFnvOffsetBasis = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

/// Incremental 64-bit FNV-1a.
class Fnv1a64 {
 public:
  void update(std::span<const std::uint8_t> bytes) noexcept {
    for (auto b : bytes) {
      state_ ^= b;
      state_ *= kFnvPrime;
    }
  }

  void update(std::string_view bytes) noexcept {
    for (unsigned char b : bytes) {
      state_ ^= b;
      state_ *= kFnvPrime;
    }
  }

  /// Feeds `value` as 8 big-endian bytes.
  void update_be64(std::uint64_t value) noexcept {
    for (int shift = 56; shift >= 0; shift -= 8) {
      state_ ^= static_cast<std::uint8_t>(value >> shift);
      state_ *= kFnvPrime;
    }
  }

  std::uint64_t digest() const noexcept { return state_; }

 private:
  std::uint64_t state_ = kFnvOffsetBasis;
};

inline std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  Fnv1a64 h;
  h.update(bytes);
  return h.digest();
}

/// Lowercase, zero-padded 16-character hex form used on the wire.
std::string hash_to_hex(std::uint64_t value);

/// Inverse of hash_to_hex; throws ValidationError on malformed input.
std::uint64_t hash_from_hex(std::string_view text);

}  // namespace opsai

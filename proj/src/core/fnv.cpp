// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#include "opsai/core/fnv.hpp"

#include "opsai/core/error.hpp"

namespace opsai {

std::string hash_to_hex(std::uint64_t value) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kDigits[value & 0xf];
    value >>= 4;
  }
  return out;
}

std::uint64_t hash_from_hex(std::string_view text) {
  if (text.size() != 16) {
    throw ValidationError("hash", "hash must be 16 hex characters");
  }
  std::uint64_t value = 0;
  for (char c : text) {
    value <<= 4;
    if (c >= '0' && c <= '9') {
      value |= static_cast<std::uint64_t>(c - '0');
    } else if (c >= 'a' && c <= 'f') {
      value |= static_cast<std::uint64_t>(c - 'a' + 10);
    } else {
      throw ValidationError("hash", "hash must be lowercase hex");
    }
  }
  return value;
}

}  // namespace opsai

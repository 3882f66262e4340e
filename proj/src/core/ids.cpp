// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#include "opsai/core/ids.hpp"

#include <random>

#include "opsai/core/fnv.hpp"

namespace opsai {

bool is_session_id(std::string_view text) noexcept {
  if (text.size() != 32) return false;
  for (char c : text) {
    bool hex = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
    if (!hex) return false;
  }
  return true;
}

std::string session_id_from_words(std::uint64_t hi, std::uint64_t lo) {
  return hash_to_hex(hi) + hash_to_hex(lo);
}

std::string random_session_id() {
  std::random_device rd;
  auto word = [&rd] {
    return (static_cast<std::uint64_t>(rd()) << 32) | rd();
  };
  std::uint64_t hi = word();
  std::uint64_t lo = word();
  return session_id_from_words(hi, lo);
}

}  // namespace opsai

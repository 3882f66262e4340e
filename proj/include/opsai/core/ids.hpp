// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace opsai {

/// 128-bit session identifier in canonical lowercase hex (32 chars).
bool is_session_id(std::string_view text) noexcept;

std::string session_id_from_words(std::uint64_t hi, std::uint64_t lo);

/// Fresh random id from the system entropy source.
std::string random_session_id();

}  // namespace opsai

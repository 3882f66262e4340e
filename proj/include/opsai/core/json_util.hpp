// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

namespace opsai {

using Json = nlohmann::json;

/// Compact JSON with lexicographically sorted keys and UTF-8 output. This is
/// the only byte form that is hashed, stored or compared.
std::string canonical_dump(const Json& value);

/// Parses UTF-8 JSON text; throws ParseError carrying the byte offset.
Json parse_json(std::string_view text);

// Typed field readers. Each throws ValidationError naming `path.key`
// when the field is missing or has the wrong type.
namespace json_field {

const Json& require(const Json& obj, std::string_view key,
                    const std::string& path);
std::string string(const Json& obj, std::string_view key,
                   const std::string& path);
std::int64_t int64(const Json& obj, std::string_view key,
                   const std::string& path);
std::uint64_t uint64(const Json& obj, std::string_view key,
                     const std::string& path);
bool boolean(const Json& obj, std::string_view key, const std::string& path);
double number(const Json& obj, std::string_view key, const std::string& path);

std::optional<std::string> opt_string(const Json& obj, std::string_view key,
                                      const std::string& path);
std::optional<std::int64_t> opt_int64(const Json& obj, std::string_view key,
                                      const std::string& path);
std::optional<std::uint64_t> opt_uint64(const Json& obj, std::string_view key,
                                        const std::string& path);
std::optional<bool> opt_boolean(const Json& obj, std::string_view key,
                                const std::string& path);
std::optional<double> opt_number(const Json& obj, std::string_view key,
                                 const std::string& path);

void expect_object(const Json& value, const std::string& path);
void expect_array(const Json& value, const std::string& path);

}  // namespace json_field
}  // namespace opsai

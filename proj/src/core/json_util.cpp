// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#include "opsai/core/json_util.hpp"

#include "opsai/core/error.hpp"

namespace opsai {

std::string canonical_dump(const Json& value) {
  // nlohmann::json objects are std::map backed, so keys come out in
  // bytewise-sorted order.
  return value.dump(-1, ' ', false, Json::error_handler_t::strict);
}

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw ParseError(e.what(), e.byte);
  }
}

namespace json_field {
namespace {

std::string join(const std::string& path, std::string_view key) {
  std::string out = path;
  if (!out.empty()) out += '.';
  out += key;
  return out;
}

[[noreturn]] void wrong_type(const std::string& field, const char* expected) {
  throw ValidationError(field, field + ": expected " + expected);
}

const Json* find(const Json& obj, std::string_view key,
                 const std::string& path) {
  expect_object(obj, path);
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return nullptr;
  return &*it;
}

}  // namespace

void expect_object(const Json& value, const std::string& path) {
  if (!value.is_object()) {
    wrong_type(path.empty() ? std::string("<root>") : path, "object");
  }
}

void expect_array(const Json& value, const std::string& path) {
  if (!value.is_array()) wrong_type(path, "array");
}

const Json& require(const Json& obj, std::string_view key,
                    const std::string& path) {
  const Json* v = find(obj, key, path);
  if (v == nullptr) {
    auto field = join(path, key);
    throw ValidationError(field, field + ": missing required field");
  }
  return *v;
}

std::string string(const Json& obj, std::string_view key,
                   const std::string& path) {
  const Json& v = require(obj, key, path);
  if (!v.is_string()) wrong_type(join(path, key), "string");
  return v.get<std::string>();
}

std::int64_t int64(const Json& obj, std::string_view key,
                   const std::string& path) {
  const Json& v = require(obj, key, path);
  if (v.is_number_integer()) {
    if (v.is_number_unsigned() &&
        v.get<std::uint64_t>() >
            static_cast<std::uint64_t>(INT64_MAX)) {
      wrong_type(join(path, key), "signed 64-bit integer");
    }
    return v.get<std::int64_t>();
  }
  wrong_type(join(path, key), "integer");
}

std::uint64_t uint64(const Json& obj, std::string_view key,
                     const std::string& path) {
  const Json& v = require(obj, key, path);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  }
  wrong_type(join(path, key), "unsigned integer");
}

bool boolean(const Json& obj, std::string_view key, const std::string& path) {
  const Json& v = require(obj, key, path);
  if (!v.is_boolean()) wrong_type(join(path, key), "boolean");
  return v.get<bool>();
}

double number(const Json& obj, std::string_view key, const std::string& path) {
  const Json& v = require(obj, key, path);
  if (!v.is_number()) wrong_type(join(path, key), "number");
  return v.get<double>();
}

std::optional<std::string> opt_string(const Json& obj, std::string_view key,
                                      const std::string& path) {
  if (find(obj, key, path) == nullptr) return std::nullopt;
  return string(obj, key, path);
}

std::optional<std::int64_t> opt_int64(const Json& obj, std::string_view key,
                                      const std::string& path) {
  if (find(obj, key, path) == nullptr) return std::nullopt;
  return int64(obj, key, path);
}

std::optional<std::uint64_t> opt_uint64(const Json& obj, std::string_view key,
                                        const std::string& path) {
  if (find(obj, key, path) == nullptr) return std::nullopt;
  return uint64(obj, key, path);
}

std::optional<bool> opt_boolean(const Json& obj, std::string_view key,
                                const std::string& path) {
  if (find(obj, key, path) == nullptr) return std::nullopt;
  return boolean(obj, key, path);
}

std::optional<double> opt_number(const Json& obj, std::string_view key,
                                 const std::string& path) {
  if (find(obj, key, path) == nullptr) return std::nullopt;
  return number(obj, key, path);
}

}  // namespace json_field
}  // namespace opsai

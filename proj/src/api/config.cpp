// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#include "opsai/api/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "opsai/core/error.hpp"
#include "opsai/core/json_util.hpp"

namespace opsai::api {

namespace {

const char* const kKeys[] = {
    "storage_root", "storage_backend", "storage_endpoint", "index_backend",
    "bind_addr",    "levels_dir",      "stall_p",          "verify_seeds",
    "peer_k",       "support_theta",   "cors_origin",
};

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || p != text.data() + text.size()) {
    throw ValidationError(key, key + ": '" + text + "' is not a number");
  }
  return value;
}

double parse_real(const std::string& key, const std::string& text) {
  char* end = nullptr;
  double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size()) {
    throw ValidationError(key, key + ": '" + text + "' is not a number");
  }
  return v;
}

void apply(ServiceConfig& c, const std::string& key, const std::string& value) {
  if (key == "storage_root") {
    c.storage.root = value;
  } else if (key == "storage_backend") {
    c.storage.backend = storage::parse_object_backend(value);
  } else if (key == "storage_endpoint") {
    c.storage.endpoint = value;
  } else if (key == "index_backend") {
    c.storage.index = storage::parse_index_backend(value);
  } else if (key == "bind_addr") {
    c.bind_addr = value;
  } else if (key == "levels_dir") {
    c.levels_dir = value;
  } else if (key == "stall_p") {
    c.stall_p = parse_real(key, value);
  } else if (key == "verify_seeds") {
    c.verify_seeds = parse_number<std::int64_t>(key, value);
  } else if (key == "peer_k") {
    c.peer_k = parse_number<std::size_t>(key, value);
  } else if (key == "support_theta") {
    c.support_theta = parse_real(key, value);
  } else if (key == "cors_origin") {
    c.cors_origin = value;
  } else {
    throw ValidationError(key, "unknown setting '" + key + "'");
  }
}

std::string env_name(const std::string& key) {
  std::string out = "OPSAI_";
  for (char ch : key) out += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return out;
}

}  // namespace

void ServiceConfig::validate() const {
  if (!(stall_p >= 0.0 && stall_p <= 1.0)) {
    throw ValidationError("stall_p", "stall_p must be in [0, 1]");
  }
  if (verify_seeds < 1) throw ValidationError("verify_seeds", "verify_seeds must be >= 1");
  if (peer_k < 1) throw ValidationError("peer_k", "peer_k must be >= 1");
  if (!(support_theta >= 0.0 && support_theta <= 1.0)) {
    throw ValidationError("support_theta", "support_theta must be in [0, 1]");
  }
  split_host_port(bind_addr);
}

ServiceConfig resolve_config(const std::optional<std::filesystem::path>& config_file,
                             const std::map<std::string, std::string>& overrides,
                             const EnvLookup& env) {
  ServiceConfig c;
  if (config_file) {
    std::ifstream in(*config_file, std::ios::binary);
    if (!in) throw IoError("cannot read config " + config_file->string());
    std::ostringstream ss;
    ss << in.rdbuf();
    auto j = parse_json(ss.str());
    json_field::expect_object(j, "config");
    for (const auto& [key, value] : j.items()) {
      if (value.is_string()) {
        apply(c, key, value.get<std::string>());
      } else if (value.is_number()) {
        apply(c, key, value.dump());
      } else {
        throw ValidationError(key, key + ": expected a string or number");
      }
    }
  }
  for (const char* key : kKeys) {
    if (auto v = env(env_name(key))) apply(c, key, *v);
  }
  for (const auto& [key, value] : overrides) apply(c, key, value);
  c.validate();
  return c;
}

EnvLookup process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    const char* v = std::getenv(name.c_str());
    if (v == nullptr) return std::nullopt;
    return std::string(v);
  };
}

std::pair<std::string, int> split_host_port(const std::string& addr) {
  auto colon = addr.rfind(':');
  if (colon == std::string::npos || colon == 0) {
    throw ValidationError("bind_addr", "expected host:port, got '" + addr + "'");
  }
  int port = parse_number<int>("bind_addr", addr.substr(colon + 1));
  if (port < 0 || port > 65535) throw ValidationError("bind_addr", "port out of range");
  return {addr.substr(0, colon), port};
}

}  // namespace opsai::api

// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>

#include "opsai/storage/storage.hpp"

namespace opsai::api {

struct ServiceConfig {
  storage::StorageConfig storage;
  std::string bind_addr = "127.0.0.1:8080";
  std::filesystem::path levels_dir = OPSAI_DEFAULT_LEVELS_DIR;
  double stall_p = 0.25;
  std::int64_t verify_seeds = 64;
  std::size_t peer_k = 5;
  double support_theta = 0.5;
  std::string cors_origin = "*";

  /// Throws ValidationError for out-of-range values.
  void validate() const;
};

/// Recognized setting names, shared by config files (JSON object keys),
/// command-line overrides and environment variables (`OPSAI_` + upper case):
///   storage_root storage_backend storage_endpoint index_backend bind_addr
///   levels_dir stall_p verify_seeds peer_k support_theta cors_origin
///
/// Precedence: `overrides` > environment > config file > defaults.
using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
ServiceConfig resolve_config(const std::optional<std::filesystem::path>& config_file,
                             const std::map<std::string, std::string>& overrides,
                             const EnvLookup& env);

/// Reads the process environment.
EnvLookup process_env();

/// Splits `host:port`. Throws ValidationError when malformed.
std::pair<std::string, int> split_host_port(const std::string& addr);

}  // namespace opsai::api

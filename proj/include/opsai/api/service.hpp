// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "opsai/analytics/analytics.hpp"
#include "opsai/game/catalog.hpp"
#include "opsai/game/engine.hpp"
#include "opsai/storage/storage.hpp"

namespace opsai::api {

struct Request {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
};

struct Response {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

/// Error codes the service can return, with their HTTP statuses.
const std::map<std::string, int>& error_statuses();

struct ServiceOptions {
  game::SimConfig sim;  // server-wide simulation defaults
  analytics::AnalyticsConfig analytics;
  std::function<std::int64_t()> now_ms;  // wall clock in epoch milliseconds
};

/// Transport-neutral request handler. Every request is served from storage
/// alone, so any number of instances may share one storage root.
class Service {
 public:
  Service(storage::Storage& storage, const game::LevelCatalog& levels,
          ServiceOptions options);

  Response handle(const Request& request);

 private:
  Response route(const Request& request);

  Response create_session(const Request& r);
  Response append_events(const std::string& id, const Request& r);
  Response finalize(const std::string& id);
  Response query_sessions(const Request& r);
  Response get_session(const std::string& id);
  Response analytics(const std::string& id, const Request& r);
  Response simulate(const Request& r);
  Response verify(const Request& r);
  Response get_level(const std::string& id);

  storage::Storage& storage_;
  const game::LevelCatalog& levels_;
  ServiceOptions options_;
};

/// JSON forms used on the wire.
Json to_json(const game::RunResult& result);
Json to_json(const game::VerifyResult& result);

/// `{"semaphores": [edge...], "signals": {node: [edge...]}}` applied to the
/// level's initial board. Throws ActionRejected for illegal placements.
game::BoardState placements_from_json(const game::LevelSpec& level, const Json& j);
Json placements_to_json(const game::BoardState& board);

/// Reads optional overrides {stall_probability, max_ticks, deadlock_window,
/// verify_seeds, base_seed} on top of `base`.
game::SimConfig sim_config_from_json(const Json& j, game::SimConfig base);

/// Percent-decoding and the `%`-escape used for path segments.
std::string url_encode(std::string_view text);

}  // namespace opsai::api

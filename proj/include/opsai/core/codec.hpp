// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "opsai/core/json_util.hpp"
#include "opsai/core/model.hpp"

namespace opsai {

// JSON mappings of the Store types. `path` is the location prefix used in
// error messages.
Json to_json(const PlayerAction& action);
Json to_json(const SystemEvent& event);
Json to_json(const GameEvent& event);
Json to_json(const game::BoardState& state);
Json to_json(const BoardSnapshot& snapshot);
Json to_json(const SessionHeader& header);
Json to_json(const DerivedMetrics& metrics);
Json to_json(const DerivedSection& derived);
Json to_json(const SessionLog& log);

PlayerAction action_from_json(const Json& j, const std::string& path);
SystemEvent system_event_from_json(const Json& j, const std::string& path);
GameEvent event_from_json(const Json& j, const std::string& path);
game::BoardState board_from_json(const Json& j, const std::string& path);
SessionHeader header_from_json(const Json& j, const std::string& path);
DerivedMetrics metrics_from_json(const Json& j, const std::string& path);

struct Finding {
  std::string field;
  std::string message;
  std::optional<std::int64_t> seq;

  bool operator==(const Finding&) const = default;
};

/// Every violated SessionLog invariant, in document order. Empty iff valid.
std::vector<Finding> validate_session(const SessionLog& log);
/// Shape checks for a single event (action fields, detail kind).
std::vector<Finding> validate_event(const GameEvent& event);

/// Canonical wire bytes. Throws ValidationError for the first finding of
/// validate_session.
std::string serialize_session(const SessionLog& log);

/// Parses wire bytes. Throws ParseError (with byte offset) on malformed
/// JSON and ValidationError on schema or invariant violations, including an
/// unknown schema_version.
SessionLog deserialize_session(std::string_view bytes);

/// One event in canonical form, without trailing newline (an NDJSON line).
std::string serialize_event(const GameEvent& event);
GameEvent parse_event(std::string_view line);

std::string canonical_state_bytes(const game::BoardState& state);
std::uint64_t canonical_state_hash(const game::BoardState& state);

}  // namespace opsai

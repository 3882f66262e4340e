// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#include "opsai/storage/reference.hpp"

#include "opsai/core/error.hpp"
#include "opsai/core/fnv.hpp"

namespace opsai::storage {

namespace jf = json_field;

Json to_json(const ReferenceEntry& e) {
  return Json{
      {"session_id", e.session_id},
      {"object_key", e.object_key},
      {"player_id", e.player_id},
      {"level_id", e.level_id},
      {"started_at", e.started_at},
      {"duration_ms", e.duration_ms},
      {"solved", e.solved},
      {"action_count", e.action_count},
      {"test_run_count", e.test_run_count},
      {"trace_signature", hash_to_hex(e.trace_signature)},
      {"action_token_digest", e.action_token_digest},
      {"schema_version", e.schema_version},
  };
}

ReferenceEntry reference_from_json(const Json& j) {
  const std::string path = "reference";
  jf::expect_object(j, path);
  ReferenceEntry e;
  e.session_id = jf::string(j, "session_id", path);
  e.object_key = jf::string(j, "object_key", path);
  e.player_id = jf::string(j, "player_id", path);
  e.level_id = jf::string(j, "level_id", path);
  e.started_at = jf::int64(j, "started_at", path);
  e.duration_ms = jf::int64(j, "duration_ms", path);
  e.solved = jf::boolean(j, "solved", path);
  e.action_count = jf::int64(j, "action_count", path);
  e.test_run_count = jf::int64(j, "test_run_count", path);
  e.trace_signature = hash_from_hex(jf::string(j, "trace_signature", path));
  e.action_token_digest = jf::string(j, "action_token_digest", path);
  e.schema_version = static_cast<int>(jf::int64(j, "schema_version", path));
  return e;
}

void QueryFilter::validate() const {
  if (!has_clause() && !all) {
    throw ValidationError("filter", "a query needs at least one clause or all=true");
  }
  if (limit < 1) throw ValidationError("limit", "limit must be >= 1");
  auto check_range = [](const Range& r, const char* name) {
    if (r.min && r.max && *r.min > *r.max) {
      throw ValidationError(name, std::string(name) + " range is inverted");
    }
  };
  check_range(started_at, "started_at");
  check_range(action_count, "action_count");
}

bool QueryFilter::matches(const ReferenceEntry& e) const {
  return (!player_id || e.player_id == *player_id) &&
         (!level_id || e.level_id == *level_id) &&
         (!solved || e.solved == *solved) && started_at.contains(e.started_at) &&
         action_count.contains(e.action_count);
}

bool newer_first(const ReferenceEntry& a, const ReferenceEntry& b) {
  if (a.started_at != b.started_at) return a.started_at > b.started_at;
  return a.session_id < b.session_id;
}

}  // namespace opsai::storage

// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "opsai/core/json_util.hpp"
#include "opsai/core/model.hpp"

namespace opsai::storage {

/// Lightweight summary of one finalized session. Every field has a bounded
/// size and can be recomputed from the stored log.
struct ReferenceEntry {
  std::string session_id;
  std::string object_key;
  std::string player_id;
  std::string level_id;
  std::int64_t started_at = 0;
  std::int64_t duration_ms = 0;
  bool solved = false;
  std::int64_t action_count = 0;
  std::int64_t test_run_count = 0;
  std::uint64_t trace_signature = 0;
  // Per-kind action counts, e.g. "P3G1L1T2S1"; zero counts are omitted.
  std::string action_token_digest;
  int schema_version = kSchemaVersion;

  bool operator==(const ReferenceEntry&) const = default;
};

Json to_json(const ReferenceEntry& entry);
ReferenceEntry reference_from_json(const Json& j);

/// Inclusive bounds; either side may be open.
struct Range {
  std::optional<std::int64_t> min;
  std::optional<std::int64_t> max;

  bool operator==(const Range&) const = default;
  bool contains(std::int64_t v) const {
    return (!min || v >= *min) && (!max || v <= *max);
  }
  bool empty() const { return !min && !max; }
};

/// Criteria query over reference entries. Results are ordered by
/// started_at descending, then session_id ascending.
struct QueryFilter {
  std::optional<std::string> player_id;
  std::optional<std::string> level_id;
  std::optional<bool> solved;
  Range started_at;
  Range action_count;
  std::int64_t limit = 100;
  bool all = false;

  bool operator==(const QueryFilter&) const = default;

  bool has_clause() const {
    return player_id || level_id || solved || !started_at.empty() ||
           !action_count.empty();
  }
  /// Throws ValidationError when no clause is set without `all`, or when
  /// limit < 1.
  void validate() const;
  bool matches(const ReferenceEntry& entry) const;
};

/// Result ordering: newer first, then by id.
bool newer_first(const ReferenceEntry& a, const ReferenceEntry& b);

}  // namespace opsai::storage

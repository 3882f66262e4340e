// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "opsai/core/json_util.hpp"
#include "opsai/storage/kv.hpp"
#include "opsai/storage/reference.hpp"

namespace opsai::storage {

/// Reference entries plus the secondary access paths used by queries.
///
/// Key layout:
///   ref/{id}                              entry
///   all/{inv}/{id}                        entry
///   by_level/{level}/{inv}/{id}           entry
///   by_player/{player}/{inv}/{id}         entry
///   quarantine/{id}                       reason
/// where {inv} is the zero-padded complement of started_at, so ascending key
/// order is newest first. Level and player ids are escaped so they never
/// contain `/`.
class ReferenceIndex {
 public:
  explicit ReferenceIndex(KvStore& kv) : kv_(kv) {}

  /// Inserts or replaces the entry and all its secondary keys in one batch.
  void put(const ReferenceEntry& entry);
  std::optional<ReferenceEntry> get(const std::string& session_id);
  /// Reads only index keys.
  std::vector<ReferenceEntry> query(const QueryFilter& filter);
  /// Every entry in session id order.
  std::vector<ReferenceEntry> entries();

  void quarantine(const std::string& session_id, const Json& reason);
  std::optional<Json> quarantine_reason(const std::string& session_id);
  std::vector<std::string> quarantined();

 private:
  KvStore& kv_;
};

/// Escapes `%` and `/` so the text is a single key component.
std::string escape_key_component(const std::string& text);

}  // namespace opsai::storage

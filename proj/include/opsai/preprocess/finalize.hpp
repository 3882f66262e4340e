// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "opsai/game/catalog.hpp"
#include "opsai/storage/reference.hpp"
#include "opsai/storage/storage.hpp"

namespace opsai::preprocess {

/// Compacts a session's segments into its canonical log and writes the
/// reference entry.
class Finalizer {
 public:
  Finalizer(storage::Storage& storage, const game::LevelCatalog& levels)
      : storage_(storage), levels_(levels) {}

  /// Idempotent: once a session is finalized, later calls return the stored
  /// entry and write nothing.
  ///
  /// Throws NotFoundError for unknown sessions, ConflictError
  /// `empty_session` when nothing was appended, and IntegrityError
  /// `integrity_error` (with the first bad seq) when the events fail
  /// validation or replay. Integrity failures quarantine the session.
  storage::ReferenceEntry finalize(const std::string& session_id);

 private:
  [[noreturn]] void quarantine(const std::string& session_id,
                               const std::string& detail,
                               std::optional<std::int64_t> seq);

  storage::Storage& storage_;
  const game::LevelCatalog& levels_;
};

struct ReindexDiff {
  std::string session_id;
  // Entry fields that differed, `missing` when no entry existed, `derived`
  // when the embedded metrics disagree with the events.
  std::vector<std::string> fields;

  bool operator==(const ReindexDiff&) const = default;
};

struct ReindexReport {
  std::int64_t scanned = 0;
  std::vector<ReindexDiff> diffs;
};

/// Recomputes every reference entry from the stored logs. Differences are
/// reported and, when `repair` is set, the recomputed entry is written.
ReindexReport reindex(storage::Storage& storage, bool repair = true);

/// Evaluates `filter` by reading every stored log. Same results and order
/// as ReferenceIndex::query; used as the baseline for index lookups.
std::vector<storage::ReferenceEntry> full_scan_query(
    storage::LogStore& logs, const storage::QueryFilter& filter);

}  // namespace opsai::preprocess

// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#include "opsai/preprocess/finalize.hpp"

#include <algorithm>

#include "opsai/core/codec.hpp"
#include "opsai/core/error.hpp"
#include "opsai/game/replay.hpp"
#include "opsai/preprocess/metrics.hpp"

namespace opsai::preprocess {

using storage::ReferenceEntry;

void Finalizer::quarantine(const std::string& id, const std::string& detail,
                           std::optional<std::int64_t> seq) {
  Json reason{{"code", "integrity_error"}, {"detail", detail}};
  if (seq) reason["seq"] = *seq;
  storage_.index().quarantine(id, reason);
  throw IntegrityError("integrity_error", detail, seq);
}

ReferenceEntry Finalizer::finalize(const std::string& id) {
  auto& logs = storage_.logs();
  auto& index = storage_.index();

  if (auto entry = index.get(id)) return *entry;
  if (auto reason = index.quarantine_reason(id)) {
    std::optional<std::int64_t> seq;
    if (reason->contains("seq")) seq = (*reason)["seq"].get<std::int64_t>();
    throw IntegrityError("integrity_error",
                         "session is quarantined: " +
                             reason->value("detail", std::string()),
                         seq);
  }
  // A previous attempt may have stored the log and stopped before the entry.
  if (logs.has_log(id)) {
    auto entry = make_reference(logs.get_log(id));
    index.put(entry);
    return entry;
  }

  SessionLog log;
  log.header = logs.header(id);
  auto before = logs.read_segments(id);
  if (before.batches.empty()) {
    throw ConflictError("empty_session", "session " + id + " has no events");
  }
  logs.seal(id);
  for (auto& batch : logs.read_segments(id).batches) {
    log.events.insert(log.events.end(), batch.begin(), batch.end());
  }

  auto findings = validate_session(log);
  if (!findings.empty()) {
    quarantine(id, findings.front().message, findings.front().seq);
  }
  const auto* level = levels_.find(log.header.level_id);
  if (level == nullptr) {
    quarantine(id, "unknown level '" + log.header.level_id + "'", std::nullopt);
  }
  try {
    log.snapshots = game::replay_actions(*level, log.events).snapshots;
  } catch (const IntegrityError& e) {
    quarantine(id, e.what(), e.seq());
  }

  log.derived = DerivedSection{compute_metrics(log), trace_signature(log), true};
  log.finalized = true;
  try {
    logs.put_log(log);
  } catch (const ConflictError&) {
    // A concurrent finalizer stored the same bytes first.
    log = logs.get_log(id);
  }
  auto entry = make_reference(log);
  index.put(entry);
  return entry;
}

namespace {

std::vector<std::string> entry_diff(const ReferenceEntry& a, const ReferenceEntry& b) {
  std::vector<std::string> out;
  auto cmp = [&](const char* name, const auto& x, const auto& y) {
    if (x != y) out.emplace_back(name);
  };
  cmp("object_key", a.object_key, b.object_key);
  cmp("player_id", a.player_id, b.player_id);
  cmp("level_id", a.level_id, b.level_id);
  cmp("started_at", a.started_at, b.started_at);
  cmp("duration_ms", a.duration_ms, b.duration_ms);
  cmp("solved", a.solved, b.solved);
  cmp("action_count", a.action_count, b.action_count);
  cmp("test_run_count", a.test_run_count, b.test_run_count);
  cmp("trace_signature", a.trace_signature, b.trace_signature);
  cmp("action_token_digest", a.action_token_digest, b.action_token_digest);
  cmp("schema_version", a.schema_version, b.schema_version);
  return out;
}

}  // namespace

ReindexReport reindex(storage::Storage& storage, bool repair) {
  ReindexReport report;
  for (const auto& id : storage.logs().finalized_ids()) {
    ++report.scanned;
    auto log = storage.logs().get_log(id);
    auto fresh = make_reference(log);
    ReindexDiff diff{id, {}};
    if (auto stored = storage.index().get(id)) {
      diff.fields = entry_diff(*stored, fresh);
    } else {
      diff.fields.push_back("missing");
    }
    DerivedSection expected{compute_metrics(log), trace_signature(log), true};
    if (!log.derived || log.derived->metrics != expected.metrics ||
        log.derived->trace_signature != expected.trace_signature) {
      diff.fields.push_back("derived");
    }
    if (!diff.fields.empty()) {
      if (repair) storage.index().put(fresh);
      report.diffs.push_back(std::move(diff));
    }
  }
  return report;
}

std::vector<ReferenceEntry> full_scan_query(storage::LogStore& logs,
                                            const storage::QueryFilter& filter) {
  filter.validate();
  std::vector<ReferenceEntry> out;
  for (const auto& id : logs.finalized_ids()) {
    auto entry = make_reference(logs.get_log(id));
    if (filter.matches(entry)) out.push_back(std::move(entry));
  }
  std::sort(out.begin(), out.end(), storage::newer_first);
  if (static_cast<std::int64_t>(out.size()) > filter.limit) {
    out.resize(static_cast<std::size_t>(filter.limit));
  }
  return out;
}

}  // namespace opsai::preprocess

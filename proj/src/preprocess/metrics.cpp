// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#include "opsai/preprocess/metrics.hpp"

#include <algorithm>

#include "opsai/core/fnv.hpp"
#include "opsai/storage/log_store.hpp"

namespace opsai::preprocess {

DerivedMetrics compute_metrics(const SessionLog& log) {
  DerivedMetrics m;
  for (auto kind : kAllActionKinds) m.action_counts_by_kind[kind] = 0;
  for (const auto& e : log.events) {
    if (const auto* a = e.action()) {
      ++m.action_count;
      ++m.action_counts_by_kind[a->kind];
      if (a->kind == ActionKind::StartTest) {
        ++m.test_run_count;
        if (!m.first_test_seq) m.first_test_seq = e.seq;
      }
    } else if (const auto* s = e.system();
               s->kind == SystemEventKind::SolutionVerified) {
      const auto& d = std::get<VerifiedDetail>(s->detail);
      if (d.seeds_run > 0 && d.seeds_passed == d.seeds_run) m.solved = true;
    }
  }
  if (!log.events.empty()) {
    m.duration_ms = std::max<std::int64_t>(
        0, log.events.back().t_ms - log.header.started_at);
  }
  m.board_state_trajectory_len = static_cast<std::int64_t>(log.snapshots.size());
  if (!log.snapshots.empty()) {
    for (const auto& [edge, state] : log.snapshots.back().state.semaphores) {
      m.final_placements.insert(edge);
    }
  }
  return m;
}

std::uint64_t trace_signature(const std::vector<BoardSnapshot>& snapshots) {
  Fnv1a64 h;
  for (const auto& s : snapshots) h.update_be64(s.state_hash);
  return h.digest();
}

std::string action_tokens(const SessionLog& log) {
  std::string out;
  for (const auto& e : log.events) {
    if (const auto* a = e.action()) out += action_token(a->kind);
  }
  return out;
}

std::string token_digest(const DerivedMetrics& metrics) {
  std::string out;
  for (auto kind : kAllActionKinds) {
    auto n = metrics.count(kind);
    if (n > 0) {
      out += action_token(kind);
      out += std::to_string(n);
    }
  }
  return out;
}

storage::ReferenceEntry make_reference(const SessionLog& log) {
  auto m = compute_metrics(log);
  storage::ReferenceEntry e;
  e.session_id = log.header.session_id;
  e.object_key = storage::LogStore::log_key(log.header.session_id);
  e.player_id = log.header.player_id;
  e.level_id = log.header.level_id;
  e.started_at = log.header.started_at;
  e.duration_ms = m.duration_ms;
  e.solved = m.solved;
  e.action_count = m.action_count;
  e.test_run_count = m.test_run_count;
  e.trace_signature = trace_signature(log);
  e.action_token_digest = token_digest(m);
  e.schema_version = log.header.schema_version;
  return e;
}

}  // namespace opsai::preprocess

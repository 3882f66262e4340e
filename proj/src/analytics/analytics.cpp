// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#include "opsai/analytics/analytics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "opsai/core/codec.hpp"
#include "opsai/core/error.hpp"
#include "opsai/core/fnv.hpp"
#include "opsai/preprocess/metrics.hpp"

namespace opsai::analytics {

using storage::ReferenceEntry;

std::size_t levenshtein(std::string_view a, std::string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double sequence_distance(std::string_view a, std::string_view b) {
  auto longest = std::max(a.size(), b.size());
  if (longest == 0) return 0.0;
  return static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
}

namespace {

std::array<std::int64_t, 256> digest_counts(std::string_view digest) {
  std::array<std::int64_t, 256> counts{};
  std::size_t i = 0;
  while (i < digest.size()) {
    auto sym = static_cast<unsigned char>(digest[i++]);
    std::int64_t n = 0;
    while (i < digest.size() && digest[i] >= '0' && digest[i] <= '9') {
      n = n * 10 + (digest[i++] - '0');
    }
    counts[sym] += n;
  }
  return counts;
}

}  // namespace

std::size_t digest_distance_bound(std::string_view a, std::string_view b) {
  // Each edit removes at most one surplus symbol from each side.
  auto ca = digest_counts(a);
  auto cb = digest_counts(b);
  std::int64_t surplus_a = 0, surplus_b = 0;
  for (std::size_t s = 0; s < 256; ++s) {
    if (ca[s] > cb[s]) surplus_a += ca[s] - cb[s];
    if (cb[s] > ca[s]) surplus_b += cb[s] - ca[s];
  }
  return static_cast<std::size_t>(std::max(surplus_a, surplus_b));
}

std::string_view to_string(RecommendationKind kind) noexcept {
  switch (kind) {
    case RecommendationKind::PlaceSemaphoreHint: return "PlaceSemaphoreHint";
    case RecommendationKind::LinkSignalHint: return "LinkSignalHint";
    case RecommendationKind::TestMoreHint: return "TestMoreHint";
  }
  return "?";
}

std::string_view to_string(PanelKind kind) noexcept {
  switch (kind) {
    case PanelKind::action_timeline: return "action_timeline";
    case PanelKind::trace_overlay: return "trace_overlay";
    case PanelKind::peer_comparison: return "peer_comparison";
    case PanelKind::metric_cards: return "metric_cards";
  }
  return "?";
}

Json to_json(const SimilarityResult& r) {
  return Json{{"peer_session_id", r.peer_session_id},
              {"peer_player_id", r.peer_player_id},
              {"distance", r.distance},
              {"shared_level", r.shared_level}};
}

Json to_json(const Recommendation& r) {
  Json j{{"kind", to_string(r.kind)}, {"support", r.support}, {"message", r.message}};
  if (r.target) j["target"] = *r.target;
  return j;
}

Json to_json(const ReflectivePrompt& p) {
  Json values = Json::object();
  for (const auto& [k, v] : p.trigger_values) values[k] = v;
  return Json{{"rule_id", p.rule_id}, {"message", p.message}, {"trigger_values", values}};
}

Json to_json(const AnalyticsPayload& p) {
  Json peers = Json::array(), recs = Json::array(), prompts = Json::array(),
       panels = Json::array();
  for (const auto& r : p.peers) peers.push_back(to_json(r));
  for (const auto& r : p.recommendations) recs.push_back(to_json(r));
  for (const auto& r : p.prompts) prompts.push_back(to_json(r));
  for (const auto& panel : p.viz.panels) {
    panels.push_back({{"panel_kind", to_string(panel.kind)}, {"data", panel.data}});
  }
  return Json{{"payload_version", kPayloadVersion},
              {"session_id", p.session_id},
              {"generated_at", p.generated_at},
              {"metrics", opsai::to_json(p.metrics)},
              {"peers", peers},
              {"recommendations", recs},
              {"prompts", prompts},
              {"viz", {{"panels", panels}}}};
}

std::vector<ReflectivePrompt> prompts(const DerivedMetrics& m) {
  std::vector<ReflectivePrompt> out;
  const std::int64_t solved = m.solved ? 1 : 0;
  if (m.test_run_count == 0 && !m.solved) {
    out.push_back({"R1",
                   "You have not run a test yet. What do you expect the arrows to "
                   "do, and how could a test check that?",
                   {{"test_run_count", m.test_run_count}, {"solved", solved}}});
  }
  if (m.test_run_count >= 5 && m.solved) {
    out.push_back({"R2",
                   "You tested " + std::to_string(m.test_run_count) +
                       " times before solving. Which test told you the most?",
                   {{"test_run_count", m.test_run_count}, {"solved", solved}}});
  }
  auto removals = m.count(ActionKind::RemoveSemaphore);
  if (removals >= 3) {
    out.push_back({"R3",
                   "You removed semaphores " + std::to_string(removals) +
                       " times. What made you change your plan each time?",
                   {{"remove_semaphore_count", removals}}});
  }
  return out;
}

// Service --------------------------------------------------------------------

namespace {

DerivedMetrics metrics_of(const SessionLog& log) {
  return log.derived ? log.derived->metrics : preprocess::compute_metrics(log);
}

bool ranks_before(double da, const ReferenceEntry& a, double db, const ReferenceEntry& b) {
  if (da != db) return da < db;
  return storage::newer_first(a, b);
}

std::string percent(double support) {
  return std::to_string(static_cast<long>(std::lround(support * 100.0))) + "%";
}

}  // namespace

ReferenceEntry AnalyticsService::finalized_entry(const std::string& id) {
  if (auto entry = storage_.index().get(id)) return *entry;
  storage_.logs().header(id);  // NotFoundError for unknown ids
  throw ConflictError("not_finalized", "session " + id + " is not finalized; call finalize first");
}

std::vector<ReferenceEntry> AnalyticsService::level_entries(
    const std::string& level_id, std::optional<bool> solved) {
  storage::QueryFilter f;
  f.level_id = level_id;
  f.solved = solved;
  f.limit = std::numeric_limits<std::int64_t>::max();
  return storage_.index().query(f);
}

std::vector<SimilarityResult> AnalyticsService::find_peers(const std::string& id,
                                                           std::size_t k) {
  auto subject = finalized_entry(id);
  if (k == 0) return {};
  auto tokens = preprocess::action_tokens(storage_.logs().get_log(id));

  struct Scored {
    double distance;
    ReferenceEntry entry;
  };
  std::vector<Scored> top;
  for (auto& cand : level_entries(subject.level_id, std::nullopt)) {
    if (cand.player_id == subject.player_id) continue;
    if (top.size() == k) {
      // Skip candidates that cannot beat the current k-th peer.
      auto longest = std::max<std::int64_t>(subject.action_count, cand.action_count);
      if (longest > 0) {
        double bound = static_cast<double>(digest_distance_bound(
                           subject.action_token_digest, cand.action_token_digest)) /
                       static_cast<double>(longest);
        if (bound > top.back().distance) continue;
      }
    }
    auto other = preprocess::action_tokens(storage_.logs().get_log(cand.session_id));
    double d = sequence_distance(tokens, other);
    auto pos = std::find_if(top.begin(), top.end(), [&](const Scored& s) {
      return ranks_before(d, cand, s.distance, s.entry);
    });
    if (pos == top.end() && top.size() == k) continue;
    top.insert(pos, Scored{d, std::move(cand)});
    if (top.size() > k) top.pop_back();
  }

  std::vector<SimilarityResult> out;
  for (auto& s : top) {
    out.push_back({s.entry.session_id, s.entry.player_id, s.distance, s.entry.level_id});
  }
  return out;
}

std::map<std::string, double> AnalyticsService::placement_frequency(
    const std::string& level_id) {
  auto solved = level_entries(level_id, true);
  std::map<std::string, std::int64_t> counts;
  for (const auto& e : solved) {
    for (const auto& edge : metrics_of(storage_.logs().get_log(e.session_id)).final_placements) {
      ++counts[edge];
    }
  }
  std::map<std::string, double> out;
  for (const auto& [edge, n] : counts) {
    out[edge] = static_cast<double>(n) / static_cast<double>(solved.size());
  }
  return out;
}

std::vector<Recommendation> AnalyticsService::recommend(const std::string& id) {
  auto subject = finalized_entry(id);
  if (subject.solved) return {};
  auto m = metrics_of(storage_.logs().get_log(id));

  std::vector<Recommendation> out;
  for (const auto& [edge, support] : placement_frequency(subject.level_id)) {
    if (support >= config_.support_theta && !m.final_placements.contains(edge)) {
      out.push_back({RecommendationKind::PlaceSemaphoreHint, edge, support,
                     "Players who solved this level put a semaphore on edge " + edge +
                         " in " + percent(support) + " of their solutions."});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.support > b.support;
  });
  if (m.test_run_count == 0) {
    auto solved = level_entries(subject.level_id, true);
    std::size_t testers = 0;
    for (const auto& e : solved) testers += e.test_run_count > 0 ? 1 : 0;
    double support = solved.empty() ? 0.0
                                    : static_cast<double>(testers) /
                                          static_cast<double>(solved.size());
    out.push_back({RecommendationKind::TestMoreHint, std::nullopt, support,
                   "Run a test to watch how the arrows interleave before you submit."});
  }
  return out;
}

AnalyticsPayload AnalyticsService::build_payload(const std::string& id,
                                                 std::optional<std::size_t> k,
                                                 std::int64_t generated_at) {
  finalized_entry(id);
  auto log = storage_.logs().get_log(id);

  AnalyticsPayload p;
  p.session_id = id;
  p.generated_at = generated_at;
  p.metrics = metrics_of(log);
  p.peers = find_peers(id, k.value_or(config_.peer_k));
  p.recommendations = recommend(id);
  p.prompts = prompts(p.metrics);

  Json timeline = Json::array();
  for (const auto& e : log.events) {
    if (const auto* a = e.action()) {
      timeline.push_back({{"seq", e.seq},
                          {"t_ms", e.t_ms},
                          {"token", std::string(1, action_token(a->kind))}});
    }
  }
  p.viz.panels.push_back({PanelKind::action_timeline, Json{{"actions", timeline}}});
  if (log.snapshots.size() >= 2) {
    Json hashes = Json::array();
    for (const auto& s : log.snapshots) hashes.push_back(hash_to_hex(s.state_hash));
    Json peer_ids = Json::array();
    if (!p.peers.empty()) peer_ids.push_back(p.peers.front().peer_session_id);
    p.viz.panels.push_back({PanelKind::trace_overlay,
                            Json{{"state_hashes", hashes}, {"peer_session_ids", peer_ids}}});
  }
  if (!p.peers.empty()) {
    Json ids = Json::array();
    for (const auto& r : p.peers) ids.push_back(r.peer_session_id);
    p.viz.panels.push_back({PanelKind::peer_comparison, Json{{"session_ids", ids}}});
  }
  p.viz.panels.push_back({PanelKind::metric_cards, opsai::to_json(p.metrics)});
  return p;
}

}  // namespace opsai::analytics

// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "opsai/core/json_util.hpp"
#include "opsai/core/model.hpp"
#include "opsai/storage/storage.hpp"

namespace opsai::analytics {

inline constexpr int kPayloadVersion = 1;

/// Unit-cost edit distance.
std::size_t levenshtein(std::string_view a, std::string_view b);

/// levenshtein / max(|a|, |b|); 0 when both are empty.
double sequence_distance(std::string_view a, std::string_view b);

/// Lower bound on the edit distance of two token strings known only by
/// their per-kind count digests ("P3T2").
std::size_t digest_distance_bound(std::string_view a, std::string_view b);

struct SimilarityResult {
  std::string peer_session_id;
  std::string peer_player_id;
  double distance = 0.0;
  std::string shared_level;

  bool operator==(const SimilarityResult&) const = default;
};

enum class RecommendationKind { PlaceSemaphoreHint, LinkSignalHint, TestMoreHint };
std::string_view to_string(RecommendationKind kind) noexcept;

struct Recommendation {
  RecommendationKind kind = RecommendationKind::TestMoreHint;
  std::optional<std::string> target;
  double support = 0.0;
  std::string message;

  bool operator==(const Recommendation&) const = default;
};

struct ReflectivePrompt {
  std::string rule_id;
  std::string message;
  std::map<std::string, std::int64_t> trigger_values;

  bool operator==(const ReflectivePrompt&) const = default;
};

enum class PanelKind { action_timeline, trace_overlay, peer_comparison, metric_cards };
std::string_view to_string(PanelKind kind) noexcept;

struct Panel {
  PanelKind kind = PanelKind::action_timeline;
  Json data;

  bool operator==(const Panel&) const = default;
};

struct VisualizationGuide {
  std::vector<Panel> panels;

  bool operator==(const VisualizationGuide&) const = default;
};

struct AnalyticsPayload {
  std::string session_id;
  DerivedMetrics metrics;
  std::vector<SimilarityResult> peers;
  std::vector<Recommendation> recommendations;
  std::vector<ReflectivePrompt> prompts;
  VisualizationGuide viz;
  std::int64_t generated_at = 0;

  bool operator==(const AnalyticsPayload&) const = default;
};

Json to_json(const SimilarityResult& r);
Json to_json(const Recommendation& r);
Json to_json(const ReflectivePrompt& p);
Json to_json(const AnalyticsPayload& p);

/// Fixed rule table: R1 no-testing, R2 persistence, R3 strategy-revision.
std::vector<ReflectivePrompt> prompts(const DerivedMetrics& metrics);

struct AnalyticsConfig {
  std::size_t peer_k = 5;
  double support_theta = 0.5;
};

/// Analytics over stored sessions. Holds no state of its own; results depend
/// only on storage contents and arguments.
class AnalyticsService {
 public:
  AnalyticsService(storage::Storage& storage, AnalyticsConfig config = {})
      : storage_(storage), config_(config) {}

  /// Nearest sessions of other players on the same level, ascending
  /// distance, ties by newer first then session id. Throws NotFoundError
  /// for unknown sessions and ConflictError `not_finalized` for live ones.
  std::vector<SimilarityResult> find_peers(const std::string& session_id,
                                           std::size_t k);

  /// Edge id -> fraction of solved sessions on the level whose final board
  /// has a semaphore there.
  std::map<std::string, double> placement_frequency(const std::string& level_id);

  std::vector<Recommendation> recommend(const std::string& session_id);

  AnalyticsPayload build_payload(const std::string& session_id,
                                 std::optional<std::size_t> k,
                                 std::int64_t generated_at);

 private:
  storage::ReferenceEntry finalized_entry(const std::string& session_id);
  std::vector<storage::ReferenceEntry> level_entries(const std::string& level_id,
                                                     std::optional<bool> solved);

  storage::Storage& storage_;
  AnalyticsConfig config_;
};

}  // namespace opsai::analytics

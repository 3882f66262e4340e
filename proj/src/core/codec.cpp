// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#include "opsai/core/codec.hpp"

#include <algorithm>
#include <set>

#include "opsai/core/base64.hpp"
#include "opsai/core/error.hpp"
#include "opsai/core/fnv.hpp"
#include "opsai/core/ids.hpp"

namespace opsai {

namespace jf = json_field;
using game::BoardState;

namespace {

std::string at(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

Json incident_json(const IncidentDetail& d) {
  return Json{{"node_id", d.node_id}, {"arrow_ids", d.arrow_ids},
              {"tick", d.tick}};
}

std::vector<std::string> string_list(const Json& obj, std::string_view key,
                                     const std::string& path) {
  const Json& arr = jf::require(obj, key, path);
  std::string field = path + "." + std::string(key);
  jf::expect_array(arr, field);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_string()) {
      throw ValidationError(at(field, i), at(field, i) + ": expected string");
    }
    out.push_back(arr[i].get<std::string>());
  }
  return out;
}

}  // namespace

Json to_json(const PlayerAction& action) {
  Json j{{"kind", to_string(action.kind)}};
  if (action.target) j["target"] = *action.target;
  if (action.link) {
    j["link"] = Json{{"signal", action.link->signal_node},
                     {"semaphore", action.link->semaphore_edge}};
  }
  if (action.seed) j["seed"] = *action.seed;
  return j;
}

PlayerAction action_from_json(const Json& j, const std::string& path) {
  PlayerAction a;
  a.kind = parse_action_kind(jf::string(j, "kind", path), path + ".kind");
  a.target = jf::opt_string(j, "target", path);
  if (j.contains("link") && !j.at("link").is_null()) {
    const std::string lp = path + ".link";
    const Json& l = j.at("link");
    a.link = SignalLink{jf::string(l, "signal", lp),
                        jf::string(l, "semaphore", lp)};
  }
  a.seed = jf::opt_uint64(j, "seed", path);
  return a;
}

Json to_json(const SystemEvent& event) {
  Json detail = std::visit(
      [](const auto& d) -> Json {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, TestStartedDetail>) {
          return Json{{"seed", d.seed}};
        } else if constexpr (std::is_same_v<T, TestResultDetail>) {
          return Json{{"seed", d.seed},
                      {"outcome", game::to_string(d.outcome)},
                      {"ticks", d.ticks}};
        } else if constexpr (std::is_same_v<T, IncidentDetail>) {
          return incident_json(d);
        } else if constexpr (std::is_same_v<T, TimeoutDetail>) {
          return Json{{"tick", d.tick}};
        } else if constexpr (std::is_same_v<T, DeliveredDetail>) {
          return Json{{"arrow_id", d.arrow_id},
                      {"node_id", d.node_id},
                      {"tick", d.tick}};
        } else {
          return Json{{"seeds_run", d.seeds_run},
                      {"seeds_passed", d.seeds_passed}};
        }
      },
      event.detail);
  return Json{{"kind", to_string(event.kind)}, {"detail", std::move(detail)}};
}

SystemEvent system_event_from_json(const Json& j, const std::string& path) {
  SystemEvent e;
  e.kind = parse_system_event_kind(jf::string(j, "kind", path), path + ".kind");
  const std::string dp = path + ".detail";
  const Json& d = jf::require(j, "detail", path);
  jf::expect_object(d, dp);
  switch (e.kind) {
    case SystemEventKind::TestStarted:
      e.detail = TestStartedDetail{jf::uint64(d, "seed", dp)};
      break;
    case SystemEventKind::TestResult:
      e.detail = TestResultDetail{
          jf::uint64(d, "seed", dp),
          game::parse_outcome(jf::string(d, "outcome", dp), dp + ".outcome"),
          jf::int64(d, "ticks", dp)};
      break;
    case SystemEventKind::Collision:
    case SystemEventKind::WrongExit:
      e.detail = IncidentDetail{jf::string(d, "node_id", dp),
                                string_list(d, "arrow_ids", dp),
                                jf::int64(d, "tick", dp)};
      break;
    case SystemEventKind::DeadlockTimeout:
      e.detail = TimeoutDetail{jf::int64(d, "tick", dp)};
      break;
    case SystemEventKind::Delivered:
      e.detail = DeliveredDetail{jf::string(d, "arrow_id", dp),
                                 jf::string(d, "node_id", dp),
                                 jf::int64(d, "tick", dp)};
      break;
    case SystemEventKind::SolutionVerified:
      e.detail = VerifiedDetail{jf::int64(d, "seeds_run", dp),
                                jf::int64(d, "seeds_passed", dp)};
      break;
  }
  return e;
}

Json to_json(const GameEvent& event) {
  Json j{{"seq", event.seq}, {"t_ms", event.t_ms}};
  if (const auto* a = event.action()) {
    j["action"] = to_json(*a);
  } else {
    j["system"] = to_json(*event.system());
  }
  if (event.board_hash) j["board_hash"] = hash_to_hex(*event.board_hash);
  return j;
}

GameEvent event_from_json(const Json& j, const std::string& path) {
  jf::expect_object(j, path);
  GameEvent e;
  e.seq = jf::int64(j, "seq", path);
  e.t_ms = jf::int64(j, "t_ms", path);
  bool has_action = j.contains("action") && !j.at("action").is_null();
  bool has_system = j.contains("system") && !j.at("system").is_null();
  if (has_action == has_system) {
    throw ValidationError(path, path +
                                    ": exactly one of 'action' or 'system' "
                                    "is required");
  }
  if (has_action) {
    e.body = action_from_json(j.at("action"), path + ".action");
  } else {
    e.body = system_event_from_json(j.at("system"), path + ".system");
  }
  if (auto h = jf::opt_string(j, "board_hash", path)) {
    e.board_hash = hash_from_hex(*h);
  }
  return e;
}

Json to_json(const BoardState& state) {
  // Sorting here makes the byte form independent of construction order.
  auto sorted_arrows = state.arrows;
  std::sort(sorted_arrows.begin(), sorted_arrows.end(),
            [](const auto& a, const auto& b) { return a.arrow_id < b.arrow_id; });
  auto sorted_pending = state.pending_spawns;
  std::sort(sorted_pending.begin(), sorted_pending.end(),
            [](const auto& a, const auto& b) { return a.arrow_id < b.arrow_id; });
  Json arrows = Json::array();
  for (const auto& a : sorted_arrows) {
    arrows.push_back(Json{{"arrow_id", a.arrow_id},
                          {"color", game::to_string(a.color)},
                          {"node", a.node},
                          {"delivered", a.delivered}});
  }
  Json pending = Json::array();
  for (const auto& s : sorted_pending) {
    pending.push_back(Json{{"tick", s.tick},
                           {"spawn_node", s.spawn_node},
                           {"color", game::to_string(s.color)},
                           {"arrow_id", s.arrow_id}});
  }
  Json semaphores = Json::object();
  for (const auto& [edge, st] : state.semaphores) {
    semaphores[edge] = game::to_string(st);
  }
  Json signals = Json::object();
  for (const auto& [node, links] : state.signals) {
    signals[node] = Json(std::vector<std::string>(links.begin(), links.end()));
  }
  Json j{{"level_id", state.level_id},
         {"tick", state.tick},
         {"arrows", std::move(arrows)},
         {"semaphores", std::move(semaphores)},
         {"signals", std::move(signals)},
         {"pending_spawns", std::move(pending)},
         {"phase", game::to_string(state.phase)},
         {"idle_ticks", state.idle_ticks}};
  if (state.outcome) j["outcome"] = game::to_string(*state.outcome);
  return j;
}

BoardState board_from_json(const Json& j, const std::string& path) {
  jf::expect_object(j, path);
  BoardState s;
  s.level_id = jf::string(j, "level_id", path);
  s.tick = jf::int64(j, "tick", path);
  s.idle_ticks = jf::int64(j, "idle_ticks", path);
  s.phase = game::parse_phase(jf::string(j, "phase", path), path + ".phase");
  if (auto o = jf::opt_string(j, "outcome", path)) {
    s.outcome = game::parse_outcome(*o, path + ".outcome");
  }
  const std::string ap = path + ".arrows";
  const Json& arrows = jf::require(j, "arrows", path);
  jf::expect_array(arrows, ap);
  for (std::size_t i = 0; i < arrows.size(); ++i) {
    auto p = at(ap, i);
    s.arrows.push_back(game::Arrow{
        jf::string(arrows[i], "arrow_id", p),
        game::parse_color(jf::string(arrows[i], "color", p), p + ".color"),
        jf::string(arrows[i], "node", p), jf::boolean(arrows[i], "delivered", p)});
  }
  const std::string pp = path + ".pending_spawns";
  const Json& pending = jf::require(j, "pending_spawns", path);
  jf::expect_array(pending, pp);
  for (std::size_t i = 0; i < pending.size(); ++i) {
    auto p = at(pp, i);
    s.pending_spawns.push_back(game::Spawn{
        jf::int64(pending[i], "tick", p), jf::string(pending[i], "spawn_node", p),
        game::parse_color(jf::string(pending[i], "color", p), p + ".color"),
        jf::string(pending[i], "arrow_id", p)});
  }
  const Json& sems = jf::require(j, "semaphores", path);
  jf::expect_object(sems, path + ".semaphores");
  for (const auto& [edge, st] : sems.items()) {
    auto p = path + ".semaphores." + edge;
    if (!st.is_string()) throw ValidationError(p, p + ": expected string");
    s.semaphores[edge] = game::parse_semaphore_state(st.get<std::string>(), p);
  }
  const Json& sigs = jf::require(j, "signals", path);
  jf::expect_object(sigs, path + ".signals");
  for (const auto& [node, links] : sigs.items()) {
    auto p = path + ".signals." + node;
    jf::expect_array(links, p);
    auto& set = s.signals[node];
    for (const auto& l : links) {
      if (!l.is_string()) throw ValidationError(p, p + ": expected string");
      set.insert(l.get<std::string>());
    }
  }
  return s;
}

Json to_json(const BoardSnapshot& snapshot) {
  return Json{{"at_seq", snapshot.at_seq},
              {"state_hash", hash_to_hex(snapshot.state_hash)},
              {"state", to_json(snapshot.state)}};
}

Json to_json(const SessionHeader& h) {
  return Json{{"session_id", h.session_id},
              {"player_id", h.player_id},
              {"level_id", h.level_id},
              {"started_at", h.started_at},
              {"schema_version", h.schema_version}};
}

SessionHeader header_from_json(const Json& j, const std::string& path) {
  SessionHeader h;
  h.session_id = jf::string(j, "session_id", path);
  h.player_id = jf::string(j, "player_id", path);
  h.level_id = jf::string(j, "level_id", path);
  h.started_at = jf::int64(j, "started_at", path);
  h.schema_version = static_cast<int>(jf::int64(j, "schema_version", path));
  return h;
}

Json to_json(const DerivedMetrics& m) {
  Json by_kind = Json::object();
  for (auto kind : kAllActionKinds) {
    by_kind[std::string(to_string(kind))] = m.count(kind);
  }
  Json j{{"action_count", m.action_count},
         {"action_counts_by_kind", std::move(by_kind)},
         {"test_run_count", m.test_run_count},
         {"solved", m.solved},
         {"duration_ms", m.duration_ms},
         {"board_state_trajectory_len", m.board_state_trajectory_len},
         {"final_placements",
          std::vector<std::string>(m.final_placements.begin(),
                                   m.final_placements.end())}};
  if (m.first_test_seq) j["first_test_seq"] = *m.first_test_seq;
  return j;
}

DerivedMetrics metrics_from_json(const Json& j, const std::string& path) {
  DerivedMetrics m;
  m.action_count = jf::int64(j, "action_count", path);
  const std::string kp = path + ".action_counts_by_kind";
  const Json& by_kind = jf::require(j, "action_counts_by_kind", path);
  jf::expect_object(by_kind, kp);
  for (const auto& [name, count] : by_kind.items()) {
    auto kind = parse_action_kind(name, kp);
    m.action_counts_by_kind[kind] = jf::int64(by_kind, name, kp);
  }
  for (auto kind : kAllActionKinds) m.action_counts_by_kind.try_emplace(kind, 0);
  m.test_run_count = jf::int64(j, "test_run_count", path);
  m.first_test_seq = jf::opt_int64(j, "first_test_seq", path);
  m.solved = jf::boolean(j, "solved", path);
  m.duration_ms = jf::int64(j, "duration_ms", path);
  m.board_state_trajectory_len = jf::int64(j, "board_state_trajectory_len", path);
  for (auto& e : string_list(j, "final_placements", path)) {
    m.final_placements.insert(std::move(e));
  }
  return m;
}

Json to_json(const DerivedSection& d) {
  return Json{{"metrics", to_json(d.metrics)},
              {"trace_signature", hash_to_hex(d.trace_signature)},
              {"replay_verified", d.replay_verified}};
}

Json to_json(const SessionLog& log) {
  Json events = Json::array();
  for (const auto& e : log.events) events.push_back(to_json(e));
  Json snapshots = Json::array();
  for (const auto& s : log.snapshots) snapshots.push_back(to_json(s));
  Json enrichments = Json::array();
  for (const auto& e : log.enrichments) {
    enrichments.push_back(Json{{"name", e.name},
                               {"media_type", e.media_type},
                               {"bytes", base64::encode(e.bytes)}});
  }
  Json j{{"header", to_json(log.header)},
         {"events", std::move(events)},
         {"snapshots", std::move(snapshots)},
         {"enrichments", std::move(enrichments)},
         {"finalized", log.finalized}};
  if (log.derived) j["derived"] = to_json(*log.derived);
  return j;
}

namespace {

SessionLog log_from_json(const Json& j) {
  jf::expect_object(j, "");
  SessionLog log;
  log.header = header_from_json(jf::require(j, "header", ""), "header");
  if (log.header.schema_version != kSchemaVersion) {
    throw ValidationError("header.schema_version",
                          "unsupported schema_version " +
                              std::to_string(log.header.schema_version));
  }
  const Json& events = jf::require(j, "events", "");
  jf::expect_array(events, "events");
  for (std::size_t i = 0; i < events.size(); ++i) {
    log.events.push_back(event_from_json(events[i], at("events", i)));
  }
  const Json& snapshots = jf::require(j, "snapshots", "");
  jf::expect_array(snapshots, "snapshots");
  for (std::size_t i = 0; i < snapshots.size(); ++i) {
    auto p = at("snapshots", i);
    BoardSnapshot s;
    s.at_seq = jf::int64(snapshots[i], "at_seq", p);
    s.state_hash = hash_from_hex(jf::string(snapshots[i], "state_hash", p));
    s.state = board_from_json(jf::require(snapshots[i], "state", p), p + ".state");
    log.snapshots.push_back(std::move(s));
  }
  const Json& enrichments = jf::require(j, "enrichments", "");
  jf::expect_array(enrichments, "enrichments");
  for (std::size_t i = 0; i < enrichments.size(); ++i) {
    auto p = at("enrichments", i);
    log.enrichments.push_back(
        Enrichment{jf::string(enrichments[i], "name", p),
                   jf::string(enrichments[i], "media_type", p),
                   base64::decode(jf::string(enrichments[i], "bytes", p))});
  }
  log.finalized = jf::boolean(j, "finalized", "");
  if (j.contains("derived") && !j.at("derived").is_null()) {
    const Json& d = j.at("derived");
    DerivedSection derived;
    derived.metrics = metrics_from_json(jf::require(d, "metrics", "derived"),
                                        "derived.metrics");
    derived.trace_signature =
        hash_from_hex(jf::string(d, "trace_signature", "derived"));
    derived.replay_verified = jf::boolean(d, "replay_verified", "derived");
    log.derived = std::move(derived);
  }
  return log;
}

std::string event_field(std::int64_t seq, const char* field) {
  return "events[seq=" + std::to_string(seq) + "]." + field;
}

void check_action(const GameEvent& e, const PlayerAction& a,
                  std::vector<Finding>& out) {
  bool need_target = action_needs_target(a.kind);
  bool need_link = action_needs_link(a.kind);
  bool need_seed = a.kind == ActionKind::StartTest;
  if (need_target != a.target.has_value()) {
    out.push_back({event_field(e.seq, "action.target"),
                   std::string(to_string(a.kind)) +
                       (need_target ? " requires a target"
                                    : " must not carry a target"),
                   e.seq});
  }
  if (need_link != a.link.has_value()) {
    out.push_back({event_field(e.seq, "action.link"),
                   std::string(to_string(a.kind)) +
                       (need_link ? " requires a link"
                                  : " must not carry a link"),
                   e.seq});
  }
  if (need_seed != a.seed.has_value()) {
    out.push_back({event_field(e.seq, "action.seed"),
                   std::string(to_string(a.kind)) +
                       (need_seed ? " requires a seed"
                                  : " must not carry a seed"),
                   e.seq});
  }
}

}  // namespace

std::vector<Finding> validate_event(const GameEvent& e) {
  std::vector<Finding> out;
  if (const auto* a = e.action()) {
    check_action(e, *a, out);
  } else if (!e.system()->detail_matches_kind()) {
    out.push_back({event_field(e.seq, "system.detail"),
                   "detail does not match kind " +
                       std::string(to_string(e.system()->kind)),
                   e.seq});
  }
  return out;
}

std::vector<Finding> validate_session(const SessionLog& log) {
  std::vector<Finding> out;
  const auto& h = log.header;
  if (!is_session_id(h.session_id)) {
    out.push_back({"header.session_id",
                   "session_id must be 32 lowercase hex characters", {}});
  }
  if (h.player_id.empty() || h.player_id.size() > 64) {
    out.push_back({"header.player_id", "player_id must be 1..64 characters", {}});
  }
  if (h.level_id.empty() || h.level_id.size() > 64) {
    out.push_back({"header.level_id", "level_id must be 1..64 characters", {}});
  }
  if (h.started_at <= 0) {
    out.push_back({"header.started_at", "started_at must be positive", {}});
  }
  if (h.schema_version != kSchemaVersion) {
    out.push_back({"header.schema_version",
                   "unsupported schema_version " +
                       std::to_string(h.schema_version),
                   {}});
  }

  std::set<std::int64_t> seqs;
  std::int64_t expected = 0;
  std::optional<std::int64_t> prev_t;
  for (const auto& e : log.events) {
    if (e.seq != expected) {
      if (e.seq > expected) {
        out.push_back({event_field(e.seq, "seq"),
                       "gap at seq " + std::to_string(expected), e.seq});
      } else {
        out.push_back({event_field(e.seq, "seq"),
                       "seq " + std::to_string(e.seq) +
                           " out of order (expected " +
                           std::to_string(expected) + ")",
                       e.seq});
      }
    }
    expected = std::max(expected, e.seq + 1);
    if (prev_t && e.t_ms < *prev_t) {
      out.push_back({event_field(e.seq, "t_ms"),
                     "t_ms decreases at seq " + std::to_string(e.seq), e.seq});
    }
    prev_t = prev_t ? std::max(*prev_t, e.t_ms) : e.t_ms;
    seqs.insert(e.seq);
    auto shape = validate_event(e);
    out.insert(out.end(), shape.begin(), shape.end());
  }

  std::optional<std::int64_t> prev_at;
  for (std::size_t i = 0; i < log.snapshots.size(); ++i) {
    const auto& s = log.snapshots[i];
    auto field = "snapshots[" + std::to_string(i) + "]";
    if (prev_at && s.at_seq <= *prev_at) {
      out.push_back({field + ".at_seq", "snapshots out of order at at_seq " +
                                            std::to_string(s.at_seq),
                     s.at_seq});
    }
    prev_at = s.at_seq;
    if (!seqs.contains(s.at_seq)) {
      out.push_back({field + ".at_seq",
                     "at_seq " + std::to_string(s.at_seq) +
                         " references no event",
                     s.at_seq});
    }
    if (s.state_hash != canonical_state_hash(s.state)) {
      out.push_back({field + ".state_hash",
                     "stale state_hash at at_seq " + std::to_string(s.at_seq),
                     s.at_seq});
    }
  }

  std::set<std::string> names;
  for (std::size_t i = 0; i < log.enrichments.size(); ++i) {
    if (!names.insert(log.enrichments[i].name).second) {
      out.push_back({"enrichments[" + std::to_string(i) + "].name",
                     "duplicate enrichment name '" + log.enrichments[i].name +
                         "'",
                     {}});
    }
  }
  return out;
}

std::string serialize_session(const SessionLog& log) {
  auto findings = validate_session(log);
  if (!findings.empty()) {
    throw ValidationError(findings.front().field, findings.front().message);
  }
  return canonical_dump(to_json(log));
}

SessionLog deserialize_session(std::string_view bytes) {
  SessionLog log = log_from_json(parse_json(bytes));
  auto findings = validate_session(log);
  if (!findings.empty()) {
    throw ValidationError(findings.front().field, findings.front().message);
  }
  return log;
}

std::string serialize_event(const GameEvent& event) {
  return canonical_dump(to_json(event));
}

GameEvent parse_event(std::string_view line) {
  return event_from_json(parse_json(line), "event");
}

std::string canonical_state_bytes(const BoardState& state) {
  return canonical_dump(to_json(state));
}

std::uint64_t canonical_state_hash(const BoardState& state) {
  return fnv1a64(canonical_state_bytes(state));
}

}  // namespace opsai

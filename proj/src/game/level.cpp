// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#include "opsai/game/level.hpp"

#include <deque>
#include <map>
#include <set>

#include "opsai/core/error.hpp"

namespace opsai::game {

namespace jf = json_field;

std::vector<LevelFinding> check_level(const LevelSpec& level) {
  std::vector<LevelFinding> out;
  if (level.level_id.empty() || level.level_id.size() > 64) {
    out.push_back({"level_id", "level_id must be 1..64 characters"});
  }

  std::map<std::string, const Node*> nodes;
  for (const auto& n : level.nodes) {
    if (n.id.empty()) {
      out.push_back({"nodes", "node with empty id"});
      continue;
    }
    if (!nodes.emplace(n.id, &n).second) {
      out.push_back({n.id, "duplicate node id '" + n.id + "'"});
    }
    if (n.kind == NodeKind::exit && !n.exit_color) {
      out.push_back({n.id, "exit node '" + n.id + "' has no exit_color"});
    }
    if (n.kind != NodeKind::exit && n.exit_color) {
      out.push_back({n.id, "non-exit node '" + n.id + "' has an exit_color"});
    }
  }

  std::set<std::string> edge_ids;
  std::map<std::pair<std::string, Color>, int> outgoing;
  for (const auto& e : level.edges) {
    if (e.id.empty()) {
      out.push_back({"edges", "edge with empty id"});
      continue;
    }
    if (!edge_ids.insert(e.id).second) {
      out.push_back({e.id, "duplicate edge id '" + e.id + "'"});
    }
    for (const auto* end : {&e.from, &e.to}) {
      if (!nodes.contains(*end)) {
        out.push_back({e.id, "edge '" + e.id + "' references unknown node '" +
                                 *end + "'"});
      }
    }
    if (e.colors.empty()) {
      out.push_back({e.id, "edge '" + e.id + "' allows no colors"});
    }
    for (auto c : e.colors) ++outgoing[{e.from, c}];
  }
  for (const auto& [key, count] : outgoing) {
    if (count > 1) {
      out.push_back({key.first, "ambiguous routing at node '" + key.first +
                                    "' for color " +
                                    std::string(to_string(key.second))});
    }
  }

  std::set<std::string> arrow_ids;
  std::set<std::pair<std::string, Color>> checked;
  for (const auto& s : level.spawn_schedule) {
    if (s.arrow_id.empty()) {
      out.push_back({"spawn_schedule", "spawn with empty arrow_id"});
    } else if (!arrow_ids.insert(s.arrow_id).second) {
      out.push_back({s.arrow_id, "duplicate arrow id '" + s.arrow_id + "'"});
    }
    if (s.tick < 0) {
      out.push_back({s.arrow_id, "arrow '" + s.arrow_id +
                                     "' has a negative spawn tick"});
    }
    auto it = nodes.find(s.spawn_node);
    if (it == nodes.end()) {
      out.push_back({s.spawn_node, "arrow '" + s.arrow_id +
                                       "' spawns at unknown node '" +
                                       s.spawn_node + "'"});
      continue;
    }
    if (it->second->kind != NodeKind::spawn) {
      out.push_back({s.spawn_node, "arrow '" + s.arrow_id + "' spawns at '" +
                                       s.spawn_node +
                                       "' which is not a spawn node"});
      continue;
    }
    if (!checked.insert({s.spawn_node, s.color}).second) continue;

    // Breadth-first search over edges carrying the color; arrows are
    // removed at exits, so exits are never expanded.
    std::set<std::string> seen{s.spawn_node};
    std::deque<std::string> frontier{s.spawn_node};
    bool reachable = false;
    while (!frontier.empty() && !reachable) {
      auto cur = frontier.front();
      frontier.pop_front();
      for (const auto& e : level.edges) {
        if (e.from != cur || !e.colors.contains(s.color)) continue;
        auto nt = nodes.find(e.to);
        if (nt == nodes.end()) continue;
        if (nt->second->kind == NodeKind::exit) {
          if (nt->second->exit_color == s.color) reachable = true;
          continue;
        }
        if (seen.insert(e.to).second) frontier.push_back(e.to);
      }
    }
    if (!reachable) {
      out.push_back({s.spawn_node, "unreachable color " +
                                       std::string(to_string(s.color)) +
                                       ": no matching exit reachable from '" +
                                       s.spawn_node + "'"});
    }
  }

  const auto& d = level.defaults;
  if (d.stall_probability &&
      !(*d.stall_probability >= 0.0 && *d.stall_probability <= 1.0)) {
    out.push_back({"defaults.stall_p", "stall_p must lie in [0, 1]"});
  }
  for (auto [name, value] :
       {std::pair{"defaults.max_ticks", d.max_ticks},
        std::pair{"defaults.deadlock_window", d.deadlock_window},
        std::pair{"defaults.verify_seeds", d.verify_seeds}}) {
    if (value && *value < 1) {
      out.push_back({name, std::string(name) + " must be at least 1"});
    }
  }
  return out;
}

namespace {

// Reads the level description without checking invariants.
LevelSpec read_level(const Json& j) {
  jf::expect_object(j, "");
  LevelSpec level;
  level.level_id = jf::string(j, "level_id", "");

  const Json& jn = jf::require(j, "nodes", "");
  jf::expect_array(jn, "nodes");
  for (std::size_t i = 0; i < jn.size(); ++i) {
    auto p = "nodes[" + std::to_string(i) + "]";
    Node n;
    n.id = jf::string(jn[i], "id", p);
    n.kind = parse_node_kind(jf::string(jn[i], "kind", p), p + ".kind");
    n.signal_eligible =
        jf::opt_boolean(jn[i], "signal_eligible", p).value_or(false);
    if (auto c = jf::opt_string(jn[i], "exit_color", p)) {
      n.exit_color = parse_color(*c, p + ".exit_color");
    }
    level.nodes.push_back(std::move(n));
  }

  const Json& je = jf::require(j, "edges", "");
  jf::expect_array(je, "edges");
  for (std::size_t i = 0; i < je.size(); ++i) {
    auto p = "edges[" + std::to_string(i) + "]";
    Edge e;
    e.id = jf::string(je[i], "id", p);
    e.from = jf::string(je[i], "from", p);
    e.to = jf::string(je[i], "to", p);
    const Json& colors = jf::require(je[i], "colors", p);
    jf::expect_array(colors, p + ".colors");
    for (const auto& c : colors) {
      if (!c.is_string()) {
        throw ValidationError(p + ".colors", p + ".colors: expected strings");
      }
      e.colors.insert(parse_color(c.get<std::string>(), p + ".colors"));
    }
    e.sem_eligible = jf::opt_boolean(je[i], "sem_eligible", p).value_or(false);
    level.edges.push_back(std::move(e));
  }

  const Json& js = jf::require(j, "spawn_schedule", "");
  jf::expect_array(js, "spawn_schedule");
  for (std::size_t i = 0; i < js.size(); ++i) {
    auto p = "spawn_schedule[" + std::to_string(i) + "]";
    level.spawn_schedule.push_back(Spawn{
        jf::int64(js[i], "tick", p), jf::string(js[i], "spawn_node", p),
        parse_color(jf::string(js[i], "color", p), p + ".color"),
        jf::string(js[i], "arrow_id", p)});
  }

  if (j.contains("defaults") && !j.at("defaults").is_null()) {
    const Json& jd = j.at("defaults");
    auto& d = level.defaults;
    d.stall_probability = jf::opt_number(jd, "stall_p", "defaults");
    d.max_ticks = jf::opt_int64(jd, "max_ticks", "defaults");
    d.deadlock_window = jf::opt_int64(jd, "deadlock_window", "defaults");
    d.verify_seeds = jf::opt_int64(jd, "verify_seeds", "defaults");
  }
  return level;
}

}  // namespace

LevelSpec level_from_json(const Json& j) {
  LevelSpec raw = read_level(j);
  return LevelSpec::build(std::move(raw.level_id), std::move(raw.nodes),
                          std::move(raw.edges), std::move(raw.spawn_schedule),
                          raw.defaults);
}

LevelSpec load_level(std::string_view text) {
  return level_from_json(parse_json(text));
}

std::vector<LevelFinding> validate_level_text(std::string_view text) {
  try {
    return check_level(read_level(parse_json(text)));
  } catch (const ParseError& e) {
    return {{"byte " + std::to_string(e.offset()), e.what()}};
  } catch (const ValidationError& e) {
    return {{e.field(), e.what()}};
  }
}

Json level_to_json(const LevelSpec& level) {
  Json nodes = Json::array();
  for (const auto& n : level.nodes) {
    Json jn{{"id", n.id},
            {"kind", to_string(n.kind)},
            {"signal_eligible", n.signal_eligible}};
    if (n.exit_color) jn["exit_color"] = to_string(*n.exit_color);
    nodes.push_back(std::move(jn));
  }
  Json edges = Json::array();
  for (const auto& e : level.edges) {
    Json colors = Json::array();
    for (auto c : e.colors) colors.push_back(to_string(c));
    edges.push_back(Json{{"id", e.id},
                         {"from", e.from},
                         {"to", e.to},
                         {"colors", std::move(colors)},
                         {"sem_eligible", e.sem_eligible}});
  }
  Json schedule = Json::array();
  for (const auto& s : level.spawn_schedule) {
    schedule.push_back(Json{{"tick", s.tick},
                            {"spawn_node", s.spawn_node},
                            {"color", to_string(s.color)},
                            {"arrow_id", s.arrow_id}});
  }
  Json j{{"level_id", level.level_id},
         {"nodes", std::move(nodes)},
         {"edges", std::move(edges)},
         {"spawn_schedule", std::move(schedule)}};
  Json defaults = Json::object();
  const auto& d = level.defaults;
  if (d.stall_probability) defaults["stall_p"] = *d.stall_probability;
  if (d.max_ticks) defaults["max_ticks"] = *d.max_ticks;
  if (d.deadlock_window) defaults["deadlock_window"] = *d.deadlock_window;
  if (d.verify_seeds) defaults["verify_seeds"] = *d.verify_seeds;
  if (!defaults.empty()) j["defaults"] = std::move(defaults);
  return j;
}

}  // namespace opsai::game

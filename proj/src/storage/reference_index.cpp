// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#include "opsai/storage/reference_index.hpp"

#include <cinttypes>
#include <cstdio>
#include <limits>

namespace opsai::storage {

namespace {

constexpr std::int64_t kMaxTime = std::numeric_limits<std::int64_t>::max();

std::string inv_time(std::int64_t started_at) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%020" PRId64, kMaxTime - started_at);
  return buf;
}

std::vector<std::string> secondary_keys(const ReferenceEntry& e) {
  auto suffix = inv_time(e.started_at) + "/" + e.session_id;
  return {
      "all/" + suffix,
      "by_level/" + escape_key_component(e.level_id) + "/" + suffix,
      "by_player/" + escape_key_component(e.player_id) + "/" + suffix,
  };
}

}  // namespace

std::string escape_key_component(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    if (c == '%') {
      out += "%25";
    } else if (c == '/') {
      out += "%2F";
    } else {
      out += c;
    }
  }
  return out;
}

void ReferenceIndex::put(const ReferenceEntry& entry) {
  std::vector<KvWrite> batch;
  if (auto old = get(entry.session_id)) {
    for (auto& k : secondary_keys(*old)) batch.push_back({std::move(k), std::nullopt});
  }
  auto bytes = canonical_dump(to_json(entry));
  batch.push_back({"ref/" + entry.session_id, bytes});
  for (auto& k : secondary_keys(entry)) batch.push_back({std::move(k), bytes});
  kv_.write(batch);
}

std::optional<ReferenceEntry> ReferenceIndex::get(const std::string& session_id) {
  auto bytes = kv_.get("ref/" + session_id);
  if (!bytes) return std::nullopt;
  return reference_from_json(parse_json(*bytes));
}

std::vector<ReferenceEntry> ReferenceIndex::query(const QueryFilter& filter) {
  filter.validate();
  std::string prefix;
  if (filter.player_id) {
    prefix = "by_player/" + escape_key_component(*filter.player_id) + "/";
  } else if (filter.level_id) {
    prefix = "by_level/" + escape_key_component(*filter.level_id) + "/";
  } else {
    prefix = "all/";
  }
  // The started_at range maps onto a contiguous key range. Stored
  // started_at values are always positive.
  std::string begin = prefix;
  std::string end = prefix_end(prefix);
  if (filter.started_at.max) {
    if (*filter.started_at.max < 1) return {};
    begin = prefix + inv_time(*filter.started_at.max);
  }
  if (filter.started_at.min && *filter.started_at.min > 0) {
    end = prefix_end(prefix + inv_time(*filter.started_at.min) + "/");
  }

  std::vector<ReferenceEntry> out;
  kv_.scan(begin, end, [&](const std::string&, const std::string& value) {
    auto entry = reference_from_json(parse_json(value));
    if (filter.matches(entry)) out.push_back(std::move(entry));
    return static_cast<std::int64_t>(out.size()) < filter.limit;
  });
  return out;
}

std::vector<ReferenceEntry> ReferenceIndex::entries() {
  std::vector<ReferenceEntry> out;
  kv_.scan("ref/", prefix_end("ref/"), [&](const std::string&, const std::string& v) {
    out.push_back(reference_from_json(parse_json(v)));
    return true;
  });
  return out;
}

void ReferenceIndex::quarantine(const std::string& session_id, const Json& reason) {
  kv_.put("quarantine/" + session_id, canonical_dump(reason));
}

std::optional<Json> ReferenceIndex::quarantine_reason(const std::string& session_id) {
  auto bytes = kv_.get("quarantine/" + session_id);
  if (!bytes) return std::nullopt;
  return parse_json(*bytes);
}

std::vector<std::string> ReferenceIndex::quarantined() {
  std::vector<std::string> out;
  const std::string prefix = "quarantine/";
  kv_.scan(prefix, prefix_end(prefix), [&](const std::string& k, const std::string&) {
    out.push_back(k.substr(prefix.size()));
    return true;
  });
  return out;
}

}  // namespace opsai::storage

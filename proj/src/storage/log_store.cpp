// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#include "opsai/storage/log_store.hpp"

#include <algorithm>
#include <charconv>
#include <limits>

#include "opsai/core/codec.hpp"
#include "opsai/core/error.hpp"
#include "opsai/core/ids.hpp"

namespace opsai::storage {

namespace {

constexpr std::string_view kSegmentSuffix = ".ndjson";

void check_id(const std::string& session_id) {
  if (!is_session_id(session_id)) {
    throw NotFoundError("no session '" + session_id + "'");
  }
}

std::vector<GameEvent> parse_segment(const std::string& bytes) {
  std::vector<GameEvent> out;
  std::size_t start = 0;
  while (start < bytes.size()) {
    auto nl = bytes.find('\n', start);
    if (nl == std::string::npos) nl = bytes.size();
    if (nl > start) out.push_back(parse_event({bytes.data() + start, nl - start}));
    start = nl + 1;
  }
  return out;
}

std::string segments_prefix(const std::string& id) {
  return "sessions/" + id + "/segments/";
}

}  // namespace

std::string LogStore::header_key(const std::string& id) {
  return "sessions/" + id + "/header.json";
}

std::string LogStore::segment_key(const std::string& id, std::int64_t n) {
  return segments_prefix(id) + std::to_string(n) + std::string(kSegmentSuffix);
}

std::string LogStore::log_key(const std::string& id) {
  return "sessions/" + id + "/log.json";
}

void LogStore::create_session(const SessionHeader& header) {
  SessionLog probe;
  probe.header = header;
  auto findings = validate_session(probe);
  if (!findings.empty()) {
    throw ValidationError(findings.front().field, findings.front().message);
  }
  if (!objects_.put_if_absent(header_key(header.session_id),
                              canonical_dump(to_json(header)))) {
    throw ConflictError("session_exists",
                        "session " + header.session_id + " already exists");
  }
}

SessionHeader LogStore::header(const std::string& id) {
  check_id(id);
  auto bytes = objects_.get(header_key(id));
  if (!bytes) throw NotFoundError("no session '" + id + "'");
  return header_from_json(parse_json(*bytes), "header");
}

std::vector<std::int64_t> LogStore::segment_numbers(const std::string& id) {
  auto prefix = segments_prefix(id);
  std::vector<std::int64_t> out;
  for (const auto& key : objects_.list(prefix)) {
    std::string_view name(key);
    name.remove_prefix(prefix.size());
    if (!name.ends_with(kSegmentSuffix)) continue;
    name.remove_suffix(kSegmentSuffix.size());
    std::int64_t n = 0;
    auto [p, ec] = std::from_chars(name.data(), name.data() + name.size(), n);
    if (ec == std::errc() && p == name.data() + name.size()) out.push_back(n);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::int64_t LogStore::append_segment(const std::string& id,
                                      const std::vector<GameEvent>& batch) {
  header(id);
  if (batch.empty()) throw ValidationError("batch", "empty event batch");
  for (const auto& e : batch) {
    auto findings = validate_event(e);
    if (!findings.empty()) {
      throw ValidationError(findings.front().field, findings.front().message);
    }
  }
  for (std::size_t i = 1; i < batch.size(); ++i) {
    if (batch[i].seq != batch[i - 1].seq + 1) {
      throw ValidationError("batch", "batch seqs are not contiguous at seq " +
                                         std::to_string(batch[i].seq));
    }
    if (batch[i].t_ms < batch[i - 1].t_ms) {
      throw ValidationError("batch",
                            "t_ms decreases at seq " + std::to_string(batch[i].seq));
    }
  }

  auto numbers = segment_numbers(id);
  std::int64_t next_seq = 0;
  std::int64_t last_t = std::numeric_limits<std::int64_t>::min();
  if (!numbers.empty()) {
    auto bytes = objects_.get(segment_key(id, numbers.back()));
    if (!bytes) throw IoError("segment vanished for session " + id);
    auto last = parse_segment(*bytes);
    if (last.empty()) throw ConflictError("finalized", "session " + id + " is finalized");
    next_seq = last.back().seq + 1;
    last_t = last.back().t_ms;
  }
  if (batch.front().seq != next_seq) {
    throw ConflictError("seq_gap", "expected seq " + std::to_string(next_seq),
                        next_seq);
  }
  if (batch.front().t_ms < last_t) {
    throw ValidationError("batch", "t_ms decreases at seq " +
                                       std::to_string(batch.front().seq));
  }

  std::string bytes;
  for (const auto& e : batch) {
    bytes += serialize_event(e);
    bytes += '\n';
  }
  std::int64_t n = numbers.empty() ? 0 : numbers.back() + 1;
  if (!objects_.put_if_absent(segment_key(id, n), bytes)) {
    // Lost a race with another append or with the finalization seal.
    if (objects_.get(segment_key(id, n)).value_or("").empty()) {
      throw ConflictError("finalized", "session " + id + " is finalized");
    }
    throw ConflictError("seq_gap", "concurrent append; expected seq " +
                                       std::to_string(next_seq) + " was taken",
                        next_seq);
  }
  return n;
}

LogStore::Segments LogStore::read_segments(const std::string& id) {
  header(id);
  Segments out;
  for (auto n : segment_numbers(id)) {
    auto bytes = objects_.get(segment_key(id, n));
    if (!bytes) throw IoError("segment vanished for session " + id);
    if (bytes->empty()) {
      out.sealed = true;
      break;
    }
    out.batches.push_back(parse_segment(*bytes));
  }
  return out;
}

std::vector<GameEvent> LogStore::events(const std::string& id) {
  std::vector<GameEvent> out;
  for (auto& b : read_segments(id).batches) {
    out.insert(out.end(), std::make_move_iterator(b.begin()),
               std::make_move_iterator(b.end()));
  }
  return out;
}

std::int64_t LogStore::next_seq(const std::string& id) {
  auto ev = events(id);
  return ev.empty() ? 0 : ev.back().seq + 1;
}

std::int64_t LogStore::seal(const std::string& id) {
  header(id);
  for (;;) {
    auto numbers = segment_numbers(id);
    std::int64_t data = 0;
    for (auto n : numbers) {
      auto bytes = objects_.get(segment_key(id, n));
      if (bytes && bytes->empty()) return data;
      ++data;
    }
    std::int64_t n = numbers.empty() ? 0 : numbers.back() + 1;
    if (objects_.put_if_absent(segment_key(id, n), "")) return data;
    // An append claimed the slot first; look again.
  }
}

std::string LogStore::put_log(const SessionLog& log) {
  if (!log.finalized) {
    throw ValidationError("finalized", "only finalized logs are stored");
  }
  auto bytes = serialize_session(log);
  auto key = log_key(log.header.session_id);
  if (!objects_.put_if_absent(key, bytes)) {
    throw ConflictError("finalized",
                        "log for session " + log.header.session_id +
                            " is already stored");
  }
  return key;
}

std::optional<std::string> LogStore::get_log_bytes(const std::string& id) {
  if (!is_session_id(id)) return std::nullopt;
  return objects_.get(log_key(id));
}

SessionLog LogStore::get_log(const std::string& id) {
  auto bytes = get_log_bytes(id);
  if (!bytes) throw NotFoundError("no finalized log for session '" + id + "'");
  return deserialize_session(*bytes);
}

bool LogStore::has_log(const std::string& id) {
  return is_session_id(id) && objects_.exists(log_key(id));
}

namespace {

std::vector<std::string> ids_with_suffix(ObjectStore& objects,
                                         std::string_view suffix) {
  std::vector<std::string> out;
  const std::string prefix = "sessions/";
  for (const auto& key : objects.list(prefix)) {
    std::string_view rest(key);
    rest.remove_prefix(prefix.size());
    auto slash = rest.find('/');
    if (slash == std::string_view::npos) continue;
    if (rest.substr(slash) == suffix) out.emplace_back(rest.substr(0, slash));
  }
  return out;
}

}  // namespace

std::vector<std::string> LogStore::session_ids() {
  return ids_with_suffix(objects_, "/header.json");
}

std::vector<std::string> LogStore::finalized_ids() {
  return ids_with_suffix(objects_, "/log.json");
}

}  // namespace opsai::storage

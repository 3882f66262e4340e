// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "opsai/core/model.hpp"
#include "opsai/storage/object_store.hpp"

namespace opsai::storage {

/// Session data in the bulk tier.
///
///   sessions/{id}/header.json          written at registration
///   sessions/{id}/segments/{n}.ndjson  one appended batch per object
///   sessions/{id}/log.json             canonical log written at finalization
///
/// An empty segment object seals the stream: finalization claims the next
/// segment number with it, so no append can land after the events it reads.
class LogStore {
 public:
  explicit LogStore(ObjectStore& objects) : objects_(objects) {}

  static std::string header_key(const std::string& session_id);
  static std::string segment_key(const std::string& session_id, std::int64_t n);
  static std::string log_key(const std::string& session_id);

  /// Throws ConflictError `session_exists` when the id is taken.
  void create_session(const SessionHeader& header);
  /// Throws NotFoundError for unknown ids.
  SessionHeader header(const std::string& session_id);

  /// Persists the batch as the next segment and returns its number. Throws
  /// ConflictError `seq_gap` (with the expected seq) when the batch does not
  /// continue the stored stream, `finalized` when the stream is sealed.
  std::int64_t append_segment(const std::string& session_id,
                              const std::vector<GameEvent>& batch);

  struct Segments {
    std::vector<std::vector<GameEvent>> batches;
    bool sealed = false;
  };
  Segments read_segments(const std::string& session_id);
  /// Flattened events of every segment.
  std::vector<GameEvent> events(const std::string& session_id);
  /// Seq the next append must start with.
  std::int64_t next_seq(const std::string& session_id);

  /// Seals the stream and returns the number of data segments before the
  /// seal. Sealing twice is a no-op.
  std::int64_t seal(const std::string& session_id);

  /// Writes the canonical bytes of a finalized log. Throws ValidationError
  /// for invalid or unfinalized logs, ConflictError `finalized` when a log is
  /// already stored.
  std::string put_log(const SessionLog& log);
  /// Throws NotFoundError when no log is stored.
  SessionLog get_log(const std::string& session_id);
  std::optional<std::string> get_log_bytes(const std::string& session_id);
  bool has_log(const std::string& session_id);

  std::vector<std::string> session_ids();
  std::vector<std::string> finalized_ids();

  ObjectStore& objects() { return objects_; }

 private:
  // Segment numbers in ascending numeric order.
  std::vector<std::int64_t> segment_numbers(const std::string& session_id);

  ObjectStore& objects_;
};

}  // namespace opsai::storage

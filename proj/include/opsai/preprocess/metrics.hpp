// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "opsai/core/model.hpp"
#include "opsai/storage/reference.hpp"

namespace opsai::preprocess {

/// Counts and outcome derived from events and snapshots only.
DerivedMetrics compute_metrics(const SessionLog& log);

/// FNV-1a 64 over the big-endian snapshot hashes, in snapshot order.
std::uint64_t trace_signature(const std::vector<BoardSnapshot>& snapshots);
inline std::uint64_t trace_signature(const SessionLog& log) {
  return trace_signature(log.snapshots);
}

/// One token per player action.
std::string action_tokens(const SessionLog& log);

/// Per-kind counts in token order, zero counts omitted ("P3G1T2").
std::string token_digest(const DerivedMetrics& metrics);

/// Reference entry for a finalized log, recomputed from its content.
storage::ReferenceEntry make_reference(const SessionLog& log);

}  // namespace opsai::preprocess

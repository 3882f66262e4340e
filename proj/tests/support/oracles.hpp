// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

// Slow, obviously-correct reference implementations used to check the
// optimized paths.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "opsai/analytics/analytics.hpp"
#include "opsai/storage/reference.hpp"
#include "opsai/storage/storage.hpp"

namespace opsai::testing {

/// Edit distance from the full (n+1)x(m+1) table.
std::size_t levenshtein_oracle(const std::string& a, const std::string& b);

/// Every string over `alphabet` of length 0..max_len.
std::vector<std::string> all_strings(const std::string& alphabet, std::size_t max_len);

/// Nearest `k` sessions to `subject` by brute force over `logs`.
std::vector<analytics::SimilarityResult> peers_oracle(const std::vector<SessionLog>& logs,
                                                      const SessionLog& subject,
                                                      std::size_t k);

/// Same, over every stored log.
std::vector<analytics::SimilarityResult> peers_oracle(storage::Storage& storage,
                                                      const std::string& session_id,
                                                      std::size_t k);

/// Linear filter, newest first, then truncated to the limit.
std::vector<storage::ReferenceEntry> filter_oracle(std::vector<storage::ReferenceEntry> all,
                                                   const storage::QueryFilter& f);

}  // namespace opsai::testing

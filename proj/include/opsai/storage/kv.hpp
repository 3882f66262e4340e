// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

namespace opsai::storage {

/// One write in a batch; a missing value deletes the key.
struct KvWrite {
  std::string key;
  std::optional<std::string> value;
};

/// Ordered key-value store backing the reference index.
class KvStore {
 public:
  virtual ~KvStore() = default;

  virtual std::optional<std::string> get(const std::string& key) = 0;
  /// Applies every write or none.
  virtual void write(const std::vector<KvWrite>& batch) = 0;
  /// Visits keys in [begin, end) in ascending order until `visit` returns
  /// false. An empty `end` means no upper bound.
  virtual void scan(const std::string& begin, const std::string& end,
                    const std::function<bool(const std::string&,
                                             const std::string&)>& visit) = 0;

  void put(const std::string& key, std::string value) {
    write({{key, std::move(value)}});
  }
  void erase(const std::string& key) { write({{key, std::nullopt}}); }
};

/// Smallest key greater than every key starting with `prefix`.
std::string prefix_end(const std::string& prefix);

class MemoryKv final : public KvStore {
 public:
  std::optional<std::string> get(const std::string& key) override;
  void write(const std::vector<KvWrite>& batch) override;
  void scan(const std::string& begin, const std::string& end,
            const std::function<bool(const std::string&, const std::string&)>&
                visit) override;

 private:
  std::shared_mutex mu_;
  std::map<std::string, std::string> data_;
};

/// SQLite file in WAL mode. Several instances, in one process or many, may
/// share the file.
class SqliteKv final : public KvStore {
 public:
  explicit SqliteKv(const std::filesystem::path& file);
  ~SqliteKv() override;
  SqliteKv(const SqliteKv&) = delete;
  SqliteKv& operator=(const SqliteKv&) = delete;

  std::optional<std::string> get(const std::string& key) override;
  void write(const std::vector<KvWrite>& batch) override;
  void scan(const std::string& begin, const std::string& end,
            const std::function<bool(const std::string&, const std::string&)>&
                visit) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace opsai::storage

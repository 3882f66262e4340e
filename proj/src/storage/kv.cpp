// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#include "opsai/storage/kv.hpp"

#include <sqlite3.h>

#include <mutex>

#include "opsai/core/error.hpp"

namespace opsai::storage {

std::string prefix_end(const std::string& prefix) {
  std::string end = prefix;
  while (!end.empty()) {
    auto& c = reinterpret_cast<unsigned char&>(end.back());
    if (c != 0xff) {
      ++c;
      return end;
    }
    end.pop_back();
  }
  return end;
}

// Memory ---------------------------------------------------------------------

std::optional<std::string> MemoryKv::get(const std::string& key) {
  std::shared_lock lock(mu_);
  auto it = data_.find(key);
  if (it == data_.end()) return std::nullopt;
  return it->second;
}

void MemoryKv::write(const std::vector<KvWrite>& batch) {
  std::unique_lock lock(mu_);
  for (const auto& w : batch) {
    if (w.value) {
      data_[w.key] = *w.value;
    } else {
      data_.erase(w.key);
    }
  }
}

void MemoryKv::scan(
    const std::string& begin, const std::string& end,
    const std::function<bool(const std::string&, const std::string&)>& visit) {
  std::shared_lock lock(mu_);
  for (auto it = data_.lower_bound(begin); it != data_.end(); ++it) {
    if (!end.empty() && it->first >= end) break;
    if (!visit(it->first, it->second)) break;
  }
}

// SQLite ---------------------------------------------------------------------

namespace {

class Stmt {
 public:
  Stmt(sqlite3* db, const char* sql) : db_(db) {
    if (sqlite3_prepare_v2(db, sql, -1, &stmt_, nullptr) != SQLITE_OK) {
      throw IoError(std::string("sqlite prepare: ") + sqlite3_errmsg(db));
    }
  }
  ~Stmt() { sqlite3_finalize(stmt_); }
  Stmt(const Stmt&) = delete;
  Stmt& operator=(const Stmt&) = delete;

  void bind(int i, const std::string& s) {
    sqlite3_bind_blob(stmt_, i, s.data(), static_cast<int>(s.size()),
                      SQLITE_TRANSIENT);
  }
  // SQLITE_ROW -> true, SQLITE_DONE -> false.
  bool step() {
    int rc = sqlite3_step(stmt_);
    if (rc == SQLITE_ROW) return true;
    if (rc == SQLITE_DONE) return false;
    throw IoError(std::string("sqlite step: ") + sqlite3_errmsg(db_));
  }
  void reset() {
    sqlite3_reset(stmt_);
    sqlite3_clear_bindings(stmt_);
  }
  std::string column(int i) {
    auto* p = static_cast<const char*>(sqlite3_column_blob(stmt_, i));
    return std::string(p ? p : "", static_cast<std::size_t>(sqlite3_column_bytes(stmt_, i)));
  }

 private:
  sqlite3* db_;
  sqlite3_stmt* stmt_ = nullptr;
};

void exec(sqlite3* db, const char* sql) {
  char* err = nullptr;
  if (sqlite3_exec(db, sql, nullptr, nullptr, &err) != SQLITE_OK) {
    std::string msg = err ? err : "unknown";
    sqlite3_free(err);
    throw IoError(std::string("sqlite: ") + msg + " in " + sql);
  }
}

}  // namespace

struct SqliteKv::Impl {
  sqlite3* db = nullptr;
  std::mutex mu;  // one statement at a time on this connection
};

SqliteKv::SqliteKv(const std::filesystem::path& file)
    : impl_(std::make_unique<Impl>()) {
  std::error_code ec;
  std::filesystem::create_directories(file.parent_path(), ec);
  int flags = SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_FULLMUTEX;
  if (sqlite3_open_v2(file.c_str(), &impl_->db, flags, nullptr) != SQLITE_OK) {
    std::string msg = impl_->db ? sqlite3_errmsg(impl_->db) : "out of memory";
    sqlite3_close(impl_->db);
    throw IoError("cannot open index " + file.string() + ": " + msg);
  }
  sqlite3_busy_timeout(impl_->db, 10000);
  exec(impl_->db, "PRAGMA journal_mode=WAL");
  exec(impl_->db, "PRAGMA synchronous=FULL");
  exec(impl_->db,
       "CREATE TABLE IF NOT EXISTS kv (k BLOB PRIMARY KEY, v BLOB NOT NULL) "
       "WITHOUT ROWID");
}

SqliteKv::~SqliteKv() { sqlite3_close(impl_->db); }

std::optional<std::string> SqliteKv::get(const std::string& key) {
  std::lock_guard lock(impl_->mu);
  Stmt st(impl_->db, "SELECT v FROM kv WHERE k = ?1");
  st.bind(1, key);
  if (!st.step()) return std::nullopt;
  return st.column(0);
}

void SqliteKv::write(const std::vector<KvWrite>& batch) {
  std::lock_guard lock(impl_->mu);
  exec(impl_->db, "BEGIN IMMEDIATE");
  try {
    Stmt put(impl_->db, "INSERT OR REPLACE INTO kv (k, v) VALUES (?1, ?2)");
    Stmt del(impl_->db, "DELETE FROM kv WHERE k = ?1");
    for (const auto& w : batch) {
      Stmt& st = w.value ? put : del;
      st.bind(1, w.key);
      if (w.value) st.bind(2, *w.value);
      st.step();
      st.reset();
    }
    exec(impl_->db, "COMMIT");
  } catch (...) {
    sqlite3_exec(impl_->db, "ROLLBACK", nullptr, nullptr, nullptr);
    throw;
  }
}

void SqliteKv::scan(
    const std::string& begin, const std::string& end,
    const std::function<bool(const std::string&, const std::string&)>& visit) {
  // Rows are copied out first so `visit` may call back into this store.
  std::vector<std::pair<std::string, std::string>> rows;
  std::string cursor = begin;
  bool inclusive = true;
  constexpr int kPage = 256;
  for (;;) {
    rows.clear();
    {
      std::lock_guard lock(impl_->mu);
      std::string sql = std::string("SELECT k, v FROM kv WHERE k ") +
                        (inclusive ? ">=" : ">") + " ?1" +
                        (end.empty() ? "" : " AND k < ?2") +
                        " ORDER BY k LIMIT " + std::to_string(kPage);
      Stmt st(impl_->db, sql.c_str());
      st.bind(1, cursor);
      if (!end.empty()) st.bind(2, end);
      while (st.step()) rows.emplace_back(st.column(0), st.column(1));
    }
    for (const auto& [k, v] : rows) {
      if (!visit(k, v)) return;
    }
    if (rows.size() < kPage) return;
    cursor = rows.back().first;
    inclusive = false;
  }
}

}  // namespace opsai::storage

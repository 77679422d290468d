// Copyright 2026 The ParcelHub Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <sqlite3.h>

#include <regex>

#include "parcelhub/error.hpp"
#include "parcelhub/store.hpp"

namespace parcelhub {

namespace {

class Statement {
 public:
  Statement(sqlite3* db, const std::string& sql) : db_(db) {
    if (sqlite3_prepare_v2(db, sql.c_str(), -1, &stmt_, nullptr) != SQLITE_OK)
      throw Error(Errc::storage_io, std::string("prepare failed: ") + sqlite3_errmsg(db));
  }
  ~Statement() { sqlite3_finalize(stmt_); }
  Statement(const Statement&) = delete;
  Statement& operator=(const Statement&) = delete;

  void bind(int i, std::string_view text) {
    sqlite3_bind_text(stmt_, i, text.data(), static_cast<int>(text.size()), SQLITE_TRANSIENT);
  }

  void bind_json_scalar(int i, const Document& v) {
    if (v.is_boolean()) {
      sqlite3_bind_int(stmt_, i, v.get<bool>() ? 1 : 0);
    } else if (v.is_number_integer() || v.is_number_unsigned()) {
      sqlite3_bind_int64(stmt_, i, v.get<std::int64_t>());
    } else if (v.is_number_float()) {
      sqlite3_bind_double(stmt_, i, v.get<double>());
    } else if (v.is_string()) {
      bind(i, v.get_ref<const std::string&>());
    } else {
      throw Error(Errc::internal, "predicate values must be scalars");
    }
  }

  // Returns true while rows remain.
  bool step() {
    int rc = sqlite3_step(stmt_);
    if (rc == SQLITE_ROW) return true;
    if (rc == SQLITE_DONE) return false;
    if (rc == SQLITE_CONSTRAINT)
      throw Error(Errc::conflict, std::string("constraint violated: ") + sqlite3_errmsg(db_));
    throw Error(Errc::storage_io, std::string("step failed: ") + sqlite3_errmsg(db_));
  }

  std::string column_text(int i) {
    auto* p = sqlite3_column_text(stmt_, i);
    return p ? std::string(reinterpret_cast<const char*>(p),
                           static_cast<std::size_t>(sqlite3_column_bytes(stmt_, i)))
             : std::string{};
  }

 private:
  sqlite3* db_;
  sqlite3_stmt* stmt_ = nullptr;
};

std::string json_path(const std::string& field) {
  static const std::regex kField("[A-Za-z_][A-Za-z0-9_]*(\\.[A-Za-z_][A-Za-z0-9_]*)*");
  if (!std::regex_match(field, kField)) throw Error(Errc::internal, "bad field name: " + field);
  return "'$." + field + "'";
}

// Appends " AND <clause>" per predicate entry; returns the non-null values to bind.
std::vector<const Document*> append_predicate(std::string& sql, const Predicate& pred) {
  std::vector<const Document*> binds;
  for (const auto& m : pred) {
    sql += " AND json_extract(doc, " + json_path(m.field) + ")";
    if (m.value.is_null()) {
      sql += " IS NULL";
    } else {
      sql += " = ?";
      binds.push_back(&m.value);
    }
  }
  return binds;
}

}  // namespace

SqliteStore::SqliteStore(const std::string& path, const std::vector<IndexSpec>& indexes)
    : path_(path) {
  int flags = SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_FULLMUTEX;
  if (sqlite3_open_v2(path.c_str(), &db_, flags, nullptr) != SQLITE_OK) {
    std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
    sqlite3_close(db_);
    throw Error(Errc::storage_io, "cannot open store '" + path + "': " + msg);
  }
  sqlite3_busy_timeout(db_, 5000);
  if (path != ":memory:") {
    exec("PRAGMA journal_mode=WAL");
    exec("PRAGMA synchronous=NORMAL");
  }
  exec(
      "CREATE TABLE IF NOT EXISTS entities ("
      " kind TEXT NOT NULL, id TEXT NOT NULL, doc TEXT NOT NULL,"
      " PRIMARY KEY (kind, id))");
  int n = 0;
  for (const auto& ix : indexes) {
    std::string name = "ix_" + ix.kind + "_" + std::to_string(n++);
    std::string sql = std::string("CREATE ") + (ix.unique ? "UNIQUE " : "") +
                      "INDEX IF NOT EXISTS " + name + " ON entities(kind, json_extract(doc, " +
                      json_path(ix.field) + ")) WHERE kind = '" + ix.kind + "'";
    exec(sql.c_str());
  }
}

SqliteStore::~SqliteStore() { sqlite3_close(db_); }

void SqliteStore::exec(const char* sql) {
  char* err = nullptr;
  if (sqlite3_exec(db_, sql, nullptr, nullptr, &err) != SQLITE_OK) {
    std::string msg = err ? err : "unknown";
    sqlite3_free(err);
    throw Error(Errc::storage_io, "sql failed: " + msg);
  }
}

void SqliteStore::put(std::string_view kind, std::string_view id, const Document& doc) {
  std::lock_guard lock(mutex_);
  Statement st(db_, "INSERT OR REPLACE INTO entities(kind, id, doc) VALUES (?, ?, ?)");
  st.bind(1, kind);
  st.bind(2, id);
  st.bind(3, doc.dump());
  st.step();
}

void SqliteStore::insert(std::string_view kind, std::string_view id, const Document& doc) {
  std::lock_guard lock(mutex_);
  Statement st(db_, "INSERT INTO entities(kind, id, doc) VALUES (?, ?, ?)");
  st.bind(1, kind);
  st.bind(2, id);
  st.bind(3, doc.dump());
  st.step();
}

std::optional<Document> SqliteStore::get(std::string_view kind, std::string_view id) {
  std::lock_guard lock(mutex_);
  Statement st(db_, "SELECT doc FROM entities WHERE kind = ? AND id = ?");
  st.bind(1, kind);
  st.bind(2, id);
  if (!st.step()) return std::nullopt;
  return Document::parse(st.column_text(0));
}

std::vector<Document> SqliteStore::list(std::string_view kind, const Predicate& filter) {
  std::string sql = "SELECT doc FROM entities WHERE kind = ?";
  auto binds = append_predicate(sql, filter);
  sql += " ORDER BY rowid";
  std::lock_guard lock(mutex_);
  Statement st(db_, sql);
  st.bind(1, kind);
  for (std::size_t i = 0; i < binds.size(); ++i)
    st.bind_json_scalar(static_cast<int>(i) + 2, *binds[i]);
  std::vector<Document> out;
  while (st.step()) out.push_back(Document::parse(st.column_text(0)));
  return out;
}

bool SqliteStore::erase(std::string_view kind, std::string_view id) {
  std::lock_guard lock(mutex_);
  Statement st(db_, "DELETE FROM entities WHERE kind = ? AND id = ?");
  st.bind(1, kind);
  st.bind(2, id);
  st.step();
  return sqlite3_changes(db_) > 0;
}

UpdateResult SqliteStore::conditional_update(std::string_view kind, std::string_view id,
                                             const Predicate& expected, const Document& patch) {
  std::string sql = "UPDATE entities SET doc = json_patch(doc, ?) WHERE kind = ? AND id = ?";
  auto binds = append_predicate(sql, expected);
  std::lock_guard lock(mutex_);
  {
    Statement st(db_, sql);
    st.bind(1, patch.dump());
    st.bind(2, kind);
    st.bind(3, id);
    for (std::size_t i = 0; i < binds.size(); ++i)
      st.bind_json_scalar(static_cast<int>(i) + 4, *binds[i]);
    st.step();
  }
  if (sqlite3_changes(db_) > 0) return UpdateResult::applied;
  Statement probe(db_, "SELECT 1 FROM entities WHERE kind = ? AND id = ?");
  probe.bind(1, kind);
  probe.bind(2, id);
  if (!probe.step())
    throw Error(Errc::unknown_entity, std::string(kind) + " '" + std::string(id) + "' not found");
  return UpdateResult::precondition_failed;
}

void SqliteStore::atomically(const std::function<void()>& fn) {
  std::lock_guard lock(mutex_);
  if (depth_ > 0) {
    ++depth_;
    try {
      fn();
    } catch (...) {
      --depth_;
      throw;
    }
    --depth_;
    return;
  }
  exec("BEGIN IMMEDIATE");
  depth_ = 1;
  try {
    fn();
  } catch (...) {
    depth_ = 0;
    exec("ROLLBACK");
    throw;
  }
  depth_ = 0;
  exec("COMMIT");
}

void SqliteStore::for_each(
    const std::function<void(const std::string&, const std::string&, const Document&)>& fn) {
  std::lock_guard lock(mutex_);
  Statement st(db_, "SELECT kind, id, doc FROM entities ORDER BY rowid");
  while (st.step()) fn(st.column_text(0), st.column_text(1), Document::parse(st.column_text(2)));
}

void SqliteStore::checkpoint() {
  std::lock_guard lock(mutex_);
  if (path_ != ":memory:") exec("PRAGMA wal_checkpoint(TRUNCATE)");
}

}  // namespace parcelhub

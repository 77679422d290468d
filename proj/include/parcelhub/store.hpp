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

#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

struct sqlite3;

namespace parcelhub {

using Document = nlohmann::json;

/// Equality test on one top-level (or dotted) document field. A null value
/// matches an absent or null field.
struct FieldMatch {
  std::string field;
  Document value;
};

using Predicate = std::vector<FieldMatch>;

enum class UpdateResult { applied, precondition_failed };

/// Secondary index over one document field of one entity kind.
struct IndexSpec {
  std::string kind;
  std::string field;
  bool unique = false;
};

/// Document store keyed by (kind, id). Every method is thread-safe.
class Store {
 public:
  virtual ~Store() = default;

  /// Insert or replace.
  virtual void put(std::string_view kind, std::string_view id, const Document& doc) = 0;

  /// Insert only; throws conflict if the id or a unique index value exists.
  virtual void insert(std::string_view kind, std::string_view id, const Document& doc) = 0;

  virtual std::optional<Document> get(std::string_view kind, std::string_view id) = 0;

  /// Documents of `kind` matching every clause, in insertion order.
  virtual std::vector<Document> list(std::string_view kind, const Predicate& filter = {}) = 0;

  virtual bool erase(std::string_view kind, std::string_view id) = 0;

  /// Applies `patch` (RFC 7396 merge patch) iff `expected` holds at commit.
  /// Throws unknown_entity when the id does not exist.
  virtual UpdateResult conditional_update(std::string_view kind, std::string_view id,
                                          const Predicate& expected, const Document& patch) = 0;

  /// Runs `fn` as one transaction. Nested calls join the outer transaction.
  virtual void atomically(const std::function<void()>& fn) = 0;

  /// Visits every stored entity; used by dump.
  virtual void for_each(
      const std::function<void(const std::string& kind, const std::string& id,
                               const Document& doc)>& fn) = 0;
};

/// Single-file embedded engine on SQLite. Pass ":memory:" for a private
/// in-memory database.
class SqliteStore final : public Store {
 public:
  SqliteStore(const std::string& path, const std::vector<IndexSpec>& indexes);
  ~SqliteStore() override;

  SqliteStore(const SqliteStore&) = delete;
  SqliteStore& operator=(const SqliteStore&) = delete;

  void put(std::string_view kind, std::string_view id, const Document& doc) override;
  void insert(std::string_view kind, std::string_view id, const Document& doc) override;
  std::optional<Document> get(std::string_view kind, std::string_view id) override;
  std::vector<Document> list(std::string_view kind, const Predicate& filter = {}) override;
  bool erase(std::string_view kind, std::string_view id) override;
  UpdateResult conditional_update(std::string_view kind, std::string_view id,
                                  const Predicate& expected, const Document& patch) override;
  void atomically(const std::function<void()>& fn) override;
  void for_each(const std::function<void(const std::string&, const std::string&,
                                         const Document&)>& fn) override;

  /// Flushes the write-ahead log into the main file.
  void checkpoint();

  const std::string& path() const noexcept { return path_; }

 private:
  void exec(const char* sql);

  std::string path_;
  sqlite3* db_ = nullptr;
  std::recursive_mutex mutex_;
  int depth_ = 0;
};

}  // namespace parcelhub

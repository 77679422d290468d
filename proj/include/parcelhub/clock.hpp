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

#include <atomic>
#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace parcelhub {

using Timestamp = std::chrono::sys_time<std::chrono::microseconds>;
using std::chrono::microseconds;
using std::chrono::seconds;
using std::chrono::minutes;
using std::chrono::hours;

class Clock {
 public:
  virtual ~Clock() = default;
  virtual Timestamp now() const = 0;
};

class SystemClock final : public Clock {
 public:
  Timestamp now() const override {
    return std::chrono::time_point_cast<microseconds>(std::chrono::system_clock::now());
  }
};

/// Test clock; safe to advance from one thread while others read it.
class ManualClock final : public Clock {
 public:
  explicit ManualClock(Timestamp start) : micros_(start.time_since_epoch().count()) {}

  Timestamp now() const override { return Timestamp{microseconds{micros_.load()}}; }
  void set(Timestamp t) { micros_.store(t.time_since_epoch().count()); }
  void advance(microseconds d) { micros_.fetch_add(d.count()); }

 private:
  std::atomic<std::int64_t> micros_;
};

inline std::int64_t to_micros(Timestamp t) { return t.time_since_epoch().count(); }
inline Timestamp from_micros(std::int64_t us) { return Timestamp{microseconds{us}}; }
inline std::int64_t to_unix_seconds(Timestamp t) {
  return std::chrono::floor<seconds>(t).time_since_epoch().count();
}

/// RFC 3339 UTC with microsecond fraction, e.g. 2026-10-16T08:30:00.000000Z.
std::string format_rfc3339(Timestamp t);

/// Accepts "Z" or numeric offsets and an optional fraction of any length.
std::optional<Timestamp> parse_rfc3339(std::string_view text);

/// Builds a UTC timestamp from calendar fields; used by fixtures and the CLI.
Timestamp make_utc(int year, unsigned month, unsigned day, int hour = 0, int minute = 0,
                   int second = 0);

}  // namespace parcelhub

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

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "parcelhub/store.hpp"

namespace parcelhub::sim {

struct BoundingBox {
  double min_lat = 48.10;
  double min_lon = 17.05;
  double max_lat = 48.20;
  double max_lon = 17.20;
};

struct Options {
  std::string base_url = "http://127.0.0.1:8080";
  int couriers = 2;
  int senders = 2;
  double rate_per_min = 6.0;
  std::chrono::seconds duration{60};
  std::uint64_t seed = 42;
  double slack = 1.0;
  std::string report_path;
  std::string trace_path;
  /// Directory the service's file transport writes to. Needed to follow
  /// verification and reset links when the service requires verification.
  std::string mail_dir;
  std::chrono::milliseconds cadence{4000};
  /// Location publishes per leg (courier -> pickup, pickup -> drop-off).
  int steps_per_leg = 3;
  BoundingBox box;
  std::string password = "sim-pass-0001";
  /// Mixed into generated emails so repeated runs on one service do not collide.
  std::string tag;
};

/// Endpoint keys and Table 2 style mean-latency budgets in seconds.
const std::vector<std::pair<std::string, double>>& latency_budgets();

struct EndpointStats {
  std::string endpoint;
  std::size_t samples = 0;
  double mean_s = 0.0;
  double median_s = 0.0;
  double p95_s = 0.0;
  std::optional<double> budget_s;
  bool pass = true;
};

struct Report {
  std::vector<EndpointStats> endpoints;
  std::size_t created = 0;
  std::map<std::string, std::size_t> by_state;
  bool conservation_ok = false;
  std::size_t protocol_errors = 0;
  std::vector<std::string> error_samples;
  std::size_t ws_frames = 0;
  double ws_mean_s = 0.0;
  double ws_p95_s = 0.0;
  double slack = 1.0;

  bool passed() const;
  Document to_json() const;
  std::string to_table() const;
};

struct Fixture {
  std::vector<std::string> sender_emails;
  std::vector<std::string> courier_emails;
  std::vector<std::string> tracking_codes;
  std::vector<std::string> failures;

  Document to_json() const;
};

/// Deterministic inputs for a seed: what `seed` and `run` will send,
/// independent of server responses.
std::vector<std::string> workload_trace(const Options& options, int deliveries);

/// Registers senders and couriers and creates `deliveries` deliveries.
/// Throws Error(service_unreachable) when the service cannot be reached.
Fixture seed(const Options& options, int deliveries);

/// Drives senders and couriers for `options.duration` and audits latencies.
/// Throws Error(service_unreachable) when the service cannot be reached.
Report run(const Options& options);

/// Nearest-rank percentile, `p` in percent (0-100].
double percentile(std::vector<double> samples, double p);

}  // namespace parcelhub::sim

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

#include <array>
#include <atomic>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "parcelhub/clock.hpp"
#include "parcelhub/domain.hpp"
#include "parcelhub/records.hpp"
#include "parcelhub/routes.hpp"
#include "parcelhub/tokens.hpp"

namespace parcelhub {

/// Outbound side of one websocket connection, implemented by the transport.
class Sink {
 public:
  virtual ~Sink() = default;
  /// Must not block. Returns false when the connection's queue is full.
  virtual bool push(std::string frame) = 0;
  virtual void close(std::string_view reason) = 0;
};

enum class ChannelMode { publisher, subscriber };

std::string_view to_string(ChannelMode m) noexcept;

/// "/ws/couriers/" or "/ws/deliveries/<tracking_code>/"; query strings are ignored.
struct ChannelPath {
  bool global = false;
  std::string tracking_code;

  static std::optional<ChannelPath> parse(std::string_view target);
};

struct LocationMessage {
  std::string tracking_code;
  CourierId courier_id;
  GeoPoint point;
  Timestamp ts{};

  /// Single-line JSON broadcast frame.
  std::string to_frame() const;
};

std::string error_frame(std::string_view code);

struct HubConfig {
  /// 15x the four-second client cadence.
  microseconds publisher_staleness = seconds{60};
};

/// Registry of live location channels. One channel per delivery plus a
/// global channel that sees every publish.
class Hub {
 public:
  struct Session {
    std::string id;
    ChannelMode mode = ChannelMode::subscriber;
    bool global = false;
    DeliveryId delivery_id;
    std::string tracking_code;
    std::optional<CourierId> courier_id;
    std::shared_ptr<Sink> sink;
    std::atomic<std::int64_t> last_activity_us{0};
    std::atomic<bool> open{true};
  };
  using SessionPtr = std::shared_ptr<Session>;

  Hub(Records& records, RouteBook& routes, const TokenService& tokens, const Clock& clock,
      EntropySource& entropy, HubConfig config = {});

  /// Publisher iff `access_token` belongs to the courier assigned to the
  /// delivery; everyone else subscribes. Throws not_found for malformed
  /// paths and unknown_delivery for unknown tracking codes.
  SessionPtr open(std::string_view path, const std::optional<std::string>& access_token,
                  std::shared_ptr<Sink> sink);

  /// Handles one inbound text frame. Failures go back to the sender as an
  /// error frame; the connection stays open.
  void on_text(const SessionPtr& session, std::string_view frame);

  /// Validates, persists the route point, updates the courier position and
  /// fans out. Throws not_publisher, invalid_coordinates or wrong_state.
  LocationMessage publish_location(const SessionPtr& session, double latitude, double longitude);

  void close(const SessionPtr& session);

  /// Closes publishers silent for longer than the staleness bound and marks
  /// couriers with stale positions unavailable. Returns closed session ids.
  std::vector<std::string> staleness_sweep(Timestamp now);

  std::size_t subscriber_count(std::string_view tracking_code) const;
  std::size_t global_count() const;

 private:
  void detach_locked(const SessionPtr& session);
  void fan_out(const DeliveryId& delivery, const std::string& frame);
  std::mutex& stripe(const DeliveryId& delivery);

  Records& records_;
  RouteBook& routes_;
  const TokenService& tokens_;
  const Clock& clock_;
  EntropySource& entropy_;
  HubConfig config_;

  mutable std::mutex registry_mutex_;
  std::unordered_map<DeliveryId, std::vector<SessionPtr>> channels_;
  std::vector<SessionPtr> global_;

  std::array<std::mutex, 64> stripes_;
  std::mutex last_ts_mutex_;
  std::unordered_map<DeliveryId, Timestamp> last_ts_;
};

}  // namespace parcelhub

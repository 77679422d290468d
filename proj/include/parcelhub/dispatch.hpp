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

#include <optional>
#include <string>
#include <vector>

#include "parcelhub/clock.hpp"
#include "parcelhub/domain.hpp"
#include "parcelhub/geo.hpp"
#include "parcelhub/notifier.hpp"
#include "parcelhub/records.hpp"
#include "parcelhub/routes.hpp"

namespace parcelhub {

/// Authenticated identity of the party making a call.
struct Caller {
  AccountId account_id;
  Role role = Role::user;
};

struct ReceiverInput {
  std::string first_name;
  std::string last_name;
  std::string email;
  std::optional<std::string> phone;
};

struct Picture {
  std::string content_type;
  Bytes data;
};

struct DeliveryRequest {
  ItemDraft item;
  Place source;
  Place destination;
  ReceiverInput receiver;
  std::optional<Picture> picture;
};

struct DispatchConfig {
  /// 30 km/h nominal urban speed.
  double nominal_speed_mps = 8.33;
  microseconds handling = seconds{900};
  std::size_t max_picture_bytes = 5 * 1024 * 1024;
};

struct ReceiverIdentity {
  std::string first_name;
  std::string last_name;
  std::string email;
};

struct TrackingView {
  TrackingCode tracking_code;
  DeliveryState state = DeliveryState::ready;
  std::string source_address;
  std::string destination_address;
  Item item;
  Timestamp expected_delivery_time{};
  std::optional<RoutePoint> courier_position;
  std::optional<ReceiverIdentity> receiver;
};

struct StatisticsReport {
  std::vector<std::string> months;  // "YYYY-MM", oldest first
  std::vector<int> counts;
  int total = 0;
};

enum class HistoryDirection { sent, received };

struct ClosestDelivery {
  Delivery delivery;
  double distance_m = 0.0;
};

/// Delivery lifecycle: creation, tracking, courier matching and state changes.
class Dispatch {
 public:
  Dispatch(Records& records, Outbox& outbox, RouteBook& routes, const DistanceProvider& distance,
           EntropySource& entropy, const Clock& clock, DispatchConfig config = {});

  /// Throws validation_error with per-field messages, payload_too_large,
  /// unsupported_media_type or account_inactive.
  Delivery create_delivery(const Caller& sender, const DeliveryRequest& request);

  /// Receiver identity is filled only when `caller` is the receiver's account.
  TrackingView track_delivery(std::string_view tracking_code, const std::optional<Caller>& caller);

  /// Newest first.
  std::vector<Delivery> list_history(const Caller& caller, HistoryDirection direction);

  /// Ready deliveries ordered by distance from `location`. Throws not_a_courier.
  std::vector<ClosestDelivery> closest_deliveries(const Caller& courier, const GeoPoint& location,
                                                  std::size_t limit);

  /// Compare-and-set ready -> assigned. Throws not_ready when the delivery
  /// is no longer ready (including a lost race), unknown_delivery, not_a_courier.
  Delivery accept_delivery(const Caller& courier, const DeliveryId& delivery);

  /// Throws forbidden_transition, not_assigned_courier, unknown_delivery,
  /// not_a_courier. ready -> assigned is routed through accept_delivery.
  Delivery change_state(const Caller& courier, const DeliveryId& delivery, DeliveryState to,
                        const std::optional<std::string>& note = std::nullopt);

  /// Per calendar month (UTC) counts of the caller's sent deliveries over
  /// the trailing `months` months including the current one. Throws
  /// validation_error unless 1 <= months <= 60.
  StatisticsReport statistics(const Caller& caller, int months, Timestamp now);

  std::optional<Delivery> find_by_code(std::string_view tracking_code);

  const DispatchConfig& config() const noexcept { return config_; }

 private:
  Courier require_courier(const Caller& caller);

  Records& records_;
  Outbox& outbox_;
  RouteBook& routes_;
  const DistanceProvider& distance_;
  EntropySource& entropy_;
  const Clock& clock_;
  DispatchConfig config_;
};

/// Month keys ("YYYY-MM") of the trailing window ending at `now`, oldest first.
std::vector<std::string> trailing_months(Timestamp now, int months);

/// First instant of the oldest month in the trailing window.
Timestamp trailing_window_start(Timestamp now, int months);

std::string month_key(Timestamp t);

}  // namespace parcelhub

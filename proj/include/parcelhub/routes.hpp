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
#include <vector>

#include "parcelhub/domain.hpp"
#include "parcelhub/records.hpp"

namespace parcelhub {

struct RouteFilter {
  std::optional<CourierId> courier_id;
  std::optional<DeliveryId> delivery_id;
  std::optional<Timestamp> from;
  std::optional<Timestamp> to;
};

/// Append-only courier traces, one per delivery.
class RouteBook {
 public:
  explicit RouteBook(Records& records) : records_(records) {}

  /// Throws unknown_delivery, wrong_state (state not assigned/delivering),
  /// invalid_coordinates, or non_monotonic_timestamp.
  Route append_route_point(const DeliveryId& delivery, const GeoPoint& point, Timestamp at);

  /// Empty route when nothing was recorded yet.
  Route route(const DeliveryId& delivery);

  /// Without a time window only deliveries in the delivering state qualify.
  /// With a window, finished deliveries are included too and points are
  /// clipped to [from, to]; routes left without points are dropped.
  /// Throws malformed_filter when from > to.
  std::vector<Route> query_routes(const RouteFilter& filter);

 private:
  Records& records_;
};

}  // namespace parcelhub

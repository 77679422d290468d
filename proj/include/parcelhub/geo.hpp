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

#include <span>
#include <vector>

#include "parcelhub/domain.hpp"

namespace parcelhub {

/// Mean Earth radius of the spherical model, meters.
inline constexpr double kEarthRadiusM = 6'371'000.0;

/// Great-circle distance on a sphere of radius kEarthRadiusM.
double haversine_m(const GeoPoint& a, const GeoPoint& b) noexcept;

/// Distance between two places along whatever network the provider models.
class DistanceProvider {
 public:
  virtual ~DistanceProvider() = default;
  virtual double route_distance_m(const GeoPoint& from, const GeoPoint& to) const = 0;
};

class HaversineDistance final : public DistanceProvider {
 public:
  double route_distance_m(const GeoPoint& from, const GeoPoint& to) const override {
    return haversine_m(from, to);
  }
};

/// Sorts by distance from `origin` to each delivery's source, then by
/// created_at, then by delivery_id. The result is a permutation of the input.
std::vector<Delivery> order_by_distance(const GeoPoint& origin, std::span<const Delivery> deliveries);

/// Point at fraction `t` in [0, 1] along the straight segment a->b in
/// latitude/longitude space.
GeoPoint interpolate(const GeoPoint& a, const GeoPoint& b, double t) noexcept;

}  // namespace parcelhub

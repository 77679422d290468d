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

#include "parcelhub/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

namespace parcelhub {

double haversine_m(const GeoPoint& a, const GeoPoint& b) noexcept {
  constexpr double kRad = std::numbers::pi / 180.0;
  const double phi1 = a.latitude * kRad;
  const double phi2 = b.latitude * kRad;
  const double dphi = (b.latitude - a.latitude) * kRad;
  const double dlambda = (b.longitude - a.longitude) * kRad;
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlambda / 2.0);
  double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  h = std::clamp(h, 0.0, 1.0);
  return 2.0 * kEarthRadiusM * std::asin(std::sqrt(h));
}

std::vector<Delivery> order_by_distance(const GeoPoint& origin,
                                        std::span<const Delivery> deliveries) {
  struct Keyed {
    double distance;
    std::size_t index;
  };
  std::vector<Keyed> keyed;
  keyed.reserve(deliveries.size());
  for (std::size_t i = 0; i < deliveries.size(); ++i)
    keyed.push_back({haversine_m(origin, deliveries[i].source.location), i});

  std::sort(keyed.begin(), keyed.end(), [&](const Keyed& l, const Keyed& r) {
    const auto& a = deliveries[l.index];
    const auto& b = deliveries[r.index];
    return std::tie(l.distance, a.created_at, a.delivery_id) <
           std::tie(r.distance, b.created_at, b.delivery_id);
  });

  std::vector<Delivery> out;
  out.reserve(keyed.size());
  for (const auto& k : keyed) out.push_back(deliveries[k.index]);
  return out;
}

GeoPoint interpolate(const GeoPoint& a, const GeoPoint& b, double t) noexcept {
  t = std::clamp(t, 0.0, 1.0);
  return {a.latitude + (b.latitude - a.latitude) * t,
          a.longitude + (b.longitude - a.longitude) * t};
}

}  // namespace parcelhub

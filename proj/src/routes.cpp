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

#include "parcelhub/routes.hpp"

#include "parcelhub/error.hpp"

namespace parcelhub {

namespace {

Route route_from_doc(const Document& d) {
  Route r;
  r.delivery_id = d.at("delivery_id").get<std::string>();
  if (auto it = d.find("courier_id"); it != d.end() && !it->is_null())
    r.courier_id = it->get<std::string>();
  for (const auto& p : d.at("points"))
    r.points.push_back({GeoPoint{p.at(0).get<double>(), p.at(1).get<double>()},
                        from_micros(p.at(2).get<std::int64_t>())});
  return r;
}

}  // namespace

Route RouteBook::append_route_point(const DeliveryId& delivery, const GeoPoint& point,
                                    Timestamp at) {
  if (!point.valid()) throw Error(Errc::invalid_coordinates, "coordinates out of range");
  Route out;
  auto& store = records_.store();
  store.atomically([&] {
    auto d = records_.delivery(delivery);
    if (!d) throw Error(Errc::unknown_delivery, "unknown delivery");
    if (d->state != DeliveryState::assigned && d->state != DeliveryState::delivering)
      throw Error(Errc::wrong_state, "delivery is " + std::string(to_string(d->state)));

    auto doc = store.get(kind::route, delivery);
    if (!doc) doc = Document{{"delivery_id", delivery}, {"points", Document::array()}};
    auto& points = (*doc)["points"];
    if (!points.empty() && at <= from_micros(points.back().at(2).get<std::int64_t>()))
      throw Error(Errc::non_monotonic_timestamp, "route timestamps must increase");
    points.push_back(Document::array({point.latitude, point.longitude, to_micros(at)}));
    (*doc)["courier_id"] = d->courier_id ? Document(*d->courier_id) : Document();
    store.put(kind::route, delivery, *doc);
    out = route_from_doc(*doc);
  });
  return out;
}

Route RouteBook::route(const DeliveryId& delivery) {
  auto doc = records_.store().get(kind::route, delivery);
  if (!doc) return Route{delivery, std::nullopt, {}};
  return route_from_doc(*doc);
}

std::vector<Route> RouteBook::query_routes(const RouteFilter& filter) {
  if (filter.from && filter.to && *filter.to < *filter.from)
    throw Error(Errc::malformed_filter, "window end precedes its start");
  const bool windowed = filter.from || filter.to;

  std::vector<Delivery> candidates;
  if (filter.delivery_id) {
    if (auto d = records_.delivery(*filter.delivery_id)) candidates.push_back(*d);
  } else {
    candidates = records_.deliveries({{"state", "delivering"}});
    if (windowed) {
      for (auto st : {"delivered", "undeliverable"})
        for (auto& d : records_.deliveries({{"state", st}})) candidates.push_back(std::move(d));
    }
  }

  std::vector<Route> out;
  for (const auto& d : candidates) {
    const bool finished =
        d.state == DeliveryState::delivered || d.state == DeliveryState::undeliverable;
    if (!(d.state == DeliveryState::delivering || (windowed && finished))) continue;
    auto r = route(d.delivery_id);
    if (!r.courier_id) r.courier_id = d.courier_id;
    if (filter.courier_id && r.courier_id != filter.courier_id) continue;
    if (windowed) {
      std::erase_if(r.points, [&](const RoutePoint& p) {
        return (filter.from && p.at < *filter.from) || (filter.to && p.at > *filter.to);
      });
      if (r.points.empty()) continue;
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace parcelhub

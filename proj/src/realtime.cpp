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

#include "parcelhub/realtime.hpp"

#include <algorithm>
#include <functional>

#include "parcelhub/error.hpp"

namespace parcelhub {

std::string_view to_string(ChannelMode m) noexcept {
  return m == ChannelMode::publisher ? "publisher" : "subscriber";
}

std::optional<ChannelPath> ChannelPath::parse(std::string_view target) {
  auto q = target.find('?');
  if (q != std::string_view::npos) target = target.substr(0, q);
  if (target == "/ws/couriers/" || target == "/ws/couriers") return ChannelPath{true, {}};
  constexpr std::string_view kPrefix = "/ws/deliveries/";
  if (!target.starts_with(kPrefix)) return std::nullopt;
  auto rest = target.substr(kPrefix.size());
  if (rest.ends_with('/')) rest.remove_suffix(1);
  if (!TrackingCode::is_well_formed(rest)) return std::nullopt;
  return ChannelPath{false, std::string(rest)};
}

std::string LocationMessage::to_frame() const {
  Document d{{"delivery_id", tracking_code},
             {"courier_id", courier_id},
             {"lat", point.latitude},
             {"lon", point.longitude},
             {"ts", format_rfc3339(ts)}};
  return d.dump();
}

std::string error_frame(std::string_view code) {
  return Document{{"error", {{"code", code}}}}.dump();
}

Hub::Hub(Records& records, RouteBook& routes, const TokenService& tokens, const Clock& clock,
         EntropySource& entropy, HubConfig config)
    : records_(records),
      routes_(routes),
      tokens_(tokens),
      clock_(clock),
      entropy_(entropy),
      config_(config) {}

std::mutex& Hub::stripe(const DeliveryId& delivery) {
  return stripes_[std::hash<std::string>{}(delivery) % stripes_.size()];
}

Hub::SessionPtr Hub::open(std::string_view path, const std::optional<std::string>& access_token,
                          std::shared_ptr<Sink> sink) {
  auto channel = ChannelPath::parse(path);
  if (!channel) throw Error(Errc::not_found, "unknown websocket path");

  auto session = std::make_shared<Session>();
  session->id = generate_id(entropy_);
  session->sink = std::move(sink);
  session->last_activity_us = to_micros(clock_.now());

  if (channel->global) {
    session->global = true;
    std::lock_guard lock(registry_mutex_);
    global_.push_back(session);
    return session;
  }

  auto delivery = records_.delivery_by_code(channel->tracking_code);
  if (!delivery) throw Error(Errc::unknown_delivery, "unknown tracking code");
  session->delivery_id = delivery->delivery_id;
  session->tracking_code = channel->tracking_code;

  if (access_token && delivery->courier_id) {
    try {
      auto claims = tokens_.verify_access(*access_token, clock_.now());
      if (claims.role == Role::courier) {
        auto courier = records_.courier_by_account(claims.account_id);
        if (courier && courier->courier_id == *delivery->courier_id) {
          session->mode = ChannelMode::publisher;
          session->courier_id = courier->courier_id;
        }
      }
    } catch (const Error&) {
      // Bad credentials downgrade to a read-only subscription.
    }
  }

  std::lock_guard lock(registry_mutex_);
  channels_[session->delivery_id].push_back(session);
  return session;
}

void Hub::on_text(const SessionPtr& session, std::string_view frame) {
  if (session->mode != ChannelMode::publisher) {
    session->sink->push(error_frame("not_publisher"));
    return;
  }
  auto doc = Document::parse(frame, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("lat") || !doc.contains("lon") ||
      !doc["lat"].is_number() || !doc["lon"].is_number()) {
    session->sink->push(error_frame("bad_frame"));
    return;
  }
  try {
    publish_location(session, doc["lat"].get<double>(), doc["lon"].get<double>());
  } catch (const Error& e) {
    session->sink->push(error_frame(to_string(e.code())));
  }
}

LocationMessage Hub::publish_location(const SessionPtr& session, double latitude,
                                      double longitude) {
  if (session->mode != ChannelMode::publisher || !session->courier_id)
    throw Error(Errc::not_publisher, "connection is read-only");
  GeoPoint point{latitude, longitude};
  if (!point.valid()) throw Error(Errc::invalid_coordinates, "coordinates out of range");

  std::lock_guard order(stripe(session->delivery_id));
  auto delivery = records_.delivery(session->delivery_id);
  if (!delivery) throw Error(Errc::unknown_delivery, "delivery no longer exists");
  if (delivery->courier_id != session->courier_id)
    throw Error(Errc::not_publisher, "courier is no longer assigned");
  if (delivery->state != DeliveryState::assigned && delivery->state != DeliveryState::delivering)
    throw Error(Errc::wrong_state, "delivery is " + std::string(to_string(delivery->state)));

  // Server receive time, nudged forward so the route stays strictly increasing.
  auto ts = clock_.now();
  {
    std::lock_guard lock(last_ts_mutex_);
    auto it = last_ts_.find(session->delivery_id);
    Timestamp last{};
    if (it != last_ts_.end()) {
      last = it->second;
    } else {
      auto r = routes_.route(session->delivery_id);
      if (!r.points.empty()) last = r.points.back().at;
    }
    if (ts <= last) ts = last + microseconds{1};
    last_ts_[session->delivery_id] = ts;
  }

  routes_.append_route_point(session->delivery_id, point, ts);
  records_.store().conditional_update(
      kind::courier, *session->courier_id, {},
      {{"last_location", to_json(point)}, {"last_seen", to_micros(ts)}});
  session->last_activity_us = to_micros(clock_.now());

  LocationMessage msg{session->tracking_code, *session->courier_id, point, ts};
  fan_out(session->delivery_id, msg.to_frame());
  return msg;
}

void Hub::fan_out(const DeliveryId& delivery, const std::string& frame) {
  std::vector<SessionPtr> targets;
  {
    std::lock_guard lock(registry_mutex_);
    if (auto it = channels_.find(delivery); it != channels_.end())
      targets.insert(targets.end(), it->second.begin(), it->second.end());
    targets.insert(targets.end(), global_.begin(), global_.end());
  }
  std::vector<SessionPtr> overflowed;
  for (const auto& s : targets) {
    if (!s->open) continue;
    if (!s->sink->push(frame)) overflowed.push_back(s);
  }
  for (const auto& s : overflowed) {
    s->sink->close("subscriber queue full");
    close(s);
  }
}

void Hub::detach_locked(const SessionPtr& session) {
  if (session->global) {
    std::erase(global_, session);
    return;
  }
  auto it = channels_.find(session->delivery_id);
  if (it == channels_.end()) return;
  std::erase(it->second, session);
  if (it->second.empty()) channels_.erase(it);
}

void Hub::close(const SessionPtr& session) {
  session->open = false;
  std::lock_guard lock(registry_mutex_);
  detach_locked(session);
}

std::vector<std::string> Hub::staleness_sweep(Timestamp now) {
  const auto cutoff = to_micros(now - config_.publisher_staleness);
  std::vector<SessionPtr> stale;
  {
    std::lock_guard lock(registry_mutex_);
    for (auto& [id, sessions] : channels_)
      for (auto& s : sessions)
        if (s->mode == ChannelMode::publisher && s->last_activity_us.load() < cutoff)
          stale.push_back(s);
    for (auto& s : stale) {
      s->open = false;
      detach_locked(s);
    }
  }
  std::vector<std::string> closed;
  for (auto& s : stale) {
    s->sink->close("publisher silent too long");
    closed.push_back(s->id);
  }

  for (const auto& c : records_.couriers()) {
    if (c.is_available && c.last_seen && to_micros(*c.last_seen) < cutoff)
      records_.store().conditional_update(kind::courier, c.courier_id, {{"is_available", true}},
                                          {{"is_available", false}});
  }
  return closed;
}

std::size_t Hub::subscriber_count(std::string_view tracking_code) const {
  std::lock_guard lock(registry_mutex_);
  std::size_t n = 0;
  for (const auto& [id, sessions] : channels_)
    for (const auto& s : sessions)
      if (s->tracking_code == tracking_code) ++n;
  return n;
}

std::size_t Hub::global_count() const {
  std::lock_guard lock(registry_mutex_);
  return global_.size();
}

}  // namespace parcelhub

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

#include "parcelhub/dispatch.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "parcelhub/error.hpp"

namespace parcelhub {

namespace {

void merge(FieldErrors& into, const std::vector<FieldError>& errors, std::string_view prefix = {}) {
  for (const auto& e : errors) into[std::string(prefix) + e.field] = e.message;
}

std::string trimmed(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::string month_key(Timestamp t) {
  std::chrono::year_month_day ymd{std::chrono::floor<std::chrono::days>(t)};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u", int(ymd.year()), unsigned(ymd.month()));
  return buf;
}

std::vector<std::string> trailing_months(Timestamp now, int months) {
  using namespace std::chrono;
  year_month_day ymd{floor<days>(now)};
  year_month current{ymd.year(), ymd.month()};
  std::vector<std::string> out;
  for (int i = months - 1; i >= 0; --i) {
    year_month m = current - std::chrono::months{i};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u", int(m.year()), unsigned(m.month()));
    out.push_back(buf);
  }
  return out;
}

Timestamp trailing_window_start(Timestamp now, int months) {
  using namespace std::chrono;
  year_month_day ymd{floor<days>(now)};
  year_month first = year_month{ymd.year(), ymd.month()} - std::chrono::months{months - 1};
  return time_point_cast<microseconds>(sys_days{first / day{1}});
}

Dispatch::Dispatch(Records& records, Outbox& outbox, RouteBook& routes,
                   const DistanceProvider& distance, EntropySource& entropy, const Clock& clock,
                   DispatchConfig config)
    : records_(records),
      outbox_(outbox),
      routes_(routes),
      distance_(distance),
      entropy_(entropy),
      clock_(clock),
      config_(config) {}

Delivery Dispatch::create_delivery(const Caller& sender, const DeliveryRequest& request) {
  FieldErrors fields;
  merge(fields, validate_item(request.item), "item.");
  merge(fields, validate_place(request.source, "source"));
  merge(fields, validate_place(request.destination, "destination"));
  const auto receiver_email = trimmed(request.receiver.email);
  if (!is_valid_email(receiver_email)) fields["receiver.email"] = "must be a valid email address";
  if (trimmed(request.receiver.first_name).empty()) fields["receiver.first_name"] = "required";
  if (trimmed(request.receiver.last_name).empty()) fields["receiver.last_name"] = "required";
  if (!fields.empty()) throw Error(Errc::validation_error, "invalid delivery", fields);

  if (request.picture) {
    if (request.picture->data.size() > config_.max_picture_bytes)
      throw Error(Errc::payload_too_large, "picture exceeds 5 MB", {{"picture", "too large"}});
    if (request.picture->content_type != "image/jpeg" && request.picture->content_type != "image/png")
      throw Error(Errc::unsupported_media_type, "picture must be JPEG or PNG",
                  {{"picture", "must be image/jpeg or image/png"}});
  }

  auto account = records_.account(sender.account_id);
  if (!account) throw Error(Errc::token_invalid, "account no longer exists");
  if (!account->is_active) throw Error(Errc::account_inactive, "account is not activated");
  auto sender_person = records_.person_by_account(sender.account_id);
  if (!sender_person) throw Error(Errc::internal, "sender has no person record");

  Delivery d;
  d.delivery_id = generate_id(entropy_);
  d.sender_account_id = sender.account_id;
  d.sender = sender_person->person_id;
  d.item = make_item(request.item);
  d.source = request.source;
  d.destination = request.destination;
  d.state = DeliveryState::ready;
  d.created_at = clock_.now();
  d.route_distance_m = distance_.route_distance_m(d.source.location, d.destination.location);
  const double travel_s = d.route_distance_m / config_.nominal_speed_mps;
  d.expected_delivery_time = d.created_at +
                             microseconds{static_cast<std::int64_t>(std::llround(travel_s * 1e6))} +
                             config_.handling;

  for (int attempt = 0;; ++attempt) {
    d.tracking_code = generate_tracking_code(entropy_);
    try {
      records_.store().atomically([&] {
        Person receiver;
        if (auto existing = records_.person_by_email(receiver_email)) {
          receiver = *existing;
        } else {
          receiver.person_id = generate_id(entropy_);
          receiver.first_name = trimmed(request.receiver.first_name);
          receiver.last_name = trimmed(request.receiver.last_name);
          receiver.email = receiver_email;
          receiver.phone = request.receiver.phone;
          if (auto acct = records_.account_by_email(receiver_email))
            receiver.account_id = acct->account_id;
          records_.insert_person(receiver);
        }
        d.receiver = receiver.person_id;
        if (request.picture) {
          d.item.picture_id = generate_id(entropy_);
          records_.insert_picture(*d.item.picture_id, request.picture->content_type,
                                  request.picture->data);
        }
        records_.insert_delivery(d, receiver_email);
        const auto code = d.tracking_code.str();
        outbox_.queue(NotificationKind::delivery_created_sender, account->email,
                      {{"tracking_code", code}, {"name", sender_person->first_name}});
        outbox_.queue(NotificationKind::delivery_created_receiver, receiver_email,
                      {{"tracking_code", code}, {"name", receiver.first_name}});
      });
      return d;
    } catch (const Error& e) {
      // Tracking-code collision on the unique index; draw a new code.
      if (e.code() != Errc::conflict || attempt >= 8) throw;
    }
  }
}

std::optional<Delivery> Dispatch::find_by_code(std::string_view tracking_code) {
  return records_.delivery_by_code(tracking_code);
}

TrackingView Dispatch::track_delivery(std::string_view tracking_code,
                                      const std::optional<Caller>& caller) {
  auto d = records_.delivery_by_code(tracking_code);
  if (!d) throw Error(Errc::unknown_tracking_code, "no delivery with that tracking code");
  TrackingView v;
  v.tracking_code = d->tracking_code;
  v.state = d->state;
  v.source_address = d->source.address_text;
  v.destination_address = d->destination.address_text;
  v.item = d->item;
  v.expected_delivery_time = d->expected_delivery_time;
  if (d->state == DeliveryState::delivering) {
    auto r = routes_.route(d->delivery_id);
    if (!r.points.empty()) v.courier_position = r.points.back();
  }
  if (caller) {
    auto account = records_.account(caller->account_id);
    auto receiver = records_.person(d->receiver);
    if (account && receiver &&
        normalize_for_index(account->email) == normalize_for_index(receiver->email))
      v.receiver = ReceiverIdentity{receiver->first_name, receiver->last_name, receiver->email};
  }
  return v;
}

std::vector<Delivery> Dispatch::list_history(const Caller& caller, HistoryDirection direction) {
  std::vector<Delivery> out;
  if (direction == HistoryDirection::sent) {
    out = records_.deliveries({{"sender_account_id", caller.account_id}});
  } else {
    auto account = records_.account(caller.account_id);
    if (!account) throw Error(Errc::token_invalid, "account no longer exists");
    out = records_.deliveries_received_by(account->email);
  }
  std::sort(out.begin(), out.end(), [](const Delivery& a, const Delivery& b) {
    if (a.created_at != b.created_at) return a.created_at > b.created_at;
    return a.delivery_id > b.delivery_id;
  });
  return out;
}

Courier Dispatch::require_courier(const Caller& caller) {
  if (caller.role != Role::courier) throw Error(Errc::not_a_courier, "courier role required");
  auto c = records_.courier_by_account(caller.account_id);
  if (!c) throw Error(Errc::not_a_courier, "account has no courier profile");
  return *c;
}

std::vector<ClosestDelivery> Dispatch::closest_deliveries(const Caller& courier,
                                                          const GeoPoint& location,
                                                          std::size_t limit) {
  require_courier(courier);
  if (!location.valid()) throw Error(Errc::invalid_coordinates, "location out of range");
  auto ready = records_.deliveries({{"state", "ready"}});
  auto ordered = order_by_distance(location, ready);
  if (ordered.size() > limit) ordered.resize(limit);
  std::vector<ClosestDelivery> out;
  out.reserve(ordered.size());
  for (auto& d : ordered) {
    double dist = haversine_m(location, d.source.location);
    out.push_back({std::move(d), dist});
  }
  return out;
}

Delivery Dispatch::accept_delivery(const Caller& courier, const DeliveryId& id) {
  auto profile = require_courier(courier);
  auto d = records_.delivery(id);
  if (!d) throw Error(Errc::unknown_delivery, "unknown delivery");
  if (d->state != DeliveryState::ready) throw Error(Errc::not_ready, "delivery is not ready");
  if (!records_.transition_delivery(*d, DeliveryState::assigned, profile.courier_id, clock_.now()))
    throw Error(Errc::not_ready, "delivery was taken by another courier");
  return *records_.delivery(id);
}

Delivery Dispatch::change_state(const Caller& courier, const DeliveryId& id, DeliveryState to,
                                const std::optional<std::string>& note) {
  auto profile = require_courier(courier);
  auto d = records_.delivery(id);
  if (!d) throw Error(Errc::unknown_delivery, "unknown delivery");
  // Losing an accept race is a conflict, not an ownership error.
  if (to == DeliveryState::assigned &&
      (d->state == DeliveryState::ready || d->courier_id != profile.courier_id))
    return accept_delivery(courier, id);
  if (d->courier_id != profile.courier_id)
    throw Error(Errc::not_assigned_courier, "delivery is assigned to another courier");
  if (!validate_transition(d->state, to))
    throw Error(Errc::forbidden_transition, std::string("cannot move from ") +
                                                std::string(to_string(d->state)) + " to " +
                                                std::string(to_string(to)));

  std::optional<CourierId> next_courier = d->courier_id;
  if (to == DeliveryState::ready) next_courier.reset();

  bool applied = false;
  records_.store().atomically([&] {
    applied = records_.transition_delivery(*d, to, next_courier, clock_.now(), note);
    if (applied && to == DeliveryState::delivered) {
      auto sender = records_.account(d->sender_account_id);
      auto person = records_.person_by_account(d->sender_account_id);
      if (sender)
        outbox_.queue(NotificationKind::delivery_completed, sender->email,
                      {{"tracking_code", d->tracking_code.str()},
                       {"name", person ? person->first_name : std::string()}});
    }
  });
  if (!applied) throw Error(Errc::conflict, "delivery changed concurrently; reload and retry");
  return *records_.delivery(id);
}

StatisticsReport Dispatch::statistics(const Caller& caller, int months, Timestamp now) {
  if (months < 1 || months > 60)
    throw Error(Errc::validation_error, "months must be within [1, 60]",
                {{"months", "must be within [1, 60]"}});
  StatisticsReport report;
  report.months = trailing_months(now, months);
  report.counts.assign(report.months.size(), 0);
  const auto start = trailing_window_start(now, months);
  for (const auto& d : records_.deliveries({{"sender_account_id", caller.account_id}})) {
    if (d.created_at < start || d.created_at > now) continue;
    auto key = month_key(d.created_at);
    auto it = std::find(report.months.begin(), report.months.end(), key);
    if (it == report.months.end()) continue;
    ++report.counts[static_cast<std::size_t>(it - report.months.begin())];
    ++report.total;
  }
  return report;
}

}  // namespace parcelhub

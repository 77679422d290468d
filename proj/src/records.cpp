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

#include "parcelhub/records.hpp"

#include <algorithm>
#include <cstdio>

#include "parcelhub/error.hpp"

namespace parcelhub {

std::vector<IndexSpec> default_indexes() {
  return {
      {std::string(kind::account), "email_idx", true},
      {std::string(kind::person), "email_idx", true},
      {std::string(kind::person), "account_id", false},
      {std::string(kind::courier), "account_id", true},
      {std::string(kind::delivery), "tracking_code", true},
      {std::string(kind::delivery), "state", false},
      {std::string(kind::delivery), "sender_account_id", false},
      {std::string(kind::delivery), "receiver_email_idx", false},
      {std::string(kind::audit), "delivery_id", false},
      {std::string(kind::outbox), "pending", false},
  };
}

Document to_json(const GeoPoint& p) { return {{"lat", p.latitude}, {"lon", p.longitude}}; }

Document to_json(const Item& item) {
  Document d{{"width_cm", item.width_cm},
             {"height_cm", item.height_cm},
             {"depth_cm", item.depth_cm},
             {"weight_class", to_string(item.weight_class)},
             {"fragile", item.fragile}};
  d["description"] = item.description ? Document(*item.description) : Document();
  d["picture_id"] = item.picture_id ? Document(*item.picture_id) : Document();
  return d;
}

Document to_json(const Place& place) {
  return {{"address", place.address_text},
          {"lat", place.location.latitude},
          {"lon", place.location.longitude}};
}

namespace {

std::optional<std::string> opt_string(const Document& d, const char* key) {
  auto it = d.find(key);
  if (it == d.end() || it->is_null()) return std::nullopt;
  return it->get<std::string>();
}

Place place_from_doc(const Document& d) {
  return Place{d.at("address").get<std::string>(),
               GeoPoint{d.at("lat").get<double>(), d.at("lon").get<double>()}};
}

Item item_from_doc(const Document& d) {
  Item item;
  item.width_cm = d.at("width_cm").get<double>();
  item.height_cm = d.at("height_cm").get<double>();
  item.depth_cm = d.at("depth_cm").get<double>();
  item.weight_class = parse_weight_class(d.at("weight_class").get<std::string>()).value();
  item.fragile = d.at("fragile").get<bool>();
  item.description = opt_string(d, "description");
  item.picture_id = opt_string(d, "picture_id");
  return item;
}

std::string format_date(std::chrono::sys_days day) {
  std::chrono::year_month_day ymd{day};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(ymd.year()), unsigned(ymd.month()),
                unsigned(ymd.day()));
  return buf;
}

std::chrono::sys_days parse_date(const std::string& s) {
  int y = 0;
  unsigned m = 0, d = 0;
  if (std::sscanf(s.c_str(), "%d-%u-%u", &y, &m, &d) != 3)
    throw Error(Errc::storage_io, "bad stored date: " + s);
  return std::chrono::sys_days{std::chrono::year{y} / std::chrono::month{m} / std::chrono::day{d}};
}

void rethrow_email_conflict(const Error& e) {
  if (e.code() == Errc::conflict) throw Error(Errc::email_taken, "email already registered");
  throw e;
}

}  // namespace

// ---------------------------------------------------------------------------
// Conversions

Document Records::to_doc(const Account& a) const {
  return {{"id", a.account_id},
          {"email", cipher_.seal(a.email)},
          {"email_idx", cipher_.index(a.email)},
          {"password_hash", a.password_hash},
          {"role", to_string(a.role)},
          {"is_admin", a.is_admin},
          {"is_active", a.is_active},
          {"created_at", to_micros(a.created_at)}};
}

Account Records::account_from_doc(const Document& d) const {
  Account a;
  a.account_id = d.at("id").get<std::string>();
  a.email = cipher_.open(d.at("email").get<std::string>());
  a.password_hash = d.at("password_hash").get<std::string>();
  a.role = parse_role(d.at("role").get<std::string>()).value();
  a.is_admin = d.at("is_admin").get<bool>();
  a.is_active = d.at("is_active").get<bool>();
  a.created_at = from_micros(d.value("created_at", std::int64_t{0}));
  return a;
}

Document Records::to_doc(const Person& p) const {
  Document d{{"id", p.person_id},
             {"first_name", cipher_.seal(p.first_name)},
             {"last_name", cipher_.seal(p.last_name)},
             {"email", cipher_.seal(p.email)},
             {"email_idx", cipher_.index(p.email)}};
  d["phone"] = p.phone ? Document(cipher_.seal(*p.phone)) : Document();
  d["account_id"] = p.account_id ? Document(*p.account_id) : Document();
  return d;
}

Person Records::person_from_doc(const Document& d) const {
  Person p;
  p.person_id = d.at("id").get<std::string>();
  p.first_name = cipher_.open(d.at("first_name").get<std::string>());
  p.last_name = cipher_.open(d.at("last_name").get<std::string>());
  p.email = cipher_.open(d.at("email").get<std::string>());
  if (auto phone = opt_string(d, "phone")) p.phone = cipher_.open(*phone);
  p.account_id = opt_string(d, "account_id");
  return p;
}

Document Records::to_doc(const Courier& c) {
  Document d{{"id", c.courier_id},
             {"account_id", c.account_id},
             {"vehicle_class", to_string(c.vehicle_class)},
             {"registered_on", format_date(c.registered_on)},
             {"is_available", c.is_available}};
  d["last_location"] = c.last_location ? to_json(*c.last_location) : Document();
  d["last_seen"] = c.last_seen ? Document(to_micros(*c.last_seen)) : Document();
  return d;
}

Courier Records::courier_from_doc(const Document& d) {
  Courier c;
  c.courier_id = d.at("id").get<std::string>();
  c.account_id = d.at("account_id").get<std::string>();
  c.vehicle_class = parse_vehicle_class(d.at("vehicle_class").get<std::string>()).value();
  c.registered_on = parse_date(d.at("registered_on").get<std::string>());
  c.is_available = d.at("is_available").get<bool>();
  if (auto it = d.find("last_location"); it != d.end() && !it->is_null())
    c.last_location = GeoPoint{it->at("lat").get<double>(), it->at("lon").get<double>()};
  if (auto it = d.find("last_seen"); it != d.end() && !it->is_null())
    c.last_seen = from_micros(it->get<std::int64_t>());
  return c;
}

Document Records::to_doc(const Delivery& x) {
  Document d{{"id", x.delivery_id},
             {"tracking_code", x.tracking_code.str()},
             {"sender_account_id", x.sender_account_id},
             {"sender_person_id", x.sender},
             {"receiver_person_id", x.receiver},
             {"item", to_json(x.item)},
             {"source", to_json(x.source)},
             {"destination", to_json(x.destination)},
             {"state", to_string(x.state)},
             {"route_distance_m", x.route_distance_m},
             {"expected_delivery_time", to_micros(x.expected_delivery_time)},
             {"created_at", to_micros(x.created_at)},
             {"version", x.version}};
  d["courier_id"] = x.courier_id ? Document(*x.courier_id) : Document();
  d["note"] = x.note ? Document(*x.note) : Document();
  return d;
}

Delivery Records::delivery_from_doc(const Document& d) {
  Delivery x;
  x.delivery_id = d.at("id").get<std::string>();
  x.tracking_code = TrackingCode::parse(d.at("tracking_code").get<std::string>()).value();
  x.sender_account_id = d.at("sender_account_id").get<std::string>();
  x.sender = d.at("sender_person_id").get<std::string>();
  x.receiver = d.at("receiver_person_id").get<std::string>();
  x.item = item_from_doc(d.at("item"));
  x.source = place_from_doc(d.at("source"));
  x.destination = place_from_doc(d.at("destination"));
  x.state = parse_delivery_state(d.at("state").get<std::string>()).value();
  x.courier_id = opt_string(d, "courier_id");
  x.route_distance_m = d.at("route_distance_m").get<double>();
  x.expected_delivery_time = from_micros(d.at("expected_delivery_time").get<std::int64_t>());
  x.created_at = from_micros(d.at("created_at").get<std::int64_t>());
  x.version = d.value("version", std::int64_t{0});
  x.note = opt_string(d, "note");
  return x;
}

// ---------------------------------------------------------------------------
// Accounts

void Records::insert_account(const Account& a) {
  try {
    store_.insert(kind::account, a.account_id, to_doc(a));
  } catch (const Error& e) {
    rethrow_email_conflict(e);
  }
}

void Records::save_account(const Account& a) {
  try {
    store_.put(kind::account, a.account_id, to_doc(a));
  } catch (const Error& e) {
    rethrow_email_conflict(e);
  }
}

std::optional<Account> Records::account(const AccountId& id) {
  auto d = store_.get(kind::account, id);
  if (!d) return std::nullopt;
  return account_from_doc(*d);
}

std::optional<Account> Records::account_by_email(std::string_view email) {
  auto docs = store_.list(kind::account, {{"email_idx", cipher_.index(email)}});
  if (docs.empty()) return std::nullopt;
  return account_from_doc(docs.front());
}

std::vector<Account> Records::accounts() {
  std::vector<Account> out;
  for (const auto& d : store_.list(kind::account)) out.push_back(account_from_doc(d));
  return out;
}

bool Records::erase_account(const AccountId& id) { return store_.erase(kind::account, id); }

// ---------------------------------------------------------------------------
// Persons

void Records::insert_person(const Person& p) {
  try {
    store_.insert(kind::person, p.person_id, to_doc(p));
  } catch (const Error& e) {
    rethrow_email_conflict(e);
  }
}

void Records::save_person(const Person& p) {
  try {
    store_.put(kind::person, p.person_id, to_doc(p));
  } catch (const Error& e) {
    rethrow_email_conflict(e);
  }
}

std::optional<Person> Records::person(const PersonId& id) {
  auto d = store_.get(kind::person, id);
  if (!d) return std::nullopt;
  return person_from_doc(*d);
}

std::optional<Person> Records::person_by_email(std::string_view email) {
  auto docs = store_.list(kind::person, {{"email_idx", cipher_.index(email)}});
  if (docs.empty()) return std::nullopt;
  return person_from_doc(docs.front());
}

std::optional<Person> Records::person_by_account(const AccountId& id) {
  auto docs = store_.list(kind::person, {{"account_id", id}});
  if (docs.empty()) return std::nullopt;
  return person_from_doc(docs.front());
}

std::vector<Person> Records::persons() {
  std::vector<Person> out;
  for (const auto& d : store_.list(kind::person)) out.push_back(person_from_doc(d));
  return out;
}

bool Records::erase_person(const PersonId& id) { return store_.erase(kind::person, id); }

// ---------------------------------------------------------------------------
// Couriers

void Records::insert_courier(const Courier& c) { store_.insert(kind::courier, c.courier_id, to_doc(c)); }

void Records::save_courier(const Courier& c) { store_.put(kind::courier, c.courier_id, to_doc(c)); }

std::optional<Courier> Records::courier(const CourierId& id) {
  auto d = store_.get(kind::courier, id);
  if (!d) return std::nullopt;
  return courier_from_doc(*d);
}

std::optional<Courier> Records::courier_by_account(const AccountId& id) {
  auto docs = store_.list(kind::courier, {{"account_id", id}});
  if (docs.empty()) return std::nullopt;
  return courier_from_doc(docs.front());
}

std::vector<Courier> Records::couriers() {
  std::vector<Courier> out;
  for (const auto& d : store_.list(kind::courier)) out.push_back(courier_from_doc(d));
  return out;
}

bool Records::erase_courier(const CourierId& id) { return store_.erase(kind::courier, id); }

// ---------------------------------------------------------------------------
// Deliveries

void Records::insert_delivery(const Delivery& delivery, std::string_view receiver_email) {
  auto doc = to_doc(delivery);
  doc["receiver_email_idx"] = cipher_.index(receiver_email);
  store_.insert(kind::delivery, delivery.delivery_id, doc);
}

std::optional<Delivery> Records::delivery(const DeliveryId& id) {
  auto d = store_.get(kind::delivery, id);
  if (!d) return std::nullopt;
  return delivery_from_doc(*d);
}

std::optional<Delivery> Records::delivery_by_code(std::string_view tracking_code) {
  if (!TrackingCode::is_well_formed(tracking_code)) return std::nullopt;
  auto docs = store_.list(kind::delivery, {{"tracking_code", std::string(tracking_code)}});
  if (docs.empty()) return std::nullopt;
  return delivery_from_doc(docs.front());
}

std::vector<Delivery> Records::deliveries(const Predicate& filter) {
  std::vector<Delivery> out;
  for (const auto& d : store_.list(kind::delivery, filter)) out.push_back(delivery_from_doc(d));
  return out;
}

std::vector<Delivery> Records::deliveries_received_by(std::string_view email) {
  return deliveries({{"receiver_email_idx", cipher_.index(email)}});
}

bool Records::erase_delivery(const DeliveryId& id) { return store_.erase(kind::delivery, id); }

bool Records::transition_delivery(const Delivery& current, DeliveryState to,
                                  const std::optional<CourierId>& new_courier, Timestamp at,
                                  const std::optional<std::string>& note) {
  bool applied = false;
  store_.atomically([&] {
    Document patch{{"state", to_string(to)}, {"version", current.version + 1}};
    patch["courier_id"] = new_courier ? Document(*new_courier) : Document();
    if (note) patch["note"] = *note;
    auto result = store_.conditional_update(
        kind::delivery, current.delivery_id,
        {{"state", std::string(to_string(current.state))}, {"version", current.version}}, patch);
    if (result != UpdateResult::applied) return;
    applied = true;
    char suffix[24];
    std::snprintf(suffix, sizeof suffix, ":%010lld", static_cast<long long>(current.version + 1));
    Document entry{{"delivery_id", current.delivery_id},
                   {"version", current.version + 1},
                   {"from", to_string(current.state)},
                   {"to", to_string(to)},
                   {"at", to_micros(at)}};
    entry["courier_id"] = new_courier ? Document(*new_courier) : Document();
    store_.insert(kind::audit, current.delivery_id + suffix, entry);
  });
  return applied;
}

std::vector<StateChange> Records::audit_trail(const DeliveryId& id) {
  std::vector<StateChange> out;
  for (const auto& d : store_.list(kind::audit, {{"delivery_id", id}})) {
    StateChange c;
    c.delivery_id = id;
    c.version = d.at("version").get<std::int64_t>();
    c.from = parse_delivery_state(d.at("from").get<std::string>()).value();
    c.to = parse_delivery_state(d.at("to").get<std::string>()).value();
    c.courier_id = opt_string(d, "courier_id");
    c.at = from_micros(d.at("at").get<std::int64_t>());
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(),
            [](const StateChange& a, const StateChange& b) { return a.version < b.version; });
  return out;
}

void Records::insert_picture(const std::string& id, const std::string& content_type,
                             const Bytes& data) {
  store_.insert(kind::picture, id,
                {{"id", id}, {"content_type", content_type}, {"data", base64_encode(data)}});
}

}  // namespace parcelhub

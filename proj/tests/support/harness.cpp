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

#include "support/harness.hpp"

#include <random>

#include "parcelhub/codec.hpp"
#include "parcelhub/password.hpp"

namespace parcelhub::fixtures {

void MemoryTransport::send(const EmailMessage& m) {
  std::lock_guard lock(mutex_);
  if (failures_ > 0) {
    --failures_;
    throw Error(Errc::transport_unavailable, "scripted failure");
  }
  messages_.push_back(m);
}

std::vector<EmailMessage> MemoryTransport::messages() const {
  std::lock_guard lock(mutex_);
  return messages_;
}

std::string MemoryTransport::last_token(const std::string& to, const std::string& marker) const {
  std::lock_guard lock(mutex_);
  const std::string needle = marker + ": ";
  for (auto it = messages_.rbegin(); it != messages_.rend(); ++it) {
    if (it->to != to) continue;
    auto pos = it->body.find(needle);
    if (pos == std::string::npos) continue;
    pos += needle.size();
    return it->body.substr(pos, it->body.find_first_of("\r\n", pos) - pos);
  }
  return {};
}

void MemoryTransport::fail_next(int n) {
  std::lock_guard lock(mutex_);
  failures_ = n;
}

Config test_config(const std::string& database) {
  Config c;
  c.database = database;
  c.signing_key = "test-signing-key-0123456789abcdef";
  Bytes key(32);
  for (std::size_t i = 0; i < key.size(); ++i) key[i] = static_cast<std::uint8_t>(i * 7 + 3);
  c.field_key = base64_encode(key);
  c.field_key_id = "t1";
  c.mail.transport = "none";
  c.require_email_verification = false;
  c.password = PasswordParams::fast_for_tests();
  c.public_url = "http://parcelhub.test";
  return c;
}

TempDir::TempDir() {
  std::random_device rd;
  auto base = std::filesystem::temp_directory_path();
  for (;;) {
    path_ = base / ("parcelhub-test-" + std::to_string(rd()));
    if (std::filesystem::create_directory(path_)) break;
  }
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

Harness::Harness(std::uint64_t seed, Config config)
    : clock(make_utc(2026, 10, 16, 12, 0, 0)), entropy(seed) {
  auto transport = std::make_unique<MemoryTransport>();
  mail = transport.get();
  PlatformOptions o;
  o.clock = &clock;
  o.entropy = &entropy;
  o.transport = std::move(transport);
  platform = std::make_unique<Platform>(std::move(config), std::move(o));
}

Account Harness::user(const std::string& email, const std::string& first, const std::string& last) {
  return p().accounts().register_user({email, kPassword, first, last, std::nullopt});
}

Courier Harness::courier(const std::string& email, VehicleClass v) {
  auto profile = p().accounts().register_courier({email, kPassword, "Cora", "Courier", std::nullopt}, v);
  return *profile.courier;
}

Account Harness::admin(const std::string& email) {
  Account a;
  a.account_id = generate_id(entropy);
  a.email = email;
  a.password_hash = hash_password(kPassword, p().config().password);
  a.is_admin = true;
  a.is_active = true;
  a.created_at = clock.now();
  p().records().insert_account(a);
  return a;
}

std::string Harness::access_token(const std::string& email) {
  return p().accounts().login(email, kPassword).access_token;
}

Delivery Harness::delivery(const Account& sender, GeoPoint source, GeoPoint destination,
                           const std::string& receiver_email, const std::string& receiver_first,
                           const std::string& receiver_last) {
  DeliveryRequest r;
  r.item.width_cm = 20;
  r.item.height_cm = 10;
  r.item.depth_cm = 5;
  r.item.weight_class = WeightClass::light;
  r.source = {"Pickup street 1", source};
  r.destination = {"Drop-off lane 2", destination};
  r.receiver = {receiver_first, receiver_last, receiver_email, std::nullopt};
  return p().dispatch().create_delivery(caller_of(sender), r);
}

Caller caller_of(const Account& a) { return {a.account_id, a.role}; }

http::Request json_request(const std::string& method, const std::string& target, const Document& body,
                           const std::string& bearer) {
  http::Headers h{{"Content-Type", "application/json"}};
  if (!bearer.empty()) h["Authorization"] = "Bearer " + bearer;
  return http::Request::make(method, target, h, body.dump());
}

http::Request get_request(const std::string& target, const std::string& bearer) {
  http::Headers h;
  if (!bearer.empty()) h["Authorization"] = "Bearer " + bearer;
  return http::Request::make("GET", target, h);
}

http::Request multipart_request(const std::string& target, const Document& payload, const std::string& bearer,
                                const std::string& picture, const std::string& picture_type) {
  const std::string boundary = "----parcelhub-test-boundary";
  std::string body = "--" + boundary +
                     "\r\nContent-Disposition: form-data; name=\"payload\"\r\n"
                     "Content-Type: application/json\r\n\r\n" +
                     payload.dump() + "\r\n";
  if (!picture.empty())
    body += "--" + boundary +
            "\r\nContent-Disposition: form-data; name=\"picture\"; filename=\"p.png\"\r\n"
            "Content-Type: " + picture_type + "\r\n\r\n" + picture + "\r\n";
  body += "--" + boundary + "--\r\n";
  http::Headers h{{"Content-Type", "multipart/form-data; boundary=" + boundary}};
  if (!bearer.empty()) h["Authorization"] = "Bearer " + bearer;
  return http::Request::make("POST", target, h, body);
}

Document body_of(const http::Response& r) {
  if (r.body.empty()) return nullptr;
  return Document::parse(r.body);
}

Document delivery_payload(GeoPoint source, GeoPoint destination, const std::string& receiver_email,
                          const std::string& receiver_first, const std::string& receiver_last) {
  return {{"item", {{"width_cm", 30}, {"height_cm", 20}, {"depth_cm", 10}, {"weight_class", "medium"},
                    {"fragile", true}, {"description", "books"}}},
          {"source", {{"address", "Pickup street 1"}, {"lat", source.latitude}, {"lon", source.longitude}}},
          {"destination",
           {{"address", "Drop-off lane 2"}, {"lat", destination.latitude}, {"lon", destination.longitude}}},
          {"receiver", {{"first_name", receiver_first}, {"last_name", receiver_last}, {"email", receiver_email}}}};
}

LiveService::LiveService(Config config, int threads) {
  const int drain = config.drain_interval_ms;
  const int sweep = config.sweep_interval_ms;
  platform = std::make_unique<Platform>(std::move(config));
  gateway = std::make_unique<Gateway>(*platform);
  ServerOptions o;
  o.threads = threads;
  server = std::make_unique<Server>(*platform, *gateway, o);
  port = server->start();
  maintenance = std::make_unique<Maintenance>(*platform, std::chrono::milliseconds(drain),
                                              std::chrono::milliseconds(sweep));
  maintenance->start();
}

LiveService::~LiveService() {
  maintenance->stop();
  server->stop();
}

}  // namespace parcelhub::fixtures

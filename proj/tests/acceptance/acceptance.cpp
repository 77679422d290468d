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

// Acceptance gate: one PASS/FAIL line per criterion on stdout, diagnostics on
// stderr. Exit status is the number of failed criteria (capped at 100).

#include <algorithm>
#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <latch>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <httplib.h>

#include "parcelhub/codec.hpp"
#include "parcelhub/crypto.hpp"
#include "parcelhub/error.hpp"
#include "parcelhub/password.hpp"
#include "parcelhub/sim.hpp"
#include "parcelhub/ws_client.hpp"
#include "support/harness.hpp"
#include "support/oracles.hpp"

using namespace parcelhub;
using namespace parcelhub::fixtures;
using namespace std::chrono_literals;
using steady = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Collects failures; the first few make it into the summary line.
struct Verdict {
  std::vector<std::string> problems;
  std::size_t checks = 0;

  void expect(bool ok, const std::string& what) {
    ++checks;
    if (!ok) problems.push_back(what);
  }
  Outcome done(const std::string& summary) const {
    if (problems.empty()) return {true, summary};
    std::string d = std::to_string(problems.size()) + " problem(s): ";
    for (std::size_t i = 0; i < problems.size() && i < 3; ++i) d += (i ? "; " : "") + problems[i];
    return {false, d};
  }
};

std::string basic(const std::string& user, const std::string& password) {
  const std::string creds = user + ":" + password;
  return "Basic " + base64_encode(Bytes(creds.begin(), creds.end()));
}

std::string random_word(std::mt19937_64& rng, std::size_t len) {
  static constexpr std::string_view kLower = "abcdefghijklmnopqrstuvwxyz";
  std::string s(1, static_cast<char>('A' + rng() % 26));
  while (s.size() < len) s.push_back(kLower[rng() % kLower.size()]);
  return s;
}

DeliveryRequest small_parcel(GeoPoint from) {
  DeliveryRequest r;
  r.item.width_cm = 10;
  r.item.height_cm = 10;
  r.item.depth_cm = 10;
  r.item.weight_class = WeightClass::light;
  r.source = {"A street 1", from};
  r.destination = {"B street 2", {48.2, 17.2}};
  r.receiver = {"Rita", "Receiver", "r@example.org", std::nullopt};
  return r;
}

Caller courier_caller(const Courier& c) { return {c.account_id, Role::courier}; }

// ---------------------------------------------------------------------------

Outcome state_machine() {
  Verdict v;
  int allowed = 0;
  for (auto from : kAllDeliveryStates)
    for (auto to : kAllDeliveryStates) {
      bool lib = validate_transition(from, to);
      allowed += lib;
      v.expect(lib == oracle::edge_allowed(from, to),
               std::string(to_string(from)) + "->" + std::string(to_string(to)));
    }
  v.expect(allowed == 6, "expected 6 allowed edges, got " + std::to_string(allowed));

  Harness h(11);
  auto s = h.user("s@example.org");
  std::vector<Courier> cs;
  for (int i = 0; i < 4; ++i) cs.push_back(h.courier("c" + std::to_string(i) + "@example.org"));
  std::vector<Delivery> ds;
  for (int i = 0; i < 400; ++i) ds.push_back(h.delivery(s, {48.1, 17.1}, {48.2, 17.2}));
  std::mt19937_64 rng(2026);
  std::size_t applied = 0;
  for (int step = 0; step < 5000; ++step) {
    auto& d = ds[rng() % ds.size()];
    // Mostly plausible moves by the assigned courier, with arbitrary ones mixed in.
    auto current = *h.p().records().delivery(d.delivery_id);
    auto next = allowed_transitions(current.state);
    auto to = (rng() % 4 && !next.empty()) ? next[rng() % next.size()]
                                           : kAllDeliveryStates[rng() % kAllDeliveryStates.size()];
    const Courier* who = &cs[rng() % cs.size()];
    for (auto& c : cs)
      if (current.courier_id == c.courier_id && rng() % 4) who = &c;
    try {
      h.p().dispatch().change_state(courier_caller(*who), d.delivery_id, to);
      ++applied;
    } catch (const Error&) {
    }
  }
  std::size_t edges = 0;
  for (auto& d : ds) {
    DeliveryState at = DeliveryState::ready;
    for (auto& e : h.p().records().audit_trail(d.delivery_id)) {
      ++edges;
      v.expect(e.from == at, "audit trail discontinuity on " + d.tracking_code.str());
      v.expect(oracle::edge_allowed(e.from, e.to),
               "audit edge " + std::string(to_string(e.from)) + "->" + std::string(to_string(e.to)));
      at = e.to;
    }
    v.expect(h.p().records().delivery(d.delivery_id)->state == at, "final state differs from trail");
  }
  v.expect(edges == applied, "audit edges " + std::to_string(edges) + " != applied " + std::to_string(applied));
  return v.done("25 pairs match; 5000 random ops, " + std::to_string(edges) + " audited edges all allowed");
}

Outcome token_protocol() {
  const auto t0 = steady::now();
  Verdict v;
  Harness h;
  Gateway gw(h.p());
  h.user("t@example.org");
  auto login = gw.handle(http::Request::make("GET", "/api/accounts/token/",
                                             {{"Authorization", basic("t@example.org", kPassword)}}));
  v.expect(login.status == 200, "login status " + std::to_string(login.status));
  auto pair = body_of(login);
  auto renew = [&](const std::string& token) {
    return gw.handle(json_request("POST", "/api/accounts/token/renew/", {{"renew_token", token}}));
  };
  auto fresh = renew(pair["renew_token"]);
  v.expect(fresh.status == 200, "valid renew status " + std::to_string(fresh.status));
  auto fresh_pair = body_of(fresh);
  auto me = gw.handle(get_request("/api/accounts/me/", fresh_pair.value("access_token", "")));
  v.expect(me.status == 200, "renewed access token rejected");
  v.expect(renew(fresh_pair.value("renew_token", "")).status == 200, "renewed renew token rejected");

  auto replay = renew(pair["renew_token"]);
  v.expect(replay.status == 401 && body_of(replay)["error"]["code"] == "token_invalid",
           "double spend gave " + replay.body);
  for (const std::string& bad : std::vector<std::string>{"garbage", "a.b.c", pair["access_token"]}) {
    auto r = renew(bad);
    v.expect(r.status == 401 && body_of(r)["error"]["code"] == "token_invalid", "invalid renew gave " + r.body);
  }
  const double secs = std::chrono::duration<double>(steady::now() - t0).count();
  v.expect(secs < 5.0, "took " + std::to_string(secs) + " s");
  std::ostringstream d;
  d << "renew ok, replay 401 token_invalid, invalid 401 token_invalid in " << secs << " s";
  return v.done(d.str());
}

Outcome redaction() {
  Verdict v;
  Harness h(5);
  Gateway gw(h.p());
  h.user("sender@example.org");
  auto sender = h.access_token("sender@example.org");
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> lat(48.1, 48.2), lon(17.05, 17.2);
  for (int i = 0; i < 100; ++i) {
    auto first = random_word(rng, 9), last = random_word(rng, 11);
    auto email = random_word(rng, 8) + "." + std::to_string(i) + "@" + random_word(rng, 7) + ".org";
    for (auto& ch : email) ch = static_cast<char>(std::tolower(ch));
    h.user(email, first, last);
    auto created = gw.handle(multipart_request(
        "/api/deliveries/", delivery_payload({lat(rng), lon(rng)}, {lat(rng), lon(rng)}, email, first, last), sender));
    if (created.status != 201) {
      v.expect(false, "create failed: " + created.body);
      continue;
    }
    const std::string code = body_of(created)["tracking_code"];
    auto anon = gw.handle(get_request("/api/deliveries/" + code + "/"));
    v.expect(anon.status == 200, "anonymous tracking status " + std::to_string(anon.status));
    for (const auto& secret : {first, last, email})
      v.expect(anon.body.find(secret) == std::string::npos, "anonymous view leaks '" + secret + "'");
    auto own = gw.handle(get_request("/api/deliveries/" + code + "/", h.access_token(email)));
    for (const auto& secret : {first, last, email})
      v.expect(own.body.find(secret) != std::string::npos, "receiver view lacks '" + secret + "'");
  }
  return v.done("100 deliveries: anonymous views carry no receiver bytes, receiver views carry all");
}

Outcome matching_oracle() {
  Verdict v;
  std::mt19937_64 rng(1000);
  std::uniform_real_distribution<double> lat(48.10, 48.20), lon(17.05, 17.20);
  std::size_t compared = 0;
  for (int fixture = 0; fixture < 1000; ++fixture) {
    Harness h(static_cast<std::uint64_t>(fixture) + 1);
    auto s = h.user("s@example.org");
    auto c = h.courier("c@example.org");
    std::vector<Delivery> all;
    const int n = 1 + static_cast<int>(rng() % 30);
    for (int i = 0; i < n; ++i) {
      if (rng() % 3) h.clock.advance(microseconds{static_cast<std::int64_t>(rng() % 5'000'000)});
      // Shared pickup points force the created_at / id tie-breaks.
      GeoPoint src = (!all.empty() && rng() % 5 == 0) ? all[rng() % all.size()].source.location
                                                      : GeoPoint{lat(rng), lon(rng)};
      all.push_back(h.delivery(s, src, {lat(rng), lon(rng)}));
    }
    const double olat = lat(rng), olon = lon(rng);
    auto got = h.p().dispatch().closest_deliveries(courier_caller(c), {olat, olon}, 100);
    auto want = oracle::nearest_order(olat, olon, all);
    bool same = got.size() == want.size();
    for (std::size_t i = 0; same && i < got.size(); ++i) same = got[i].delivery.delivery_id == want[i];
    v.expect(same, "fixture " + std::to_string(fixture) + " order differs");
    ++compared;
  }

  Harness h(4242);
  auto s = h.user("s@example.org");
  auto c = h.courier("c@example.org");
  std::vector<Delivery> grid;
  for (int i = 0; i < 10; ++i) grid.push_back(h.delivery(s, {48.10 + 0.01 * i, 17.05 + 0.015 * i}, {48.15, 17.1}));
  auto order = [&](GeoPoint o) {
    std::vector<DeliveryId> ids;
    for (auto& cd : h.p().dispatch().closest_deliveries(courier_caller(c), o, 100)) ids.push_back(cd.delivery.delivery_id);
    return ids;
  };
  auto a = order({48.10, 17.05}), b = order({48.20, 17.20});
  v.expect(a != b, "two origins produced the same order");
  v.expect(a == oracle::nearest_order(48.10, 17.05, grid) && b == oracle::nearest_order(48.20, 17.20, grid),
           "two-origin orders differ from oracle");
  return v.done(std::to_string(compared) + " fixtures match brute force; opposite origins give different orders");
}

Outcome acceptance_race() {
  Verdict v;
  LiveService svc(test_config(), 8);
  auto& p = *svc.platform;
  p.accounts().register_user({"s@example.org", kPassword, "S", "Ender", std::nullopt});
  auto sender = p.records().account_by_email("s@example.org");
  std::vector<std::string> tokens;
  for (int i = 0; i < 16; ++i) {
    auto email = "c" + std::to_string(i) + "@example.org";
    p.accounts().register_courier({email, kPassword, "C", "Ourier", std::nullopt}, VehicleClass::small);
    tokens.push_back(p.accounts().login(email, kPassword).access_token);
  }
  std::vector<std::unique_ptr<httplib::Client>> clients;
  for (int i = 0; i < 16; ++i) {
    clients.push_back(std::make_unique<httplib::Client>("127.0.0.1", svc.port));
    clients.back()->set_keep_alive(true);
  }
  int clean_rounds = 0;
  for (int round = 0; round < 100; ++round) {
    auto d = p.dispatch().create_delivery({sender->account_id, Role::user}, small_parcel({48.1, 17.1}));
    const std::string target = "/api/deliveries/" + d.tracking_code.str() + "/state/";
    std::latch go(16);
    std::atomic<int> ok{0}, conflict{0}, other{0};
    std::vector<std::thread> ts;
    for (int i = 0; i < 16; ++i)
      ts.emplace_back([&, i] {
        httplib::Headers hdr{{"Authorization", "Bearer " + tokens[i]}};
        go.arrive_and_wait();
        auto r = clients[i]->Post(target, hdr, R"({"state":"assigned"})", "application/json");
        if (r && r->status == 200) ++ok;
        else if (r && r->status == 409) ++conflict;
        else ++other;
      });
    for (auto& t : ts) t.join();
    const bool clean = ok == 1 && conflict == 15 && other == 0;
    clean_rounds += clean;
    v.expect(clean, "round " + std::to_string(round) + ": " + std::to_string(ok.load()) + " ok, " +
                        std::to_string(conflict.load()) + " conflicts, " + std::to_string(other.load()) + " other");
    v.expect(p.records().audit_trail(d.delivery_id).size() == 1, "round " + std::to_string(round) + " audit size");
  }
  return v.done(std::to_string(clean_rounds) + "/100 rounds: 1 success + 15 x 409 over HTTP");
}

Outcome realtime() {
  Verdict v;
  LiveService svc(test_config(), 8);
  auto& p = *svc.platform;
  p.accounts().register_user({"s@example.org", kPassword, "S", "Ender", std::nullopt});
  const Caller sender{p.records().account_by_email("s@example.org")->account_id, Role::user};

  struct Driver {
    Courier courier;
    std::string token;
    Delivery delivery;
  };
  auto make_driver = [&](const std::string& email, GeoPoint from) {
    auto prof = p.accounts().register_courier({email, kPassword, "C", "Ourier", std::nullopt}, VehicleClass::small);
    auto d = p.dispatch().create_delivery(sender, small_parcel(from));
    Caller cc{prof.account.account_id, Role::courier};
    p.dispatch().accept_delivery(cc, d.delivery_id);
    p.dispatch().change_state(cc, d.delivery_id, DeliveryState::delivering);
    return Driver{*prof.courier, p.accounts().login(email, kPassword).access_token, d};
  };
  auto main_driver = make_driver("main@example.org", {48.10, 17.10});
  auto other_driver = make_driver("other@example.org", {48.15, 17.15});
  const std::string code = main_driver.delivery.tracking_code.str();
  const std::string path = "/ws/deliveries/" + code + "/";

  WsClient publisher, other_publisher;
  publisher.connect("127.0.0.1", svc.port, path, main_driver.token);
  other_publisher.connect("127.0.0.1", svc.port, "/ws/deliveries/" + other_driver.delivery.tracking_code.str() + "/",
                          other_driver.token);
  std::vector<std::unique_ptr<WsClient>> delivery_subs, global_subs;
  for (int i = 0; i < 50; ++i) {
    delivery_subs.push_back(std::make_unique<WsClient>());
    delivery_subs.back()->connect("127.0.0.1", svc.port, path);
    global_subs.push_back(std::make_unique<WsClient>());
    global_subs.back()->connect("127.0.0.1", svc.port, "/ws/couriers/");
  }
  for (auto deadline = steady::now() + 5s;
       steady::now() < deadline && (p.hub().subscriber_count(code) < 51 || p.hub().global_count() < 50);)
    std::this_thread::sleep_for(10ms);
  v.expect(p.hub().subscriber_count(code) == 51 && p.hub().global_count() == 50, "sessions did not register");

  constexpr int kFrames = 20, kOtherFrames = 5;
  std::mutex sent_mutex;
  std::map<std::string, steady::time_point> sent_at;  // keyed by lat text, unique per frame
  auto lat_key = [](double lat) {
    std::ostringstream s;
    s.precision(10);
    s << lat;
    return s.str();
  };

  struct Received {
    std::vector<std::string> frames;
    std::vector<steady::time_point> at;
  };
  std::vector<Received> got_delivery(50), got_global(50);
  std::vector<std::thread> readers;
  auto reader = [](WsClient& ws, Received& out, std::size_t expected) {
    auto deadline = steady::now() + 15s;
    while (out.frames.size() < expected && steady::now() < deadline) {
      try {
        if (auto f = ws.read(500ms)) {
          out.at.push_back(steady::now());
          out.frames.push_back(*f);
        }
      } catch (const Error&) {
        return;
      }
    }
  };
  for (int i = 0; i < 50; ++i) {
    readers.emplace_back(reader, std::ref(*delivery_subs[i]), std::ref(got_delivery[i]), std::size_t{kFrames});
    readers.emplace_back(reader, std::ref(*global_subs[i]), std::ref(got_global[i]),
                         std::size_t{kFrames + kOtherFrames});
  }

  std::thread other([&] {
    for (int i = 0; i < kOtherFrames; ++i) {
      const double lat = 48.15 + 0.0001 * (i + 1);
      {
        std::lock_guard lock(sent_mutex);
        sent_at[lat_key(lat)] = steady::now();
      }
      other_publisher.send(Document{{"lat", lat}, {"lon", 17.15}}.dump());
      other_publisher.read(2s);  // echo
      std::this_thread::sleep_for(130ms);
    }
  });
  std::vector<std::string> echoes;
  for (int i = 0; i < kFrames; ++i) {
    const double lat = 48.10 + 0.0001 * (i + 1);
    {
      std::lock_guard lock(sent_mutex);
      sent_at[lat_key(lat)] = steady::now();
    }
    publisher.send(Document{{"lat", lat}, {"lon", 17.10 + 0.0001 * i}}.dump());
    if (auto e = publisher.read(2s)) echoes.push_back(*e);
    std::this_thread::sleep_for(50ms);
  }
  other.join();
  for (auto& t : readers) t.join();

  double worst = 0.0;
  std::size_t delivered_frames = 0;
  auto audit = [&](const Received& r, std::size_t expected, const std::string& who, bool only_main) {
    v.expect(r.frames.size() == expected,
             who + " got " + std::to_string(r.frames.size()) + "/" + std::to_string(expected) + " frames");
    for (std::size_t i = 0; i < r.frames.size(); ++i) {
      auto f = Document::parse(r.frames[i], nullptr, false);
      if (f.is_discarded() || !f.contains("lat")) {
        v.expect(false, who + " got a non-location frame " + r.frames[i]);
        continue;
      }
      ++delivered_frames;
      const bool is_main = f.value("delivery_id", "") == code;
      if (only_main) v.expect(is_main, who + " got a frame for another delivery");
      const auto& expected_courier = is_main ? main_driver.courier.courier_id : other_driver.courier.courier_id;
      v.expect(f.value("courier_id", "") == expected_courier, who + " frame lacks the right courier_id");
      std::lock_guard lock(sent_mutex);
      auto it = sent_at.find(lat_key(f["lat"].get<double>()));
      if (it == sent_at.end()) {
        v.expect(false, who + " got an unknown frame");
        continue;
      }
      const double latency = std::chrono::duration<double>(r.at[i] - it->second).count();
      worst = std::max(worst, latency);
      v.expect(latency <= 1.0, who + " frame after " + std::to_string(latency) + " s");
    }
  };
  for (int i = 0; i < 50; ++i) {
    audit(got_delivery[i], kFrames, "delivery subscriber " + std::to_string(i), true);
    audit(got_global[i], kFrames + kOtherFrames, "global subscriber " + std::to_string(i), false);
  }

  // Route persisted server-side equals what subscribers saw, in order.
  auto route = p.routes().route(main_driver.delivery.delivery_id);
  const auto& seen = got_delivery[0].frames;
  bool same = route.points.size() == seen.size();
  for (std::size_t i = 0; same && i < seen.size(); ++i) {
    auto f = Document::parse(seen[i]);
    auto ts = parse_rfc3339(f.value("ts", ""));
    same = ts && *ts == route.points[i].at && f["lat"].get<double>() == route.points[i].point.latitude &&
           f["lon"].get<double>() == route.points[i].point.longitude;
  }
  v.expect(same, "persisted route differs from broadcast sequence");
  v.expect(echoes.size() == kFrames, "publisher echoes missing");

  // Subscribers may not publish, and their frames reach nobody.
  delivery_subs[0]->send(R"({"lat":48.19,"lon":17.19})");
  auto refusal = delivery_subs[0]->read(2s);
  v.expect(refusal && Document::parse(*refusal, nullptr, false).value("/error/code"_json_pointer, std::string()) ==
                          "not_publisher",
           "subscriber publish was not refused: " + refusal.value_or("<nothing>"));
  v.expect(!delivery_subs[1]->read(300ms) && !global_subs[0]->read(50ms), "refused frame was broadcast");
  v.expect(p.routes().route(main_driver.delivery.delivery_id).points.size() == route.points.size(),
           "refused frame was persisted");

  std::ostringstream d;
  d.precision(3);
  d << "100 subscribers received " << delivered_frames << " frames, worst " << worst * 1000
    << " ms; subscriber publish refused; courier_id present; route == broadcast";
  return v.done(d.str());
}

Outcome encryption_at_rest() {
  Verdict v;
  TempDir dir;
  std::vector<std::string> secrets;
  std::string tampered_id;
  {
    Platform p(test_config((dir.path() / "store.db").string()));
    std::mt19937_64 rng(100);
    for (int i = 0; i < 100; ++i) {
      Person x;
      x.person_id = generate_id(p.entropy());
      x.first_name = random_word(rng, 10);
      x.last_name = random_word(rng, 12);
      x.email = random_word(rng, 9) + std::to_string(i) + "@" + random_word(rng, 8) + ".net";
      x.phone = "+42190" + std::to_string(1000000 + rng() % 8999999);
      secrets.insert(secrets.end(), {x.first_name, x.last_name, x.email, *x.phone});
      std::string lower = x.email;
      for (auto& ch : lower) ch = static_cast<char>(std::tolower(ch));
      secrets.push_back(lower);
      p.records().insert_person(x);
      if (i == 0) tampered_id = x.person_id;
    }
    p.store().checkpoint();
  }
  std::string bytes;
  for (const auto& entry : std::filesystem::directory_iterator(dir.path())) {
    std::ifstream in(entry.path(), std::ios::binary);
    bytes.append(std::istreambuf_iterator<char>(in), {});
  }
  v.expect(bytes.size() > 4096, "store file suspiciously small");
  std::size_t leaks = 0;
  for (const auto& s : secrets) leaks += bytes.find(s) != std::string::npos;
  v.expect(leaks == 0, std::to_string(leaks) + " plaintext values found in store files");

  // Field-level AEAD: every single-bit flip is caught.
  FieldKey key = FieldKey::from_base64("t1", test_config().field_key);
  const std::string plain = "Grace Hopper";
  auto sealed = encrypt_field(as_bytes(plain), key);
  std::size_t caught = 0;
  for (std::size_t i = 0; i < sealed.ciphertext.size(); ++i) {
    auto bad = sealed;
    bad.ciphertext[i] ^= 0x01;
    try {
      decrypt_field(bad, key);
    } catch (const Error& e) {
      caught += e.code() == Errc::authentication_failure;
    }
  }
  v.expect(caught == sealed.ciphertext.size(), "tamper detection " + std::to_string(caught) + "/" +
                                                   std::to_string(sealed.ciphertext.size()));
  auto round = decrypt_field(sealed, key);
  v.expect(std::string(round.begin(), round.end()) == plain, "AEAD round trip");

  // Tampering with a stored record makes the read fail rather than return garbage.
  {
    Platform p(test_config((dir.path() / "store.db").string()));
    auto doc = *p.store().get(kind::person, tampered_id);
    std::string wire;
    std::string field;
    for (auto& [k, val] : doc.items())
      if (val.is_string() && val.get<std::string>().starts_with("t1:") && k.find("index") == std::string::npos) {
        field = k;
        wire = val.get<std::string>();
        break;
      }
    v.expect(!wire.empty(), "no sealed field found on the stored person");
    if (!wire.empty()) {
      auto ef = EncryptedField::from_wire(wire);
      ef.ciphertext[ef.ciphertext.size() / 2] ^= 0x80;
      doc[field] = ef.to_wire();
      p.store().put(kind::person, tampered_id, doc);
      bool refused = false;
      try {
        p.records().person(tampered_id);
      } catch (const Error& e) {
        refused = e.code() == Errc::authentication_failure;
      }
      v.expect(refused, "tampered stored field '" + field + "' was accepted");
    }
  }

  // Password storage with production Argon2id parameters.
  PasswordParams params;
  auto hash = hash_password("correct horse battery", params);
  v.expect(hash.starts_with("$argon2id$"), "hash is not argon2id: " + hash);
  v.expect(verify_password("correct horse battery", hash), "argon2 verify failed");
  v.expect(!verify_password("correct horse battery!", hash), "argon2 accepted a wrong password");
  v.expect(hash != hash_password("correct horse battery", params), "argon2 salts repeat");

  return v.done("no plaintext among " + std::to_string(secrets.size()) + " values in " +
                std::to_string(bytes.size()) + " store bytes; tamper caught; argon2id round trip");
}

Outcome statistics() {
  Verdict v;
  {
    Harness h;
    Gateway gw(h.p());
    auto s = h.user("s@example.org");
    auto o = h.user("o@example.org");
    const auto now = h.clock.now();
    for (auto t : {make_utc(2026, 6, 2), make_utc(2026, 8, 31, 23), make_utc(2026, 10, 15)}) {
      h.clock.set(t);
      h.delivery(s, {48.1, 17.1}, {48.2, 17.2});
    }
    h.clock.set(make_utc(2026, 3, 1));  // outside the window
    h.delivery(s, {48.1, 17.1}, {48.2, 17.2});
    h.clock.set(make_utc(2026, 9, 1));  // another sender
    h.delivery(o, {48.1, 17.1}, {48.2, 17.2});
    h.clock.set(now);
    auto r = body_of(gw.handle(get_request("/api/deliveries/statistics/?months=5", h.access_token("s@example.org"))));
    int sum = 0;
    for (auto& m : r["months"]) sum += m["count"].get<int>();
    v.expect(r["months"].size() == 5, "expected 5 months");
    v.expect(sum == 3 && r["total"] == 3, "sum " + std::to_string(sum) + ", total " + r["total"].dump());
  }
  std::mt19937_64 rng(55);
  for (int fixture = 0; fixture < 50; ++fixture) {
    Harness h(static_cast<std::uint64_t>(fixture) + 100);
    Gateway gw(h.p());
    auto s = h.user("s@example.org");
    const auto now = make_utc(2025 + static_cast<int>(rng() % 2), 1 + static_cast<unsigned>(rng() % 12),
                              1 + static_cast<unsigned>(rng() % 28), static_cast<int>(rng() % 24));
    std::vector<Timestamp> created;
    const int n = static_cast<int>(rng() % 30);
    for (int i = 0; i < n; ++i) {
      created.push_back(now - microseconds{static_cast<std::int64_t>(rng() % (700ULL * 86400 * 1000000))});
      h.clock.set(created.back());
      h.delivery(s, {48.1, 17.1}, {48.2, 17.2});
    }
    h.clock.set(now);
    const int months = 1 + static_cast<int>(rng() % 24);
    auto r = body_of(gw.handle(get_request("/api/deliveries/statistics/?months=" + std::to_string(months),
                                           h.access_token("s@example.org"))));
    auto want = oracle::month_buckets(created, now, months);
    bool same = r["months"].size() == want.size();
    for (std::size_t i = 0; same && i < want.size(); ++i)
      same = r["months"][i]["month"] == want[i].first && r["months"][i]["count"] == want[i].second;
    v.expect(same, "fixture " + std::to_string(fixture) + " differs from month oracle");
  }
  return v.done("3 deliveries over 5 months sum to 3; 50 random fixtures match the month oracle");
}

Outcome latency(int duration_s) {
  TempDir dir;
  auto cfg = test_config((dir.path() / "latency.db").string());
  cfg.password = PasswordParams{};  // production hashing cost
  cfg.require_email_verification = true;
  cfg.mail.transport = "file";
  cfg.mail.dir = (dir.path() / "mail").string();
  LiveService svc(cfg, 4);

  sim::Options o;
  o.base_url = svc.base_url();
  o.mail_dir = cfg.mail.dir;
  o.couriers = 2;
  o.rate_per_min = 6;
  o.duration = std::chrono::seconds(duration_s);
  auto report = sim::run(o);
  std::cerr << report.to_table() << "\n";

  Verdict v;
  std::ostringstream d;
  d.precision(3);
  d << duration_s << " s run, " << report.created << " deliveries;";
  for (const auto& [name, budget] : sim::latency_budgets()) {
    auto it = std::find_if(report.endpoints.begin(), report.endpoints.end(),
                           [&](const sim::EndpointStats& e) { return e.endpoint == name; });
    if (it == report.endpoints.end() || it->samples == 0) {
      v.expect(false, name + " has no samples");
      continue;
    }
    v.expect(it->mean_s <= budget, name + " mean " + std::to_string(it->mean_s) + " s > " + std::to_string(budget));
    d << " " << name << "=" << it->mean_s * 1000 << "ms";
  }
  v.expect(report.protocol_errors == 0, std::to_string(report.protocol_errors) + " protocol errors");
  v.expect(report.conservation_ok, "delivery conservation failed");
  return v.done(d.str());
}

// Written out by hand from the published interface, not from the route table.
const std::set<std::pair<std::string, std::string>>& expected_operations() {
  static const std::set<std::pair<std::string, std::string>> ops = [] {
    std::set<std::pair<std::string, std::string>> s = {
        {"POST", "/api/accounts/"},
        {"POST", "/api/accounts/verification_email/"},
        {"GET", "/api/accounts/token/"},
        {"POST", "/api/accounts/token/renew/"},
        {"GET", "/api/accounts/me/"},
        {"PATCH", "/api/accounts/me/"},
        {"POST", "/api/accounts/reset_password/"},
        {"POST", "/api/accounts/reset_password/confirm/"},
        {"POST", "/api/deliveries/"},
        {"GET", "/api/deliveries/"},
        {"GET", "/api/deliveries/statistics/"},
        {"GET", "/api/deliveries/{code}/"},
        {"POST", "/api/deliveries/{code}/state/"},
        {"POST", "/api/couriers/"},
        {"PATCH", "/api/couriers/me/"},
        {"GET", "/api/couriers/closest_delivery/"},
        {"GET", "/api/routes/"},
        {"GET", "/api/openapi.json"},
    };
    for (const char* e : {"accounts", "persons", "couriers", "deliveries"}) {
      const std::string base = std::string("/api/admin/") + e + "/";
      s.insert({"GET", base});
      if (std::string_view(e) != "deliveries") s.insert({"POST", base});
      for (const char* m : {"GET", "PATCH", "DELETE"}) s.insert({m, base + "{id}/"});
    }
    return s;
  }();
  return ops;
}

Outcome interface_conformance() {
  Verdict v;
  Harness h;
  Gateway gw(h.p());
  auto doc = body_of(gw.handle(get_request("/api/openapi.json")));
  v.expect(doc.value("openapi", "").starts_with("3.0"), "not an OpenAPI 3.0 document");

  std::set<std::pair<std::string, std::string>> documented, table;
  for (auto& [path, ops] : doc["paths"].items())
    for (auto& [method, op] : ops.items()) {
      std::string m = method;
      std::transform(m.begin(), m.end(), m.begin(), ::toupper);
      documented.insert({m, path});
      v.expect(op.contains("responses") && op["responses"].contains("4XX"), m + " " + path + " lacks 4XX response");
    }
  for (const auto& r : gw.routes()) table.insert({r.method, r.pattern});
  for (const auto& op : expected_operations()) {
    v.expect(documented.count(op), "undocumented: " + op.first + " " + op.second);
    v.expect(table.count(op), "unrouted: " + op.first + " " + op.second);
  }
  for (const auto& op : documented) v.expect(expected_operations().count(op), "unexpected doc op: " + op.first + " " + op.second);
  for (const auto& op : table) v.expect(expected_operations().count(op), "unexpected route: " + op.first + " " + op.second);

  // Every error the interface can produce must validate against the published envelope.
  const auto schema = doc["components"]["schemas"]["ErrorEnvelope"];
  v.expect(schema.is_object(), "envelope schema missing");
  h.user("s@example.org");
  h.courier("c@example.org");
  h.admin("root@example.org");
  auto s = h.access_token("s@example.org");
  auto c = h.access_token("c@example.org");
  auto code = h.delivery(*h.p().records().account_by_email("s@example.org"), {48.1, 17.1}, {48.2, 17.2})
                  .tracking_code.str();
  h.p().dispatch().accept_delivery({h.p().records().account_by_email("c@example.org")->account_id, Role::courier},
                                   h.p().records().delivery_by_code(code)->delivery_id);
  std::vector<http::Request> provocations = {
      json_request("POST", "/api/accounts/", {{"email", "bad"}}),
      json_request("POST", "/api/accounts/",
                   {{"email", "s@example.org"}, {"password", kPassword}, {"first_name", "a"}, {"last_name", "b"}}),
      http::Request::make("POST", "/api/accounts/", {{"Content-Type", "text/plain"}}, "x"),
      http::Request::make("POST", "/api/accounts/", {{"Content-Type", "application/json"}}, "{"),
      http::Request::make("GET", "/api/accounts/token/"),
      http::Request::make("GET", "/api/accounts/token/", {{"Authorization", basic("s@example.org", "wrong-password")}}),
      json_request("POST", "/api/accounts/token/renew/", {{"renew_token", "nope"}}),
      json_request("POST", "/api/accounts/verification_email/", {{"token", "nope"}}),
      json_request("POST", "/api/accounts/reset_password/confirm/", {{"token", "nope"}, {"password", "longenough"}}),
      get_request("/api/accounts/me/"),
      get_request("/api/accounts/me/", "not-a-token"),
      json_request("PATCH", "/api/accounts/me/", {{"password", "newpassword1"}}, s),
      multipart_request("/api/deliveries/", Document::object(), s),
      multipart_request("/api/deliveries/", delivery_payload({48.1, 17.1}, {48.2, 17.2}, "r@example.org"), s, "GIF8",
                        "image/gif"),
      get_request("/api/deliveries/?direction=up", s),
      get_request("/api/deliveries/statistics/?months=0", s),
      get_request("/api/deliveries/ZZZZZZZZZZZZ/"),
      json_request("POST", "/api/deliveries/" + code + "/state/", {{"state", "delivered"}}, c),
      json_request("POST", "/api/deliveries/" + code + "/state/", {{"state", "assigned"}}, c),
      json_request("POST", "/api/deliveries/" + code + "/state/", {{"state", "delivering"}}, s),
      json_request("POST", "/api/couriers/", {{"email", "x@example.org"}}),
      json_request("PATCH", "/api/couriers/me/", {{"vehicle_class", "rocket"}}, c),
      get_request("/api/couriers/closest_delivery/?lat=999&lon=0", c),
      get_request("/api/couriers/closest_delivery/?lat=1&lon=1", s),
      get_request("/api/routes/?from=nope"),
      get_request("/api/routes/?from=2026-10-02T00:00:00Z&to=2026-10-01T00:00:00Z"),
      get_request("/api/admin/accounts/", s),
      get_request("/api/admin/accounts/missing/", h.access_token("root@example.org")),
      http::Request::make("DELETE", "/api/routes/"),
      get_request("/api/does/not/exist/"),
  };
  std::set<int> statuses;
  for (const auto& req : provocations) {
    auto r = gw.handle(req);
    statuses.insert(r.status);
    v.expect(r.status >= 400, req.method + " " + req.target + " unexpectedly succeeded");
    auto body = Document::parse(r.body, nullptr, false);
    auto problem = body.is_discarded() ? "not JSON" : oracle::schema_violation(schema, body);
    v.expect(problem.empty(), req.method + " " + req.target + ": " + problem);
    v.expect(r.content_type == "application/json", req.method + " " + req.target + " content type");
  }
  for (int expected : {400, 401, 403, 404, 405, 409, 415})
    v.expect(statuses.count(expected), "no provocation produced " + std::to_string(expected));

  return v.done(std::to_string(expected_operations().size()) + " operations match doc and table; " +
                std::to_string(provocations.size()) + " error responses validate against the envelope");
}

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGPIPE, SIG_IGN);
  CLI::App app{"parcelhub acceptance gate"};
  std::vector<std::string> only;
  int latency_seconds = 60;
  app.add_option("--only", only, "Run just these criteria");
  app.add_option("--latency-seconds", latency_seconds, "Simulated run length for the latency criterion")
      ->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"state_machine", state_machine},
      {"token_protocol", token_protocol},
      {"redaction", redaction},
      {"matching_oracle", matching_oracle},
      {"acceptance_race", acceptance_race},
      {"realtime", realtime},
      {"encryption_at_rest", encryption_at_rest},
      {"statistics", statistics},
      {"latency", [&] { return latency(latency_seconds); }},
      {"interface_conformance", interface_conformance},
  };

  int failed = 0;
  for (const auto& [name, check] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end()) continue;
    const auto t0 = steady::now();
    Outcome out;
    try {
      out = check();
    } catch (const std::exception& e) {
      out = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(steady::now() - t0).count();
    failed += !out.pass;
    std::ostringstream line;
    line.precision(2);
    line << std::fixed << (out.pass ? "PASS" : "FAIL") << " " << name << " (" << secs << " s): " << out.detail;
    std::cout << line.str() << std::endl;
  }
  return std::min(failed, 100);
}

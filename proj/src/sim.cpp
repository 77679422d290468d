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

#include "parcelhub/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "parcelhub/error.hpp"
#include "parcelhub/ws_client.hpp"

namespace parcelhub::sim {

namespace {

using steady = std::chrono::steady_clock;
namespace fs = std::filesystem;

constexpr std::array<const char*, 12> kFirst = {"Adam", "Beata", "Cyril", "Dana", "Emil", "Fiona",
                                               "Gustav", "Hana", "Igor", "Jana", "Karol", "Lucia"};
constexpr std::array<const char*, 12> kLast = {"Novak", "Horvath", "Kovac", "Varga", "Toth", "Nagy",
                                              "Balaz", "Molnar", "Simon", "Lukac", "Blaho", "Kral"};

struct Endpoint {
  std::string host;
  unsigned short port = 80;
};

Endpoint parse_base(const std::string& url) {
  std::string rest = url;
  if (auto p = rest.find("://"); p != std::string::npos) {
    if (rest.substr(0, p) != "http")
      throw Error(Errc::validation_error, "only http:// base URLs are supported", {{"base_url", "http only"}});
    rest = rest.substr(p + 3);
  }
  if (auto slash = rest.find('/'); slash != std::string::npos) rest = rest.substr(0, slash);
  Endpoint e;
  if (auto colon = rest.rfind(':'); colon != std::string::npos) {
    e.host = rest.substr(0, colon);
    e.port = static_cast<unsigned short>(std::stoi(rest.substr(colon + 1)));
  } else {
    e.host = rest;
  }
  return e;
}

std::string tag_of(const Options& o) { return o.tag.empty() ? "s" + std::to_string(o.seed) : o.tag; }

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::array<std::uint64_t, 1> out{};
  std::array<std::uint32_t, 2> raw{};
  seq.generate(raw.begin(), raw.end());
  out[0] = (static_cast<std::uint64_t>(raw[0]) << 32) | raw[1];
  return out[0];
}

// --- workload --------------------------------------------------------------

struct Identity {
  std::string email;
  std::string first_name;
  std::string last_name;
  std::string vehicle;  // couriers only
  double lat = 0, lon = 0;
};

struct Planned {
  int sender = 0;
  double at_s = 0.0;
  Document payload;
};

struct Workload {
  std::vector<Identity> senders;
  std::vector<Identity> couriers;
  std::vector<Planned> deliveries;
};

double round6(double v) { return std::round(v * 1e6) / 1e6; }

Workload make_workload(const Options& o, int deliveries, bool scheduled) {
  Workload w;
  const auto tag = tag_of(o);
  auto pick = [](std::mt19937_64& rng, const auto& list) {
    return std::string(list[std::uniform_int_distribution<std::size_t>(0, list.size() - 1)(rng)]);
  };
  auto point = [&o](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> lat(o.box.min_lat, o.box.max_lat), lon(o.box.min_lon, o.box.max_lon);
    return std::pair{round6(lat(rng)), round6(lon(rng))};
  };
  for (int i = 0; i < o.senders; ++i) {
    std::mt19937_64 rng(sub_seed(o.seed, 1000 + i));
    w.senders.push_back({"sender" + std::to_string(i) + "-" + tag + "@sim.parcelhub.test", pick(rng, kFirst),
                         pick(rng, kLast), "", 0, 0});
  }
  for (int i = 0; i < o.couriers; ++i) {
    std::mt19937_64 rng(sub_seed(o.seed, 2000 + i));
    Identity c{"courier" + std::to_string(i) + "-" + tag + "@sim.parcelhub.test", pick(rng, kFirst),
               pick(rng, kLast), "", 0, 0};
    c.vehicle = std::array{"small", "medium", "large"}[std::uniform_int_distribution<int>(0, 2)(rng)];
    std::tie(c.lat, c.lon) = point(rng);
    w.couriers.push_back(c);
  }
  if (o.senders <= 0) return w;
  std::vector<std::mt19937_64> rngs;
  for (int i = 0; i < o.senders; ++i) rngs.emplace_back(sub_seed(o.seed, 3000 + i));
  const double spacing = o.rate_per_min > 0 ? 60.0 / o.rate_per_min : 0.0;
  for (int k = 0; k < deliveries; ++k) {
    int s = k % o.senders;
    auto& rng = rngs[s];
    std::uniform_real_distribution<double> dim(5.0, 80.0);
    auto [slat, slon] = point(rng);
    auto [dlat, dlon] = point(rng);
    Document payload = {
        {"item",
         {{"width_cm", std::round(dim(rng))},
          {"height_cm", std::round(dim(rng))},
          {"depth_cm", std::round(dim(rng))},
          {"weight_class", std::array{"light", "medium", "heavy"}[std::uniform_int_distribution<int>(0, 2)(rng)]},
          {"fragile", std::bernoulli_distribution(0.2)(rng)}}},
        {"source", {{"address", "Pickup " + std::to_string(k)}, {"lat", slat}, {"lon", slon}}},
        {"destination", {{"address", "Drop-off " + std::to_string(k)}, {"lat", dlat}, {"lon", dlon}}},
        {"receiver",
         {{"first_name", pick(rng, kFirst)},
          {"last_name", pick(rng, kLast)},
          {"email", "receiver" + std::to_string(k) + "-" + tag + "@sim.parcelhub.test"}}}};
    w.deliveries.push_back({s, scheduled ? k * spacing : 0.0, std::move(payload)});
  }
  return w;
}

int scheduled_count(const Options& o) {
  if (o.senders <= 0 || o.rate_per_min <= 0) return 0;
  double spacing = 60.0 / o.rate_per_min;
  // Slots strictly inside the run window.
  return static_cast<int>(std::ceil(static_cast<double>(o.duration.count()) / spacing - 1e-9));
}

// --- recording -------------------------------------------------------------

class Recorder {
 public:
  void sample(const std::string& endpoint, double seconds) {
    std::lock_guard lock(mutex_);
    samples_[endpoint].push_back(seconds);
  }
  void ws_sample(double seconds) {
    std::lock_guard lock(mutex_);
    ws_.push_back(seconds);
  }
  void protocol_error(const std::string& what) {
    std::lock_guard lock(mutex_);
    ++errors_;
    if (error_samples_.size() < 20) error_samples_.push_back(what);
  }
  void created(const std::string& code) {
    std::lock_guard lock(mutex_);
    codes_.push_back(code);
  }

  std::map<std::string, std::vector<double>> samples() {
    std::lock_guard lock(mutex_);
    return samples_;
  }
  std::vector<double> ws() {
    std::lock_guard lock(mutex_);
    return ws_;
  }
  std::size_t errors() {
    std::lock_guard lock(mutex_);
    return errors_;
  }
  std::vector<std::string> error_samples() {
    std::lock_guard lock(mutex_);
    return error_samples_;
  }
  std::vector<std::string> codes() {
    std::lock_guard lock(mutex_);
    return codes_;
  }

 private:
  std::mutex mutex_;
  std::map<std::string, std::vector<double>> samples_;
  std::vector<double> ws_;
  std::size_t errors_ = 0;
  std::vector<std::string> error_samples_;
  std::vector<std::string> codes_;
};

// --- mail ------------------------------------------------------------------

class Mailbox {
 public:
  explicit Mailbox(std::string dir) : dir_(std::move(dir)) {}

  bool available() const { return !dir_.empty(); }

  /// Waits for an unused token following `marker` in a message to `email`.
  std::optional<std::string> await_token(const std::string& email, const std::string& marker,
                                         std::chrono::milliseconds timeout) {
    auto deadline = steady::now() + timeout;
    const std::string to_line = "To: " + email;
    while (steady::now() < deadline) {
      std::error_code ec;
      for (const auto& entry : fs::directory_iterator(dir_, ec)) {
        if (entry.path().extension() != ".eml") continue;
        std::ifstream in(entry.path());
        std::stringstream ss;
        ss << in.rdbuf();
        const std::string text = ss.str();
        if (text.find(to_line + "\r\n") == std::string::npos) continue;
        auto pos = text.find(marker);
        if (pos == std::string::npos) continue;
        pos += marker.size();
        auto end = text.find_first_of("\r\n", pos);
        std::string token = text.substr(pos, end - pos);
        std::lock_guard lock(mutex_);
        if (used_.insert(token).second) return token;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
    return std::nullopt;
  }

 private:
  std::string dir_;
  std::mutex mutex_;
  std::set<std::string> used_;
};

// --- client ----------------------------------------------------------------

struct Call {
  int status = 0;  // 0: transport failure
  Document body;
};

class Api {
 public:
  Api(const Options& o, Recorder& rec) : cli_(o.base_url), rec_(rec) {
    cli_.set_keep_alive(true);
    cli_.set_connection_timeout(5, 0);
    cli_.set_read_timeout(15, 0);
    cli_.set_write_timeout(15, 0);
  }

  void set_tokens(const Document& pair) {
    access_ = pair.value("access_token", "");
    renew_ = pair.value("renew_token", "");
  }
  const std::string& access() const { return access_; }

  // Records latency under `endpoint` (when non-empty) and checks the status.
  template <class F>
  Call timed(const std::string& endpoint, std::initializer_list<int> expected, F&& send, bool authed = true) {
    for (int attempt = 0; attempt < 2; ++attempt) {
      httplib::Headers headers;
      if (authed && !access_.empty()) headers.emplace("Authorization", "Bearer " + access_);
      auto start = steady::now();
      httplib::Result res = send(cli_, headers);
      double secs = std::chrono::duration<double>(steady::now() - start).count();
      Call c;
      if (!res) {
        rec_.protocol_error(endpoint + ": transport " + httplib::to_string(res.error()));
        return c;
      }
      c.status = res->status;
      c.body = Document::parse(res->body, nullptr, false);
      if (c.status == 401 && authed && attempt == 0 && !renew_.empty() &&
          c.body.is_object() && c.body.contains("error") && c.body["error"].value("code", "") == "token_expired") {
        renew();
        continue;
      }
      if (!endpoint.empty()) rec_.sample(endpoint, secs);
      if (std::find(expected.begin(), expected.end(), c.status) == expected.end())
        rec_.protocol_error(endpoint + ": unexpected " + std::to_string(c.status) + " " + res->body.substr(0, 200));
      return c;
    }
    return {};
  }

  Call get(const std::string& endpoint, const std::string& path, std::initializer_list<int> expected = {200},
           bool authed = true) {
    return timed(endpoint, expected,
                 [&](httplib::Client& cli, const httplib::Headers& h) { return cli.Get(path, h); }, authed);
  }

  Call post_json(const std::string& endpoint, const std::string& path, const Document& body,
                 std::initializer_list<int> expected, bool authed = true) {
    const auto text = body.dump();
    return timed(endpoint, expected,
                 [&](httplib::Client& cli, const httplib::Headers& h) {
                   return cli.Post(path, h, text, "application/json");
                 },
                 authed);
  }

  Call login(const std::string& email, const std::string& password) {
    return timed("login", {200}, [&](httplib::Client& cli, const httplib::Headers&) {
      httplib::Headers h = {httplib::make_basic_authentication_header(email, password)};
      return cli.Get("/api/accounts/token/", h);
    }, false);
  }

  bool probe() {
    auto res = cli_.Get("/api/openapi.json");
    return res && res->status == 200;
  }

 private:
  void renew() {
    auto res = cli_.Post("/api/accounts/token/renew/", Document({{"renew_token", renew_}}).dump(),
                         "application/json");
    if (res && res->status == 200) set_tokens(Document::parse(res->body, nullptr, false));
  }

  httplib::Client cli_;
  Recorder& rec_;
  std::string access_;
  std::string renew_;
};

// Registers (or re-uses) an identity and leaves `api` logged in.
bool enroll(Api& api, Recorder& rec, Mailbox& mail, const Options& o, const Identity& id, bool courier,
            bool reset_password, std::string& password) {
  Document body = {{"email", id.email}, {"password", password}, {"first_name", id.first_name},
                   {"last_name", id.last_name}};
  Call reg;
  if (courier) {
    body["vehicle_class"] = id.vehicle;
    reg = api.post_json("courier_registration", "/api/couriers/", body, {201}, false);
  } else {
    reg = api.post_json("registration", "/api/accounts/", body, {201}, false);
  }
  if (reg.status != 201) return false;
  if (!reg.body["account"].value("is_active", false)) {
    if (!mail.available()) {
      rec.protocol_error(id.email + ": account needs email verification; pass --mail-dir");
      return false;
    }
    auto token = mail.await_token(id.email, "verification token: ", std::chrono::seconds(15));
    if (!token) {
      rec.protocol_error(id.email + ": no verification email arrived");
      return false;
    }
    if (api.post_json("email_verification", "/api/accounts/verification_email/", {{"token", *token}}, {200}, false)
            .status != 200)
      return false;
  }
  if (reset_password) {
    api.post_json("password_update", "/api/accounts/reset_password/", {{"email", id.email}}, {202}, false);
    if (mail.available()) {
      if (auto token = mail.await_token(id.email, "reset token: ", std::chrono::seconds(15))) {
        std::string next = password + "-r";
        if (api.post_json("password_update", "/api/accounts/reset_password/confirm/",
                          {{"token", *token}, {"password", next}}, {200}, false)
                .status == 200)
          password = next;
      } else {
        rec.protocol_error(id.email + ": no reset email arrived");
      }
    }
  }
  auto login = api.login(id.email, password);
  if (login.status != 200) return false;
  api.set_tokens(login.body);
  (void)o;
  return true;
}

std::string encode_path_segment(const std::string& s) { return httplib::detail::encode_url(s); }

Call create_delivery(Api& api, const Document& payload) {
  const auto text = payload.dump();
  return api.timed("delivery_creation", {201}, [&](httplib::Client& cli, const httplib::Headers& h) {
    httplib::MultipartFormDataItems items = {{"payload", text, "", "application/json"}};
    return cli.Post("/api/deliveries/", h, items);
  });
}

void sleep_until_or(steady::time_point t, const std::atomic<bool>& stop) {
  while (!stop && steady::now() < t)
    std::this_thread::sleep_for(std::min<steady::duration>(t - steady::now(), std::chrono::milliseconds(50)));
}

}  // namespace

// --- public ----------------------------------------------------------------

const std::vector<std::pair<std::string, double>>& latency_budgets() {
  static const std::vector<std::pair<std::string, double>> budgets = {
      {"registration", 0.7},         {"login", 0.5},          {"password_update", 0.2},
      {"delivery_creation", 0.5},    {"tracking", 0.1},       {"history", 0.2},
      {"courier_registration", 0.2}, {"closest_delivery", 0.6}, {"accept", 0.5},
      {"state_change", 0.5},         {"routes", 0.7},         {"statistics", 0.1},
  };
  return budgets;
}

double percentile(std::vector<double> samples, double p) {
  if (samples.empty()) return 0.0;
  std::sort(samples.begin(), samples.end());
  auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(samples.size())));
  return samples[std::clamp<std::size_t>(rank, 1, samples.size()) - 1];
}

bool Report::passed() const {
  if (protocol_errors != 0 || !conservation_ok) return false;
  return std::all_of(endpoints.begin(), endpoints.end(), [](const EndpointStats& e) { return e.pass; });
}

Document Report::to_json() const {
  Document eps = Document::array();
  for (const auto& e : endpoints)
    eps.push_back({{"endpoint", e.endpoint},
                   {"samples", e.samples},
                   {"mean_s", e.mean_s},
                   {"median_s", e.median_s},
                   {"p95_s", e.p95_s},
                   {"budget_s", e.budget_s ? Document(*e.budget_s) : Document(nullptr)},
                   {"pass", e.pass}});
  return {{"endpoints", eps},
          {"created", created},
          {"by_state", by_state},
          {"conservation_ok", conservation_ok},
          {"protocol_errors", protocol_errors},
          {"error_samples", error_samples},
          {"websocket", {{"frames", ws_frames}, {"mean_s", ws_mean_s}, {"p95_s", ws_p95_s}}},
          {"slack", slack},
          {"passed", passed()}};
}

std::string Report::to_table() const {
  std::ostringstream out;
  out << std::left << std::setw(22) << "endpoint" << std::right << std::setw(6) << "n" << std::setw(10) << "mean"
      << std::setw(10) << "median" << std::setw(10) << "p95" << std::setw(10) << "budget" << "  result\n";
  out << std::fixed << std::setprecision(4);
  for (const auto& e : endpoints) {
    out << std::left << std::setw(22) << e.endpoint << std::right << std::setw(6) << e.samples << std::setw(10)
        << e.mean_s << std::setw(10) << e.median_s << std::setw(10) << e.p95_s;
    if (e.budget_s) out << std::setw(10) << *e.budget_s * slack << "  " << (e.pass ? "PASS" : "FAIL");
    else out << std::setw(10) << "-" << "  -";
    out << "\n";
  }
  out << "websocket publish->echo: frames " << ws_frames << ", mean " << ws_mean_s << " s, p95 " << ws_p95_s
      << " s (not budgeted)\n";
  out << "deliveries created " << created << ":";
  for (const auto& [state, n] : by_state) out << " " << state << "=" << n;
  out << "  conservation " << (conservation_ok ? "ok" : "VIOLATED") << "\n";
  out << "protocol errors " << protocol_errors << "\n";
  for (const auto& s : error_samples) out << "  " << s << "\n";
  out << "overall " << (passed() ? "PASS" : "FAIL") << "\n";
  return out.str();
}

Document Fixture::to_json() const {
  return {{"senders", sender_emails},
          {"couriers", courier_emails},
          {"tracking_codes", tracking_codes},
          {"failures", failures}};
}

std::vector<std::string> workload_trace(const Options& o, int deliveries) {
  auto w = make_workload(o, deliveries < 0 ? scheduled_count(o) : deliveries, deliveries < 0);
  std::vector<std::string> lines;
  for (std::size_t i = 0; i < w.senders.size(); ++i)
    lines.push_back("sender " + std::to_string(i) + " " + w.senders[i].email + " " + w.senders[i].first_name + " " +
                    w.senders[i].last_name);
  for (std::size_t i = 0; i < w.couriers.size(); ++i) {
    std::ostringstream s;
    s << std::setprecision(9) << "courier " << i << " " << w.couriers[i].email << " " << w.couriers[i].vehicle
      << " " << w.couriers[i].lat << "," << w.couriers[i].lon;
    lines.push_back(s.str());
  }
  for (std::size_t k = 0; k < w.deliveries.size(); ++k) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(3) << "delivery " << k << " sender " << w.deliveries[k].sender << " at "
      << w.deliveries[k].at_s << "s " << w.deliveries[k].payload.dump();
    lines.push_back(s.str());
  }
  return lines;
}

Fixture seed(const Options& o, int deliveries) {
  Recorder rec;
  Mailbox mail(o.mail_dir);
  {
    Api probe(o, rec);
    if (!probe.probe()) throw Error(Errc::service_unreachable, "cannot reach " + o.base_url);
  }
  auto w = make_workload(o, deliveries, false);
  Fixture f;
  std::vector<std::unique_ptr<Api>> senders;
  for (const auto& id : w.senders) {
    auto api = std::make_unique<Api>(o, rec);
    std::string password = o.password;
    if (enroll(*api, rec, mail, o, id, false, false, password)) f.sender_emails.push_back(id.email);
    else f.failures.push_back("sender " + id.email);
    senders.push_back(std::move(api));
  }
  for (const auto& id : w.couriers) {
    Api api(o, rec);
    std::string password = o.password;
    if (enroll(api, rec, mail, o, id, true, false, password)) f.courier_emails.push_back(id.email);
    else f.failures.push_back("courier " + id.email);
  }
  for (const auto& p : w.deliveries) {
    auto c = create_delivery(*senders[p.sender], p.payload);
    if (c.status == 201) f.tracking_codes.push_back(c.body.value("tracking_code", ""));
    else f.failures.push_back("delivery for " + w.senders[p.sender].email);
  }
  for (const auto& e : rec.error_samples()) f.failures.push_back(e);
  return f;
}

Report run(const Options& o) {
  Recorder rec;
  Mailbox mail(o.mail_dir);
  const auto endpoint = parse_base(o.base_url);
  {
    Api probe(o, rec);
    if (!probe.probe()) throw Error(Errc::service_unreachable, "cannot reach " + o.base_url);
  }
  const int planned = scheduled_count(o);
  auto w = make_workload(o, planned, true);

  if (!o.trace_path.empty()) {
    std::ofstream trace(o.trace_path);
    for (const auto& line : workload_trace(o, -1)) trace << line << "\n";
  }

  // Enrolment happens before the clock starts; its requests still count.
  std::vector<std::unique_ptr<Api>> sender_api, courier_api;
  for (const auto& id : w.senders) {
    sender_api.push_back(std::make_unique<Api>(o, rec));
    std::string password = o.password;
    enroll(*sender_api.back(), rec, mail, o, id, false, true, password);
  }
  for (const auto& id : w.couriers) {
    courier_api.push_back(std::make_unique<Api>(o, rec));
    std::string password = o.password;
    enroll(*courier_api.back(), rec, mail, o, id, true, false, password);
  }

  std::atomic<bool> stop{false};
  const auto t0 = steady::now();
  const auto deadline = t0 + o.duration;
  std::vector<std::thread> actors;

  for (int s = 0; s < o.senders; ++s) {
    actors.emplace_back([&, s] {
      Api& api = *sender_api[s];
      if (api.access().empty()) return;
      for (const auto& p : w.deliveries) {
        if (p.sender != s) continue;
        auto when = t0 + std::chrono::duration_cast<steady::duration>(std::chrono::duration<double>(p.at_s));
        sleep_until_or(when, stop);
        if (stop || steady::now() >= deadline) break;
        auto c = create_delivery(api, p.payload);
        if (c.status != 201) continue;
        const std::string code = c.body.value("tracking_code", "");
        rec.created(code);
        api.get("tracking", "/api/deliveries/" + encode_path_segment(code) + "/", {200}, false);
        api.get("history", "/api/deliveries/");
        api.get("statistics", "/api/deliveries/statistics/?months=5");
        api.get("routes", "/api/routes/", {200}, false);
      }
    });
  }

  for (int ci = 0; ci < o.couriers; ++ci) {
    actors.emplace_back([&, ci] {
      Api& api = *courier_api[ci];
      if (api.access().empty()) return;
      double lat = w.couriers[ci].lat, lon = w.couriers[ci].lon;
      auto next_tick = steady::now();
      while (!stop && steady::now() < deadline) {
        std::ostringstream q;
        q << std::setprecision(9) << "/api/couriers/closest_delivery/?lat=" << lat << "&lon=" << lon << "&limit=5";
        auto list = api.get("closest_delivery", q.str());
        if (list.status != 200 || !list.body.is_array() || list.body.empty()) {
          sleep_until_or(std::min(deadline, steady::now() + std::chrono::seconds(1)), stop);
          continue;
        }
        const auto d = list.body[0];
        const std::string code = d.value("tracking_code", "");
        const std::string state_path = "/api/deliveries/" + encode_path_segment(code) + "/state/";
        auto accepted = api.post_json("accept", state_path, {{"state", "assigned"}}, {200, 409});
        if (accepted.status != 200) continue;

        WsClient ws;
        try {
          ws.connect(endpoint.host, endpoint.port, "/ws/deliveries/" + code + "/", api.access());
        } catch (const Error& e) {
          rec.protocol_error(std::string("websocket connect: ") + e.what());
        }
        // Straight-line legs at a fixed publish cadence.
        auto leg = [&](double to_lat, double to_lon) {
          const double from_lat = lat, from_lon = lon;
          for (int step = 1; step <= o.steps_per_leg; ++step) {
            next_tick = std::max(next_tick + o.cadence, steady::now());
            sleep_until_or(std::min(next_tick, deadline), stop);
            if (stop || steady::now() >= deadline) return false;
            double f = static_cast<double>(step) / o.steps_per_leg;
            lat = from_lat + (to_lat - from_lat) * f;
            lon = from_lon + (to_lon - from_lon) * f;
            if (!ws.is_open()) continue;
            try {
              auto start = steady::now();
              ws.send(Document({{"lat", lat}, {"lon", lon}}).dump());
              auto echo = ws.read(std::chrono::seconds(2));
              if (!echo) {
                rec.protocol_error("websocket: no echo within 2 s");
                continue;
              }
              auto frame = Document::parse(*echo, nullptr, false);
              if (frame.is_discarded() || frame.contains("error") || !frame.contains("courier_id"))
                rec.protocol_error("websocket: unexpected frame " + echo->substr(0, 120));
              else
                rec.ws_sample(std::chrono::duration<double>(steady::now() - start).count());
            } catch (const Error& e) {
              rec.protocol_error(std::string("websocket: ") + e.what());
            }
          }
          return true;
        };
        const auto& src = d["source"];
        const auto& dst = d["destination"];
        if (!leg(src.value("lat", lat), src.value("lon", lon))) break;
        api.post_json("state_change", state_path, {{"state", "delivering"}}, {200});
        if (!leg(dst.value("lat", lat), dst.value("lon", lon))) break;
        api.post_json("state_change", state_path, {{"state", "delivered"}}, {200});
        ws.close();
      }
    });
  }

  sleep_until_or(deadline, stop);
  stop = true;
  for (auto& t : actors) t.join();

  Report r;
  r.slack = o.slack;
  r.created = rec.codes().size();
  std::size_t seen = 0;
  bool states_ok = true;
  for (auto& api : sender_api) {
    if (api->access().empty()) continue;
    auto h = api->get("", "/api/deliveries/");
    if (h.status != 200 || !h.body.is_array()) {
      states_ok = false;
      continue;
    }
    for (const auto& d : h.body) {
      auto st = d.value("state", "");
      static const std::set<std::string> known = {"ready", "assigned", "delivering", "delivered", "undeliverable"};
      if (!known.count(st)) states_ok = false;
      ++r.by_state[st];
      ++seen;
    }
  }
  r.conservation_ok = states_ok && seen == r.created;

  auto samples = rec.samples();
  std::set<std::string> listed;
  for (const auto& [name, budget] : latency_budgets()) {
    EndpointStats e;
    e.endpoint = name;
    e.budget_s = budget;
    auto it = samples.find(name);
    if (it != samples.end() && !it->second.empty()) {
      const auto& v = it->second;
      e.samples = v.size();
      e.mean_s = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
      e.median_s = percentile(v, 50);
      e.p95_s = percentile(v, 95);
    }
    e.pass = e.mean_s <= budget * o.slack;
    r.endpoints.push_back(e);
    listed.insert(name);
  }
  for (const auto& [name, v] : samples) {
    if (listed.count(name) || name.empty() || v.empty()) continue;
    EndpointStats e;
    e.endpoint = name;
    e.samples = v.size();
    e.mean_s = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    e.median_s = percentile(v, 50);
    e.p95_s = percentile(v, 95);
    r.endpoints.push_back(e);
  }
  auto ws = rec.ws();
  r.ws_frames = ws.size();
  if (!ws.empty()) {
    r.ws_mean_s = std::accumulate(ws.begin(), ws.end(), 0.0) / static_cast<double>(ws.size());
    r.ws_p95_s = percentile(ws, 95);
  }
  r.protocol_errors = rec.errors();
  r.error_samples = rec.error_samples();

  if (!o.report_path.empty()) {
    std::ofstream out(o.report_path);
    out << r.to_json().dump(2) << "\n";
  }
  return r;
}

}  // namespace parcelhub::sim

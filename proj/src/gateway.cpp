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

#include "parcelhub/gateway.hpp"

#include <algorithm>
#include <chrono>
#include <set>

#include "parcelhub/codec.hpp"
#include "parcelhub/password.hpp"

namespace parcelhub {

namespace {

constexpr std::string_view kApiVersion = "1.0.0";

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < path.size()) {
    while (i < path.size() && path[i] == '/') ++i;
    auto j = path.find('/', i);
    if (j == std::string_view::npos) j = path.size();
    if (j > i) out.emplace_back(path.substr(i, j - i));
    i = j;
  }
  return out;
}

bool is_param(std::string_view seg) { return seg.size() > 2 && seg.front() == '{' && seg.back() == '}'; }

std::string param_name(std::string_view seg) { return std::string(seg.substr(1, seg.size() - 2)); }

bool starts_with_ci(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i)
    if (std::tolower(static_cast<unsigned char>(s[i])) != std::tolower(static_cast<unsigned char>(prefix[i])))
      return false;
  return true;
}

// --- body helpers ----------------------------------------------------------

std::optional<std::string> opt_string(const Document& body, const char* key, FieldErrors& errors,
                                      const std::string& field) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    errors[field] = "must be a string";
    return std::nullopt;
  }
  return it->get<std::string>();
}

std::string req_string(const Document& body, const char* key, FieldErrors& errors,
                       const std::string& field) {
  auto v = opt_string(body, key, errors, field);
  if (!v && !errors.count(field)) errors[field] = "required";
  return v.value_or("");
}

std::optional<double> opt_number(const Document& body, const char* key, FieldErrors& errors,
                                 const std::string& field) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) {
    errors[field] = "must be a number";
    return std::nullopt;
  }
  return it->get<double>();
}

std::optional<bool> opt_bool(const Document& body, const char* key, FieldErrors& errors,
                             const std::string& field) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) return std::nullopt;
  if (!it->is_boolean()) {
    errors[field] = "must be a boolean";
    return std::nullopt;
  }
  return it->get<bool>();
}

void throw_if(const FieldErrors& errors) {
  if (!errors.empty()) throw Error(Errc::validation_error, "invalid request body", errors);
}

Place parse_place(const Document& body, const std::string& prefix, FieldErrors& errors) {
  Place p;
  if (!body.is_object()) {
    errors[prefix] = "must be an object";
    return p;
  }
  p.address_text = req_string(body, "address", errors, prefix + ".address");
  auto lat = opt_number(body, "lat", errors, prefix + ".lat");
  auto lon = opt_number(body, "lon", errors, prefix + ".lon");
  if (!lat && !errors.count(prefix + ".lat")) errors[prefix + ".lat"] = "required";
  if (!lon && !errors.count(prefix + ".lon")) errors[prefix + ".lon"] = "required";
  p.location = GeoPoint{lat.value_or(0.0), lon.value_or(0.0)};
  return p;
}

RegistrationRequest parse_registration(const Document& body, FieldErrors& errors) {
  RegistrationRequest r;
  r.email = req_string(body, "email", errors, "email");
  r.password = req_string(body, "password", errors, "password");
  r.first_name = req_string(body, "first_name", errors, "first_name");
  r.last_name = req_string(body, "last_name", errors, "last_name");
  r.phone = opt_string(body, "phone", errors, "phone");
  return r;
}

Document profile_view(const Profile& p) {
  Document out = {{"account", account_view(p.account)}};
  if (p.person) out["person"] = person_view(*p.person);
  if (p.courier) out["courier"] = courier_view(*p.courier);
  return out;
}

std::optional<int> parse_int(std::string_view s) {
  if (s.empty() || s.size() > 9) return std::nullopt;
  int v = 0;
  bool neg = false;
  std::size_t i = 0;
  if (s[0] == '-') {
    neg = true;
    i = 1;
    if (s.size() == 1) return std::nullopt;
  }
  for (; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') return std::nullopt;
    v = v * 10 + (s[i] - '0');
  }
  return neg ? -v : v;
}

std::optional<double> parse_double(const std::string& s) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

const std::string* query_value(const http::Request& r, const std::string& name) {
  auto it = r.query.find(name);
  return it == r.query.end() ? nullptr : &it->second;
}

}  // namespace

// --- views -----------------------------------------------------------------

Document account_view(const Account& a) {
  return {{"account_id", a.account_id},   {"email", a.email},
          {"role", to_string(a.role)},    {"is_admin", a.is_admin},
          {"is_active", a.is_active},     {"created_at", format_rfc3339(a.created_at)}};
}

Document person_view(const Person& p) {
  Document out = {{"person_id", p.person_id},
                  {"first_name", p.first_name},
                  {"last_name", p.last_name},
                  {"email", p.email},
                  {"phone", p.phone ? Document(*p.phone) : Document(nullptr)}};
  if (p.account_id) out["account_id"] = *p.account_id;
  return out;
}

Document courier_view(const Courier& c) {
  Document out = {{"courier_id", c.courier_id},
                  {"account_id", c.account_id},
                  {"vehicle_class", to_string(c.vehicle_class)},
                  {"registered_on", format_rfc3339(Timestamp{c.registered_on}).substr(0, 10)},
                  {"is_available", c.is_available}};
  out["last_location"] = c.last_location ? to_json(*c.last_location) : Document(nullptr);
  out["last_seen"] = c.last_seen ? Document(format_rfc3339(*c.last_seen)) : Document(nullptr);
  return out;
}

Document delivery_view(const Delivery& d) {
  Document out = {{"tracking_code", d.tracking_code.str()},
                  {"state", to_string(d.state)},
                  {"item", to_json(d.item)},
                  {"source", to_json(d.source)},
                  {"destination", to_json(d.destination)},
                  {"courier_id", d.courier_id ? Document(*d.courier_id) : Document(nullptr)},
                  {"route_distance_m", d.route_distance_m},
                  {"expected_delivery_time", format_rfc3339(d.expected_delivery_time)},
                  {"created_at", format_rfc3339(d.created_at)}};
  if (d.note) out["note"] = *d.note;
  return out;
}

Document tracking_view(const TrackingView& v) {
  Document out = {{"tracking_code", v.tracking_code.str()},
                  {"state", to_string(v.state)},
                  {"source_address", v.source_address},
                  {"destination_address", v.destination_address},
                  {"item", to_json(v.item)},
                  {"expected_delivery_time", format_rfc3339(v.expected_delivery_time)}};
  if (v.courier_position)
    out["courier_position"] = {{"lat", v.courier_position->point.latitude},
                               {"lon", v.courier_position->point.longitude},
                               {"ts", format_rfc3339(v.courier_position->at)}};
  if (v.receiver)
    out["receiver"] = {{"first_name", v.receiver->first_name},
                       {"last_name", v.receiver->last_name},
                       {"email", v.receiver->email}};
  return out;
}

Document token_pair_view(const TokenPair& p) {
  return {{"access_token", p.access_token},
          {"renew_token", p.renew_token},
          {"token_type", "Bearer"},
          {"access_expires_at", format_rfc3339(p.access_expires_at)},
          {"renew_expires_at", format_rfc3339(p.renew_expires_at)}};
}

Document route_view(const Route& r, std::string_view tracking_code) {
  Document points = Document::array();
  for (const auto& p : r.points)
    points.push_back({{"lat", p.point.latitude}, {"lon", p.point.longitude}, {"ts", format_rfc3339(p.at)}});
  return {{"delivery_id", tracking_code},
          {"courier_id", r.courier_id ? Document(*r.courier_id) : Document(nullptr)},
          {"points", std::move(points)}};
}

Document statistics_view(const StatisticsReport& r) {
  Document months = Document::array();
  for (std::size_t i = 0; i < r.months.size(); ++i)
    months.push_back({{"month", r.months[i]}, {"count", r.counts[i]}});
  return {{"months", std::move(months)}, {"total", r.total}};
}

DeliveryRequest parse_delivery_payload(const Document& payload) {
  FieldErrors errors;
  DeliveryRequest req;
  if (!payload.is_object()) throw Error(Errc::validation_error, "payload must be a JSON object", {{"payload", "must be an object"}});

  auto item = payload.find("item");
  if (item == payload.end() || !item->is_object()) {
    for (const char* f : {"width_cm", "height_cm", "depth_cm", "weight_class"})
      errors[std::string("item.") + f] = "required";
  } else {
    req.item.width_cm = opt_number(*item, "width_cm", errors, "item.width_cm");
    req.item.height_cm = opt_number(*item, "height_cm", errors, "item.height_cm");
    req.item.depth_cm = opt_number(*item, "depth_cm", errors, "item.depth_cm");
    if (auto w = opt_string(*item, "weight_class", errors, "item.weight_class")) {
      req.item.weight_class = parse_weight_class(*w);
      if (!req.item.weight_class) errors["item.weight_class"] = "must be light, medium or heavy";
    }
    req.item.fragile = opt_bool(*item, "fragile", errors, "item.fragile").value_or(false);
    req.item.description = opt_string(*item, "description", errors, "item.description");
  }

  for (const char* side : {"source", "destination"}) {
    auto it = payload.find(side);
    Place p = it == payload.end() ? (errors[side] = "required", Place{})
                                  : parse_place(*it, side, errors);
    (std::string_view(side) == "source" ? req.source : req.destination) = p;
  }

  auto receiver = payload.find("receiver");
  if (receiver == payload.end() || !receiver->is_object()) {
    errors["receiver"] = "required";
  } else {
    req.receiver.first_name = req_string(*receiver, "first_name", errors, "receiver.first_name");
    req.receiver.last_name = req_string(*receiver, "last_name", errors, "receiver.last_name");
    req.receiver.email = req_string(*receiver, "email", errors, "receiver.email");
    req.receiver.phone = opt_string(*receiver, "phone", errors, "receiver.phone");
  }
  throw_if(errors);
  return req;
}

// --- envelope --------------------------------------------------------------

http::Response json_response(int status, const Document& body) {
  http::Response r;
  r.status = status;
  r.body = body.dump();
  return r;
}

http::Response error_response(int status, std::string_view code, std::string_view message,
                              const FieldErrors& fields) {
  Document err = {{"code", code}, {"message", message}};
  if (!fields.empty()) err["fields"] = fields;
  return json_response(status, {{"error", std::move(err)}});
}

http::Response error_response(Errc code, std::string_view message, const FieldErrors& fields) {
  return error_response(http_status(code), to_string(code), message, fields);
}

Document error_envelope_schema() {
  return {{"type", "object"},
          {"required", {"error"}},
          {"additionalProperties", false},
          {"properties",
           {{"error",
             {{"type", "object"},
              {"required", {"code", "message"}},
              {"additionalProperties", false},
              {"properties",
               {{"code", {{"type", "string"}, {"pattern", "^[a-z_]+$"}}},
                {"message", {{"type", "string"}}},
                {"fields",
                 {{"type", "object"}, {"additionalProperties", {{"type", "string"}}}}}}}}}}}};
}

Document openapi_document(const std::vector<RouteSpec>& routes, std::string_view version) {
  Document paths = Document::object();
  for (const auto& r : routes) {
    Document op = {{"operationId", r.operation_id}, {"summary", r.summary}, {"tags", {r.tag}}};
    Document params = Document::array();
    for (const auto& seg : split_path(r.pattern))
      if (is_param(seg))
        params.push_back({{"name", param_name(seg)},
                          {"in", "path"},
                          {"required", true},
                          {"schema", {{"type", "string"}}}});
    for (const auto& q : r.query)
      params.push_back({{"name", q.name},
                        {"in", "query"},
                        {"required", q.required},
                        {"description", q.description},
                        {"schema", {{"type", q.type}}}});
    if (!params.empty()) op["parameters"] = std::move(params);

    switch (r.access) {
      case Access::open:
        if (r.operation_id == "login") op["security"] = {{{"basicAuth", Document::array()}}};
        else op["security"] = Document::array();
        break;
      case Access::optional_auth:
        op["security"] = {Document::object(), {{"bearerAuth", Document::array()}}};
        break;
      default:
        op["security"] = {{{"bearerAuth", Document::array()}}};
    }

    if (r.body == BodyKind::json) {
      op["requestBody"] = {{"required", true},
                           {"content", {{"application/json", {{"schema", {{"type", "object"}}}}}}}};
    } else if (r.body == BodyKind::multipart) {
      op["requestBody"] = {
          {"required", true},
          {"content",
           {{"multipart/form-data",
             {{"schema",
               {{"type", "object"},
                {"required", {"payload"}},
                {"properties",
                 {{"payload", {{"type", "string"}, {"description", "JSON document"}}},
                  {"picture", {{"type", "string"}, {"format", "binary"}}}}}}},
              {"encoding",
               {{"payload", {{"contentType", "application/json"}}},
                {"picture", {{"contentType", "image/jpeg, image/png"}}}}}}}}}};
    }

    Document responses = Document::object();
    std::string ok = std::to_string(r.success_status);
    if (r.success_status == 204) {
      responses[ok] = {{"description", "No content"}};
    } else {
      const bool many = r.operation_id.starts_with("list") || r.operation_id.starts_with("adminList") ||
                        r.operation_id == "queryRoutes" || r.operation_id == "closestDeliveries";
      Document schema = {{"type", many ? "array" : "object"}};
      responses[ok] = {{"description", "Success"},
                       {"content", {{"application/json", {{"schema", schema}}}}}};
    }
    Document err_ref = {{"$ref", "#/components/responses/Error"}};
    responses["4XX"] = err_ref;
    responses["5XX"] = err_ref;
    op["responses"] = std::move(responses);

    std::string method = r.method;
    std::transform(method.begin(), method.end(), method.begin(), ::tolower);
    paths[r.pattern][method] = std::move(op);
  }

  return {{"openapi", "3.0.3"},
          {"info",
           {{"title", "parcelhub"},
            {"version", version},
            {"description", "Shared parcel delivery service"}}},
          {"paths", std::move(paths)},
          {"components",
           {{"schemas", {{"ErrorEnvelope", error_envelope_schema()}}},
            {"responses",
             {{"Error",
               {{"description", "Error envelope"},
                {"content",
                 {{"application/json",
                   {{"schema", {{"$ref", "#/components/schemas/ErrorEnvelope"}}}}}}}}}}},
            {"securitySchemes",
             {{"bearerAuth", {{"type", "http"}, {"scheme", "bearer"}, {"bearerFormat", "JWT"}}},
              {"basicAuth", {{"type", "http"}, {"scheme", "basic"}}}}}}}};
}

// --- gateway ---------------------------------------------------------------

Caller RequestContext::caller() const {
  if (!claims) throw Error(Errc::unauthenticated, "authentication required");
  return Caller{claims->account_id, claims->role};
}

Gateway::Gateway(Platform& platform) : platform_(platform) {
  build_routes();
  openapi_ = openapi_document(routes_, kApiVersion);
}

AccessClaims Gateway::authenticate(const http::Request& request) const {
  auto header = request.header("Authorization");
  if (header.empty()) throw Error(Errc::unauthenticated, "missing bearer token");
  auto token = http::parse_bearer(header);
  if (!token) throw Error(Errc::token_invalid, "authorization scheme must be Bearer");
  try {
    return platform_.accounts().authenticate(*token);
  } catch (const Error& e) {
    if (e.code() == Errc::expired) throw Error(Errc::token_expired, "access token expired");
    throw Error(Errc::token_invalid, "access token rejected");
  }
}

const RouteSpec* Gateway::match(const http::Request& request,
                                std::map<std::string, std::string>& params,
                                std::vector<std::string>& allowed) const {
  auto segs = split_path(request.path);
  bool trailing = !request.path.empty() && request.path.back() == '/';
  const RouteSpec* best = nullptr;
  int best_literals = -1;
  std::set<std::string> methods;
  for (const auto& r : routes_) {
    auto pat = split_path(r.pattern);
    if (pat.size() != segs.size() || trailing != (r.pattern.back() == '/')) continue;
    std::map<std::string, std::string> bound;
    int literals = 0;
    bool ok = true;
    for (std::size_t i = 0; i < pat.size() && ok; ++i) {
      if (is_param(pat[i])) {
        bound[param_name(pat[i])] = segs[i];
      } else if (pat[i] == segs[i]) {
        ++literals;
      } else {
        ok = false;
      }
    }
    if (!ok) continue;
    if (r.method != request.method) {
      methods.insert(r.method);
      continue;
    }
    if (literals > best_literals) {
      best = &r;
      best_literals = literals;
      params = std::move(bound);
    }
  }
  // A literal route on another method beats a parameterized one on this
  // method only for the Allow header; dispatch still uses the best match.
  allowed.assign(methods.begin(), methods.end());
  return best;
}

http::Response Gateway::handle(const http::Request& request) const {
  auto started = std::chrono::steady_clock::now();
  http::Response response;
  try {
    response = dispatch(request);
  } catch (const Error& e) {
    response = error_response(e.code(), e.what(), e.fields());
  } catch (const Document::exception& e) {
    response = error_response(Errc::bad_request, std::string("malformed request: ") + e.what());
  } catch (const std::exception& e) {
    response = error_response(Errc::internal, "internal error");
  }
  response.headers.emplace_back("Access-Control-Allow-Origin", "*");
  if (log_) {
    auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started);
    log_(AccessLogEntry{request.method, request.path, response.status, ms.count()});
  }
  return response;
}

http::Response Gateway::dispatch(const http::Request& request) const {
  std::map<std::string, std::string> params;
  std::vector<std::string> allowed;
  const RouteSpec* route = match(request, params, allowed);

  if (request.method == "OPTIONS") {
    if (!route && allowed.empty()) throw Error(Errc::not_found, "no such route");
    allowed.push_back("OPTIONS");
    std::string allow;
    for (const auto& m : allowed) allow += (allow.empty() ? "" : ", ") + m;
    http::Response r;
    r.status = 204;
    r.content_type.clear();
    r.headers = {{"Allow", allow},
                 {"Access-Control-Allow-Methods", allow},
                 {"Access-Control-Allow-Headers", "Authorization, Content-Type"},
                 {"Access-Control-Max-Age", "600"}};
    return r;
  }
  if (!route) {
    if (!allowed.empty()) {
      auto r = error_response(Errc::method_not_allowed, "method not allowed on this route");
      std::string allow;
      for (const auto& m : allowed) allow += (allow.empty() ? "" : ", ") + m;
      r.headers.emplace_back("Allow", allow);
      return r;
    }
    throw Error(Errc::not_found, "no such route");
  }

  RequestContext ctx{request, std::move(params), std::nullopt, Document()};
  switch (route->access) {
    case Access::open:
      break;
    case Access::optional_auth:
      if (!request.header("Authorization").empty()) ctx.claims = authenticate(request);
      break;
    case Access::authenticated:
      ctx.claims = authenticate(request);
      break;
    case Access::courier:
      ctx.claims = authenticate(request);
      if (ctx.claims->role != Role::courier) throw Error(Errc::not_a_courier, "courier role required");
      break;
    case Access::admin: {
      ctx.claims = authenticate(request);
      auto account = platform_.records().account(ctx.claims->account_id);
      if (!account || !account->is_admin || !account->is_active)
        throw Error(Errc::not_admin, "administrator access required");
      break;
    }
  }

  if (route->body == BodyKind::json) {
    auto ct = request.header("Content-Type");
    if (!starts_with_ci(ct, "application/json"))
      throw Error(Errc::unsupported_media_type, "expected application/json");
    ctx.body = Document::parse(request.body, nullptr, false);
    if (ctx.body.is_discarded() || !ctx.body.is_object())
      throw Error(Errc::bad_request, "body must be a JSON object");
  } else if (route->body == BodyKind::multipart) {
    if (!starts_with_ci(request.header("Content-Type"), "multipart/form-data"))
      throw Error(Errc::unsupported_media_type, "expected multipart/form-data");
  }

  auto response = route->handler(ctx);
  if (response.status == 0) response.status = route->success_status;
  return response;
}

void Gateway::build_routes() {
  Platform& p = platform_;
  auto add = [this](RouteSpec spec) { routes_.push_back(std::move(spec)); };

  // -- accounts
  add({"POST", "/api/accounts/", "registerUser", "Register a user account", "accounts",
       Access::open, BodyKind::json, 201, {},
       [&p](RequestContext& c) {
         FieldErrors errors;
         auto req = parse_registration(c.body, errors);
         throw_if(errors);
         auto account = p.accounts().register_user(req);
         return json_response(201, profile_view(p.accounts().profile(account.account_id)));
       }});

  add({"POST", "/api/accounts/verification_email/", "verificationEmail",
       "Confirm an email address with {token}, or re-send the verification email with {email}",
       "accounts", Access::open, BodyKind::json, 200, {},
       [&p](RequestContext& c) {
         FieldErrors errors;
         if (auto token = opt_string(c.body, "token", errors, "token")) {
           auto account = p.accounts().verify_email(*token);
           return json_response(200, {{"account", account_view(account)}});
         }
         if (auto email = opt_string(c.body, "email", errors, "email")) {
           p.accounts().resend_verification(*email);
           return json_response(202, {{"status", "queued"}});
         }
         if (errors.empty()) errors["token"] = "token or email required";
         throw_if(errors);
         return http::Response{};
       }});

  add({"GET", "/api/accounts/token/", "login", "Obtain a token pair (Basic credentials)",
       "accounts", Access::open, BodyKind::none, 200, {},
       [&p](RequestContext& c) {
         auto creds = http::parse_basic_auth(c.request.header("Authorization"));
         if (!creds) throw Error(Errc::unauthenticated, "Basic credentials required");
         return json_response(200, token_pair_view(p.accounts().login(creds->first, creds->second)));
       }});

  add({"POST", "/api/accounts/token/renew/", "renewToken",
       "Exchange a renew token for a new token pair", "accounts", Access::open, BodyKind::json,
       200, {},
       [&p](RequestContext& c) {
         FieldErrors errors;
         auto token = req_string(c.body, "renew_token", errors, "renew_token");
         throw_if(errors);
         try {
           return json_response(200, token_pair_view(p.accounts().renew(token)));
         } catch (const Error& e) {
           if (e.code() == Errc::account_inactive) throw;
           throw Error(Errc::token_invalid, "renew token rejected; log in again");
         }
       }});

  add({"GET", "/api/accounts/me/", "getOwnAccount", "Own account data", "accounts",
       Access::authenticated, BodyKind::none, 200, {},
       [&p](RequestContext& c) {
         return json_response(200, profile_view(p.accounts().profile(c.claims->account_id)));
       }});

  add({"PATCH", "/api/accounts/me/", "updateOwnAccount", "Change own account data", "accounts",
       Access::authenticated, BodyKind::json, 200, {},
       [&p](RequestContext& c) {
         FieldErrors errors;
         ProfilePatch patch;
         patch.first_name = opt_string(c.body, "first_name", errors, "first_name");
         patch.last_name = opt_string(c.body, "last_name", errors, "last_name");
         patch.phone = opt_string(c.body, "phone", errors, "phone");
         patch.password = opt_string(c.body, "password", errors, "password");
         patch.current_password = opt_string(c.body, "current_password", errors, "current_password");
         throw_if(errors);
         return json_response(200, profile_view(p.accounts().update_profile(c.claims->account_id, patch)));
       }});

  add({"POST", "/api/accounts/reset_password/", "resetPassword",
       "Email a password reset link", "accounts", Access::open, BodyKind::json, 202, {},
       [&p](RequestContext& c) {
         FieldErrors errors;
         auto email = req_string(c.body, "email", errors, "email");
         throw_if(errors);
         p.accounts().request_password_reset(email);
         return json_response(202, {{"status", "queued"}});
       }});

  add({"POST", "/api/accounts/reset_password/confirm/", "confirmResetPassword",
       "Set a new password with a reset token", "accounts", Access::open, BodyKind::json, 200, {},
       [&p](RequestContext& c) {
         FieldErrors errors;
         auto token = req_string(c.body, "token", errors, "token");
         auto password = req_string(c.body, "password", errors, "password");
         throw_if(errors);
         p.accounts().confirm_password_reset(token, password);
         return json_response(200, {{"status", "password_changed"}});
       }});

  // -- deliveries
  add({"POST", "/api/deliveries/", "createDelivery", "Create a delivery (multipart form)",
       "deliveries", Access::authenticated, BodyKind::multipart, 201, {},
       [&p](RequestContext& c) {
         auto parts = http::parse_multipart(c.request.header("Content-Type"), c.request.body);
         if (!parts) throw Error(Errc::bad_request, "malformed multipart body");
         const http::FormPart* payload = nullptr;
         const http::FormPart* picture = nullptr;
         for (const auto& part : *parts) {
           if (part.name == "payload") payload = &part;
           else if (part.name == "picture") picture = &part;
         }
         if (!payload) throw Error(Errc::validation_error, "payload part missing", {{"payload", "required"}});
         auto doc = Document::parse(payload->data, nullptr, false);
         if (doc.is_discarded())
           throw Error(Errc::validation_error, "payload is not JSON", {{"payload", "must be JSON"}});
         auto req = parse_delivery_payload(doc);
         if (picture && !picture->data.empty()) {
           auto bytes = as_bytes(picture->data);
           req.picture = Picture{picture->content_type, Bytes(bytes.begin(), bytes.end())};
         }
         return json_response(201, delivery_view(p.dispatch().create_delivery(c.caller(), req)));
       }});

  add({"GET", "/api/deliveries/", "listDeliveries", "Delivery history of the caller", "deliveries",
       Access::authenticated, BodyKind::none, 200,
       {{"direction", "string", false, "sent (default) or received"}},
       [&p](RequestContext& c) {
         auto dir = HistoryDirection::sent;
         if (auto v = query_value(c.request, "direction")) {
           if (*v == "received") dir = HistoryDirection::received;
           else if (*v != "sent")
             throw Error(Errc::validation_error, "bad direction", {{"direction", "sent or received"}});
         }
         Document out = Document::array();
         for (const auto& d : p.dispatch().list_history(c.caller(), dir)) out.push_back(delivery_view(d));
         return json_response(200, out);
       }});

  add({"GET", "/api/deliveries/statistics/", "deliveryStatistics",
       "Monthly counts of sent deliveries", "deliveries", Access::authenticated, BodyKind::none,
       200, {{"months", "integer", false, "trailing months including the current one (1-60, default 12)"}},
       [&p](RequestContext& c) {
         int months = 12;
         if (auto v = query_value(c.request, "months")) {
           auto parsed = parse_int(*v);
           if (!parsed) throw Error(Errc::validation_error, "bad months", {{"months", "must be an integer"}});
           months = *parsed;
         }
         return json_response(200, statistics_view(p.dispatch().statistics(c.caller(), months, p.clock().now())));
       }});

  add({"GET", "/api/deliveries/{code}/", "trackDelivery", "Track a delivery by tracking code",
       "deliveries", Access::optional_auth, BodyKind::none, 200, {},
       [&p](RequestContext& c) {
         std::optional<Caller> caller;
         if (c.claims) caller = c.caller();
         return json_response(200, tracking_view(p.dispatch().track_delivery(c.params.at("code"), caller)));
       }});

  add({"POST", "/api/deliveries/{code}/state/", "changeDeliveryState",
       "Accept (state=assigned) or advance a delivery", "deliveries", Access::courier,
       BodyKind::json, 200, {},
       [&p](RequestContext& c) {
         FieldErrors errors;
         auto state_text = req_string(c.body, "state", errors, "state");
         auto note = opt_string(c.body, "note", errors, "note");
         std::optional<DeliveryState> to;
         if (!state_text.empty()) {
           to = parse_delivery_state(state_text);
           if (!to) errors["state"] = "unknown state";
         }
         throw_if(errors);
         auto d = p.dispatch().find_by_code(c.params.at("code"));
         if (!d) throw Error(Errc::unknown_delivery, "no delivery with that tracking code");
         return json_response(200, delivery_view(p.dispatch().change_state(c.caller(), d->delivery_id, *to, note)));
       }});

  // -- couriers
  add({"POST", "/api/couriers/", "registerCourier", "Register a courier account", "couriers",
       Access::open, BodyKind::json, 201, {},
       [&p](RequestContext& c) {
         FieldErrors errors;
         auto req = parse_registration(c.body, errors);
         auto vehicle_text = req_string(c.body, "vehicle_class", errors, "vehicle_class");
         auto vehicle = parse_vehicle_class(vehicle_text);
         if (!vehicle && !errors.count("vehicle_class")) errors["vehicle_class"] = "must be small, medium or large";
         throw_if(errors);
         return json_response(201, profile_view(p.accounts().register_courier(req, *vehicle)));
       }});

  add({"PATCH", "/api/couriers/me/", "updateOwnCourier", "Toggle availability or change vehicle",
       "couriers", Access::courier, BodyKind::json, 200, {},
       [&p](RequestContext& c) {
         FieldErrors errors;
         auto available = opt_bool(c.body, "is_available", errors, "is_available");
         std::optional<VehicleClass> vehicle;
         if (auto v = opt_string(c.body, "vehicle_class", errors, "vehicle_class")) {
           vehicle = parse_vehicle_class(*v);
           if (!vehicle) errors["vehicle_class"] = "must be small, medium or large";
         }
         throw_if(errors);
         return json_response(200, courier_view(p.accounts().update_courier(c.claims->account_id, available, vehicle)));
       }});

  add({"GET", "/api/couriers/closest_delivery/", "closestDeliveries",
       "Ready deliveries ordered by distance from a location", "couriers", Access::courier,
       BodyKind::none, 200,
       {{"lat", "number", false, "defaults to the last published position"},
        {"lon", "number", false, "defaults to the last published position"},
        {"limit", "integer", false, "1-100, default 10"}},
       [&p](RequestContext& c) {
         FieldErrors errors;
         std::optional<GeoPoint> at;
         auto lat = query_value(c.request, "lat");
         auto lon = query_value(c.request, "lon");
         if (lat || lon) {
           auto la = lat ? parse_double(*lat) : std::nullopt;
           auto lo = lon ? parse_double(*lon) : std::nullopt;
           if (!la) errors["lat"] = "must be a number";
           if (!lo) errors["lon"] = "must be a number";
           if (la && lo) at = GeoPoint{*la, *lo};
         } else if (auto courier = p.records().courier_by_account(c.claims->account_id);
                    courier && courier->last_location) {
           at = courier->last_location;
         } else {
           errors["lat"] = "required when no position has been published";
           errors["lon"] = "required when no position has been published";
         }
         int limit = 10;
         if (auto v = query_value(c.request, "limit")) {
           auto parsed = parse_int(*v);
           if (!parsed || *parsed < 1 || *parsed > 100) errors["limit"] = "must be an integer in [1, 100]";
           else limit = *parsed;
         }
         throw_if(errors);
         Document out = Document::array();
         for (const auto& cd : p.dispatch().closest_deliveries(c.caller(), *at, static_cast<std::size_t>(limit))) {
           auto v = delivery_view(cd.delivery);
           v["distance_m"] = cd.distance_m;
           out.push_back(std::move(v));
         }
         return json_response(200, out);
       }});

  // -- routes
  add({"GET", "/api/routes/", "queryRoutes", "Courier routes of active deliveries", "routes",
       Access::open, BodyKind::none, 200,
       {{"courier_id", "string", false, "only routes driven by this courier"},
        {"delivery_id", "string", false, "tracking code"},
        {"from", "string", false, "RFC 3339 window start; includes finished deliveries"},
        {"to", "string", false, "RFC 3339 window end; includes finished deliveries"}},
       [&p](RequestContext& c) {
         RouteFilter filter;
         FieldErrors errors;
         if (auto v = query_value(c.request, "courier_id")) filter.courier_id = *v;
         for (const char* bound : {"from", "to"}) {
           if (auto v = query_value(c.request, bound)) {
             auto t = parse_rfc3339(*v);
             if (!t) errors[bound] = "must be an RFC 3339 timestamp";
             else (std::string_view(bound) == "from" ? filter.from : filter.to) = t;
           }
         }
         if (!errors.empty()) throw Error(Errc::malformed_filter, "malformed filter", errors);
         Document out = Document::array();
         if (auto v = query_value(c.request, "delivery_id")) {
           auto d = p.records().delivery_by_code(*v);
           if (!d) return json_response(200, out);
           filter.delivery_id = d->delivery_id;
         }
         std::map<DeliveryId, std::string> codes;
         for (const auto& r : p.routes().query_routes(filter)) {
           auto it = codes.find(r.delivery_id);
           if (it == codes.end()) {
             auto d = p.records().delivery(r.delivery_id);
             it = codes.emplace(r.delivery_id, d ? d->tracking_code.str() : std::string()).first;
           }
           out.push_back(route_view(r, it->second));
         }
         return json_response(200, out);
       }});

  add({"GET", "/api/openapi.json", "openapiDocument", "This interface description", "meta",
       Access::open, BodyKind::none, 200, {},
       [this](RequestContext&) { return json_response(200, openapi_); }});

  // -- admin. Deliveries are addressed by tracking code like everywhere else.
  struct AdminEntity {
    std::string name;
    std::string label;
    bool creatable;
  };
  for (const AdminEntity& e : {AdminEntity{"accounts", "Account", true}, AdminEntity{"persons", "Person", true},
                               AdminEntity{"couriers", "Courier", true}, AdminEntity{"deliveries", "Delivery", false}}) {
    const std::string base = "/api/admin/" + e.name + "/";
    const std::string name = e.name;
    add({"GET", base, "adminList" + e.label, "List " + e.name, "admin", Access::admin,
         BodyKind::none, 200, {},
         [&p, name](RequestContext&) {
           Document out = Document::array();
           if (name == "accounts") for (const auto& a : p.records().accounts()) out.push_back(account_view(a));
           if (name == "persons") for (const auto& x : p.records().persons()) out.push_back(person_view(x));
           if (name == "couriers") for (const auto& x : p.records().couriers()) out.push_back(courier_view(x));
           if (name == "deliveries") for (const auto& x : p.records().deliveries()) out.push_back(delivery_view(x));
           return json_response(200, out);
         }});
    if (e.creatable)
      add({"POST", base, "adminCreate" + e.label, "Create a " + e.label, "admin", Access::admin,
           BodyKind::json, 201, {},
           [&p, name](RequestContext& c) {
             FieldErrors errors;
             if (name == "accounts") {
               Account a;
               a.email = req_string(c.body, "email", errors, "email");
               auto password = req_string(c.body, "password", errors, "password");
               auto role = parse_role(opt_string(c.body, "role", errors, "role").value_or("user"));
               if (!role) errors["role"] = "must be user or courier";
               a.is_admin = opt_bool(c.body, "is_admin", errors, "is_admin").value_or(false);
               a.is_active = opt_bool(c.body, "is_active", errors, "is_active").value_or(a.is_admin);
               if (a.is_admin && !a.is_active) errors["is_active"] = "an administrator must be active";
               if (!a.email.empty() && !is_valid_email(a.email)) errors["email"] = "not a valid address";
               throw_if(errors);
               a.role = *role;
               a.password_hash = hash_password(password, p.config().password);
               a.account_id = generate_id(p.entropy());
               a.created_at = p.clock().now();
               p.records().insert_account(a);
               return json_response(201, account_view(a));
             }
             if (name == "persons") {
               Person x;
               x.first_name = req_string(c.body, "first_name", errors, "first_name");
               x.last_name = req_string(c.body, "last_name", errors, "last_name");
               x.email = req_string(c.body, "email", errors, "email");
               x.phone = opt_string(c.body, "phone", errors, "phone");
               x.account_id = opt_string(c.body, "account_id", errors, "account_id");
               if (!x.email.empty() && !is_valid_email(x.email)) errors["email"] = "not a valid address";
               throw_if(errors);
               x.person_id = generate_id(p.entropy());
               p.records().insert_person(x);
               return json_response(201, person_view(x));
             }
             Courier x;
             x.account_id = req_string(c.body, "account_id", errors, "account_id");
             auto vehicle = parse_vehicle_class(req_string(c.body, "vehicle_class", errors, "vehicle_class"));
             if (!vehicle && !errors.count("vehicle_class")) errors["vehicle_class"] = "must be small, medium or large";
             throw_if(errors);
             if (!p.records().account(x.account_id)) throw Error(Errc::unknown_entity, "no such account");
             x.courier_id = generate_id(p.entropy());
             x.vehicle_class = *vehicle;
             x.registered_on = std::chrono::floor<std::chrono::days>(p.clock().now());
             p.records().insert_courier(x);
             return json_response(201, courier_view(x));
           }});
    add({"GET", base + "{id}/", "adminGet" + e.label, "Read a " + e.label, "admin", Access::admin,
         BodyKind::none, 200, {},
         [&p, name](RequestContext& c) {
           const auto& id = c.params.at("id");
           auto missing = [] { return Error(Errc::unknown_entity, "no such entity"); };
           if (name == "accounts") { auto x = p.records().account(id); if (!x) throw missing(); return json_response(200, account_view(*x)); }
           if (name == "persons") { auto x = p.records().person(id); if (!x) throw missing(); return json_response(200, person_view(*x)); }
           if (name == "couriers") { auto x = p.records().courier(id); if (!x) throw missing(); return json_response(200, courier_view(*x)); }
           auto x = p.records().delivery_by_code(id);
           if (!x) throw missing();
           return json_response(200, delivery_view(*x));
         }});
    add({"PATCH", base + "{id}/", "adminUpdate" + e.label, "Edit a " + e.label, "admin",
         Access::admin, BodyKind::json, 200, {},
         [&p, name](RequestContext& c) {
           const auto& id = c.params.at("id");
           FieldErrors errors;
           auto missing = [] { return Error(Errc::unknown_entity, "no such entity"); };
           if (name == "accounts") {
             auto x = p.records().account(id);
             if (!x) throw missing();
             if (auto v = opt_bool(c.body, "is_active", errors, "is_active")) x->is_active = *v;
             if (auto v = opt_bool(c.body, "is_admin", errors, "is_admin")) x->is_admin = *v;
             if (auto v = opt_string(c.body, "role", errors, "role")) {
               if (auto r = parse_role(*v)) x->role = *r;
               else errors["role"] = "must be user or courier";
             }
             if (x->is_admin && !x->is_active) errors["is_active"] = "an administrator must be active";
             throw_if(errors);
             p.records().save_account(*x);
             return json_response(200, account_view(*x));
           }
           if (name == "persons") {
             auto x = p.records().person(id);
             if (!x) throw missing();
             if (auto v = opt_string(c.body, "first_name", errors, "first_name")) x->first_name = *v;
             if (auto v = opt_string(c.body, "last_name", errors, "last_name")) x->last_name = *v;
             if (auto v = opt_string(c.body, "phone", errors, "phone")) x->phone = *v;
             throw_if(errors);
             p.records().save_person(*x);
             return json_response(200, person_view(*x));
           }
           if (name == "couriers") {
             auto x = p.records().courier(id);
             if (!x) throw missing();
             if (auto v = opt_bool(c.body, "is_available", errors, "is_available")) x->is_available = *v;
             if (auto v = opt_string(c.body, "vehicle_class", errors, "vehicle_class")) {
               if (auto vc = parse_vehicle_class(*v)) x->vehicle_class = *vc;
               else errors["vehicle_class"] = "must be small, medium or large";
             }
             throw_if(errors);
             p.records().save_courier(*x);
             return json_response(200, courier_view(*x));
           }
           // State is owned by the courier workflow; admins may only annotate.
           auto x = p.records().delivery_by_code(id);
           if (!x) throw missing();
           for (auto it = c.body.begin(); it != c.body.end(); ++it)
             if (it.key() != "note") errors[it.key()] = "not editable";
           auto note = opt_string(c.body, "note", errors, "note");
           throw_if(errors);
           auto update = p.store().conditional_update(
               kind::delivery, x->delivery_id, {{"version", x->version}},
               {{"note", note ? Document(*note) : Document(nullptr)}});
           if (update != UpdateResult::applied) throw Error(Errc::conflict, "delivery changed concurrently");
           return json_response(200, delivery_view(*p.records().delivery(x->delivery_id)));
         }});
    add({"DELETE", base + "{id}/", "adminDelete" + e.label, "Delete a " + e.label, "admin",
         Access::admin, BodyKind::none, 204, {},
         [&p, name](RequestContext& c) {
           const auto& id = c.params.at("id");
           bool erased = false;
           if (name == "accounts") erased = p.records().erase_account(id);
           else if (name == "persons") erased = p.records().erase_person(id);
           else if (name == "couriers") erased = p.records().erase_courier(id);
           else if (auto d = p.records().delivery_by_code(id)) erased = p.records().erase_delivery(d->delivery_id);
           if (!erased) throw Error(Errc::unknown_entity, "no such entity");
           http::Response r;
           r.status = 204;
           r.content_type.clear();
           return r;
         }});
  }
}

}  // namespace parcelhub

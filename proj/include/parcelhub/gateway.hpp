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

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "parcelhub/error.hpp"
#include "parcelhub/http.hpp"
#include "parcelhub/platform.hpp"

namespace parcelhub {

enum class Access {
  open,           // no credentials looked at
  optional_auth,  // a bearer token, when present, must be valid
  authenticated,
  courier,
  admin,
};

enum class BodyKind { none, json, multipart };

struct QueryParam {
  std::string name;
  std::string type;  // OpenAPI primitive: string | integer | number | boolean
  bool required = false;
  std::string description;
};

struct RequestContext {
  const http::Request& request;
  std::map<std::string, std::string> params;
  std::optional<AccessClaims> claims;
  Document body;  // parsed for BodyKind::json

  Caller caller() const;
};

using RouteHandler = std::function<http::Response(RequestContext&)>;

struct RouteSpec {
  std::string method;
  std::string pattern;  // "/api/deliveries/{code}/"
  std::string operation_id;
  std::string summary;
  std::string tag;
  Access access = Access::open;
  BodyKind body = BodyKind::none;
  int success_status = 200;
  std::vector<QueryParam> query;
  RouteHandler handler;
};

struct AccessLogEntry {
  std::string method;
  std::string path;
  int status = 0;
  double latency_ms = 0.0;
};

/// Route table, authentication middleware and JSON views over a Platform.
/// Transport-free: the server adapts its requests to http::Request.
class Gateway {
 public:
  explicit Gateway(Platform& platform);

  http::Response handle(const http::Request& request) const;

  const std::vector<RouteSpec>& routes() const noexcept { return routes_; }

  /// OpenAPI 3.0 description generated from the route table.
  const Document& openapi() const noexcept { return openapi_; }

  void set_access_log(std::function<void(const AccessLogEntry&)> sink) { log_ = std::move(sink); }

 private:
  void build_routes();
  http::Response dispatch(const http::Request& request) const;
  const RouteSpec* match(const http::Request& request, std::map<std::string, std::string>& params,
                         std::vector<std::string>& allowed) const;
  AccessClaims authenticate(const http::Request& request) const;

  Platform& platform_;
  std::vector<RouteSpec> routes_;
  Document openapi_;
  std::function<void(const AccessLogEntry&)> log_;
};

/// {"error": {"code", "message", "fields"?}} with the status for `code`.
http::Response error_response(Errc code, std::string_view message, const FieldErrors& fields = {});
http::Response error_response(int status, std::string_view code, std::string_view message,
                              const FieldErrors& fields = {});

http::Response json_response(int status, const Document& body);

/// JSON Schema (draft 4 subset, as embedded in OpenAPI 3.0) of the error envelope.
Document error_envelope_schema();

Document openapi_document(const std::vector<RouteSpec>& routes, std::string_view version);

// Wire views shared by the gateway, the Python bindings and tests.
Document account_view(const Account& a);
Document person_view(const Person& p);
Document courier_view(const Courier& c);
Document delivery_view(const Delivery& d);
Document tracking_view(const TrackingView& v);
Document token_pair_view(const TokenPair& p);
Document route_view(const Route& r, std::string_view tracking_code);
Document statistics_view(const StatisticsReport& r);

/// Parses the "payload" part of a delivery creation request. Type problems
/// come back as validation_error with per-field messages.
DeliveryRequest parse_delivery_payload(const Document& payload);

}  // namespace parcelhub

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

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace parcelhub::http {

struct CaseInsensitiveLess {
  using is_transparent = void;
  bool operator()(std::string_view a, std::string_view b) const noexcept;
};

using Headers = std::map<std::string, std::string, CaseInsensitiveLess>;

struct Request {
  std::string method;
  std::string target;  // path plus query, as received
  std::string path;
  std::map<std::string, std::string> query;
  Headers headers;
  std::string body;

  std::string header(std::string_view name) const;

  /// Splits `target` into path and decoded query parameters.
  static Request make(std::string method, std::string target, Headers headers = {},
                      std::string body = {});
};

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
  std::vector<std::pair<std::string, std::string>> headers;
};

std::string url_decode(std::string_view s);
std::map<std::string, std::string> parse_query(std::string_view query);

struct FormPart {
  std::string name;
  std::string filename;
  std::string content_type;
  std::string data;
};

/// multipart/form-data body split on the boundary from `content_type`.
/// Returns nullopt when the content type or framing is malformed.
std::optional<std::vector<FormPart>> parse_multipart(std::string_view content_type,
                                                     std::string_view body);

/// Decodes "Basic base64(user:password)".
std::optional<std::pair<std::string, std::string>> parse_basic_auth(std::string_view header);

/// Token from "Bearer <token>", or nullopt for other schemes.
std::optional<std::string> parse_bearer(std::string_view header);

std::string_view reason_phrase(int status) noexcept;

}  // namespace parcelhub::http

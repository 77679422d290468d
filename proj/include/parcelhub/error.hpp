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
#include <stdexcept>
#include <string>
#include <string_view>

namespace parcelhub {

/// Machine-readable failure codes shared by every module. The wire name of a
/// code is what appears in the "code" member of the JSON error envelope.
enum class Errc {
  validation_error,
  malformed_filter,
  policy_violation,
  invalid_coordinates,
  unknown_kind,
  invalid_recipient,
  bad_request,
  unauthenticated,
  invalid_credentials,
  token_expired,
  token_invalid,
  // token-level failures, mapped to token_expired / token_invalid at the edge
  expired,
  consumed,
  invalid_signature,
  malformed,
  wrong_purpose,
  unknown_token,
  account_inactive,
  forbidden,
  not_a_courier,
  not_assigned_courier,
  not_admin,
  not_found,
  unknown_tracking_code,
  unknown_delivery,
  unknown_entity,
  method_not_allowed,
  not_ready,
  forbidden_transition,
  wrong_state,
  non_monotonic_timestamp,
  precondition_failed,
  email_taken,
  conflict,
  not_publisher,
  payload_too_large,
  unsupported_media_type,
  malformed_hash,
  bad_key,
  authentication_failure,
  entropy_unavailable,
  storage_io,
  transport_unavailable,
  service_unreachable,
  protocol_error,
  internal,
};

std::string_view to_string(Errc code) noexcept;

/// HTTP status used when the code reaches the REST layer unchanged.
int http_status(Errc code) noexcept;

using FieldErrors = std::map<std::string, std::string>;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message, FieldErrors fields = {})
      : std::runtime_error(message), code_(code), fields_(std::move(fields)) {}

  Errc code() const noexcept { return code_; }
  const FieldErrors& fields() const noexcept { return fields_; }

 private:
  Errc code_;
  FieldErrors fields_;
};

}  // namespace parcelhub

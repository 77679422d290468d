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

#include "parcelhub/error.hpp"

namespace parcelhub {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::validation_error: return "validation_error";
    case Errc::malformed_filter: return "malformed_filter";
    case Errc::policy_violation: return "policy_violation";
    case Errc::invalid_coordinates: return "invalid_coordinates";
    case Errc::unknown_kind: return "unknown_kind";
    case Errc::invalid_recipient: return "invalid_recipient";
    case Errc::bad_request: return "bad_request";
    case Errc::unauthenticated: return "unauthenticated";
    case Errc::invalid_credentials: return "invalid_credentials";
    case Errc::token_expired: return "token_expired";
    case Errc::token_invalid: return "token_invalid";
    case Errc::expired: return "expired";
    case Errc::consumed: return "consumed";
    case Errc::invalid_signature: return "invalid_signature";
    case Errc::malformed: return "malformed";
    case Errc::wrong_purpose: return "wrong_purpose";
    case Errc::unknown_token: return "unknown_token";
    case Errc::account_inactive: return "account_inactive";
    case Errc::forbidden: return "forbidden";
    case Errc::not_a_courier: return "not_a_courier";
    case Errc::not_assigned_courier: return "not_assigned_courier";
    case Errc::not_admin: return "not_admin";
    case Errc::not_found: return "not_found";
    case Errc::unknown_tracking_code: return "unknown_tracking_code";
    case Errc::unknown_delivery: return "unknown_delivery";
    case Errc::unknown_entity: return "unknown_entity";
    case Errc::method_not_allowed: return "method_not_allowed";
    case Errc::not_ready: return "not_ready";
    case Errc::forbidden_transition: return "forbidden_transition";
    case Errc::wrong_state: return "wrong_state";
    case Errc::non_monotonic_timestamp: return "non_monotonic_timestamp";
    case Errc::precondition_failed: return "precondition_failed";
    case Errc::email_taken: return "email_taken";
    case Errc::conflict: return "conflict";
    case Errc::not_publisher: return "not_publisher";
    case Errc::payload_too_large: return "payload_too_large";
    case Errc::unsupported_media_type: return "unsupported_media_type";
    case Errc::malformed_hash: return "malformed_hash";
    case Errc::bad_key: return "bad_key";
    case Errc::authentication_failure: return "authentication_failure";
    case Errc::entropy_unavailable: return "entropy_unavailable";
    case Errc::storage_io: return "storage_io";
    case Errc::transport_unavailable: return "transport_unavailable";
    case Errc::service_unreachable: return "service_unreachable";
    case Errc::protocol_error: return "protocol_error";
    case Errc::internal: return "internal";
  }
  return "internal";
}

int http_status(Errc code) noexcept {
  switch (code) {
    case Errc::validation_error:
    case Errc::malformed_filter:
    case Errc::policy_violation:
    case Errc::invalid_coordinates:
    case Errc::unknown_kind:
    case Errc::invalid_recipient:
    case Errc::bad_request:
    case Errc::expired:
    case Errc::consumed:
    case Errc::wrong_purpose:
    case Errc::unknown_token:
      return 400;
    case Errc::unauthenticated:
    case Errc::invalid_credentials:
    case Errc::token_expired:
    case Errc::token_invalid:
    case Errc::invalid_signature:
    case Errc::malformed:
      return 401;
    case Errc::account_inactive:
    case Errc::forbidden:
    case Errc::not_a_courier:
    case Errc::not_assigned_courier:
    case Errc::not_admin:
    case Errc::not_publisher:
      return 403;
    case Errc::not_found:
    case Errc::unknown_tracking_code:
    case Errc::unknown_delivery:
    case Errc::unknown_entity:
      return 404;
    case Errc::method_not_allowed:
      return 405;
    case Errc::not_ready:
    case Errc::forbidden_transition:
    case Errc::wrong_state:
    case Errc::non_monotonic_timestamp:
    case Errc::precondition_failed:
    case Errc::email_taken:
    case Errc::conflict:
      return 409;
    case Errc::payload_too_large:
      return 413;
    case Errc::unsupported_media_type:
      return 415;
    case Errc::transport_unavailable:
    case Errc::service_unreachable:
      return 503;
    case Errc::malformed_hash:
    case Errc::bad_key:
    case Errc::authentication_failure:
    case Errc::entropy_unavailable:
    case Errc::storage_io:
    case Errc::protocol_error:
    case Errc::internal:
      return 500;
  }
  return 500;
}

}  // namespace parcelhub

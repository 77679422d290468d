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
#include <optional>
#include <string>
#include <string_view>

#include "parcelhub/clock.hpp"
#include "parcelhub/domain.hpp"
#include "parcelhub/store.hpp"

namespace parcelhub {

struct TokenLifetimes {
  microseconds access = minutes{15};
  microseconds renew = hours{24 * 14};
  microseconds action = hours{24};
};

struct TokenPair {
  std::string access_token;
  std::string renew_token;
  Timestamp access_expires_at{};
  Timestamp renew_expires_at{};
};

struct AccessClaims {
  AccountId account_id;
  Role role = Role::user;
  Timestamp expires_at{};
};

enum class ActionPurpose { verify_email, reset_password };

std::string_view to_string(ActionPurpose p) noexcept;

struct ActionToken {
  std::string token;  // plaintext, only ever returned to the caller that created it
  ActionPurpose purpose = ActionPurpose::verify_email;
  AccountId account_id;
  Timestamp expires_at{};
  bool consumed = false;
};

/// Compact JWS (HS256) encode/verify. Verification returns the payload
/// object or throws malformed / invalid_signature.
std::string jws_sign(const Document& payload, std::string_view key);
Document jws_verify(std::string_view token, std::string_view key);

/// Issues and checks access/renew pairs and single-use action tokens.
/// Access checks are pure signature checks. Renew tokens carry a nonce whose
/// one-time use is recorded in the store with a compare-and-set.
class TokenService {
 public:
  using AccountLoader = std::function<std::optional<Account>(const AccountId&)>;

  TokenService(std::string signing_key, Store& store, EntropySource& entropy,
               TokenLifetimes lifetimes = {});

  /// Throws account_inactive for accounts that have not been activated.
  TokenPair issue_token_pair(const Account& account, Timestamp now);

  /// Throws expired, invalid_signature or malformed.
  AccessClaims verify_access(std::string_view token, Timestamp now) const;

  /// Consumes the presented renew token and mints a replacement pair.
  /// Throws expired, consumed, invalid_signature, malformed or account_inactive.
  TokenPair renew_tokens(std::string_view renew_token, Timestamp now, const AccountLoader& load);

  ActionToken create_action_token(const AccountId& account, ActionPurpose purpose, Timestamp now);

  /// Throws unknown_token, wrong_purpose, consumed or expired.
  AccountId consume_action_token(std::string_view token, ActionPurpose purpose, Timestamp now);

  const TokenLifetimes& lifetimes() const noexcept { return lifetimes_; }

 private:
  std::string random_token(std::size_t bytes);

  std::string key_;
  Store& store_;
  EntropySource& entropy_;
  TokenLifetimes lifetimes_;
};

}  // namespace parcelhub

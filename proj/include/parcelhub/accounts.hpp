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

#include <optional>
#include <string>
#include <string_view>

#include "parcelhub/clock.hpp"
#include "parcelhub/domain.hpp"
#include "parcelhub/notifier.hpp"
#include "parcelhub/password.hpp"
#include "parcelhub/records.hpp"
#include "parcelhub/tokens.hpp"

namespace parcelhub {

struct RegistrationRequest {
  std::string email;
  std::string password;
  std::string first_name;
  std::string last_name;
  std::optional<std::string> phone;
};

struct AccountConfig {
  /// When false, new accounts are active immediately and no verification
  /// email is queued. Intended for local demos only.
  bool require_email_verification = true;
  PasswordParams password;
};

struct Profile {
  Account account;
  std::optional<Person> person;
  std::optional<Courier> courier;
};

struct ProfilePatch {
  std::optional<std::string> first_name;
  std::optional<std::string> last_name;
  std::optional<std::string> phone;
  std::optional<std::string> password;
  std::optional<std::string> current_password;
};

/// Registration, login, email verification and password reset.
class Accounts {
 public:
  Accounts(Records& records, TokenService& tokens, Outbox& outbox, EntropySource& entropy,
           const Clock& clock, AccountConfig config = {});

  Account register_user(const RegistrationRequest& request);
  Profile register_courier(const RegistrationRequest& request, VehicleClass vehicle);

  /// Throws invalid_credentials or account_inactive.
  TokenPair login(std::string_view email, std::string_view password);
  TokenPair renew(std::string_view renew_token);

  /// No-op for unknown or already active addresses so the endpoint cannot be
  /// used to probe for accounts.
  void resend_verification(std::string_view email);
  Account verify_email(std::string_view token);

  void request_password_reset(std::string_view email);
  void confirm_password_reset(std::string_view token, std::string_view new_password);

  Profile profile(const AccountId& id);
  Profile update_profile(const AccountId& id, const ProfilePatch& patch);
  Courier update_courier(const AccountId& id, std::optional<bool> is_available,
                         std::optional<VehicleClass> vehicle);

  AccessClaims authenticate(std::string_view access_token) const;

  const AccountConfig& config() const noexcept { return config_; }

 private:
  Account create_account(const RegistrationRequest& request, Role role,
                         const std::optional<VehicleClass>& vehicle, Profile* out);
  void queue_verification(const Account& account, const std::string& name);

  Records& records_;
  TokenService& tokens_;
  Outbox& outbox_;
  EntropySource& entropy_;
  const Clock& clock_;
  AccountConfig config_;
  std::string dummy_hash_;
};

}  // namespace parcelhub

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

#include "parcelhub/accounts.hpp"

#include "parcelhub/error.hpp"

namespace parcelhub {

namespace {

std::string trimmed(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

void validate_registration(const RegistrationRequest& r, const PasswordParams& params) {
  FieldErrors fields;
  if (!is_valid_email(trimmed(r.email))) fields["email"] = "must be a valid email address";
  if (r.password.size() < params.min_length)
    fields["password"] = "must be at least " + std::to_string(params.min_length) + " characters";
  if (trimmed(r.first_name).empty()) fields["first_name"] = "required";
  if (trimmed(r.last_name).empty()) fields["last_name"] = "required";
  if (!fields.empty()) throw Error(Errc::validation_error, "invalid registration", fields);
}

}  // namespace

Accounts::Accounts(Records& records, TokenService& tokens, Outbox& outbox, EntropySource& entropy,
                   const Clock& clock, AccountConfig config)
    : records_(records),
      tokens_(tokens),
      outbox_(outbox),
      entropy_(entropy),
      clock_(clock),
      config_(config),
      dummy_hash_(hash_password("timing-equalizer", config.password)) {}

void Accounts::queue_verification(const Account& account, const std::string& name) {
  auto token = tokens_.create_action_token(account.account_id, ActionPurpose::verify_email,
                                           clock_.now());
  outbox_.queue(NotificationKind::verify_email, account.email,
                {{"token", token.token}, {"name", name}});
}

Account Accounts::create_account(const RegistrationRequest& request, Role role,
                                 const std::optional<VehicleClass>& vehicle, Profile* out) {
  validate_registration(request, config_.password);
  // Hash before taking the store lock; argon2 is deliberately slow.
  const auto hash = hash_password(request.password, config_.password);
  const auto email = trimmed(request.email);
  const auto now = clock_.now();

  Account account;
  account.account_id = generate_id(entropy_);
  account.email = email;
  account.password_hash = hash;
  account.role = role;
  account.is_active = !config_.require_email_verification;
  account.created_at = now;

  Person person;
  std::optional<Courier> courier;
  records_.store().atomically([&] {
    if (records_.account_by_email(email)) throw Error(Errc::email_taken, "email already registered");
    records_.insert_account(account);

    // A receiver may already exist as an unregistered person; claim it.
    if (auto existing = records_.person_by_email(email)) {
      person = *existing;
    } else {
      person.person_id = generate_id(entropy_);
    }
    person.first_name = trimmed(request.first_name);
    person.last_name = trimmed(request.last_name);
    person.email = email;
    person.phone = request.phone;
    person.account_id = account.account_id;
    records_.save_person(person);

    if (vehicle) {
      Courier c;
      c.courier_id = generate_id(entropy_);
      c.account_id = account.account_id;
      c.vehicle_class = *vehicle;
      c.registered_on = std::chrono::floor<std::chrono::days>(now);
      c.is_available = true;
      records_.insert_courier(c);
      courier = c;
    }
    if (config_.require_email_verification) queue_verification(account, person.first_name);
  });

  if (out) *out = Profile{account, person, courier};
  return account;
}

Account Accounts::register_user(const RegistrationRequest& request) {
  return create_account(request, Role::user, std::nullopt, nullptr);
}

Profile Accounts::register_courier(const RegistrationRequest& request, VehicleClass vehicle) {
  Profile p;
  create_account(request, Role::courier, vehicle, &p);
  return p;
}

TokenPair Accounts::login(std::string_view email, std::string_view password) {
  auto account = records_.account_by_email(trimmed(email));
  if (!account) {
    verify_password(password, dummy_hash_);
    throw Error(Errc::invalid_credentials, "unknown email or wrong password");
  }
  if (!verify_password(password, account->password_hash))
    throw Error(Errc::invalid_credentials, "unknown email or wrong password");
  return tokens_.issue_token_pair(*account, clock_.now());
}

TokenPair Accounts::renew(std::string_view renew_token) {
  return tokens_.renew_tokens(renew_token, clock_.now(),
                              [&](const AccountId& id) { return records_.account(id); });
}

void Accounts::resend_verification(std::string_view email) {
  auto account = records_.account_by_email(trimmed(email));
  if (!account || account->is_active) return;
  auto person = records_.person_by_account(account->account_id);
  records_.store().atomically(
      [&] { queue_verification(*account, person ? person->first_name : std::string()); });
}

Account Accounts::verify_email(std::string_view token) {
  Account out;
  records_.store().atomically([&] {
    auto id = tokens_.consume_action_token(token, ActionPurpose::verify_email, clock_.now());
    auto account = records_.account(id);
    if (!account) throw Error(Errc::unknown_token, "account no longer exists");
    account->is_active = true;
    records_.save_account(*account);
    out = *account;
  });
  return out;
}

void Accounts::request_password_reset(std::string_view email) {
  auto account = records_.account_by_email(trimmed(email));
  if (!account) return;
  auto person = records_.person_by_account(account->account_id);
  records_.store().atomically([&] {
    auto token = tokens_.create_action_token(account->account_id, ActionPurpose::reset_password,
                                             clock_.now());
    outbox_.queue(NotificationKind::reset_password, account->email,
                  {{"token", token.token}, {"name", person ? person->first_name : std::string()}});
  });
}

void Accounts::confirm_password_reset(std::string_view token, std::string_view new_password) {
  if (new_password.size() < config_.password.min_length)
    throw Error(Errc::validation_error, "password too short",
                {{"password", "must be at least " + std::to_string(config_.password.min_length) +
                                  " characters"}});
  const auto hash = hash_password(new_password, config_.password);
  records_.store().atomically([&] {
    auto id = tokens_.consume_action_token(token, ActionPurpose::reset_password, clock_.now());
    auto account = records_.account(id);
    if (!account) throw Error(Errc::unknown_token, "account no longer exists");
    account->password_hash = hash;
    // Following the emailed link proves control of the address.
    account->is_active = true;
    records_.save_account(*account);
  });
}

Profile Accounts::profile(const AccountId& id) {
  auto account = records_.account(id);
  if (!account) throw Error(Errc::token_invalid, "account no longer exists");
  return Profile{*account, records_.person_by_account(id), records_.courier_by_account(id)};
}

Profile Accounts::update_profile(const AccountId& id, const ProfilePatch& patch) {
  FieldErrors fields;
  if (patch.first_name && trimmed(*patch.first_name).empty()) fields["first_name"] = "required";
  if (patch.last_name && trimmed(*patch.last_name).empty()) fields["last_name"] = "required";
  if (patch.password && patch.password->size() < config_.password.min_length)
    fields["password"] =
        "must be at least " + std::to_string(config_.password.min_length) + " characters";
  if (patch.password && !patch.current_password) fields["current_password"] = "required";
  if (!fields.empty()) throw Error(Errc::validation_error, "invalid profile update", fields);

  auto current = profile(id);
  std::optional<std::string> new_hash;
  if (patch.password) {
    if (!verify_password(*patch.current_password, current.account.password_hash))
      throw Error(Errc::validation_error, "current password does not match",
                  {{"current_password", "does not match"}});
    new_hash = hash_password(*patch.password, config_.password);
  }

  records_.store().atomically([&] {
    auto account = records_.account(id);
    if (!account) throw Error(Errc::token_invalid, "account no longer exists");
    if (new_hash) {
      account->password_hash = *new_hash;
      records_.save_account(*account);
    }
    auto person = records_.person_by_account(id);
    if (person) {
      if (patch.first_name) person->first_name = trimmed(*patch.first_name);
      if (patch.last_name) person->last_name = trimmed(*patch.last_name);
      if (patch.phone) person->phone = *patch.phone;
      records_.save_person(*person);
    }
  });
  return profile(id);
}

Courier Accounts::update_courier(const AccountId& id, std::optional<bool> is_available,
                                 std::optional<VehicleClass> vehicle) {
  Courier out;
  records_.store().atomically([&] {
    auto courier = records_.courier_by_account(id);
    if (!courier) throw Error(Errc::not_a_courier, "account has no courier profile");
    if (is_available) courier->is_available = *is_available;
    if (vehicle) courier->vehicle_class = *vehicle;
    records_.save_courier(*courier);
    out = *courier;
  });
  return out;
}

AccessClaims Accounts::authenticate(std::string_view access_token) const {
  return tokens_.verify_access(access_token, clock_.now());
}

}  // namespace parcelhub

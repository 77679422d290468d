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

#include <gtest/gtest.h>

#include "parcelhub/error.hpp"
#include "parcelhub/password.hpp"
#include "support/harness.hpp"

using namespace parcelhub;
using fixtures::Harness;
using fixtures::kPassword;

namespace {

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::internal;
}

Config verifying() {
  auto c = fixtures::test_config();
  c.require_email_verification = true;
  return c;
}

RegistrationRequest req(const std::string& email) { return {email, kPassword, "Ada", "Lovelace", std::nullopt}; }

}  // namespace

TEST(Accounts, RegistrationValidatesPerField) {
  Harness h;
  try {
    h.p().accounts().register_user({"not-an-email", "short", " ", "", std::nullopt});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::validation_error);
    for (const char* f : {"email", "password", "first_name", "last_name"}) EXPECT_TRUE(e.fields().count(f)) << f;
  }
}

TEST(Accounts, VerificationFlow) {
  Harness h(7, verifying());
  auto a = h.p().accounts().register_user(req("v@example.org"));
  EXPECT_FALSE(a.is_active);
  EXPECT_EQ(code_of([&] { h.p().accounts().login("v@example.org", kPassword); }), Errc::account_inactive);

  h.p().drain_outbox();
  auto token = h.mail->last_token("v@example.org", "verification token");
  ASSERT_FALSE(token.empty());
  auto activated = h.p().accounts().verify_email(token);
  EXPECT_TRUE(activated.is_active);
  EXPECT_NO_THROW(h.p().accounts().login("v@example.org", kPassword));
  EXPECT_EQ(code_of([&] { h.p().accounts().verify_email(token); }), Errc::consumed);
}

TEST(Accounts, ResendOnlyForPendingAccounts) {
  Harness h(7, verifying());
  h.p().accounts().register_user(req("v@example.org"));
  h.p().accounts().resend_verification("V@example.org");
  h.p().accounts().resend_verification("unknown@example.org");
  h.p().drain_outbox();
  EXPECT_EQ(h.mail->messages().size(), 2u);
}

TEST(Accounts, NoVerificationMailWhenDisabled) {
  Harness h;
  auto a = h.user("x@example.org");
  EXPECT_TRUE(a.is_active);
  h.p().drain_outbox();
  EXPECT_TRUE(h.mail->messages().empty());
}

TEST(Accounts, LoginChecksCredentials) {
  Harness h;
  h.user("l@example.org");
  EXPECT_EQ(code_of([&] { h.p().accounts().login("l@example.org", "wrong-password"); }), Errc::invalid_credentials);
  EXPECT_EQ(code_of([&] { h.p().accounts().login("nobody@example.org", kPassword); }), Errc::invalid_credentials);
  auto pair = h.p().accounts().login(" L@Example.org ", kPassword);
  EXPECT_EQ(h.p().accounts().authenticate(pair.access_token).role, Role::user);
}

TEST(Accounts, PasswordReset) {
  Harness h;
  h.user("r@example.org");
  h.p().accounts().request_password_reset("r@example.org");
  h.p().accounts().request_password_reset("ghost@example.org");  // silently ignored
  h.p().drain_outbox();
  ASSERT_EQ(h.mail->messages().size(), 1u);
  auto token = h.mail->last_token("r@example.org", "reset token");
  ASSERT_FALSE(token.empty());
  EXPECT_EQ(code_of([&] { h.p().accounts().confirm_password_reset(token, "short"); }), Errc::validation_error);
  h.p().accounts().confirm_password_reset(token, "brand-new-password");
  EXPECT_EQ(code_of([&] { h.p().accounts().login("r@example.org", kPassword); }), Errc::invalid_credentials);
  EXPECT_NO_THROW(h.p().accounts().login("r@example.org", "brand-new-password"));
  EXPECT_EQ(code_of([&] { h.p().accounts().confirm_password_reset(token, "another-password"); }), Errc::consumed);
}

TEST(Accounts, ProfileUpdate) {
  Harness h;
  auto a = h.user("p@example.org");
  ProfilePatch patch;
  patch.first_name = "  Augusta ";
  patch.phone = "+421";
  auto p = h.p().accounts().update_profile(a.account_id, patch);
  EXPECT_EQ(p.person->first_name, "Augusta");
  EXPECT_EQ(p.person->last_name, "Lovelace");
  EXPECT_EQ(p.person->phone, "+421");

  ProfilePatch pw;
  pw.password = "a-new-password";
  EXPECT_EQ(code_of([&] { h.p().accounts().update_profile(a.account_id, pw); }), Errc::validation_error);
  pw.current_password = "wrong-password";
  EXPECT_EQ(code_of([&] { h.p().accounts().update_profile(a.account_id, pw); }), Errc::validation_error);
  pw.current_password = kPassword;
  h.p().accounts().update_profile(a.account_id, pw);
  EXPECT_NO_THROW(h.p().accounts().login("p@example.org", "a-new-password"));
}

TEST(Accounts, CourierRegistrationCreatesProfile) {
  Harness h;
  auto p = h.p().accounts().register_courier(req("c@example.org"), VehicleClass::medium);
  EXPECT_EQ(p.account.role, Role::courier);
  ASSERT_TRUE(p.courier);
  EXPECT_EQ(p.courier->vehicle_class, VehicleClass::medium);
  EXPECT_EQ(p.courier->registered_on, std::chrono::floor<std::chrono::days>(h.clock.now()));
  auto c = h.p().accounts().update_courier(p.account.account_id, false, VehicleClass::large);
  EXPECT_FALSE(c.is_available);
  EXPECT_EQ(c.vehicle_class, VehicleClass::large);
  auto u = h.user("u@example.org");
  EXPECT_EQ(code_of([&] { h.p().accounts().update_courier(u.account_id, true, std::nullopt); }), Errc::not_a_courier);
}

TEST(Accounts, RegistrationClaimsExistingReceiverPerson) {
  Harness h;
  auto s = h.user("s@example.org");
  h.delivery(s, {48.1, 17.1}, {48.2, 17.2}, "later@example.org", "Later", "Receiver");
  auto before = h.p().records().person_by_email("later@example.org");
  ASSERT_TRUE(before);
  EXPECT_FALSE(before->account_id);
  auto a = h.user("later@example.org", "Lara", "Receiver");
  auto after = h.p().records().person_by_email("later@example.org");
  EXPECT_EQ(after->person_id, before->person_id);
  EXPECT_EQ(after->account_id, a.account_id);
  EXPECT_EQ(after->first_name, "Lara");
}

TEST(Accounts, StoredHashIsArgon2) {
  Harness h;
  auto a = h.user("h@example.org");
  auto stored = h.p().records().account(a.account_id);
  EXPECT_TRUE(is_well_formed_hash(stored->password_hash));
  EXPECT_TRUE(verify_password(kPassword, stored->password_hash));
}

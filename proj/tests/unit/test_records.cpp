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

#include <fstream>
#include <sstream>

#include "parcelhub/error.hpp"
#include "support/harness.hpp"

using namespace parcelhub;
using fixtures::Harness;

namespace {

Person person(const std::string& id, const std::string& email) {
  Person p;
  p.person_id = id;
  p.first_name = "Grace";
  p.last_name = "Hopper";
  p.email = email;
  p.phone = "+421900111222";
  return p;
}

std::string raw_dump(Store& store) {
  std::string out;
  store.for_each([&](const std::string& k, const std::string& id, const Document& d) {
    out += k + " " + id + " " + d.dump() + "\n";
  });
  return out;
}

}  // namespace

TEST(Records, PersonalFieldsAreSealedInTheStore) {
  Harness h;
  h.p().records().insert_person(person("p1", "Grace.Hopper@Example.org"));
  auto raw = raw_dump(h.p().store());
  for (const char* plain : {"Grace", "Hopper", "Example.org", "example.org", "+421900111222"})
    EXPECT_EQ(raw.find(plain), std::string::npos) << plain;

  auto back = h.p().records().person("p1");
  ASSERT_TRUE(back);
  EXPECT_EQ(back->first_name, "Grace");
  EXPECT_EQ(back->email, "Grace.Hopper@Example.org");
  EXPECT_EQ(back->phone, "+421900111222");
}

TEST(Records, EmailLookupUsesNormalizedBlindIndex) {
  Harness h;
  h.p().records().insert_person(person("p1", "Grace.Hopper@Example.org"));
  EXPECT_TRUE(h.p().records().person_by_email("  grace.hopper@example.ORG"));
  EXPECT_FALSE(h.p().records().person_by_email("grace@example.org"));
  EXPECT_THROW(h.p().records().insert_person(person("p2", "GRACE.HOPPER@example.org")), Error);
}

TEST(Records, DuplicateAccountEmailIsEmailTaken) {
  Harness h;
  h.user("dup@example.org");
  try {
    h.user("DUP@example.org");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::email_taken);
  }
}

TEST(Records, AccountRoundTripAndLookup) {
  Harness h;
  auto a = h.user("round@example.org");
  auto back = h.p().records().account_by_email("Round@Example.org");
  ASSERT_TRUE(back);
  EXPECT_EQ(back->account_id, a.account_id);
  EXPECT_EQ(back->email, "round@example.org");
  EXPECT_TRUE(back->is_active);
  EXPECT_EQ(back->created_at, h.clock.now());
  EXPECT_TRUE(h.p().records().erase_account(a.account_id));
  EXPECT_FALSE(h.p().records().account(a.account_id));
}

TEST(Records, CourierRoundTrip) {
  Harness h;
  auto c = h.courier("c@example.org", VehicleClass::large);
  auto back = h.p().records().courier(c.courier_id);
  ASSERT_TRUE(back);
  EXPECT_EQ(back->vehicle_class, VehicleClass::large);
  EXPECT_TRUE(back->is_available);
  EXPECT_FALSE(back->last_location);
  EXPECT_EQ(h.p().records().courier_by_account(c.account_id)->courier_id, c.courier_id);
}

TEST(Records, TransitionIsCompareAndSetWithAudit) {
  Harness h;
  auto sender = h.user("s@example.org");
  auto courier = h.courier("c@example.org");
  auto d = h.delivery(sender, {48.1, 17.1}, {48.2, 17.2});
  auto& r = h.p().records();

  EXPECT_TRUE(r.transition_delivery(d, DeliveryState::assigned, courier.courier_id, h.clock.now()));
  // Stale copy: version moved on.
  EXPECT_FALSE(r.transition_delivery(d, DeliveryState::assigned, courier.courier_id, h.clock.now()));
  auto cur = *r.delivery(d.delivery_id);
  EXPECT_EQ(cur.version, d.version + 1);
  EXPECT_EQ(cur.courier_id, courier.courier_id);
  EXPECT_TRUE(r.transition_delivery(cur, DeliveryState::delivering, courier.courier_id, h.clock.now(), "picked up"));

  auto trail = r.audit_trail(d.delivery_id);
  ASSERT_EQ(trail.size(), 2u);
  EXPECT_EQ(trail[0].from, DeliveryState::ready);
  EXPECT_EQ(trail[0].to, DeliveryState::assigned);
  EXPECT_EQ(trail[1].to, DeliveryState::delivering);
  EXPECT_EQ(trail[1].courier_id, courier.courier_id);
  EXPECT_EQ(r.delivery(d.delivery_id)->note, "picked up");
}

TEST(Records, ReceivedHistoryByReceiverEmail) {
  Harness h;
  auto sender = h.user("s@example.org");
  h.delivery(sender, {48.1, 17.1}, {48.2, 17.2}, "Bob@Example.org");
  h.delivery(sender, {48.1, 17.1}, {48.2, 17.2}, "carol@example.org");
  EXPECT_EQ(h.p().records().deliveries_received_by("bob@example.org").size(), 1u);
  EXPECT_EQ(h.p().records().deliveries_received_by("nobody@example.org").size(), 0u);
  EXPECT_EQ(h.p().records().delivery_by_code(h.p().records().deliveries()[0].tracking_code.str())->delivery_id,
            h.p().records().deliveries()[0].delivery_id);
}

TEST(Records, FileStoreHoldsNoPlaintextAfterSeeding) {
  fixtures::TempDir dir;
  auto db = (dir.path() / "seed.db").string();
  std::vector<std::string> secrets;
  {
    Harness h(3, fixtures::test_config(db));
    for (int i = 0; i < 30; ++i) {
      auto p = person("p" + std::to_string(i), "zed" + std::to_string(i) + "@secretmail.org");
      p.first_name = "Firstname" + std::to_string(i) + "x";
      p.last_name = "Lastname" + std::to_string(i) + "y";
      secrets.push_back(p.first_name);
      secrets.push_back(p.last_name);
      secrets.push_back(p.email);
      h.p().records().insert_person(p);
    }
    h.p().store().checkpoint();
  }
  std::string bytes;
  for (const auto& entry : std::filesystem::directory_iterator(dir.path())) {
    std::ifstream in(entry.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    bytes += ss.str();
  }
  ASSERT_FALSE(bytes.empty());
  for (const auto& s : secrets) EXPECT_EQ(bytes.find(s), std::string::npos) << s;
  EXPECT_EQ(bytes.find("secretmail"), std::string::npos);
}

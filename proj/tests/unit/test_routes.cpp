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
#include "support/harness.hpp"

using namespace parcelhub;
using fixtures::caller_of;
using fixtures::Harness;

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

struct Routes : ::testing::Test {
  Harness h;
  Account sender = h.user("s@example.org");
  Courier courier = h.courier("c@example.org");
  Caller courier_caller{courier.account_id, Role::courier};
  Delivery d = h.delivery(sender, {48.10, 17.10}, {48.20, 17.20});

  void advance_to(DeliveryState s) {
    h.p().dispatch().accept_delivery(courier_caller, d.delivery_id);
    if (s == DeliveryState::assigned) return;
    h.p().dispatch().change_state(courier_caller, d.delivery_id, DeliveryState::delivering);
    if (s == DeliveryState::delivering) return;
    h.p().dispatch().change_state(courier_caller, d.delivery_id, s);
  }
  Timestamp t(int s) { return make_utc(2026, 10, 16, 12, 0, s); }
};

}  // namespace

TEST_F(Routes, AppendRequiresActiveDelivery) {
  EXPECT_EQ(code_of([&] { h.p().routes().append_route_point(d.delivery_id, {48.1, 17.1}, t(1)); }),
            Errc::wrong_state);
  advance_to(DeliveryState::assigned);
  EXPECT_NO_THROW(h.p().routes().append_route_point(d.delivery_id, {48.1, 17.1}, t(1)));
  EXPECT_EQ(code_of([&] { h.p().routes().append_route_point("missing", {48.1, 17.1}, t(2)); }),
            Errc::unknown_delivery);
  EXPECT_EQ(code_of([&] { h.p().routes().append_route_point(d.delivery_id, {95, 17.1}, t(2)); }),
            Errc::invalid_coordinates);
}

TEST_F(Routes, TimestampsStrictlyIncrease) {
  advance_to(DeliveryState::delivering);
  h.p().routes().append_route_point(d.delivery_id, {48.1, 17.1}, t(5));
  EXPECT_EQ(code_of([&] { h.p().routes().append_route_point(d.delivery_id, {48.1, 17.1}, t(5)); }),
            Errc::non_monotonic_timestamp);
  EXPECT_EQ(code_of([&] { h.p().routes().append_route_point(d.delivery_id, {48.1, 17.1}, t(4)); }),
            Errc::non_monotonic_timestamp);
  auto r = h.p().routes().append_route_point(d.delivery_id, {48.11, 17.11}, t(6));
  ASSERT_EQ(r.points.size(), 2u);
  EXPECT_EQ(r.courier_id, courier.courier_id);
  EXPECT_EQ(r.points[1].point, (GeoPoint{48.11, 17.11}));
  EXPECT_EQ(h.p().routes().route(d.delivery_id).points.size(), 2u);
}

TEST_F(Routes, UnwindowedQueryShowsOnlyDelivering) {
  EXPECT_TRUE(h.p().routes().query_routes({}).empty());
  advance_to(DeliveryState::assigned);
  h.p().routes().append_route_point(d.delivery_id, {48.1, 17.1}, t(1));
  EXPECT_TRUE(h.p().routes().query_routes({}).empty());
  h.p().dispatch().change_state(courier_caller, d.delivery_id, DeliveryState::delivering);
  auto rs = h.p().routes().query_routes({});
  ASSERT_EQ(rs.size(), 1u);
  EXPECT_EQ(rs[0].delivery_id, d.delivery_id);
  EXPECT_EQ(h.p().routes().query_routes({courier.courier_id, {}, {}, {}}).size(), 1u);
  EXPECT_TRUE(h.p().routes().query_routes({CourierId("other"), {}, {}, {}}).empty());
}

TEST_F(Routes, WindowIncludesFinishedAndClipsPoints) {
  advance_to(DeliveryState::delivering);
  for (int s = 1; s <= 5; ++s) h.p().routes().append_route_point(d.delivery_id, {48.1 + s * 0.001, 17.1}, t(s));
  h.p().dispatch().change_state(courier_caller, d.delivery_id, DeliveryState::delivered);
  EXPECT_TRUE(h.p().routes().query_routes({}).empty());

  RouteFilter f;
  f.from = t(2);
  f.to = t(4);
  auto rs = h.p().routes().query_routes(f);
  ASSERT_EQ(rs.size(), 1u);
  ASSERT_EQ(rs[0].points.size(), 3u);
  EXPECT_EQ(rs[0].points.front().at, t(2));
  EXPECT_EQ(rs[0].points.back().at, t(4));

  f.from = t(10);
  f.to = t(20);
  EXPECT_TRUE(h.p().routes().query_routes(f).empty());

  f.from = t(3);
  f.to = t(2);
  EXPECT_EQ(code_of([&] { h.p().routes().query_routes(f); }), Errc::malformed_filter);
}

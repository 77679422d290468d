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

#include <array>
#include <cstddef>
#include <mutex>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "parcelhub/clock.hpp"

namespace parcelhub {

using AccountId = std::string;
using PersonId = std::string;
using CourierId = std::string;
using DeliveryId = std::string;

enum class Role { user, courier };
enum class VehicleClass { small, medium, large };
enum class WeightClass { light, medium, heavy };
enum class DeliveryState { ready, assigned, delivering, delivered, undeliverable };

inline constexpr std::array<DeliveryState, 5> kAllDeliveryStates = {
    DeliveryState::ready, DeliveryState::assigned, DeliveryState::delivering,
    DeliveryState::delivered, DeliveryState::undeliverable};

std::string_view to_string(Role r) noexcept;
std::string_view to_string(VehicleClass v) noexcept;
std::string_view to_string(WeightClass w) noexcept;
std::string_view to_string(DeliveryState s) noexcept;

std::optional<Role> parse_role(std::string_view s) noexcept;
std::optional<VehicleClass> parse_vehicle_class(std::string_view s) noexcept;
std::optional<WeightClass> parse_weight_class(std::string_view s) noexcept;
std::optional<DeliveryState> parse_delivery_state(std::string_view s) noexcept;

struct GeoPoint {
  double latitude = 0.0;
  double longitude = 0.0;

  bool valid() const noexcept;
  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

struct Account {
  AccountId account_id;
  std::string email;
  std::string password_hash;
  Role role = Role::user;
  bool is_admin = false;
  bool is_active = false;
  Timestamp created_at{};
};

struct Person {
  PersonId person_id;
  std::string first_name;
  std::string last_name;
  std::string email;
  std::optional<std::string> phone;
  std::optional<AccountId> account_id;
};

struct Courier {
  CourierId courier_id;
  AccountId account_id;
  VehicleClass vehicle_class = VehicleClass::small;
  std::chrono::sys_days registered_on{};
  bool is_available = true;
  std::optional<GeoPoint> last_location;
  std::optional<Timestamp> last_seen;
};

struct Item {
  double width_cm = 0.0;
  double height_cm = 0.0;
  double depth_cm = 0.0;
  WeightClass weight_class = WeightClass::light;
  bool fragile = false;
  std::optional<std::string> description;
  std::optional<std::string> picture_id;
};

/// Unvalidated item as received from a client; every field may be missing.
struct ItemDraft {
  std::optional<double> width_cm;
  std::optional<double> height_cm;
  std::optional<double> depth_cm;
  std::optional<WeightClass> weight_class;
  bool fragile = false;
  std::optional<std::string> description;
};

struct Place {
  std::string address_text;
  GeoPoint location;
};

/// 12 characters from the RFC 4648 base32 alphabet (A-Z, 2-7).
class TrackingCode {
 public:
  static constexpr std::size_t kLength = 12;
  static constexpr std::string_view kAlphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZ234567";

  TrackingCode() : value_(kLength, 'A') {}

  static std::optional<TrackingCode> parse(std::string_view text);
  static bool is_well_formed(std::string_view text) noexcept;

  const std::string& str() const noexcept { return value_; }
  friend bool operator==(const TrackingCode&, const TrackingCode&) = default;
  friend auto operator<=>(const TrackingCode&, const TrackingCode&) = default;

 private:
  explicit TrackingCode(std::string v) : value_(std::move(v)) {}
  std::string value_;
};

struct Delivery {
  DeliveryId delivery_id;
  TrackingCode tracking_code;
  AccountId sender_account_id;
  PersonId sender;
  PersonId receiver;
  Item item;
  Place source;
  Place destination;
  DeliveryState state = DeliveryState::ready;
  std::optional<CourierId> courier_id;
  double route_distance_m = 0.0;
  Timestamp expected_delivery_time{};
  Timestamp created_at{};
  std::int64_t version = 0;
  std::optional<std::string> note;
};

struct RoutePoint {
  GeoPoint point;
  Timestamp at{};
};

struct Route {
  DeliveryId delivery_id;
  std::optional<CourierId> courier_id;
  std::vector<RoutePoint> points;
};

/// Edges of the delivery state machine, sorted by enum order.
std::span<const DeliveryState> allowed_transitions(DeliveryState from) noexcept;
bool validate_transition(DeliveryState from, DeliveryState to) noexcept;

/// Source of random bytes for tracking codes and identifiers.
class EntropySource {
 public:
  virtual ~EntropySource() = default;
  virtual void fill(std::span<std::byte> out) = 0;
};

/// Kernel CSPRNG via libsodium.
class SystemEntropy final : public EntropySource {
 public:
  SystemEntropy();
  void fill(std::span<std::byte> out) override;
};

/// Deterministic generator for tests and simulations. Not for production.
class SeededEntropy final : public EntropySource {
 public:
  explicit SeededEntropy(std::uint64_t seed) : engine_(seed) {}
  void fill(std::span<std::byte> out) override;

 private:
  std::mutex mutex_;
  std::mt19937_64 engine_;
};

TrackingCode generate_tracking_code(EntropySource& entropy);

/// 128-bit lowercase hex identifier.
std::string generate_id(EntropySource& entropy);

struct FieldError {
  std::string field;
  std::string message;
  friend bool operator==(const FieldError&, const FieldError&) = default;
};

/// Per-field problems with a client item; empty means the draft is valid.
std::vector<FieldError> validate_item(const ItemDraft& draft);

/// Per-field problems with a place, field names prefixed by `prefix`.
std::vector<FieldError> validate_place(const Place& place, std::string_view prefix);

/// Converts a draft that passed validate_item; throws validation_error otherwise.
Item make_item(const ItemDraft& draft);

}  // namespace parcelhub

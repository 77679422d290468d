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

#include "parcelhub/domain.hpp"

#include <sodium.h>

#include <cmath>

#include "parcelhub/error.hpp"

namespace parcelhub {

std::string_view to_string(Role r) noexcept {
  return r == Role::courier ? "courier" : "user";
}

std::string_view to_string(VehicleClass v) noexcept {
  switch (v) {
    case VehicleClass::small: return "small";
    case VehicleClass::medium: return "medium";
    case VehicleClass::large: return "large";
  }
  return "small";
}

std::string_view to_string(WeightClass w) noexcept {
  switch (w) {
    case WeightClass::light: return "light";
    case WeightClass::medium: return "medium";
    case WeightClass::heavy: return "heavy";
  }
  return "light";
}

std::string_view to_string(DeliveryState s) noexcept {
  switch (s) {
    case DeliveryState::ready: return "ready";
    case DeliveryState::assigned: return "assigned";
    case DeliveryState::delivering: return "delivering";
    case DeliveryState::delivered: return "delivered";
    case DeliveryState::undeliverable: return "undeliverable";
  }
  return "ready";
}

std::optional<Role> parse_role(std::string_view s) noexcept {
  if (s == "user") return Role::user;
  if (s == "courier") return Role::courier;
  return std::nullopt;
}

std::optional<VehicleClass> parse_vehicle_class(std::string_view s) noexcept {
  if (s == "small") return VehicleClass::small;
  if (s == "medium") return VehicleClass::medium;
  if (s == "large") return VehicleClass::large;
  return std::nullopt;
}

std::optional<WeightClass> parse_weight_class(std::string_view s) noexcept {
  if (s == "light") return WeightClass::light;
  if (s == "medium") return WeightClass::medium;
  if (s == "heavy") return WeightClass::heavy;
  return std::nullopt;
}

std::optional<DeliveryState> parse_delivery_state(std::string_view s) noexcept {
  for (auto st : kAllDeliveryStates)
    if (to_string(st) == s) return st;
  return std::nullopt;
}

bool GeoPoint::valid() const noexcept {
  return std::isfinite(latitude) && std::isfinite(longitude) && latitude >= -90.0 &&
         latitude <= 90.0 && longitude >= -180.0 && longitude <= 180.0;
}

// ---------------------------------------------------------------------------
// State machine

namespace {

constexpr std::array<DeliveryState, 1> kFromReady = {DeliveryState::assigned};
constexpr std::array<DeliveryState, 3> kFromAssigned = {
    DeliveryState::ready, DeliveryState::delivering, DeliveryState::undeliverable};
constexpr std::array<DeliveryState, 2> kFromDelivering = {DeliveryState::delivered,
                                                          DeliveryState::undeliverable};

}  // namespace

std::span<const DeliveryState> allowed_transitions(DeliveryState from) noexcept {
  switch (from) {
    case DeliveryState::ready: return kFromReady;
    case DeliveryState::assigned: return kFromAssigned;
    case DeliveryState::delivering: return kFromDelivering;
    case DeliveryState::delivered:
    case DeliveryState::undeliverable: return {};
  }
  return {};
}

bool validate_transition(DeliveryState from, DeliveryState to) noexcept {
  for (auto s : allowed_transitions(from))
    if (s == to) return true;
  return false;
}

// ---------------------------------------------------------------------------
// Entropy, tracking codes and ids

SystemEntropy::SystemEntropy() {
  if (sodium_init() < 0) throw Error(Errc::entropy_unavailable, "libsodium failed to initialize");
}

void SystemEntropy::fill(std::span<std::byte> out) { randombytes_buf(out.data(), out.size()); }

void SeededEntropy::fill(std::span<std::byte> out) {
  std::lock_guard lock(mutex_);
  std::size_t i = 0;
  while (i < out.size()) {
    std::uint64_t word = engine_();
    for (int b = 0; b < 8 && i < out.size(); ++b, ++i)
      out[i] = static_cast<std::byte>((word >> (8 * b)) & 0xFF);
  }
}

bool TrackingCode::is_well_formed(std::string_view text) noexcept {
  if (text.size() != kLength) return false;
  for (char c : text)
    if (kAlphabet.find(c) == std::string_view::npos) return false;
  return true;
}

std::optional<TrackingCode> TrackingCode::parse(std::string_view text) {
  if (!is_well_formed(text)) return std::nullopt;
  return TrackingCode(std::string(text));
}

TrackingCode generate_tracking_code(EntropySource& entropy) {
  // 12 symbols x 5 bits = 60 bits drawn from a 64-bit word.
  std::array<std::byte, 8> raw{};
  entropy.fill(raw);
  std::uint64_t bits = 0;
  for (auto b : raw) bits = (bits << 8) | static_cast<std::uint64_t>(b);
  std::string out(TrackingCode::kLength, 'A');
  for (std::size_t i = 0; i < TrackingCode::kLength; ++i) {
    out[i] = TrackingCode::kAlphabet[bits & 0x1F];
    bits >>= 5;
  }
  return *TrackingCode::parse(out);
}

std::string generate_id(EntropySource& entropy) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::array<std::byte, 16> raw{};
  entropy.fill(raw);
  std::string out;
  out.reserve(32);
  for (auto b : raw) {
    auto v = static_cast<unsigned>(b);
    out.push_back(kHex[v >> 4]);
    out.push_back(kHex[v & 0xF]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

void check_dimension(const std::optional<double>& v, const char* name,
                     std::vector<FieldError>& errors) {
  if (!v) {
    errors.push_back({name, "required"});
  } else if (!std::isfinite(*v) || *v <= 0.0) {
    errors.push_back({name, "must be a positive number of centimeters"});
  }
}

}  // namespace

std::vector<FieldError> validate_item(const ItemDraft& draft) {
  std::vector<FieldError> errors;
  check_dimension(draft.width_cm, "width_cm", errors);
  check_dimension(draft.height_cm, "height_cm", errors);
  check_dimension(draft.depth_cm, "depth_cm", errors);
  if (!draft.weight_class) errors.push_back({"weight_class", "required: light, medium or heavy"});
  return errors;
}

std::vector<FieldError> validate_place(const Place& place, std::string_view prefix) {
  std::vector<FieldError> errors;
  std::string p(prefix);
  if (place.address_text.empty()) errors.push_back({p + ".address", "required"});
  if (!std::isfinite(place.location.latitude) || place.location.latitude < -90.0 ||
      place.location.latitude > 90.0)
    errors.push_back({p + ".lat", "must be within [-90, 90]"});
  if (!std::isfinite(place.location.longitude) || place.location.longitude < -180.0 ||
      place.location.longitude > 180.0)
    errors.push_back({p + ".lon", "must be within [-180, 180]"});
  return errors;
}

Item make_item(const ItemDraft& draft) {
  auto errors = validate_item(draft);
  if (!errors.empty()) {
    FieldErrors fields;
    for (auto& e : errors) fields[e.field] = e.message;
    throw Error(Errc::validation_error, "invalid item", std::move(fields));
  }
  Item item;
  item.width_cm = *draft.width_cm;
  item.height_cm = *draft.height_cm;
  item.depth_cm = *draft.depth_cm;
  item.weight_class = *draft.weight_class;
  item.fragile = draft.fragile;
  item.description = draft.description;
  return item;
}

}  // namespace parcelhub

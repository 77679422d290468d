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
#include <vector>

#include "parcelhub/crypto.hpp"
#include "parcelhub/domain.hpp"
#include "parcelhub/store.hpp"

namespace parcelhub {

namespace kind {
inline constexpr std::string_view account = "account";
inline constexpr std::string_view person = "person";
inline constexpr std::string_view courier = "courier";
inline constexpr std::string_view delivery = "delivery";
inline constexpr std::string_view route = "route";
inline constexpr std::string_view picture = "picture";
inline constexpr std::string_view audit = "audit";
inline constexpr std::string_view renew_nonce = "renew_nonce";
inline constexpr std::string_view action_token = "action_token";
inline constexpr std::string_view outbox = "outbox";
inline constexpr std::string_view lease = "lease";
}  // namespace kind

/// Secondary indexes every Store used by Records must be created with.
std::vector<IndexSpec> default_indexes();

/// One edge taken by a delivery, recorded in the same transaction as the change.
struct StateChange {
  DeliveryId delivery_id;
  std::int64_t version = 0;
  DeliveryState from = DeliveryState::ready;
  DeliveryState to = DeliveryState::ready;
  std::optional<CourierId> courier_id;
  Timestamp at{};
};

/// Typed access to entities. Personal fields (names, emails, phone) are
/// sealed with the field cipher before they reach the store and emails carry
/// a blind index for lookup.
class Records {
 public:
  Records(Store& store, const FieldCipher& cipher) : store_(store), cipher_(cipher) {}

  Store& store() noexcept { return store_; }
  const FieldCipher& cipher() const noexcept { return cipher_; }

  // Accounts. insert_account throws email_taken on a duplicate address.
  void insert_account(const Account& account);
  void save_account(const Account& account);
  std::optional<Account> account(const AccountId& id);
  std::optional<Account> account_by_email(std::string_view email);
  std::vector<Account> accounts();
  bool erase_account(const AccountId& id);

  // Persons. At most one person per normalized email.
  void insert_person(const Person& person);
  void save_person(const Person& person);
  std::optional<Person> person(const PersonId& id);
  std::optional<Person> person_by_email(std::string_view email);
  std::optional<Person> person_by_account(const AccountId& id);
  std::vector<Person> persons();
  bool erase_person(const PersonId& id);

  // Couriers.
  void insert_courier(const Courier& courier);
  void save_courier(const Courier& courier);
  std::optional<Courier> courier(const CourierId& id);
  std::optional<Courier> courier_by_account(const AccountId& id);
  std::vector<Courier> couriers();
  bool erase_courier(const CourierId& id);

  // Deliveries. The receiver email index is stored alongside for history.
  void insert_delivery(const Delivery& delivery, std::string_view receiver_email);
  std::optional<Delivery> delivery(const DeliveryId& id);
  std::optional<Delivery> delivery_by_code(std::string_view tracking_code);
  std::vector<Delivery> deliveries(const Predicate& filter = {});
  std::vector<Delivery> deliveries_received_by(std::string_view email);
  bool erase_delivery(const DeliveryId& id);

  /// Compare-and-set on (state, courier_id, version); on success bumps the
  /// version and appends an audit entry in the same transaction.
  bool transition_delivery(const Delivery& current, DeliveryState to,
                           const std::optional<CourierId>& new_courier, Timestamp at,
                           const std::optional<std::string>& note = std::nullopt);

  std::vector<StateChange> audit_trail(const DeliveryId& id);

  // Pictures attached at creation.
  void insert_picture(const std::string& id, const std::string& content_type, const Bytes& data);

  // Document conversions, exposed for the admin surface and dump tooling.
  Document to_doc(const Account& a) const;
  Account account_from_doc(const Document& d) const;
  Document to_doc(const Person& p) const;
  Person person_from_doc(const Document& d) const;
  static Document to_doc(const Courier& c);
  static Courier courier_from_doc(const Document& d);
  static Document to_doc(const Delivery& d);
  static Delivery delivery_from_doc(const Document& d);

 private:
  Store& store_;
  const FieldCipher& cipher_;
};

Document to_json(const GeoPoint& p);
Document to_json(const Item& item);
Document to_json(const Place& place);

}  // namespace parcelhub

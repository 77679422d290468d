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

#include <memory>

#include "parcelhub/accounts.hpp"
#include "parcelhub/config.hpp"
#include "parcelhub/dispatch.hpp"
#include "parcelhub/geo.hpp"
#include "parcelhub/notifier.hpp"
#include "parcelhub/realtime.hpp"
#include "parcelhub/records.hpp"
#include "parcelhub/routes.hpp"
#include "parcelhub/store.hpp"
#include "parcelhub/tokens.hpp"

namespace parcelhub {

/// Injection points for tests; anything left null gets the production default.
struct PlatformOptions {
  const Clock* clock = nullptr;
  EntropySource* entropy = nullptr;
  std::unique_ptr<Transport> transport;
  std::unique_ptr<DistanceProvider> distance;
};

/// Wires every service over one store. Owns no network resources.
class Platform {
 public:
  explicit Platform(Config config, PlatformOptions options = {});
  ~Platform();

  Platform(const Platform&) = delete;
  Platform& operator=(const Platform&) = delete;

  const Config& config() const noexcept { return config_; }
  const Clock& clock() const noexcept { return *clock_; }
  EntropySource& entropy() noexcept { return *entropy_; }
  SqliteStore& store() noexcept { return *store_; }
  const FieldCipher& cipher() const noexcept { return *cipher_; }
  Records& records() noexcept { return *records_; }
  TokenService& tokens() noexcept { return *tokens_; }
  Outbox& outbox() noexcept { return *outbox_; }
  Accounts& accounts() noexcept { return *accounts_; }
  RouteBook& routes() noexcept { return *routes_; }
  Dispatch& dispatch() noexcept { return *dispatch_; }
  Hub& hub() noexcept { return *hub_; }
  Transport* transport() noexcept { return transport_.get(); }

  /// One outbox pass with the configured transport; no-op without one.
  DrainReport drain_outbox(std::size_t batch = 100);

 private:
  Config config_;
  std::unique_ptr<SystemClock> own_clock_;
  std::unique_ptr<SystemEntropy> own_entropy_;
  const Clock* clock_;
  EntropySource* entropy_;
  std::unique_ptr<SqliteStore> store_;
  std::unique_ptr<FieldCipher> cipher_;
  std::unique_ptr<Records> records_;
  std::unique_ptr<TokenService> tokens_;
  std::unique_ptr<Outbox> outbox_;
  std::unique_ptr<Accounts> accounts_;
  std::unique_ptr<DistanceProvider> distance_;
  std::unique_ptr<RouteBook> routes_;
  std::unique_ptr<Dispatch> dispatch_;
  std::unique_ptr<Hub> hub_;
  std::unique_ptr<Transport> transport_;
};

}  // namespace parcelhub

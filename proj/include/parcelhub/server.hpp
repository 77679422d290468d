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

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "parcelhub/config.hpp"
#include "parcelhub/gateway.hpp"
#include "parcelhub/platform.hpp"

namespace parcelhub {

struct ServerOptions {
  std::string host = "127.0.0.1";
  unsigned short port = 0;  // 0 picks a free port
  int threads = 4;
  std::optional<TlsConfig> tls;
  std::size_t body_limit = 8 * 1024 * 1024;
  std::size_t ws_queue_limit = 1024;
  std::chrono::seconds idle_timeout{30};
};

/// HTTP/1.1 and websocket listener on one port. REST requests go to the
/// gateway; upgrades under /ws/ go to the hub.
class Server {
 public:
  Server(Platform& platform, Gateway& gateway, ServerOptions options);
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and starts the worker threads. Returns the bound port.
  unsigned short start();
  void stop();
  unsigned short port() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Background outbox drain and publisher staleness sweep.
class Maintenance {
 public:
  using ErrorSink = std::function<void(std::string_view what)>;

  Maintenance(Platform& platform, std::chrono::milliseconds drain_every,
              std::chrono::milliseconds sweep_every, ErrorSink on_error = {});
  ~Maintenance();

  void start();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace parcelhub

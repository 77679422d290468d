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
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace parcelhub {

/// Minimal single-threaded websocket client with deadline-bound operations.
/// Used by the simulator and the test suites; not thread-safe.
class WsClient {
 public:
  WsClient();
  ~WsClient();

  WsClient(const WsClient&) = delete;
  WsClient& operator=(const WsClient&) = delete;

  /// Throws Error(service_unreachable) when the TCP connection fails and
  /// Error(<envelope code>) when the server declines the upgrade.
  void connect(const std::string& host, unsigned short port, const std::string& target,
               const std::optional<std::string>& bearer = std::nullopt,
               std::chrono::milliseconds timeout = std::chrono::seconds(5));

  void send(std::string_view text, std::chrono::milliseconds timeout = std::chrono::seconds(5));

  /// Next text frame, or nullopt when none arrived before the deadline.
  /// Throws Error(protocol_error) once the connection is gone.
  std::optional<std::string> read(std::chrono::milliseconds timeout);

  void close();
  bool is_open() const noexcept;

  /// Close reason sent by the peer, when the connection ended with one.
  const std::string& close_reason() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace parcelhub

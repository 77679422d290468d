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

#include <filesystem>
#include <optional>
#include <string>

#include "parcelhub/dispatch.hpp"
#include "parcelhub/notifier.hpp"
#include "parcelhub/password.hpp"
#include "parcelhub/realtime.hpp"
#include "parcelhub/store.hpp"
#include "parcelhub/tokens.hpp"

namespace parcelhub {

struct MailConfig {
  std::string transport = "file";  // file | smtp | none
  std::string dir = "mail";
  std::string smtp_url;
  std::string smtp_username;
  std::string smtp_password;
  std::string from = "no-reply@parcelhub.local";
};

struct TlsConfig {
  std::string certificate_chain_file;
  std::string private_key_file;
};

/// Service configuration: JSON file first, then PARCELHUB_* environment
/// variables on top.
struct Config {
  std::string listen_host = "127.0.0.1";
  unsigned short listen_port = 8080;
  int threads = 4;
  std::string database = "parcelhub.db";
  std::string signing_key;
  std::string field_key;  // base64, 32 bytes
  std::string field_key_id = "k1";
  std::string public_url;
  MailConfig mail;
  std::optional<TlsConfig> tls;
  bool require_email_verification = true;
  PasswordParams password;
  DispatchConfig dispatch;
  TokenLifetimes tokens;
  HubConfig hub;
  RetryPolicy retry;
  int drain_interval_ms = 500;
  int sweep_interval_ms = 5000;

  static Config from_json(const Document& doc);
  static Config load(const std::filesystem::path& file);

  /// PARCELHUB_LISTEN (host:port), PARCELHUB_DATABASE, PARCELHUB_SIGNING_KEY,
  /// PARCELHUB_FIELD_KEY, PARCELHUB_FIELD_KEY_ID, PARCELHUB_MAIL_TRANSPORT,
  /// PARCELHUB_MAIL_DIR, PARCELHUB_SMTP_URL, PARCELHUB_SMTP_USERNAME,
  /// PARCELHUB_SMTP_PASSWORD, PARCELHUB_PUBLIC_URL, PARCELHUB_THREADS.
  void apply_environment();

  /// Throws bad_key / validation_error for unusable settings.
  void validate() const;

  std::string effective_public_url() const;
};

/// Splits "host:port"; throws validation_error when malformed.
std::pair<std::string, unsigned short> parse_listen(std::string_view text);

}  // namespace parcelhub

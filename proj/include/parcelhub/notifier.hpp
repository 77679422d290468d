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

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "parcelhub/clock.hpp"
#include "parcelhub/crypto.hpp"
#include "parcelhub/domain.hpp"
#include "parcelhub/store.hpp"

namespace parcelhub {

enum class NotificationKind {
  verify_email,
  reset_password,
  delivery_created_sender,
  delivery_created_receiver,
  delivery_completed,
};

inline constexpr std::array<NotificationKind, 5> kAllNotificationKinds = {
    NotificationKind::verify_email, NotificationKind::reset_password,
    NotificationKind::delivery_created_sender, NotificationKind::delivery_created_receiver,
    NotificationKind::delivery_completed};

std::string_view to_string(NotificationKind k) noexcept;
std::optional<NotificationKind> parse_notification_kind(std::string_view s) noexcept;

struct OutboxEntry {
  std::string entry_id;
  NotificationKind kind = NotificationKind::verify_email;
  std::string recipient;
  Document payload;
  Timestamp queued_at{};
  std::optional<Timestamp> sent_at;
  int attempts = 0;
  Timestamp next_attempt_at{};
  bool dead = false;
};

struct EmailMessage {
  std::string to;
  std::string from;
  std::string subject;
  std::string body;
  std::string message_id;
  Timestamp date{};

  /// RFC 5322 text with CRLF line endings.
  std::string to_rfc5322() const;
};

/// Plain-text templates. Links are built from `public_url` when the payload
/// carries a token.
EmailMessage render(const OutboxEntry& entry, std::string_view from, std::string_view public_url);

class Transport {
 public:
  virtual ~Transport() = default;
  /// Throws Error(transport_unavailable) when the message was not accepted.
  virtual void send(const EmailMessage& message) = 0;
};

/// Writes one .eml file per message into a directory.
class FileTransport final : public Transport {
 public:
  explicit FileTransport(std::filesystem::path dir);
  void send(const EmailMessage& message) override;
  const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  std::filesystem::path dir_;
};

/// SMTP submission through libcurl, e.g. url "smtp://mail.example.org:587".
class SmtpTransport final : public Transport {
 public:
  SmtpTransport(std::string url, std::string username = {}, std::string password = {});
  void send(const EmailMessage& message) override;

 private:
  std::string url_;
  std::string username_;
  std::string password_;
};

struct RetryPolicy {
  microseconds base = seconds{30};
  int max_attempts = 6;
};

struct DrainReport {
  std::size_t sent = 0;
  std::size_t failed = 0;
  bool lease_held_elsewhere = false;
};

/// Durable email queue stored next to the domain data. Recipient and payload
/// are sealed because they carry personal data.
class Outbox {
 public:
  Outbox(Store& store, const FieldCipher& cipher, EntropySource& entropy, const Clock& clock,
         RetryPolicy retry = {});

  /// Call inside the triggering write's Store::atomically block to commit
  /// both together. Throws invalid_recipient.
  OutboxEntry queue(NotificationKind kind, std::string_view recipient, Document payload);
  /// Throws unknown_kind for names outside the five event kinds.
  OutboxEntry queue(std::string_view kind, std::string_view recipient, Document payload);

  /// Sends up to `batch` due entries. Only one drainer runs at a time,
  /// arbitrated by a lease stored alongside the entries.
  DrainReport drain(Transport& transport, std::size_t batch, std::string_view from,
                    std::string_view public_url, std::string_view holder = "drainer");

  std::vector<OutboxEntry> entries();
  std::optional<OutboxEntry> entry(const std::string& id);

  const RetryPolicy& retry() const noexcept { return retry_; }

 private:
  Document to_doc(const OutboxEntry& e) const;
  OutboxEntry from_doc(const Document& d) const;
  bool acquire_lease(std::string_view holder, Timestamp now);
  void release_lease(std::string_view holder);

  Store& store_;
  const FieldCipher& cipher_;
  EntropySource& entropy_;
  const Clock& clock_;
  RetryPolicy retry_;
};

/// Loose syntactic check: one '@', non-empty local part, dotted domain, no spaces.
bool is_valid_email(std::string_view email) noexcept;

}  // namespace parcelhub

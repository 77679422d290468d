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

#include "parcelhub/notifier.hpp"

#include <curl/curl.h>

#include <algorithm>
#include <cstring>
#include <fstream>
#include <mutex>

#include "parcelhub/error.hpp"
#include "parcelhub/records.hpp"

namespace parcelhub {

namespace {

constexpr std::string_view kLeaseId = "outbox-drain";
constexpr auto kLeaseDuration = seconds{30};

std::string rfc5322_date(Timestamp t) {
  static constexpr const char* kDays[] = {"Sun", "Mon", "Tue", "Wed", "Thu", "Fri", "Sat"};
  static constexpr const char* kMonths[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                            "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
  using namespace std::chrono;
  auto day = floor<days>(t);
  year_month_day ymd{day};
  weekday wd{day};
  hh_mm_ss hms{floor<seconds>(t - day)};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s, %02u %s %04d %02d:%02d:%02d +0000", kDays[wd.c_encoding()],
                unsigned(ymd.day()), kMonths[unsigned(ymd.month()) - 1], int(ymd.year()),
                int(hms.hours().count()), int(hms.minutes().count()),
                int(hms.seconds().count()));
  return buf;
}

std::string payload_string(const Document& p, const char* key) {
  auto it = p.find(key);
  return it != p.end() && it->is_string() ? it->get<std::string>() : std::string{};
}

}  // namespace

std::string_view to_string(NotificationKind k) noexcept {
  switch (k) {
    case NotificationKind::verify_email: return "verify_email";
    case NotificationKind::reset_password: return "reset_password";
    case NotificationKind::delivery_created_sender: return "delivery_created_sender";
    case NotificationKind::delivery_created_receiver: return "delivery_created_receiver";
    case NotificationKind::delivery_completed: return "delivery_completed";
  }
  return "verify_email";
}

std::optional<NotificationKind> parse_notification_kind(std::string_view s) noexcept {
  for (auto k : kAllNotificationKinds)
    if (to_string(k) == s) return k;
  return std::nullopt;
}

bool is_valid_email(std::string_view email) noexcept {
  if (email.size() < 3 || email.size() > 254) return false;
  auto at = email.find('@');
  if (at == std::string_view::npos || at == 0 || email.find('@', at + 1) != std::string_view::npos)
    return false;
  auto domain = email.substr(at + 1);
  auto dot = domain.find('.');
  if (dot == std::string_view::npos || dot == 0 || domain.back() == '.') return false;
  for (char c : email)
    if (c <= ' ' || c == '<' || c == '>' || c == ',' || c == ';' || c == '"') return false;
  return true;
}

std::string EmailMessage::to_rfc5322() const {
  std::string out;
  out += "From: " + from + "\r\n";
  out += "To: " + to + "\r\n";
  out += "Subject: " + subject + "\r\n";
  out += "Date: " + rfc5322_date(date) + "\r\n";
  out += "Message-ID: <" + message_id + ">\r\n";
  out += "MIME-Version: 1.0\r\n";
  out += "Content-Type: text/plain; charset=utf-8\r\n";
  out += "\r\n";
  std::size_t start = 0;
  while (start <= body.size()) {
    auto nl = body.find('\n', start);
    std::string line = body.substr(start, nl == std::string::npos ? std::string::npos : nl - start);
    if (!line.empty() && line.front() == '.') line.insert(line.begin(), '.');
    out += line + "\r\n";
    if (nl == std::string::npos) break;
    start = nl + 1;
  }
  return out;
}

EmailMessage render(const OutboxEntry& e, std::string_view from, std::string_view public_url) {
  EmailMessage m;
  m.to = e.recipient;
  m.from = std::string(from);
  m.date = e.queued_at;
  m.message_id = e.entry_id + "@parcelhub";
  const auto code = payload_string(e.payload, "tracking_code");
  const auto token = payload_string(e.payload, "token");
  const auto name = payload_string(e.payload, "name");
  const std::string greeting = "Hello" + (name.empty() ? std::string() : " " + name) + ",\n\n";
  const std::string base(public_url);
  switch (e.kind) {
    case NotificationKind::verify_email:
      m.subject = "Confirm your email address";
      m.body = greeting + "confirm your account with this link:\n" + base +
               "/console/#/verify?token=" + token + "\n\nverification token: " + token + "\n";
      break;
    case NotificationKind::reset_password:
      m.subject = "Password reset";
      m.body = greeting + "set a new password with this link:\n" + base +
               "/console/#/reset?token=" + token + "\n\nreset token: " + token + "\n";
      break;
    case NotificationKind::delivery_created_sender:
      m.subject = "Delivery " + code + " created";
      m.body = greeting + "your delivery was created. Tracking code: " + code + "\n" + base +
               "/console/#/track/" + code + "\n";
      break;
    case NotificationKind::delivery_created_receiver:
      m.subject = "A parcel is on its way: " + code;
      m.body = greeting + "a parcel was sent to you. Tracking code: " + code + "\n" + base +
               "/console/#/track/" + code + "\n";
      break;
    case NotificationKind::delivery_completed:
      m.subject = "Delivery " + code + " delivered";
      m.body = greeting + "your parcel " + code + " has been delivered.\n";
      break;
  }
  return m;
}

// ---------------------------------------------------------------------------
// Transports

FileTransport::FileTransport(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw Error(Errc::transport_unavailable, "cannot create mail dir: " + ec.message());
}

void FileTransport::send(const EmailMessage& message) {
  auto tmp = dir_ / (message.message_id + ".tmp");
  auto final_path = dir_ / (message.message_id + ".eml");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::transport_unavailable, "cannot write " + tmp.string());
    out << message.to_rfc5322();
    if (!out.flush()) throw Error(Errc::transport_unavailable, "short write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, final_path, ec);
  if (ec) throw Error(Errc::transport_unavailable, "cannot publish " + final_path.string());
}

SmtpTransport::SmtpTransport(std::string url, std::string username, std::string password)
    : url_(std::move(url)), username_(std::move(username)), password_(std::move(password)) {
  static std::once_flag once;
  std::call_once(once, [] { curl_global_init(CURL_GLOBAL_DEFAULT); });
}

namespace {

struct UploadCursor {
  const std::string* data;
  std::size_t offset = 0;
};

std::size_t read_upload(char* buf, std::size_t size, std::size_t n, void* user) {
  auto* cur = static_cast<UploadCursor*>(user);
  std::size_t room = size * n;
  std::size_t left = cur->data->size() - cur->offset;
  std::size_t take = std::min(room, left);
  std::memcpy(buf, cur->data->data() + cur->offset, take);
  cur->offset += take;
  return take;
}

}  // namespace

void SmtpTransport::send(const EmailMessage& message) {
  std::unique_ptr<CURL, decltype(&curl_easy_cleanup)> curl(curl_easy_init(), curl_easy_cleanup);
  if (!curl) throw Error(Errc::transport_unavailable, "curl init failed");
  std::string text = message.to_rfc5322();
  UploadCursor cursor{&text};
  std::string from = "<" + message.from + ">";
  std::string to = "<" + message.to + ">";
  curl_slist* rcpt = curl_slist_append(nullptr, to.c_str());
  curl_easy_setopt(curl.get(), CURLOPT_URL, url_.c_str());
  if (!username_.empty()) {
    curl_easy_setopt(curl.get(), CURLOPT_USERNAME, username_.c_str());
    curl_easy_setopt(curl.get(), CURLOPT_PASSWORD, password_.c_str());
    curl_easy_setopt(curl.get(), CURLOPT_USE_SSL, static_cast<long>(CURLUSESSL_ALL));
  }
  curl_easy_setopt(curl.get(), CURLOPT_MAIL_FROM, from.c_str());
  curl_easy_setopt(curl.get(), CURLOPT_MAIL_RCPT, rcpt);
  curl_easy_setopt(curl.get(), CURLOPT_READFUNCTION, read_upload);
  curl_easy_setopt(curl.get(), CURLOPT_READDATA, &cursor);
  curl_easy_setopt(curl.get(), CURLOPT_UPLOAD, 1L);
  curl_easy_setopt(curl.get(), CURLOPT_TIMEOUT, 20L);
  CURLcode rc = curl_easy_perform(curl.get());
  curl_slist_free_all(rcpt);
  if (rc != CURLE_OK)
    throw Error(Errc::transport_unavailable, std::string("smtp: ") + curl_easy_strerror(rc));
}

// ---------------------------------------------------------------------------
// Outbox

Outbox::Outbox(Store& store, const FieldCipher& cipher, EntropySource& entropy, const Clock& clock,
               RetryPolicy retry)
    : store_(store), cipher_(cipher), entropy_(entropy), clock_(clock), retry_(retry) {}

Document Outbox::to_doc(const OutboxEntry& e) const {
  Document d{{"id", e.entry_id},
             {"kind", to_string(e.kind)},
             {"recipient", cipher_.seal(e.recipient)},
             {"payload", cipher_.seal(e.payload.dump())},
             {"queued_at", to_micros(e.queued_at)},
             {"attempts", e.attempts},
             {"next_attempt_at", to_micros(e.next_attempt_at)},
             {"dead", e.dead},
             {"pending", !e.sent_at && !e.dead}};
  d["sent_at"] = e.sent_at ? Document(to_micros(*e.sent_at)) : Document();
  return d;
}

OutboxEntry Outbox::from_doc(const Document& d) const {
  OutboxEntry e;
  e.entry_id = d.at("id").get<std::string>();
  e.kind = parse_notification_kind(d.at("kind").get<std::string>()).value();
  e.recipient = cipher_.open(d.at("recipient").get<std::string>());
  e.payload = Document::parse(cipher_.open(d.at("payload").get<std::string>()));
  e.queued_at = from_micros(d.at("queued_at").get<std::int64_t>());
  e.attempts = d.at("attempts").get<int>();
  e.next_attempt_at = from_micros(d.at("next_attempt_at").get<std::int64_t>());
  e.dead = d.at("dead").get<bool>();
  if (auto it = d.find("sent_at"); it != d.end() && !it->is_null())
    e.sent_at = from_micros(it->get<std::int64_t>());
  return e;
}

OutboxEntry Outbox::queue(NotificationKind what, std::string_view recipient, Document payload) {
  if (!is_valid_email(recipient))
    throw Error(Errc::invalid_recipient, "invalid recipient address");
  OutboxEntry e;
  e.entry_id = generate_id(entropy_);
  e.kind = what;
  e.recipient = std::string(recipient);
  e.payload = std::move(payload);
  e.queued_at = clock_.now();
  e.next_attempt_at = e.queued_at;
  store_.insert(kind::outbox, e.entry_id, to_doc(e));
  return e;
}

OutboxEntry Outbox::queue(std::string_view name, std::string_view recipient, Document payload) {
  auto k = parse_notification_kind(name);
  if (!k) throw Error(Errc::unknown_kind, "unknown notification kind '" + std::string(name) + "'");
  return queue(*k, recipient, std::move(payload));
}

bool Outbox::acquire_lease(std::string_view holder, Timestamp now) {
  bool acquired = false;
  store_.atomically([&] {
    auto lease = store_.get(kind::lease, kLeaseId);
    if (lease && lease->at("holder").get<std::string>() != holder &&
        now < from_micros(lease->at("expires_at").get<std::int64_t>()))
      return;
    store_.put(kind::lease, kLeaseId,
               {{"holder", holder}, {"expires_at", to_micros(now + kLeaseDuration)}});
    acquired = true;
  });
  return acquired;
}

void Outbox::release_lease(std::string_view holder) {
  store_.atomically([&] {
    auto lease = store_.get(kind::lease, kLeaseId);
    if (lease && lease->at("holder").get<std::string>() == holder) store_.erase(kind::lease, kLeaseId);
  });
}

DrainReport Outbox::drain(Transport& transport, std::size_t batch, std::string_view from,
                          std::string_view public_url, std::string_view holder) {
  DrainReport report;
  const auto now = clock_.now();
  if (!acquire_lease(holder, now)) {
    report.lease_held_elsewhere = true;
    return report;
  }
  try {
    std::vector<OutboxEntry> due;
    for (const auto& d : store_.list(kind::outbox, {{"pending", true}})) {
      if (due.size() >= batch) break;
      if (from_micros(d.at("next_attempt_at").get<std::int64_t>()) <= now) due.push_back(from_doc(d));
    }
    for (auto& e : due) {
      ++e.attempts;
      try {
        transport.send(render(e, from, public_url));
        e.sent_at = clock_.now();
        ++report.sent;
      } catch (const Error&) {
        ++report.failed;
        if (e.attempts >= retry_.max_attempts) {
          e.dead = true;
        } else {
          e.next_attempt_at = now + retry_.base * (std::int64_t{1} << (e.attempts - 1));
        }
      }
      store_.put(kind::outbox, e.entry_id, to_doc(e));
    }
  } catch (...) {
    release_lease(holder);
    throw;
  }
  release_lease(holder);
  return report;
}

std::vector<OutboxEntry> Outbox::entries() {
  std::vector<OutboxEntry> out;
  for (const auto& d : store_.list(kind::outbox)) out.push_back(from_doc(d));
  return out;
}

std::optional<OutboxEntry> Outbox::entry(const std::string& id) {
  auto d = store_.get(kind::outbox, id);
  if (!d) return std::nullopt;
  return from_doc(*d);
}

}  // namespace parcelhub

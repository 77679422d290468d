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

#include "parcelhub/config.hpp"

#include <cstdlib>
#include <fstream>

#include "parcelhub/crypto.hpp"
#include "parcelhub/error.hpp"

namespace parcelhub {

std::pair<std::string, unsigned short> parse_listen(std::string_view text) {
  auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon + 1 >= text.size())
    throw Error(Errc::validation_error, "listen must be host:port", {{"listen", "host:port"}});
  int port = 0;
  try {
    port = std::stoi(std::string(text.substr(colon + 1)));
  } catch (const std::exception&) {
    port = -1;
  }
  if (port < 0 || port > 65535)
    throw Error(Errc::validation_error, "listen port out of range", {{"listen", "bad port"}});
  return {std::string(text.substr(0, colon)), static_cast<unsigned short>(port)};
}

Config Config::from_json(const Document& d) {
  Config c;
  if (d.contains("listen")) std::tie(c.listen_host, c.listen_port) = parse_listen(d["listen"].get<std::string>());
  c.threads = d.value("threads", c.threads);
  c.database = d.value("database", c.database);
  c.signing_key = d.value("signing_key", c.signing_key);
  c.field_key = d.value("field_key", c.field_key);
  c.field_key_id = d.value("field_key_id", c.field_key_id);
  c.public_url = d.value("public_url", c.public_url);
  c.require_email_verification = d.value("require_email_verification", c.require_email_verification);
  c.drain_interval_ms = d.value("drain_interval_ms", c.drain_interval_ms);
  c.sweep_interval_ms = d.value("sweep_interval_ms", c.sweep_interval_ms);
  if (auto it = d.find("mail"); it != d.end()) {
    c.mail.transport = it->value("transport", c.mail.transport);
    c.mail.dir = it->value("dir", c.mail.dir);
    c.mail.smtp_url = it->value("smtp_url", c.mail.smtp_url);
    c.mail.smtp_username = it->value("smtp_username", c.mail.smtp_username);
    c.mail.smtp_password = it->value("smtp_password", c.mail.smtp_password);
    c.mail.from = it->value("from", c.mail.from);
  }
  if (auto it = d.find("tls"); it != d.end() && !it->is_null())
    c.tls = TlsConfig{it->at("certificate_chain_file").get<std::string>(),
                      it->at("private_key_file").get<std::string>()};
  if (auto it = d.find("password"); it != d.end()) {
    c.password.ops_limit = it->value("ops_limit", c.password.ops_limit);
    c.password.mem_limit_bytes = it->value("mem_limit_bytes", c.password.mem_limit_bytes);
  }
  if (auto it = d.find("dispatch"); it != d.end()) {
    c.dispatch.nominal_speed_mps = it->value("nominal_speed_mps", c.dispatch.nominal_speed_mps);
    c.dispatch.handling = seconds{it->value("handling_s", std::int64_t{900})};
  }
  return c;
}

Config Config::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(Errc::storage_io, "cannot read config " + file.string());
  auto doc = Document::parse(in, nullptr, false);
  if (doc.is_discarded()) throw Error(Errc::validation_error, "config is not valid JSON");
  return from_json(doc);
}

void Config::apply_environment() {
  auto env = [](const char* name) -> std::optional<std::string> {
    const char* v = std::getenv(name);
    if (!v || !*v) return std::nullopt;
    return std::string(v);
  };
  if (auto v = env("PARCELHUB_LISTEN")) std::tie(listen_host, listen_port) = parse_listen(*v);
  if (auto v = env("PARCELHUB_DATABASE")) database = *v;
  if (auto v = env("PARCELHUB_SIGNING_KEY")) signing_key = *v;
  if (auto v = env("PARCELHUB_FIELD_KEY")) field_key = *v;
  if (auto v = env("PARCELHUB_FIELD_KEY_ID")) field_key_id = *v;
  if (auto v = env("PARCELHUB_MAIL_TRANSPORT")) mail.transport = *v;
  if (auto v = env("PARCELHUB_MAIL_DIR")) mail.dir = *v;
  if (auto v = env("PARCELHUB_SMTP_URL")) mail.smtp_url = *v;
  if (auto v = env("PARCELHUB_SMTP_USERNAME")) mail.smtp_username = *v;
  if (auto v = env("PARCELHUB_SMTP_PASSWORD")) mail.smtp_password = *v;
  if (auto v = env("PARCELHUB_PUBLIC_URL")) public_url = *v;
  if (auto v = env("PARCELHUB_THREADS")) threads = std::stoi(*v);
}

void Config::validate() const {
  if (signing_key.size() < 16) throw Error(Errc::bad_key, "signing_key must be at least 16 bytes");
  FieldKey::from_base64(field_key_id, field_key);
  if (mail.transport != "file" && mail.transport != "smtp" && mail.transport != "none")
    throw Error(Errc::validation_error, "mail.transport must be file, smtp or none");
  if (mail.transport == "smtp" && mail.smtp_url.empty())
    throw Error(Errc::validation_error, "mail.smtp_url is required for smtp transport");
  if (threads < 1) throw Error(Errc::validation_error, "threads must be positive");
}

std::string Config::effective_public_url() const {
  if (!public_url.empty()) return public_url;
  return std::string(tls ? "https://" : "http://") + listen_host + ":" + std::to_string(listen_port);
}

}  // namespace parcelhub

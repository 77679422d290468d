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

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>

#include "parcelhub/config.hpp"
#include "parcelhub/error.hpp"
#include "support/harness.hpp"

using namespace parcelhub;

namespace {

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::internal;
}

// Sets an environment variable for the lifetime of the guard.
struct EnvGuard {
  std::string name;
  EnvGuard(std::string n, const std::string& v) : name(std::move(n)) { ::setenv(name.c_str(), v.c_str(), 1); }
  ~EnvGuard() { ::unsetenv(name.c_str()); }
};

}  // namespace

TEST(Config, ListenParsing) {
  EXPECT_EQ(parse_listen("0.0.0.0:8443"), (std::pair<std::string, unsigned short>{"0.0.0.0", 8443}));
  EXPECT_EQ(parse_listen("[::1]:80").first, "[::1]");
  EXPECT_EQ(code_of([] { parse_listen("nohost"); }), Errc::validation_error);
  EXPECT_EQ(code_of([] { parse_listen("h:70000"); }), Errc::validation_error);
  EXPECT_EQ(code_of([] { parse_listen("h:port"); }), Errc::validation_error);
}

TEST(Config, FromJsonOverridesDefaults) {
  auto c = Config::from_json(Document::parse(R"({
    "listen": "0.0.0.0:9000", "threads": 8, "database": "x.db",
    "require_email_verification": false,
    "mail": {"transport": "smtp", "smtp_url": "smtp://m:587", "from": "a@b.co"},
    "tls": {"certificate_chain_file": "c.pem", "private_key_file": "k.pem"},
    "dispatch": {"nominal_speed_mps": 10.0, "handling_s": 60}
  })"));
  EXPECT_EQ(c.listen_host, "0.0.0.0");
  EXPECT_EQ(c.listen_port, 9000);
  EXPECT_EQ(c.threads, 8);
  EXPECT_EQ(c.database, "x.db");
  EXPECT_FALSE(c.require_email_verification);
  EXPECT_EQ(c.mail.transport, "smtp");
  EXPECT_EQ(c.mail.dir, "mail");  // untouched default
  ASSERT_TRUE(c.tls);
  EXPECT_EQ(c.tls->private_key_file, "k.pem");
  EXPECT_EQ(c.dispatch.nominal_speed_mps, 10.0);
  EXPECT_EQ(c.dispatch.handling, seconds{60});
  EXPECT_EQ(c.effective_public_url(), "https://0.0.0.0:9000");
}

TEST(Config, Defaults) {
  Config c;
  EXPECT_TRUE(c.require_email_verification);
  EXPECT_EQ(c.dispatch.nominal_speed_mps, 8.33);
  EXPECT_EQ(c.dispatch.handling, seconds{900});
  EXPECT_EQ(c.effective_public_url(), "http://127.0.0.1:8080");
}

TEST(Config, EnvironmentWinsOverFile) {
  fixtures::TempDir dir;
  auto file = dir.path() / "c.json";
  std::ofstream(file) << R"({"database": "file.db", "listen": "127.0.0.1:1000"})";
  auto c = Config::load(file);
  EXPECT_EQ(c.database, "file.db");
  EnvGuard a("PARCELHUB_DATABASE", "env.db");
  EnvGuard b("PARCELHUB_LISTEN", "127.0.0.1:2000");
  EnvGuard m("PARCELHUB_MAIL_DIR", "/tmp/m");
  c.apply_environment();
  EXPECT_EQ(c.database, "env.db");
  EXPECT_EQ(c.listen_port, 2000);
  EXPECT_EQ(c.mail.dir, "/tmp/m");
}

TEST(Config, LoadErrors) {
  fixtures::TempDir dir;
  EXPECT_EQ(code_of([&] { Config::load(dir.path() / "missing.json"); }), Errc::storage_io);
  std::ofstream(dir.path() / "bad.json") << "{not json";
  EXPECT_EQ(code_of([&] { Config::load(dir.path() / "bad.json"); }), Errc::validation_error);
}

TEST(Config, ValidateKeysAndTransport) {
  auto c = fixtures::test_config();
  EXPECT_NO_THROW(c.validate());
  auto short_key = c;
  short_key.signing_key = "short";
  EXPECT_EQ(code_of([&] { short_key.validate(); }), Errc::bad_key);
  auto bad_field = c;
  bad_field.field_key = "AAAA";
  EXPECT_EQ(code_of([&] { bad_field.validate(); }), Errc::bad_key);
  auto smtp = c;
  smtp.mail.transport = "smtp";
  EXPECT_EQ(code_of([&] { smtp.validate(); }), Errc::validation_error);
  auto pigeon = c;
  pigeon.mail.transport = "pigeon";
  EXPECT_EQ(code_of([&] { pigeon.validate(); }), Errc::validation_error);
}

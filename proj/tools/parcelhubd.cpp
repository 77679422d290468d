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

// parcelhubd: run the service and maintain its store.
//
//   parcelhubd init-config --out parcelhub.json
//   parcelhubd serve --config parcelhub.json
//   parcelhubd create-admin --config parcelhub.json --email ops@example.org --password ...
//   parcelhubd dump --config parcelhub.json > entities.jsonl
//   parcelhubd load --config parcelhub.json < entities.jsonl

#include <csignal>
#include <fstream>
#include <iostream>
#include <cmath>
#include <mutex>
#include <thread>

#include <CLI11.hpp>

#include "parcelhub/codec.hpp"
#include "parcelhub/crypto.hpp"
#include "parcelhub/password.hpp"
#include "parcelhub/server.hpp"

namespace {

using namespace parcelhub;

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

Config load_config(const std::string& path, const std::string& listen) {
  Config c = path.empty() ? Config{} : Config::load(path);
  c.apply_environment();
  if (!listen.empty()) std::tie(c.listen_host, c.listen_port) = parse_listen(listen);
  return c;
}

std::string random_b64(std::size_t n) {
  auto b = random_bytes(n);
  return base64_encode(b);
}

int init_config(const std::string& out, const std::string& mail_dir, bool no_verify) {
  Document doc = {{"listen", "127.0.0.1:8080"},
                  {"threads", 4},
                  {"database", "parcelhub.db"},
                  {"signing_key", random_b64(48)},
                  {"field_key", random_b64(32)},
                  {"field_key_id", "k1"},
                  {"require_email_verification", !no_verify},
                  {"mail", {{"transport", "file"}, {"dir", mail_dir}, {"from", "no-reply@parcelhub.local"}}}};
  std::ofstream f(out);
  if (!f) {
    std::cerr << "cannot write " << out << "\n";
    return 1;
  }
  f << doc.dump(2) << "\n";
  std::cerr << "wrote " << out << " (keep it private: it holds the keys)\n";
  return 0;
}

int serve(Config config, bool quiet) {
  std::signal(SIGPIPE, SIG_IGN);
  Platform platform(config);
  Gateway gateway(platform);
  std::mutex log_mutex;
  if (!quiet) {
    gateway.set_access_log([&](const AccessLogEntry& e) {
      Document line = {{"ts", format_rfc3339(platform.clock().now())},
                       {"method", e.method},
                       {"path", e.path},
                       {"status", e.status},
                       {"latency_ms", std::round(e.latency_ms * 1000.0) / 1000.0}};
      std::lock_guard lock(log_mutex);
      std::cerr << line.dump() << "\n";
    });
  }
  ServerOptions opts;
  opts.host = config.listen_host;
  opts.port = config.listen_port;
  opts.threads = config.threads;
  opts.tls = config.tls;
  Server server(platform, gateway, opts);
  Maintenance maintenance(platform, std::chrono::milliseconds(config.drain_interval_ms),
                          std::chrono::milliseconds(config.sweep_interval_ms),
                          [&](std::string_view what) {
                            std::lock_guard lock(log_mutex);
                            std::cerr << Document({{"event", "maintenance_error"}, {"what", what}}).dump() << "\n";
                          });
  auto port = server.start();
  maintenance.start();
  std::cerr << Document({{"event", "listening"},
                         {"host", config.listen_host},
                         {"port", port},
                         {"tls", config.tls.has_value()}})
                   .dump()
            << std::endl;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  maintenance.stop();
  server.stop();
  platform.drain_outbox();
  return 0;
}

int create_admin(Config config, const std::string& email, const std::string& password) {
  Platform platform(config);
  Account a;
  a.account_id = generate_id(platform.entropy());
  a.email = email;
  a.password_hash = hash_password(password, config.password);
  a.is_admin = true;
  a.is_active = true;
  a.created_at = platform.clock().now();
  platform.records().insert_account(a);
  std::cout << Document({{"account_id", a.account_id}, {"email", email}}).dump() << "\n";
  return 0;
}

// Encrypted fields stay sealed: dump writes the stored documents verbatim.
int dump(Config config) {
  Platform platform(config);
  platform.store().for_each([](const std::string& k, const std::string& id, const Document& doc) {
    std::cout << Document({{"kind", k}, {"id", id}, {"doc", doc}}).dump() << "\n";
  });
  return 0;
}

int load(Config config) {
  Platform platform(config);
  std::string line;
  std::size_t n = 0;
  platform.store().atomically([&] {
    while (std::getline(std::cin, line)) {
      if (line.empty()) continue;
      auto row = Document::parse(line);
      platform.store().put(row.at("kind").get<std::string>(), row.at("id").get<std::string>(), row.at("doc"));
      ++n;
    }
  });
  std::cerr << "loaded " << n << " entities\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"parcelhub service"};
  app.require_subcommand(1);
  std::string config_path, listen, out = "parcelhub.json", mail_dir = "mail", email, password;
  bool quiet = false, no_verify = false;

  auto* init = app.add_subcommand("init-config", "Write a config file with fresh keys");
  init->add_option("--out", out);
  init->add_option("--mail-dir", mail_dir);
  init->add_flag("--no-email-verification", no_verify, "Activate accounts at registration");

  auto* srv = app.add_subcommand("serve", "Run the HTTP and websocket service");
  srv->add_option("--config", config_path);
  srv->add_option("--listen", listen, "host:port");
  srv->add_flag("--quiet", quiet, "No request log");

  auto* adm = app.add_subcommand("create-admin", "Create an active administrator account");
  adm->add_option("--config", config_path);
  adm->add_option("--email", email)->required();
  adm->add_option("--password", password)->required();

  auto* dmp = app.add_subcommand("dump", "Write all entities as JSON lines to stdout");
  dmp->add_option("--config", config_path);
  auto* ld = app.add_subcommand("load", "Read JSON lines from stdin into the store");
  ld->add_option("--config", config_path);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*init) return init_config(out, mail_dir, no_verify);
    auto config = load_config(config_path, listen);
    if (*srv) return serve(config, quiet);
    if (*adm) return create_admin(config, email, password);
    if (*dmp) return dump(config);
    if (*ld) return load(config);
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

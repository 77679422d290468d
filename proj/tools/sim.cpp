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

// parcelhub-sim: seed a running service or drive it and audit latencies.
//
//   parcelhub-sim seed --base-url http://127.0.0.1:8080 --deliveries 20
//   parcelhub-sim run  --base-url http://127.0.0.1:8080 --duration 60 --report report.json

#include <csignal>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "parcelhub/error.hpp"
#include "parcelhub/sim.hpp"

int main(int argc, char** argv) {
  using namespace parcelhub;
  std::signal(SIGPIPE, SIG_IGN);  // a server hanging up mid-request is an error, not a crash
  CLI::App app{"parcelhub load generator"};
  app.require_subcommand(1);
  sim::Options o;
  int duration_s = 60, deliveries = 10;
  bool print_trace = false;

  auto common = [&](CLI::App* cmd) {
    cmd->add_option("--base-url", o.base_url, "Service root, e.g. http://127.0.0.1:8080");
    cmd->add_option("--couriers", o.couriers)->check(CLI::Range(0, 1000));
    cmd->add_option("--senders", o.senders)->check(CLI::Range(1, 1000));
    cmd->add_option("--seed", o.seed);
    cmd->add_option("--mail-dir", o.mail_dir, "Mail directory of the service's file transport");
    cmd->add_option("--tag", o.tag, "Mixed into generated emails (default: s<seed>)");
    cmd->add_flag("--print-trace", print_trace, "Print the generated workload and exit");
  };

  auto* seed = app.add_subcommand("seed", "Register users and create deliveries");
  common(seed);
  seed->add_option("--deliveries", deliveries)->check(CLI::Range(0, 100000));

  auto* run = app.add_subcommand("run", "Drive senders and couriers and report latencies");
  common(run);
  run->add_option("--rate", o.rate_per_min, "Deliveries per minute")->check(CLI::PositiveNumber);
  run->add_option("--duration", duration_s, "Seconds")->check(CLI::Range(1, 86400));
  run->add_option("--slack", o.slack, "Budget multiplier")->check(CLI::PositiveNumber);
  run->add_option("--report", o.report_path, "Write the JSON report here");
  run->add_option("--trace", o.trace_path, "Write the generated workload here");

  CLI11_PARSE(app, argc, argv);
  o.duration = std::chrono::seconds(duration_s);
  try {
    if (print_trace) {
      for (const auto& line : sim::workload_trace(o, *seed ? deliveries : -1)) std::cout << line << "\n";
      return 0;
    }
    if (*seed) {
      auto f = sim::seed(o, deliveries);
      std::cout << f.to_json().dump(2) << "\n";
      return f.failures.empty() ? 0 : 1;
    }
    auto report = sim::run(o);
    std::cout << report.to_table();
    return report.passed() ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return 2;
  }
}

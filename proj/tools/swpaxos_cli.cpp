/* Copyright 2026 The swpaxos Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// swpaxos: scenario runner for the switch Paxos simulator.
//
//   swpaxos run --scenario s.json [--seed N] [--trace out.jsonl] [--report out.json]
//   swpaxos suite --dir scenarios/
//   swpaxos replay-check --scenario s.json --seed N
//
// Exit status is 0 iff every property passes.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "swpaxos/harness.hpp"
#include "swpaxos/scenario.hpp"

namespace fs = std::filesystem;
using namespace swpaxos;

namespace {

std::optional<Scenario> load(const std::string& path, std::optional<std::uint64_t> seed) {
  auto s = load_scenario(path);
  if (!s) {
    std::cerr << "InvalidScenario: " << s.error().reason << '\n';
    return std::nullopt;
  }
  if (seed) s->seed = *seed;
  return *s;
}

void print_report(const Report& rep) {
  std::cout << "scenario " << rep.scenario << " seed " << rep.seed << ": "
            << (rep.pass ? "PASS" : "FAIL") << '\n';
  for (const auto& p : rep.properties) {
    std::cout << "  " << (p.result.pass ? "pass" : "FAIL") << "  " << p.name;
    if (!p.result.pass) {
      std::cout << "  " << p.result.detail << "  events:";
      for (auto id : p.result.counterexample) std::cout << ' ' << id;
    }
    std::cout << '\n';
  }
  std::cout << "  submitted " << rep.submitted_values << ", decided " << rep.decided_values
            << " values in " << rep.decided_instances << " instances (" << rep.noop_instances
            << " no-op), failed requests " << rep.failed_requests << '\n';
}

int cmd_run(const std::string& path, std::optional<std::uint64_t> seed,
            const std::string& trace_out, const std::string& report_out) {
  auto s = load(path, seed);
  if (!s) return 2;
  auto out = run_scenario(*s);
  if (!out) {
    std::cerr << "InvalidScenario: " << out.error().reason << '\n';
    return 2;
  }
  print_report(out->report);
  if (!trace_out.empty()) {
    std::ofstream os(trace_out);
    out->trace.write_jsonl(os);
  }
  if (!report_out.empty()) {
    std::ofstream os(report_out);
    os << out->report.to_json().dump(2) << '\n';
  }
  return out->report.pass ? 0 : 1;
}

int cmd_suite(const std::string& dir) {
  std::vector<fs::path> files;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(dir, ec)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  if (ec) {
    std::cerr << "cannot read " << dir << ": " << ec.message() << '\n';
    return 2;
  }
  std::sort(files.begin(), files.end());
  int failed = 0;
  for (const auto& f : files) {
    auto s = load(f.string(), std::nullopt);
    if (!s) {
      std::cout << "FAIL  " << f.filename().string() << "  invalid scenario\n";
      ++failed;
      continue;
    }
    auto out = run_scenario(*s);
    bool ok = out && out->report.pass;
    std::cout << (ok ? "pass  " : "FAIL  ") << f.filename().string();
    if (out) {
      std::cout << "  decided " << out->report.decided_values << "/"
                << out->report.submitted_values;
      for (const auto& p : out->report.properties) {
        if (!p.result.pass) std::cout << "  " << p.name << ": " << p.result.detail;
      }
    }
    std::cout << '\n';
    if (!ok) ++failed;
  }
  std::cout << files.size() - failed << "/" << files.size() << " scenarios passed\n";
  return failed == 0 ? 0 : 1;
}

int cmd_replay(const std::string& path, std::optional<std::uint64_t> seed) {
  auto s = load(path, seed);
  if (!s) return 2;
  auto r = replay_check(*s);
  if (r.pass) {
    std::cout << "replay-check " << s->name << " seed " << s->seed << ": identical traces\n";
    return 0;
  }
  std::cout << "replay-check " << s->name << " seed " << s->seed << ": " << r.detail << '\n';
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Switch Paxos scenario runner"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::optional<std::uint64_t> seed;
  std::string trace_out;
  std::string report_out;
  auto* run = app.add_subcommand("run", "Run one scenario and check all properties");
  run->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--trace", trace_out, "Write the trace as JSON lines");
  run->add_option("--report", report_out, "Write the verdict report as JSON");

  std::string dir;
  auto* suite = app.add_subcommand("suite", "Run every *.json scenario in a directory");
  suite->add_option("--dir", dir, "Scenario directory")->required();

  std::string replay_path;
  std::optional<std::uint64_t> replay_seed;
  auto* replay = app.add_subcommand("replay-check", "Run twice with one seed and diff the traces");
  replay->add_option("--scenario", replay_path, "Scenario JSON file")->required();
  replay->add_option("--seed", replay_seed, "Seed")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(scenario_path, seed, trace_out, report_out);
    if (*suite) return cmd_suite(dir);
    if (*replay) return cmd_replay(replay_path, replay_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

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

#pragma once

// Scenario runner: builds the deployment, runs the simulation, and turns
// the trace into a per-property verdict report.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "swpaxos/checkers.hpp"
#include "swpaxos/netsim.hpp"
#include "swpaxos/nodes.hpp"
#include "swpaxos/result.hpp"
#include "swpaxos/scenario.hpp"
#include "swpaxos/trace.hpp"

namespace swpaxos {

struct PropertyResult {
  std::string name;
  CheckResult result;
};

struct Report {
  std::string scenario;
  std::uint64_t seed = 0;
  bool pass = true;
  std::vector<PropertyResult> properties;
  std::size_t submitted_values = 0;
  std::size_t decided_values = 0;  // submitted values decided somewhere
  std::size_t decided_instances = 0;
  std::size_t noop_instances = 0;
  std::size_t failed_requests = 0;
  std::size_t trace_records = 0;
  std::string abort_reason;

  const CheckResult* property(std::string_view name) const {
    for (const auto& p : properties) {
      if (p.name == name) return &p.result;
    }
    return nullptr;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["scenario"] = scenario;
    j["seed"] = seed;
    j["pass"] = pass;
    auto& props = j["properties"] = nlohmann::ordered_json::object();
    for (const auto& p : properties) {
      nlohmann::ordered_json e;
      e["pass"] = p.result.pass;
      if (!p.result.pass) {
        e["counterexample"] = p.result.counterexample;
        e["detail"] = p.result.detail;
      }
      props[p.name] = std::move(e);
    }
    j["submitted_values"] = submitted_values;
    j["decided_values"] = decided_values;
    j["decided_instances"] = decided_instances;
    j["noop_instances"] = noop_instances;
    j["failed_requests"] = failed_requests;
    j["trace_records"] = trace_records;
    if (!abort_reason.empty()) j["abort_reason"] = abort_reason;
    return j;
  }
};

// One simulation run. The scenario must already be valid.
inline Trace simulate(const Scenario& s) {
  Deployment d = build_deployment(s);
  Simulator sim(d.topology, s.seed);
  const Topology& topo = sim.topology();

  std::vector<std::vector<WorkItem>> work(s.proposers);
  for (const auto& w : s.workload) work[w.proposer].push_back(WorkItem{w.at, w.value});

  for (const auto& n : topo.nodes) {
    switch (n.role) {
      case Role::kProposer: {
        ProposerConfig pc;
        pc.client_id = n.rank;
        pc.retransmit_timeout = s.retransmit_timeout;
        pc.max_retries = s.max_retries;
        pc.coordinator_group = Topology::kCoordinatorGroup;
        sim.attach(n.id, std::make_unique<ProposerNode>(n.id, pc, std::move(work[n.rank])));
        break;
      }
      case Role::kLearner: {
        LearnerConfig lc;
        lc.f = s.f;
        lc.proposer_group = Topology::kProposerGroup;
        sim.attach(n.id, std::make_unique<LearnerNode>(n.id, lc));
        break;
      }
      case Role::kCoordinator:
      case Role::kAcceptor:
      case Role::kColocated:
        sim.attach(n.id, std::make_unique<SwitchNode>(n.id, d.switches[n.id]));
        break;
    }
  }

  FaultCommand elect;
  elect.kind = FaultCommand::Kind::kFailover;
  elect.node = *topo.find(coordinator_name(0, s.colocate));
  (void)sim.inject_fault(elect, 0);

  for (const auto& fs : s.faults) {
    FaultCommand c;
    c.kind = fs.kind;
    c.link = fs.link;
    if (!fs.node.empty()) c.node = *topo.find(fs.node);
    if (fs.kind == FaultCommand::Kind::kSetLink && !fs.node.empty()) {
      c.scoped = true;
      c.group = *group_from_name(fs.group);
    }
    (void)sim.inject_fault(c, fs.at);
  }

  sim.start();
  sim.run_until(s.duration);
  if (!sim.aborted()) sim.finish();
  return sim.take_trace();
}

inline std::string trace_bytes(const Scenario& s) { return simulate(s).to_jsonl(); }

// ---------------------------------------------------------------------------

struct ReplayResult {
  bool pass = true;
  std::optional<std::size_t> diff_offset;  // first differing byte
  std::size_t diff_line = 0;               // 1-based line of that byte
  std::string detail;
};

inline ReplayResult compare_traces(std::string_view a, std::string_view b) {
  ReplayResult r;
  std::size_t n = std::min(a.size(), b.size());
  std::size_t i = 0;
  while (i < n && a[i] == b[i]) ++i;
  if (i == n && a.size() == b.size()) return r;
  r.pass = false;
  r.diff_offset = i;
  r.diff_line = 1 + static_cast<std::size_t>(std::count(a.begin(), a.begin() + i, '\n'));
  r.detail = "traces diverge at byte " + std::to_string(i) + " (line " +
             std::to_string(r.diff_line) + ")";
  return r;
}

using TraceRunner = std::function<std::string(const Scenario&)>;

// Runs the scenario twice with the same seed and compares the traces byte
// for byte.
inline ReplayResult replay_check(const Scenario& s, const TraceRunner& runner = trace_bytes) {
  std::string first = runner(s);
  std::string second = runner(s);
  return compare_traces(first, second);
}

// ---------------------------------------------------------------------------

inline Report evaluate(const Scenario& s, const Trace& trace) {
  Report rep;
  rep.scenario = s.name;
  rep.seed = s.seed;
  rep.trace_records = trace.size();
  rep.properties.push_back({"agreement", check_agreement(trace)});
  rep.properties.push_back({"validity", check_validity(trace)});
  rep.properties.push_back({"stability", check_stability(trace)});
  rep.properties.push_back({"log_monotonicity", check_log_monotonicity(trace)});
  rep.properties.push_back({"quorum_minimality", check_quorum(trace, s.f)});
  rep.properties.push_back({"closed_world", check_closed_world(trace)});

  std::set<Value> submitted;
  std::set<Value> decided_values;
  std::set<std::uint32_t> decided_insts;
  std::set<std::uint32_t> noops;
  for (const auto& r : trace.records()) {
    if (r.kind == TraceKind::kSubmit && r.msg) submitted.insert(r.msg->value);
    if (r.kind == TraceKind::kFail) ++rep.failed_requests;
    if (r.kind == TraceKind::kConflict) rep.abort_reason = "conflict at " + r.node;
    if (r.kind != TraceKind::kDecide || !r.msg) continue;
    decided_insts.insert(r.msg->inst);
    if (is_zero(r.msg->value)) noops.insert(r.msg->inst);
    else decided_values.insert(r.msg->value);
  }
  rep.submitted_values = submitted.size();
  rep.decided_instances = decided_insts.size();
  rep.noop_instances = noops.size();
  for (const auto& v : decided_values) rep.decided_values += submitted.count(v);
  rep.pass = std::all_of(rep.properties.begin(), rep.properties.end(),
                         [](const PropertyResult& p) { return p.result.pass; });
  return rep;
}

struct RunOutput {
  Report report;
  Trace trace;
};

struct RunOptions {
  bool replay = true;  // rerun with the same seed and compare traces
};

inline Result<RunOutput, InvalidScenario> run_scenario(const Scenario& s, RunOptions opts = {}) {
  if (auto st = validate(s); !st) return unexpected(st.error());
  RunOutput out;
  out.trace = simulate(s);
  out.report = evaluate(s, out.trace);
  if (opts.replay) {
    ReplayResult rr = compare_traces(out.trace.to_jsonl(), trace_bytes(s));
    CheckResult det;
    det.pass = rr.pass;
    det.detail = rr.detail;
    if (rr.diff_offset) det.counterexample.push_back(rr.diff_line - 1);
    out.report.properties.push_back({"determinism", det});
    out.report.pass = out.report.pass && det.pass;
  }
  return out;
}

}  // namespace swpaxos

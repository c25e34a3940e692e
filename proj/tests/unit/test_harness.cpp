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

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "swpaxos/harness.hpp"

using namespace swpaxos;

namespace {

Scenario baseline() {
  Scenario s;
  s.name = "baseline";
  s.duration = 1'000'000;
  s.workload = generate_workload(10, 1000, 200, 1);
  return s;
}

FaultSpec crash(SimTime at, std::string node) {
  return FaultSpec{at, FaultCommand::Kind::kCrash, std::move(node), "", {}};
}

TraceRecord rec(TraceKind kind, std::string node, std::uint32_t inst, std::string_view v,
                std::uint16_t rnd = 16) {
  TraceRecord r;
  r.kind = kind;
  r.node = std::move(node);
  PaxosMessage m;
  m.msgtype = kind == TraceKind::kSubmit ? MsgType::kPhase2A : MsgType::kPhase2B;
  m.inst = inst;
  m.rnd = rnd;
  m.value = *make_value(v);
  r.msg = m;
  return r;
}

TraceRecord vote_recv(std::string node, std::uint32_t inst, std::string_view v, std::uint16_t acpt) {
  TraceRecord r = rec(TraceKind::kRecv, std::move(node), inst, v);
  r.msg->acpt = acpt;
  return r;
}

}  // namespace

TEST(Harness, BaselineDecidesEverything) {
  auto out = run_scenario(baseline());
  ASSERT_TRUE(out.has_value());
  const Report& r = out->report;
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.submitted_values, 10u);
  EXPECT_EQ(r.decided_values, 10u);
  EXPECT_EQ(r.decided_instances, 10u);
  EXPECT_EQ(r.noop_instances, 0u);
  ASSERT_NE(r.property("determinism"), nullptr);
  EXPECT_TRUE(r.property("determinism")->pass);
}

TEST(Harness, OneCrashedAcceptorStillDecides) {
  Scenario s = baseline();
  s.faults.push_back(crash(0, "A1"));
  auto out = run_scenario(s);
  ASSERT_TRUE(out.has_value());
  EXPECT_TRUE(out->report.pass);
  EXPECT_EQ(out->report.decided_values, 10u);
}

TEST(Harness, TwoCrashedAcceptorsStopDecisions) {
  Scenario s = baseline();
  s.workload = generate_workload(20, 1000, 200, 1);
  s.faults.push_back(crash(2500, "A1"));
  s.faults.push_back(crash(2500, "A2"));
  auto out = run_scenario(s);
  ASSERT_TRUE(out.has_value());
  EXPECT_TRUE(out->report.pass);
  for (const auto& r : out->trace.records()) {
    if (r.kind == TraceKind::kDecide) {
      EXPECT_LT(r.time, 2500u + 300u);
    }
  }
  EXPECT_LT(out->report.decided_values, 20u);
}

TEST(Harness, FailoverKeepsDecisions) {
  Scenario s = baseline();
  s.workload = generate_workload(40, 1000, 200, 1);
  s.faults.push_back(crash(4000, "C0"));
  s.faults.push_back(FaultSpec{4500, FaultCommand::Kind::kFailover, "C1", "", {}});
  auto out = run_scenario(s);
  ASSERT_TRUE(out.has_value());
  EXPECT_TRUE(out->report.pass);
  EXPECT_EQ(out->report.decided_values, 40u);
}

TEST(Checkers, AgreementFlagsDifferentValues) {
  Trace t;
  t.append(rec(TraceKind::kDecide, "L0", 0, "a"));
  t.append(rec(TraceKind::kDecide, "L1", 0, "b"));
  auto r = check_agreement(t);
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.counterexample, (std::vector<std::uint64_t>{0, 1}));
  Trace ok;
  ok.append(rec(TraceKind::kDecide, "L0", 0, "a"));
  ok.append(rec(TraceKind::kDecide, "L1", 0, "a"));
  EXPECT_TRUE(check_agreement(ok).pass);
}

TEST(Checkers, ValidityRequiresSubmission) {
  Trace t;
  t.append(rec(TraceKind::kSubmit, "P0", 0, "a"));
  t.append(rec(TraceKind::kDecide, "L0", 0, "a"));
  EXPECT_TRUE(check_validity(t).pass);
  TraceRecord noop = rec(TraceKind::kDecide, "L0", 1, "");
  t.append(noop);
  EXPECT_TRUE(check_validity(t).pass);
  t.append(rec(TraceKind::kDecide, "L0", 2, "forged"));
  auto r = check_validity(t);
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.counterexample, (std::vector<std::uint64_t>{3}));
}

TEST(Checkers, StabilityFlagsRedecisionAndForeignDelivery) {
  Trace t;
  t.append(rec(TraceKind::kDecide, "L0", 0, "a"));
  t.append(rec(TraceKind::kDecide, "L0", 0, "a"));
  EXPECT_FALSE(check_stability(t).pass);

  Trace u;
  u.append(rec(TraceKind::kDecide, "L0", 0, "a"));
  u.append(rec(TraceKind::kDeliver, "L0", 0, "b"));
  EXPECT_FALSE(check_stability(u).pass);

  Trace w;
  w.append(rec(TraceKind::kDeliver, "L0", 0, "a"));
  EXPECT_FALSE(check_stability(w).pass);
}

TEST(Checkers, StabilityResetsOnCrash) {
  Trace t;
  t.append(rec(TraceKind::kDecide, "L0", 0, "a"));
  TraceRecord f;
  f.kind = TraceKind::kFault;
  f.node = "L0";
  f.reason = "crash";
  t.append(f);
  t.append(rec(TraceKind::kDecide, "L0", 0, "a"));
  EXPECT_TRUE(check_stability(t).pass);
}

TEST(Checkers, MonotonicityFlagsGapsAndRepeats) {
  Trace t;
  t.append(rec(TraceKind::kDeliver, "L0", 0, "a"));
  t.append(rec(TraceKind::kDeliver, "L0", 2, "c"));
  auto r = check_log_monotonicity(t);
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.counterexample, (std::vector<std::uint64_t>{1}));

  Trace u;
  u.append(rec(TraceKind::kDeliver, "L0", 0, "a"));
  u.append(rec(TraceKind::kDeliver, "L1", 0, "a"));
  u.append(rec(TraceKind::kDeliver, "L0", 1, "b"));
  EXPECT_TRUE(check_log_monotonicity(u).pass);
}

TEST(Checkers, QuorumNeedsDistinctVoters) {
  Trace t;
  t.append(vote_recv("L0", 0, "a", 0));
  t.append(vote_recv("L0", 0, "a", 0));
  t.append(rec(TraceKind::kDecide, "L0", 0, "a"));
  EXPECT_FALSE(check_quorum(t, 1).pass);

  Trace u;
  u.append(vote_recv("L0", 0, "a", 0));
  u.append(vote_recv("L0", 0, "a", 1));
  u.append(rec(TraceKind::kDecide, "L0", 0, "a"));
  EXPECT_TRUE(check_quorum(u, 1).pass);
  EXPECT_FALSE(check_quorum(u, 2).pass);
}

TEST(Checkers, ClosedWorldNeedsEarlierEmit) {
  Trace t;
  TraceRecord e;
  e.kind = TraceKind::kEmit;
  t.append(e);
  TraceRecord r;
  r.kind = TraceKind::kRecv;
  r.ref = 0;
  t.append(r);
  EXPECT_TRUE(check_closed_world(t).pass);
  r.ref = 5;
  t.append(r);
  EXPECT_FALSE(check_closed_world(t).pass);
}

TEST(Replay, IdenticalRunsPass) {
  auto r = replay_check(baseline());
  EXPECT_TRUE(r.pass);
}

// A runner that leaks state between calls must be caught, with the first
// differing line reported.
TEST(Replay, DetectsNondeterministicRunner) {
  int calls = 0;
  auto leaky = [&calls](const Scenario& s) {
    std::string t = trace_bytes(s);
    if (calls++ == 1) {
      auto pos = t.find('\n', t.find('\n') + 1);
      t.insert(pos, " ");
    }
    return t;
  };
  auto r = replay_check(baseline(), leaky);
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.diff_line, 2u);
}

TEST(Replay, DifferentSeedsDifferUnderLoss) {
  Scenario a = baseline();
  a.link.drop_prob = 0.1;
  Scenario b = a;
  b.seed = 2;
  EXPECT_NE(trace_bytes(a), trace_bytes(b));
}

TEST(Scenarios, RejectsBadInput) {
  auto bad = [](nlohmann::json j) { return !scenario_from_json(j).has_value(); };
  EXPECT_TRUE(bad(nlohmann::json::array()));
  EXPECT_TRUE(bad({{"f", 1}, {"acceptors", 2}}));
  EXPECT_TRUE(bad({{"link", {{"drop_prob", 1.5}}}}));
  EXPECT_TRUE(bad({{"faults", {{{"t", 0}, {"cmd", "crash"}, {"node", "A9"}}}}}));
  EXPECT_TRUE(bad({{"faults", {{{"t", 0}, {"cmd", "explode"}, {"node", "A0"}}}}}));
  EXPECT_TRUE(bad({{"faults", {{{"t", 0}, {"cmd", "failover"}, {"node", "A0"}}}}}));
  EXPECT_TRUE(bad({{"workload", {{{"t", 0}, {"value", std::string(kMaxPayload + 1, 'x')}}}}}));
  EXPECT_TRUE(bad({{"workload", 3}}));
  EXPECT_TRUE(bad({{"f", "one"}}));
  EXPECT_TRUE(bad({{"cheap_paxos", true}, {"acceptors", 4}}));
  EXPECT_FALSE(bad(nlohmann::json::object()));
}

TEST(Scenarios, RunRejectsInvalidScenario) {
  Scenario s = baseline();
  s.learners = 0;
  auto out = run_scenario(s);
  ASSERT_FALSE(out.has_value());
  EXPECT_EQ(out.error().reason, "no learners");
}

TEST(Scenarios, JsonRoundTrip) {
  Scenario s = baseline();
  s.faults.push_back(crash(10, "A0"));
  FaultSpec link;
  link.at = 20;
  link.kind = FaultCommand::Kind::kSetLink;
  link.node = "C0";
  link.group = "acceptor";
  link.link = LinkParams{50, 5, 0.1, 0.2, 3};
  s.faults.push_back(link);
  auto back = scenario_from_json(nlohmann::json::parse(to_json(s).dump()));
  ASSERT_TRUE(back.has_value());
  EXPECT_EQ(to_json(*back).dump(), to_json(s).dump());
  EXPECT_EQ(trace_bytes(*back), trace_bytes(s));
}

TEST(Scenarios, DeploymentNaming) {
  Scenario s;
  s.colocate = true;
  s.cheap_paxos = true;
  s.standby_coordinators = 0;
  Deployment d = build_deployment(s);
  std::vector<std::string> names;
  for (const auto& n : d.topology.nodes) names.push_back(n.name);
  EXPECT_EQ(names, (std::vector<std::string>{"P0", "C0+A0", "A1", "A2", "L0", "L1"}));
  EXPECT_TRUE(d.topology.nodes[3].second_class);
  EXPECT_FALSE(d.topology.nodes[2].second_class);
}

TEST(Scenarios, CheckedInSuiteLoads) {
  std::size_t n = 0;
  for (const auto& e : std::filesystem::directory_iterator(SWPAXOS_SCENARIO_DIR)) {
    if (e.path().extension() != ".json") continue;
    auto s = load_scenario(e.path().string());
    EXPECT_TRUE(s.has_value()) << e.path() << ": " << (s ? "" : s.error().reason);
    ++n;
  }
  EXPECT_GE(n, 1u);
}

TEST(TraceFormat, JsonlRoundTrip) {
  auto out = run_scenario(baseline(), RunOptions{false});
  ASSERT_TRUE(out.has_value());
  std::string text = out->trace.to_jsonl();
  std::istringstream in(text);
  Trace back = Trace::read_jsonl(in);
  ASSERT_EQ(back.size(), out->trace.size());
  for (std::size_t i = 0; i < back.size(); ++i) ASSERT_EQ(back[i], out->trace[i]) << i;
  EXPECT_EQ(back.to_jsonl(), text);
}

TEST(Report, StableAcrossRuns) {
  auto a = run_scenario(baseline());
  auto b = run_scenario(baseline());
  ASSERT_TRUE(a.has_value() && b.has_value());
  EXPECT_EQ(a->report.to_json().dump(), b->report.to_json().dump());
  auto j = a->report.to_json();
  EXPECT_EQ(j["properties"].size(), 7u);
  EXPECT_TRUE(j["properties"]["agreement"]["pass"].get<bool>());
}

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

// Trace property checkers. Nodes are black boxes here: everything is
// reconstructed from decide/deliver/submit/recv records. A learner's
// history restarts when it crashes.

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "swpaxos/trace.hpp"
#include "swpaxos/wire.hpp"

namespace swpaxos {

struct CheckResult {
  bool pass = true;
  std::vector<std::uint64_t> counterexample;  // trace record ids
  std::string detail;

  static CheckResult fail(std::vector<std::uint64_t> ids, std::string why) {
    return CheckResult{false, std::move(ids), std::move(why)};
  }
};

namespace detail {

// (node, incarnation) key; the incarnation bumps on each crash record.
class Incarnations {
 public:
  std::pair<std::string, int> key(const TraceRecord& r) {
    if (r.kind == TraceKind::kFault && r.reason == "crash") ++count_[r.node];
    return {r.node, count_[r.node]};
  }

 private:
  std::map<std::string, int> count_;
};

}  // namespace detail

// Fails iff two decide records share an instance but not the value.
inline CheckResult check_agreement(const Trace& trace) {
  std::map<std::uint32_t, const TraceRecord*> first;
  for (const auto& r : trace.records()) {
    if (r.kind != TraceKind::kDecide || !r.msg) continue;
    auto [it, fresh] = first.emplace(r.msg->inst, &r);
    if (!fresh && it->second->msg->value != r.msg->value) {
      return CheckResult::fail({it->second->id, r.id},
                               "instance " + std::to_string(r.msg->inst) + " decided twice with different values");
    }
  }
  return {};
}

// Every decided value was submitted by a proposer, or is the all-zero no-op
// a new coordinator uses to fill instances nobody voted for.
inline CheckResult check_validity(const Trace& trace) {
  std::set<Value> submitted;
  for (const auto& r : trace.records()) {
    if (r.kind == TraceKind::kSubmit && r.msg) submitted.insert(r.msg->value);
    if (r.kind != TraceKind::kDecide || !r.msg) continue;
    if (is_zero(r.msg->value) || submitted.count(r.msg->value) != 0) continue;
    return CheckResult::fail({r.id}, "instance " + std::to_string(r.msg->inst) +
                                         " decided a value nobody submitted");
  }
  return {};
}

// A learner decides each instance at most once, and executes exactly the
// value it decided.
inline CheckResult check_stability(const Trace& trace) {
  detail::Incarnations inc;
  std::map<std::pair<std::string, int>, std::map<std::uint32_t, const TraceRecord*>> decided;
  for (const auto& r : trace.records()) {
    auto key = inc.key(r);
    if (!r.msg) continue;
    if (r.kind == TraceKind::kDecide) {
      auto [it, fresh] = decided[key].emplace(r.msg->inst, &r);
      if (!fresh) {
        return CheckResult::fail({it->second->id, r.id},
                                 r.node + " decided instance " + std::to_string(r.msg->inst) + " twice");
      }
    } else if (r.kind == TraceKind::kDeliver) {
      auto& mine = decided[key];
      auto it = mine.find(r.msg->inst);
      if (it == mine.end()) {
        return CheckResult::fail({r.id}, r.node + " delivered undecided instance " +
                                             std::to_string(r.msg->inst));
      }
      if (it->second->msg->value != r.msg->value) {
        return CheckResult::fail({it->second->id, r.id},
                                 r.node + " delivered a value it did not decide");
      }
    }
  }
  return {};
}

// Each learner's delivered log is 0, 1, 2, ... with no gaps or reordering.
inline CheckResult check_log_monotonicity(const Trace& trace) {
  detail::Incarnations inc;
  std::map<std::pair<std::string, int>, std::uint32_t> next;
  for (const auto& r : trace.records()) {
    auto key = inc.key(r);
    if (r.kind != TraceKind::kDeliver || !r.msg) continue;
    std::uint32_t& expect = next[key];
    if (r.msg->inst != expect) {
      return CheckResult::fail({r.id}, r.node + " delivered instance " + std::to_string(r.msg->inst) +
                                           ", expected " + std::to_string(expect));
    }
    ++expect;
  }
  return {};
}

// Every decision is backed by identical 2Bs from at least f+1 distinct
// acceptors that reached that learner beforehand.
inline CheckResult check_quorum(const Trace& trace, std::uint16_t f) {
  detail::Incarnations inc;
  using VoteKey = std::tuple<std::uint32_t, std::uint16_t, Value>;
  std::map<std::pair<std::string, int>, std::map<VoteKey, std::set<std::uint16_t>>> seen;
  for (const auto& r : trace.records()) {
    auto key = inc.key(r);
    if (!r.msg) continue;
    if (r.kind == TraceKind::kRecv && r.msg->msgtype == MsgType::kPhase2B) {
      seen[key][{r.msg->inst, r.msg->rnd, r.msg->value}].insert(r.msg->acpt);
    } else if (r.kind == TraceKind::kDecide) {
      auto& voters = seen[key][{r.msg->inst, r.msg->rnd, r.msg->value}];
      if (voters.size() < static_cast<std::size_t>(f) + 1) {
        return CheckResult::fail({r.id}, r.node + " decided instance " + std::to_string(r.msg->inst) +
                                             " with " + std::to_string(voters.size()) + " votes");
      }
    }
  }
  return {};
}

// Every delivery or in-network loss refers to an earlier emit record.
inline CheckResult check_closed_world(const Trace& trace) {
  const auto& recs = trace.records();
  for (const auto& r : recs) {
    if (!r.ref) continue;
    if (r.kind != TraceKind::kRecv && r.kind != TraceKind::kDrop &&
        r.kind != TraceKind::kDecide && r.kind != TraceKind::kComplete &&
        r.kind != TraceKind::kConflict) {
      continue;
    }
    if (*r.ref >= r.id || recs[*r.ref].kind != TraceKind::kEmit) {
      return CheckResult::fail({r.id}, "record refers to a packet nobody emitted");
    }
  }
  return {};
}

}  // namespace swpaxos

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

// Scenario description and its JSON schema.
//
//   {
//     "name": "baseline",
//     "f": 1,
//     "acceptors": 3,                 // default 2f+1
//     "learners": 2,
//     "proposers": 1,
//     "standby_coordinators": 1,
//     "cheap_paxos": false,           // f+1 first-class + f second-class acceptors
//     "colocate": false,              // coordinator shares a switch with A0
//     "seed": 1,
//     "duration_us": 2000000,
//     "instance_window": 16384,
//     "sweep_span": 256,
//     "sweep_timeout_us": 5000,
//     "retransmit_timeout_us": 50000,
//     "max_retries": 10,
//     "second_class_multiplier": 10,
//     "link": {"base_latency_us": 100, "jitter_us": 20, "drop_prob": 0.0,
//              "duplicate_prob": 0.0, "reorder_us": 0},
//     "workload": {"count": 10, "start_us": 1000, "interval_us": 200},
//       or [{"t": 1000, "proposer": 0, "value": "x"}, ...],
//     "faults": [{"t": 0, "cmd": "crash", "node": "A2"},
//                {"t": 9000, "cmd": "restart", "node": "A2"},
//                {"t": 5000, "cmd": "set_link", "link": {...}},
//                {"t": 5000, "cmd": "set_link", "node": "C0", "group": "acceptor", "link": {...}},
//                {"t": 20000, "cmd": "failover", "node": "C1"}]
//   }
//
// Node names: P<i> proposers, C0 the initial coordinator, C<k> standbys,
// A<i> acceptors, L<i> learners. With "colocate" the initial coordinator
// and A0 share the switch "C0+A0". C0 is activated by a failover command
// at t=0.

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "swpaxos/coordinator.hpp"
#include "swpaxos/hosts.hpp"
#include "swpaxos/netsim.hpp"
#include "swpaxos/nodes.hpp"
#include "swpaxos/result.hpp"

namespace swpaxos {

struct ScenarioSubmit {
  SimTime at = 0;
  std::uint16_t proposer = 0;
  std::string value;
};

struct FaultSpec {
  SimTime at = 0;
  FaultCommand::Kind kind = FaultCommand::Kind::kCrash;
  std::string node;   // empty for an unscoped set_link
  std::string group;  // set_link scope: coordinator|acceptor|learner|proposer
  LinkParams link;
};

struct Scenario {
  std::string name = "scenario";
  std::uint16_t f = 1;
  std::optional<std::uint16_t> acceptors;
  std::uint16_t learners = 2;
  std::uint16_t proposers = 1;
  std::uint16_t standby_coordinators = 1;
  bool cheap_paxos = false;
  bool colocate = false;
  std::uint64_t seed = 1;
  SimTime duration = 2'000'000;
  std::uint32_t instance_window = kDefaultInstanceWindow;
  std::uint32_t sweep_span = kDefaultSweepSpan;
  SimTime sweep_timeout = kDefaultSweepTimeout;
  SimTime retransmit_timeout = kDefaultRetransmitTimeout;
  std::uint32_t max_retries = kDefaultMaxRetries;
  std::uint32_t second_class_multiplier = 10;
  LinkParams link{100, 20, 0.0, 0.0, 0};
  std::vector<ScenarioSubmit> workload;
  std::vector<FaultSpec> faults;

  std::uint16_t acceptor_count() const {
    return acceptors.value_or(static_cast<std::uint16_t>(2 * f + 1));
  }
};

struct InvalidScenario {
  std::string reason;
};

inline std::optional<GroupId> group_from_name(const std::string& s) {
  if (s == "coordinator") return Topology::kCoordinatorGroup;
  if (s == "acceptor") return Topology::kAcceptorGroup;
  if (s == "learner") return Topology::kLearnerGroup;
  if (s == "proposer") return Topology::kProposerGroup;
  return std::nullopt;
}

inline std::string coordinator_name(std::uint16_t rank, bool colocated) {
  return colocated ? "C0+A0" : "C" + std::to_string(rank);
}

// Evenly spaced submits spread round-robin over the proposers, with values
// "p<proposer>-<seq>".
inline std::vector<ScenarioSubmit> generate_workload(std::size_t count, SimTime start,
                                                     SimTime interval, std::uint16_t proposers) {
  std::vector<ScenarioSubmit> w;
  w.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto p = static_cast<std::uint16_t>(proposers == 0 ? 0 : i % proposers);
    w.push_back(ScenarioSubmit{start + i * interval, p,
                               "p" + std::to_string(p) + "-" + std::to_string(i)});
  }
  return w;
}

// Topology and per-node programs for a scenario; node ids follow the order
// proposers, coordinators, acceptors, learners.
struct Deployment {
  Topology topology;
  std::vector<SwitchNode::Config> switches;  // indexed by node id, unused for hosts
};

inline Deployment build_deployment(const Scenario& s) {
  Deployment d;
  Topology& t = d.topology;
  t.link = s.link;
  t.second_class_multiplier = s.second_class_multiplier;
  auto add = [&](std::string name, Role role, std::uint16_t rank, bool second) {
    NodeId id = static_cast<NodeId>(t.nodes.size());
    t.nodes.push_back(NodeSpec{id, std::move(name), role, rank, second});
    d.switches.emplace_back();
    return id;
  };
  auto& coord_group = t.groups[Topology::kCoordinatorGroup];
  auto& acc_group = t.groups[Topology::kAcceptorGroup];
  auto& learner_group = t.groups[Topology::kLearnerGroup];
  auto& proposer_group = t.groups[Topology::kProposerGroup];

  for (std::uint16_t i = 0; i < s.proposers; ++i) {
    proposer_group.push_back(add("P" + std::to_string(i), Role::kProposer, i, false));
  }

  auto acceptor_cfg = [&](std::uint16_t id) {
    AcceptorConfig a;
    a.acceptor_id = id;
    a.instance_window = s.instance_window;
    a.coordinator_group = Topology::kCoordinatorGroup;
    a.learner_group = Topology::kLearnerGroup;
    return a;
  };
  auto coordinator_cfg = [&](std::uint16_t rank) {
    CoordinatorConfig c;
    c.rank = rank;
    c.f = s.f;
    c.instance_window = s.instance_window;
    c.sweep_span = s.sweep_span;
    c.acceptor_group = Topology::kAcceptorGroup;
    return c;
  };

  std::uint16_t n_acc = s.acceptor_count();
  for (std::uint16_t rank = 0; rank <= s.standby_coordinators; ++rank) {
    bool colo = s.colocate && rank == 0;
    NodeId id = add(coordinator_name(rank, colo), colo ? Role::kColocated : Role::kCoordinator,
                    rank, false);
    coord_group.push_back(id);
    d.switches[id].coordinator = coordinator_cfg(rank);
    d.switches[id].sweep_timeout = s.sweep_timeout;
    if (colo) {
      d.switches[id].acceptor = acceptor_cfg(0);
      acc_group.push_back(id);
    }
  }
  for (std::uint16_t i = s.colocate ? 1 : 0; i < n_acc; ++i) {
    bool second = s.cheap_paxos && i > s.f;
    NodeId id = add("A" + std::to_string(i), Role::kAcceptor, i, second);
    acc_group.push_back(id);
    d.switches[id].acceptor = acceptor_cfg(i);
  }
  for (std::uint16_t i = 0; i < s.learners; ++i) {
    learner_group.push_back(add("L" + std::to_string(i), Role::kLearner, i, false));
  }
  return d;
}

inline Status<InvalidScenario> validate(const Scenario& s) {
  auto bad = [](std::string why) { return unexpected(InvalidScenario{std::move(why)}); };
  std::uint32_t n_acc = s.acceptor_count();
  if (s.cheap_paxos) {
    if (n_acc != 2u * s.f + 1) {
      return bad("cheap_paxos needs exactly f+1 first-class and f second-class acceptors");
    }
  } else if (n_acc < 2u * s.f + 1) {
    return bad("acceptor count must be at least 2f+1");
  }
  if (n_acc == 0) return bad("no acceptors");
  if (s.learners == 0) return bad("no learners");
  if (s.proposers == 0) return bad("no proposers");
  if (s.standby_coordinators + 1u > kMaxCoordinators) return bad("too many coordinators");
  if (s.instance_window == 0) return bad("instance_window must be positive");
  if (s.sweep_span == 0) return bad("sweep_span must be positive");
  if (s.sweep_timeout == 0) return bad("sweep_timeout_us must be positive");
  if (s.retransmit_timeout == 0) return bad("retransmit_timeout_us must be positive");
  if (s.duration == 0) return bad("duration_us must be positive");
  auto prob_ok = [](double p) { return p >= 0.0 && p <= 1.0; };
  auto link_ok = [&](const LinkParams& l) { return prob_ok(l.drop_prob) && prob_ok(l.duplicate_prob); };
  if (!link_ok(s.link)) return bad("link probabilities must lie in [0, 1]");
  for (const auto& w : s.workload) {
    if (w.proposer >= s.proposers) return bad("workload names unknown proposer " + std::to_string(w.proposer));
    if (w.value.size() > kMaxPayload) return bad("workload value too large: " + w.value);
  }
  Deployment d = build_deployment(s);
  for (const auto& fs : s.faults) {
    if (!link_ok(fs.link)) return bad("link probabilities must lie in [0, 1]");
    bool unscoped_link = fs.kind == FaultCommand::Kind::kSetLink && fs.node.empty();
    if (!unscoped_link && !d.topology.find(fs.node)) return bad("unknown node '" + fs.node + "'");
    if (fs.kind == FaultCommand::Kind::kSetLink && !fs.node.empty() && !group_from_name(fs.group)) {
      return bad("set_link needs a group when scoped to a node");
    }
    if (fs.kind == FaultCommand::Kind::kFailover) {
      NodeId id = *d.topology.find(fs.node);
      if (!d.switches[id].coordinator) return bad("failover target is not a coordinator: " + fs.node);
    }
  }
  if (auto st = d.topology.validate(); !st) {
    return bad("topology: " + std::string(to_string(st.error())));
  }
  return {};
}

// ---------------------------------------------------------------------------
// JSON

inline LinkParams link_from_json(const nlohmann::json& j, LinkParams base) {
  base.base_latency = j.value("base_latency_us", base.base_latency);
  base.jitter = j.value("jitter_us", base.jitter);
  base.drop_prob = j.value("drop_prob", base.drop_prob);
  base.duplicate_prob = j.value("duplicate_prob", base.duplicate_prob);
  base.reorder = j.value("reorder_us", base.reorder);
  return base;
}

inline nlohmann::ordered_json link_to_json(const LinkParams& l) {
  nlohmann::ordered_json j;
  j["base_latency_us"] = l.base_latency;
  j["jitter_us"] = l.jitter;
  j["drop_prob"] = l.drop_prob;
  j["duplicate_prob"] = l.duplicate_prob;
  j["reorder_us"] = l.reorder;
  return j;
}

inline Result<Scenario, InvalidScenario> scenario_from_json(const nlohmann::json& j) {
  auto bad = [](std::string why) { return unexpected(InvalidScenario{std::move(why)}); };
  if (!j.is_object()) return bad("scenario must be a JSON object");
  Scenario s;
  try {
    s.name = j.value("name", s.name);
    s.f = j.value("f", s.f);
    if (j.contains("acceptors")) s.acceptors = j.at("acceptors").get<std::uint16_t>();
    s.learners = j.value("learners", s.learners);
    s.proposers = j.value("proposers", s.proposers);
    s.standby_coordinators = j.value("standby_coordinators", s.standby_coordinators);
    s.cheap_paxos = j.value("cheap_paxos", s.cheap_paxos);
    s.colocate = j.value("colocate", s.colocate);
    s.seed = j.value("seed", s.seed);
    s.duration = j.value("duration_us", s.duration);
    s.instance_window = j.value("instance_window", s.instance_window);
    s.sweep_span = j.value("sweep_span", s.sweep_span);
    s.sweep_timeout = j.value("sweep_timeout_us", s.sweep_timeout);
    s.retransmit_timeout = j.value("retransmit_timeout_us", s.retransmit_timeout);
    s.max_retries = j.value("max_retries", s.max_retries);
    s.second_class_multiplier = j.value("second_class_multiplier", s.second_class_multiplier);
    if (j.contains("link")) s.link = link_from_json(j.at("link"), s.link);

    if (j.contains("workload")) {
      const auto& w = j.at("workload");
      if (w.is_array()) {
        for (const auto& item : w) {
          s.workload.push_back(ScenarioSubmit{item.at("t").get<SimTime>(),
                                              item.value("proposer", std::uint16_t{0}),
                                              item.at("value").get<std::string>()});
        }
      } else if (w.is_object()) {
        s.workload = generate_workload(w.at("count").get<std::size_t>(),
                                       w.value("start_us", SimTime{1000}),
                                       w.value("interval_us", SimTime{200}), s.proposers);
      } else {
        return bad("workload must be an array or a generator object");
      }
    }
    if (j.contains("faults")) {
      for (const auto& item : j.at("faults")) {
        FaultSpec fs;
        fs.at = item.at("t").get<SimTime>();
        std::string cmd = item.at("cmd").get<std::string>();
        if (cmd == "crash") fs.kind = FaultCommand::Kind::kCrash;
        else if (cmd == "restart") fs.kind = FaultCommand::Kind::kRestart;
        else if (cmd == "set_link") fs.kind = FaultCommand::Kind::kSetLink;
        else if (cmd == "failover") fs.kind = FaultCommand::Kind::kFailover;
        else return bad("unknown fault command '" + cmd + "'");
        fs.node = item.value("node", std::string{});
        fs.group = item.value("group", std::string{});
        if (item.contains("link")) fs.link = link_from_json(item.at("link"), s.link);
        s.faults.push_back(std::move(fs));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    return bad(std::string("malformed scenario: ") + e.what());
  }
  if (auto st = validate(s); !st) return unexpected(st.error());
  return s;
}

inline nlohmann::ordered_json to_json(const Scenario& s) {
  nlohmann::ordered_json j;
  j["name"] = s.name;
  j["f"] = s.f;
  j["acceptors"] = s.acceptor_count();
  j["learners"] = s.learners;
  j["proposers"] = s.proposers;
  j["standby_coordinators"] = s.standby_coordinators;
  j["cheap_paxos"] = s.cheap_paxos;
  j["colocate"] = s.colocate;
  j["seed"] = s.seed;
  j["duration_us"] = s.duration;
  j["instance_window"] = s.instance_window;
  j["sweep_span"] = s.sweep_span;
  j["sweep_timeout_us"] = s.sweep_timeout;
  j["retransmit_timeout_us"] = s.retransmit_timeout;
  j["max_retries"] = s.max_retries;
  j["second_class_multiplier"] = s.second_class_multiplier;
  j["link"] = link_to_json(s.link);
  auto& w = j["workload"] = nlohmann::ordered_json::array();
  for (const auto& item : s.workload) {
    w.push_back({{"t", item.at}, {"proposer", item.proposer}, {"value", item.value}});
  }
  auto& f = j["faults"] = nlohmann::ordered_json::array();
  for (const auto& fs : s.faults) {
    nlohmann::ordered_json e;
    e["t"] = fs.at;
    e["cmd"] = to_string(fs.kind);
    if (!fs.node.empty()) e["node"] = fs.node;
    if (!fs.group.empty()) e["group"] = fs.group;
    if (fs.kind == FaultCommand::Kind::kSetLink) e["link"] = link_to_json(fs.link);
    f.push_back(std::move(e));
  }
  return j;
}

inline Result<Scenario, InvalidScenario> load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) return unexpected(InvalidScenario{"cannot open " + path});
  auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) return unexpected(InvalidScenario{"not valid JSON: " + path});
  return scenario_from_json(j);
}

}  // namespace swpaxos

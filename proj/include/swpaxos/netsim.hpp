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

// Deterministic discrete-event network.
//
// Nodes exchange UDP packets through static multicast groups. Every
// delivery draws, in this order, from one seeded generator: drop, duplicate,
// delay (plus one more delay draw for a duplicate copy). Events run in
// (time, seq) order and seq follows insertion order, so a (topology,
// workload, seed) triple always yields the same trace.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "swpaxos/pipeline.hpp"
#include "swpaxos/result.hpp"
#include "swpaxos/trace.hpp"
#include "swpaxos/wire.hpp"

namespace swpaxos {

using NodeId = std::uint16_t;

enum class Role : std::uint8_t {
  kProposer,
  kCoordinator,
  kAcceptor,
  kLearner,
  kColocated,  // coordinator and acceptor on one switch
};

inline constexpr std::string_view to_string(Role r) {
  switch (r) {
    case Role::kProposer: return "proposer";
    case Role::kCoordinator: return "coordinator";
    case Role::kAcceptor: return "acceptor";
    case Role::kLearner: return "learner";
    case Role::kColocated: return "colocated";
  }
  return "?";
}

struct NodeSpec {
  NodeId id = 0;
  std::string name;
  Role role = Role::kAcceptor;
  std::uint16_t rank = 0;     // coordinator rank or acceptor id
  bool second_class = false;  // runs on a commodity server
};

struct LinkParams {
  SimTime base_latency = 100;
  SimTime jitter = 0;
  double drop_prob = 0.0;
  double duplicate_prob = 0.0;
  SimTime reorder = 0;  // extra random delay bound

  bool operator==(const LinkParams&) const = default;
};

enum class NetError {
  kUnknownGroup,
  kUnknownNode,
  kMissingGroup,
  kEmptyGroup,
  kDuplicateNode,
};

inline constexpr std::string_view to_string(NetError e) {
  switch (e) {
    case NetError::kUnknownGroup: return "UnknownGroup";
    case NetError::kUnknownNode: return "UnknownNode";
    case NetError::kMissingGroup: return "MissingGroup";
    case NetError::kEmptyGroup: return "EmptyGroup";
    case NetError::kDuplicateNode: return "DuplicateNode";
  }
  return "?";
}

struct Topology {
  static constexpr GroupId kCoordinatorGroup = 1;
  static constexpr GroupId kAcceptorGroup = 2;
  static constexpr GroupId kLearnerGroup = 3;
  static constexpr GroupId kProposerGroup = 4;

  std::vector<NodeSpec> nodes;  // nodes[i].id == i
  std::map<GroupId, std::vector<NodeId>> groups;
  LinkParams link;
  std::map<std::pair<NodeId, GroupId>, LinkParams> link_overrides;
  std::uint32_t second_class_multiplier = 10;

  Status<NetError> validate() const {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (nodes[i].id != i) return unexpected(NetError::kDuplicateNode);
      for (std::size_t j = 0; j < i; ++j) {
        if (nodes[j].name == nodes[i].name) return unexpected(NetError::kDuplicateNode);
      }
    }
    for (GroupId g : {kCoordinatorGroup, kAcceptorGroup, kLearnerGroup, kProposerGroup}) {
      auto it = groups.find(g);
      if (it == groups.end()) return unexpected(NetError::kMissingGroup);
      if (it->second.empty()) return unexpected(NetError::kEmptyGroup);
    }
    for (const auto& [g, members] : groups) {
      for (NodeId n : members) {
        if (n >= nodes.size()) return unexpected(NetError::kUnknownNode);
      }
    }
    return {};
  }

  std::optional<NodeId> find(std::string_view name) const {
    for (const auto& n : nodes) {
      if (n.name == name) return n.id;
    }
    return std::nullopt;
  }

  bool is_member(NodeId node, GroupId group) const {
    auto it = groups.find(group);
    if (it == groups.end()) return false;
    for (NodeId n : it->second) {
      if (n == node) return true;
    }
    return false;
  }

  LinkParams link_for(NodeId src, GroupId group) const {
    auto it = link_overrides.find({src, group});
    return it == link_overrides.end() ? link : it->second;
  }
};

struct FaultCommand {
  enum class Kind : std::uint8_t { kCrash, kRestart, kSetLink, kFailover };

  Kind kind = Kind::kCrash;
  NodeId node = 0;  // target; for kSetLink the source when `scoped`
  LinkParams link;
  bool scoped = false;  // kSetLink: only (node, group) instead of the default
  GroupId group = 0;
};

inline constexpr std::string_view to_string(FaultCommand::Kind k) {
  switch (k) {
    case FaultCommand::Kind::kCrash: return "crash";
    case FaultCommand::Kind::kRestart: return "restart";
    case FaultCommand::Kind::kSetLink: return "set_link";
    case FaultCommand::Kind::kFailover: return "failover";
  }
  return "?";
}

struct PacketDelivery {
  NodeId src = 0;
  NodeId dst = 0;
  GroupId group = 0;
  Packet packet;
  std::uint64_t emit_id = 0;
  std::uint32_t epoch = 0;  // destination incarnation at send time
};

struct TimerFire {
  NodeId node = 0;
  std::uint64_t tag = 0;
  std::uint32_t epoch = 0;
};

struct Event {
  SimTime time = 0;
  std::uint64_t seq = 0;
  std::variant<PacketDelivery, TimerFire, FaultCommand> body;
};

class Simulator;

class SimNode {
 public:
  virtual ~SimNode() = default;
  virtual void on_start(Simulator&) {}
  virtual void on_packet(Simulator&, const PacketDelivery&) = 0;
  virtual void on_timer(Simulator&, std::uint64_t /*tag*/) {}
  // Volatile state is gone after a crash; restart brings the node back blank.
  virtual void on_crash() {}
  virtual void on_restart(Simulator&) {}
  virtual void on_failover(Simulator&) {}
  virtual void on_finish(Simulator&) {}
};

class Simulator {
 public:
  Simulator(Topology topo, std::uint64_t seed)
      : topo_(std::move(topo)),
        rng_(seed),
        nodes_(topo_.nodes.size()),
        up_(topo_.nodes.size(), true),
        epoch_(topo_.nodes.size(), 0) {}

  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  void attach(NodeId id, std::unique_ptr<SimNode> node) { nodes_.at(id) = std::move(node); }

  // Calls on_start on every attached node, in id order.
  void start() {
    for (NodeId i = 0; i < nodes_.size(); ++i) {
      if (nodes_[i]) nodes_[i]->on_start(*this);
    }
  }

  // Schedules one delivery per group member other than src. Returns the
  // id of the emit record.
  Result<std::uint64_t, NetError> multicast(NodeId src, GroupId group, Packet pkt) {
    auto git = topo_.groups.find(group);
    if (git == topo_.groups.end()) return unexpected(NetError::kUnknownGroup);
    TraceRecord rec = packet_record(src, TraceKind::kEmit, pkt);
    rec.group = group;
    std::uint64_t emit_id = trace_.append(std::move(rec));

    LinkParams lp = topo_.link_for(src, group);
    for (NodeId dst : git->second) {
      if (dst == src) continue;
      double drop = draw_u01();
      double dup = draw_u01();
      SimTime delay = draw_delay(lp, src, dst);
      if (drop < lp.drop_prob) {
        TraceRecord d = packet_record(dst, TraceKind::kDrop, pkt);
        d.ref = emit_id;
        d.reason = "net_loss";
        trace_.append(std::move(d));
        continue;
      }
      schedule(now_ + delay, PacketDelivery{src, dst, group, pkt, emit_id, epoch_[dst]});
      if (dup < lp.duplicate_prob) {
        SimTime delay2 = draw_delay(lp, src, dst);
        schedule(now_ + delay2, PacketDelivery{src, dst, group, pkt, emit_id, epoch_[dst]});
      }
    }
    return emit_id;
  }

  Status<NetError> inject_fault(const FaultCommand& cmd, SimTime at) {
    if (cmd.node >= topo_.nodes.size()) return unexpected(NetError::kUnknownNode);
    if (cmd.kind == FaultCommand::Kind::kSetLink && cmd.scoped &&
        topo_.groups.count(cmd.group) == 0) {
      return unexpected(NetError::kUnknownGroup);
    }
    schedule(at, cmd);
    return {};
  }

  void set_timer(NodeId node, SimTime delay, std::uint64_t tag) {
    schedule(now_ + delay, TimerFire{node, tag, epoch_.at(node)});
  }

  // Processes events in (time, seq) order until the queue drains, `end` is
  // passed, or a node aborts the run.
  const Trace& run_until(std::optional<SimTime> end = std::nullopt) {
    while (!queue_.empty() && !aborted_) {
      const Event& top = queue_.top();
      if (end && top.time > *end) break;
      Event ev = top;
      queue_.pop();
      now_ = ev.time;
      std::visit([this](auto& body) { dispatch(body); }, ev.body);
    }
    if (end && !aborted_ && now_ < *end) now_ = *end;
    return trace_;
  }

  // End-of-run hook for snapshots and counters.
  void finish() {
    for (NodeId i = 0; i < nodes_.size(); ++i) {
      if (nodes_[i] && up_[i]) nodes_[i]->on_finish(*this);
    }
  }

  std::uint64_t record(TraceRecord r) {
    r.time = now_;
    return trace_.append(std::move(r));
  }

  TraceRecord packet_record(NodeId node, TraceKind kind, const Packet& pkt) const {
    TraceRecord r;
    r.time = now_;
    r.node = topo_.nodes.at(node).name;
    r.kind = kind;
    if (pkt.udp_dst_port == kPaxosPort) {
      if (auto m = decode(pkt.payload)) r.msg = *m;
      else r.detail = "raw=" + to_hex(pkt.payload);
    } else {
      r.port = pkt.udp_dst_port;
      r.detail = to_hex(pkt.payload);
    }
    return r;
  }

  void abort(std::string reason) {
    aborted_ = true;
    abort_reason_ = std::move(reason);
  }

  bool aborted() const { return aborted_; }
  const std::string& abort_reason() const { return abort_reason_; }
  SimTime now() const { return now_; }
  bool is_up(NodeId n) const { return up_.at(n); }
  const Topology& topology() const { return topo_; }
  const std::string& name(NodeId n) const { return topo_.nodes.at(n).name; }
  const Trace& trace() const { return trace_; }
  Trace take_trace() { return std::move(trace_); }
  std::size_t pending_events() const { return queue_.size(); }
  SimNode* node(NodeId n) { return nodes_.at(n).get(); }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.time != b.time) return a.time > b.time;
      return a.seq > b.seq;
    }
  };

  template <typename Body>
  void schedule(SimTime t, Body body) {
    queue_.push(Event{t, next_seq_++, std::move(body)});
  }

  double draw_u01() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

  SimTime draw_delay(const LinkParams& lp, NodeId src, NodeId dst) {
    std::uint64_t r = rng_();
    SimTime base = lp.base_latency;
    SimTime jitter = lp.jitter;
    if (topo_.nodes[src].second_class || topo_.nodes[dst].second_class) {
      base *= topo_.second_class_multiplier;
      jitter *= topo_.second_class_multiplier;
    }
    SimTime spread = jitter + lp.reorder;
    return base + (spread == 0 ? 0 : r % (spread + 1));
  }

  void dispatch(PacketDelivery& d) {
    if (!up_[d.dst] || epoch_[d.dst] != d.epoch || !nodes_[d.dst]) {
      TraceRecord r = packet_record(d.dst, TraceKind::kDrop, d.packet);
      r.ref = d.emit_id;
      r.reason = "node_down";
      trace_.append(std::move(r));
      return;
    }
    TraceRecord r = packet_record(d.dst, TraceKind::kRecv, d.packet);
    r.ref = d.emit_id;
    r.group = d.group;
    trace_.append(std::move(r));
    nodes_[d.dst]->on_packet(*this, d);
  }

  void dispatch(TimerFire& t) {
    if (!up_[t.node] || epoch_[t.node] != t.epoch || !nodes_[t.node]) return;
    nodes_[t.node]->on_timer(*this, t.tag);
  }

  void dispatch(FaultCommand& c) {
    TraceRecord r;
    r.time = now_;
    r.node = topo_.nodes[c.node].name;
    r.kind = TraceKind::kFault;
    r.reason = std::string(to_string(c.kind));
    trace_.append(std::move(r));
    SimNode* n = nodes_[c.node].get();
    switch (c.kind) {
      case FaultCommand::Kind::kCrash:
        if (up_[c.node]) {
          up_[c.node] = false;
          ++epoch_[c.node];
          if (n) n->on_crash();
        }
        break;
      case FaultCommand::Kind::kRestart:
        if (!up_[c.node]) {
          up_[c.node] = true;
          if (n) n->on_restart(*this);
        }
        break;
      case FaultCommand::Kind::kSetLink:
        if (c.scoped) topo_.link_overrides[{c.node, c.group}] = c.link;
        else topo_.link = c.link;
        break;
      case FaultCommand::Kind::kFailover:
        if (up_[c.node] && n) n->on_failover(*this);
        break;
    }
  }

  Topology topo_;
  std::mt19937_64 rng_;
  std::vector<std::unique_ptr<SimNode>> nodes_;
  std::vector<bool> up_;
  std::vector<std::uint32_t> epoch_;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::uint64_t next_seq_ = 0;
  SimTime now_ = 0;
  Trace trace_;
  bool aborted_ = false;
  std::string abort_reason_;
};

}  // namespace swpaxos

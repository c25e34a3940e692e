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

// Simulator actors wrapping the switch programs and host libraries.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "swpaxos/acceptor.hpp"
#include "swpaxos/coordinator.hpp"
#include "swpaxos/hosts.hpp"
#include "swpaxos/netsim.hpp"
#include "swpaxos/pipeline.hpp"
#include "swpaxos/trace.hpp"
#include "swpaxos/wire.hpp"

namespace swpaxos {

inline constexpr SimTime kDefaultSweepTimeout = 5'000;

// A switch running a coordinator, an acceptor, or both (co-located). Packets
// are dispatched by destination group. Emissions to a group the switch
// itself belongs to are processed locally as well, since multicast never
// loops back to the sender.
class SwitchNode : public SimNode {
 public:
  struct Config {
    std::optional<CoordinatorConfig> coordinator;
    std::optional<AcceptorConfig> acceptor;
    SimTime sweep_timeout = kDefaultSweepTimeout;
  };

  SwitchNode(NodeId id, Config cfg) : id_(id), cfg_(std::move(cfg)) { rebuild(); }

  void on_packet(Simulator& sim, const PacketDelivery& d) override {
    if (d.packet.udp_dst_port != kPaxosPort) {
      sim.record(sim.packet_record(id_, TraceKind::kBypass, d.packet));
      return;
    }
    auto msg = decode(d.packet.payload);
    if (!msg) {
      ++parse_errors_;
      TraceRecord r = sim.packet_record(id_, TraceKind::kDrop, d.packet);
      r.ref = d.emit_id;
      r.reason = std::string(to_string(DropReason::kParseError));
      sim.record(std::move(r));
      return;
    }
    handle(sim, d.group, *msg, d.emit_id);
    arm_timer(sim);
  }

  void on_timer(Simulator& sim, std::uint64_t) override {
    armed_ = false;
    if (!coordinator_) return;
    for (auto& f : coordinator_->on_sweep_timer()) emit(sim, f);
    arm_timer(sim);
  }

  void on_crash() override {
    rebuild();
    armed_ = false;
  }

  void on_failover(Simulator& sim) override {
    if (!coordinator_) return;
    for (auto& f : coordinator_->activate()) emit(sim, f);
    snapshot(sim);
    arm_timer(sim);
  }

  void on_finish(Simulator& sim) override {
    snapshot(sim);
    TraceRecord r;
    r.node = sim.name(id_);
    r.kind = TraceKind::kStats;
    std::string counters;
    PipelineStats total;
    if (coordinator_) {
      counters = coordinator_->sequencer().counters();
      add(total, coordinator_->sequencer().stats());
    }
    if (acceptor_) {
      if (!counters.empty()) counters += ',';
      counters += acceptor_->counters();
      add(total, acceptor_->stats());
    }
    total.drops[static_cast<std::size_t>(DropReason::kParseError)] += parse_errors_;
    r.detail = counters;
    std::string drops;
    for (std::size_t i = 0; i < kNumDropReasons; ++i) {
      if (!drops.empty()) drops += ',';
      drops += std::string(to_string(static_cast<DropReason>(i))) + '=' +
               std::to_string(total.drops[i]);
    }
    r.reason = drops;
    sim.record(std::move(r));
  }

  const Coordinator* coordinator() const { return coordinator_.get(); }
  const AcceptorProgram* acceptor() const { return acceptor_.get(); }

 private:
  static void add(PipelineStats& into, const PipelineStats& s) {
    into.forwarded += s.forwarded;
    for (std::size_t i = 0; i < kNumDropReasons; ++i) into.drops[i] += s.drops[i];
  }

  void rebuild() {
    coordinator_.reset();
    acceptor_.reset();
    if (cfg_.coordinator) coordinator_ = std::make_unique<Coordinator>(*cfg_.coordinator);
    if (cfg_.acceptor) acceptor_ = std::make_unique<AcceptorProgram>(*cfg_.acceptor);
  }

  void handle(Simulator& sim, GroupId group, const PaxosMessage& msg, std::uint64_t ref) {
    if (group == Topology::kCoordinatorGroup && coordinator_) {
      auto before = std::make_pair(coordinator_->mode(), coordinator_->crnd());
      auto r = coordinator_->on_message(msg);
      if (r.pipeline) outcome(sim, msg, *r.pipeline, ref);
      for (auto& f : r.control) emit(sim, f);
      if (before != std::make_pair(coordinator_->mode(), coordinator_->crnd())) snapshot(sim);
      return;
    }
    if (group == Topology::kAcceptorGroup && acceptor_) {
      outcome(sim, msg, acceptor_->process(msg), ref);
      return;
    }
    drop(sim, msg, DropReason::kNoMatch, ref);
  }

  void outcome(Simulator& sim, const PaxosMessage& in, const PipelineOutcome& out,
               std::uint64_t ref) {
    if (out.is_forward()) {
      emit(sim, out.forwarded());
    } else {
      drop(sim, in, out.drop_reason(), ref);
    }
  }

  void drop(Simulator& sim, const PaxosMessage& msg, DropReason reason, std::uint64_t ref) {
    TraceRecord r;
    r.node = sim.name(id_);
    r.kind = TraceKind::kDrop;
    r.msg = msg;
    r.ref = ref;
    r.reason = std::string(to_string(reason));
    sim.record(std::move(r));
  }

  void emit(Simulator& sim, const Forward& f) {
    auto id = sim.multicast(id_, f.group, paxos_packet(f.msg));
    if (!id) return;
    if (!sim.topology().is_member(id_, f.group)) return;
    TraceRecord r;
    r.node = sim.name(id_);
    r.kind = TraceKind::kRecv;
    r.msg = f.msg;
    r.ref = *id;
    r.group = f.group;
    r.detail = "loopback";
    sim.record(std::move(r));
    handle(sim, f.group, f.msg, *id);
  }

  void snapshot(Simulator& sim) {
    if (!coordinator_) return;
    TraceRecord r;
    r.node = sim.name(id_);
    r.kind = TraceKind::kSnapshot;
    PaxosMessage m;
    m.msgtype = MsgType::kPhase2A;
    m.inst = coordinator_->next_instance();
    m.rnd = coordinator_->crnd();
    r.msg = m;
    r.reason = std::string(to_string(coordinator_->mode()));
    r.detail = "reg_inst=" + std::to_string(coordinator_->next_instance()) +
               ",crnd=" + std::to_string(coordinator_->crnd()) +
               ",reg_rnd=" + std::to_string(coordinator_->sequencer().round()) +
               ",window_hi=" + std::to_string(coordinator_->window_hi());
    sim.record(std::move(r));
  }

  void arm_timer(Simulator& sim) {
    if (armed_ || !coordinator_ || !coordinator_->sweep_in_progress()) return;
    armed_ = true;
    sim.set_timer(id_, cfg_.sweep_timeout, 0);
  }

  NodeId id_;
  Config cfg_;
  std::unique_ptr<Coordinator> coordinator_;
  std::unique_ptr<AcceptorProgram> acceptor_;
  std::uint64_t parse_errors_ = 0;
  bool armed_ = false;
};

// ---------------------------------------------------------------------------

struct WorkItem {
  SimTime at = 0;
  std::string payload;
};

class ProposerNode : public SimNode {
 public:
  static constexpr std::uint64_t kRetransmitTag = ~std::uint64_t{0};

  ProposerNode(NodeId id, ProposerConfig cfg, std::vector<WorkItem> work)
      : id_(id), cfg_(cfg), proposer_(cfg), work_(std::move(work)) {}

  void on_start(Simulator& sim) override {
    for (std::size_t i = 0; i < work_.size(); ++i) {
      SimTime at = work_[i].at;
      sim.set_timer(id_, at > sim.now() ? at - sim.now() : 0, i);
    }
  }

  void on_timer(Simulator& sim, std::uint64_t tag) override {
    if (tag == kRetransmitTag) {
      armed_ = false;
      auto r = proposer_.on_timer(sim.now());
      for (auto& [id, f] : r.resent) send(sim, id, f, "retransmit");
      for (auto& [id, p] : r.failed) {
        TraceRecord rec;
        rec.node = sim.name(id_);
        rec.kind = TraceKind::kFail;
        rec.reason = "retries_exhausted";
        rec.detail = "request=" + std::to_string(id) + ",payload=" + value_payload(p.value);
        sim.record(std::move(rec));
      }
    } else if (tag < work_.size()) {
      auto s = proposer_.submit(work_[tag].payload, sim.now());
      if (!s) {
        TraceRecord rec;
        rec.node = sim.name(id_);
        rec.kind = TraceKind::kFail;
        rec.reason = "ValueTooLarge";
        sim.record(std::move(rec));
      } else {
        send(sim, s->id, s->out, "");
      }
    }
    arm(sim);
  }

  void on_packet(Simulator& sim, const PacketDelivery& d) override {
    if (d.packet.udp_dst_port != kResponsePort) return;
    auto resp = decode_response(d.packet.payload);
    if (!resp) return;
    if (auto id = proposer_.on_response(*resp)) {
      TraceRecord rec;
      rec.node = sim.name(id_);
      rec.kind = TraceKind::kComplete;
      rec.ref = d.emit_id;
      rec.detail = "request=" + std::to_string(*id) + ",inst=" + std::to_string(resp->inst);
      sim.record(std::move(rec));
    }
  }

  void on_crash() override {
    proposer_ = Proposer(cfg_);
    armed_ = false;
  }

  const Proposer& proposer() const { return proposer_; }

 private:
  void send(Simulator& sim, RequestId id, const Forward& f, std::string reason) {
    TraceRecord rec;
    rec.node = sim.name(id_);
    rec.kind = TraceKind::kSubmit;
    rec.msg = f.msg;
    rec.reason = std::move(reason);
    rec.detail = "request=" + std::to_string(id);
    sim.record(std::move(rec));
    (void)sim.multicast(id_, f.group, paxos_packet(f.msg));
  }

  void arm(Simulator& sim) {
    if (armed_) return;
    auto due = proposer_.next_deadline();
    if (!due) return;
    armed_ = true;
    sim.set_timer(id_, *due > sim.now() ? *due - sim.now() : 0, kRetransmitTag);
  }

  NodeId id_;
  ProposerConfig cfg_;
  Proposer proposer_;
  std::vector<WorkItem> work_;
  bool armed_ = false;
};

// ---------------------------------------------------------------------------

class LearnerNode : public SimNode {
 public:
  LearnerNode(NodeId id, LearnerConfig cfg) : id_(id), cfg_(cfg), learner_(cfg) {}

  void on_packet(Simulator& sim, const PacketDelivery& d) override {
    if (d.packet.udp_dst_port != kPaxosPort) return;
    auto msg = decode(d.packet.payload);
    if (!msg || msg->msgtype != MsgType::kPhase2B) return;
    auto res = learner_.on_2b(*msg);
    if (!res) {
      TraceRecord rec;
      rec.node = sim.name(id_);
      rec.kind = TraceKind::kConflict;
      rec.msg = *msg;
      rec.ref = d.emit_id;
      rec.reason = "ConflictDetected";
      sim.record(std::move(rec));
      sim.abort("conflict at " + sim.name(id_) + " inst " + std::to_string(msg->inst));
      return;
    }
    if (!res->has_value()) return;
    const Decision& dec = **res;

    TraceRecord rec;
    rec.node = sim.name(id_);
    rec.kind = TraceKind::kDecide;
    rec.msg = *msg;
    rec.ref = d.emit_id;
    sim.record(std::move(rec));

    auto r = learner_.learner_respond(dec.inst, dec.value);
    (void)sim.multicast(id_, r.response.group,
                        Packet{kResponsePort, encode_response(r.response.body)});
    for (const auto& del : r.delivered) {
      TraceRecord dr;
      dr.node = sim.name(id_);
      dr.kind = TraceKind::kDeliver;
      PaxosMessage m;
      m.msgtype = MsgType::kPhase2B;
      m.inst = del.inst;
      m.value = del.value;
      dr.msg = m;
      sim.record(std::move(dr));
    }
  }

  void on_crash() override { learner_ = Learner(cfg_); }

  const Learner& learner() const { return learner_; }

 private:
  NodeId id_;
  LearnerConfig cfg_;
  Learner learner_;
};

}  // namespace swpaxos

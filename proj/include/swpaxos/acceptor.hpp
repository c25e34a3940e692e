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

// Acceptor switch program.
//
//   control ingress {
//     apply(tbl_rnd);                        // read_rnd: meta.round = rnds[inst]
//     if (hdr.rnd >= meta.round) apply(tbl_acceptor);   // handle_1a / handle_2a
//     else drop(StaleRound);
//   }
//
// The round test is >= so that a coordinator's 2A is accepted after its own
// 1A promised the same round.

#include <cstdint>
#include <optional>
#include <string>

#include "swpaxos/pipeline.hpp"
#include "swpaxos/wire.hpp"

namespace swpaxos {

struct AcceptorMetadata {
  std::uint16_t round = 0;

  void reset() { *this = AcceptorMetadata{}; }
  bool operator==(const AcceptorMetadata&) const = default;
};

struct AcceptorConfig {
  std::uint16_t acceptor_id = 0;
  std::uint32_t instance_window = kDefaultInstanceWindow;
  GroupId coordinator_group = 0;
  GroupId learner_group = 0;
};

// Stored vote of one instance, decoded from the three registers.
struct AcceptorCell {
  std::uint16_t rnd = 0;
  std::uint16_t vrnd = 0;
  bool voted = false;
  Value value{};

  bool operator==(const AcceptorCell&) const = default;
};

class AcceptorProgram {
 public:
  // vrnds cells are 17 bits wide: the low 16 hold the vote round, bit 16 is
  // set once a vote has been cast, so a round-0 vote is distinguishable from
  // no vote.
  static constexpr unsigned kVrndCellWidth = 17;
  static constexpr std::uint32_t kVotedBit = std::uint32_t{1} << 16;

  explicit AcceptorProgram(AcceptorConfig cfg, AuditLog* audit = nullptr)
      : cfg_(cfg),
        rnds_("rnds", cfg.instance_window, 16),
        vrnds_("vrnds", cfg.instance_window, kVrndCellWidth),
        values_("values", cfg.instance_window),
        tbl_rnd_("tbl_rnd", audit),
        tbl_acceptor_("tbl_acceptor", audit) {
    tbl_rnd_.add_entry(MsgType::kPhase1A, "read_rnd", &read_rnd);
    tbl_rnd_.add_entry(MsgType::kPhase2A, "read_rnd", &read_rnd);
    tbl_acceptor_.add_entry(MsgType::kPhase1A, "handle_1a", &handle_1a);
    tbl_acceptor_.add_entry(MsgType::kPhase2A, "handle_2a", &handle_2a);
  }

  PipelineOutcome process(const PaxosMessage& msg) {
    AcceptorMetadata meta;
    return process(msg, meta);
  }

  // Reuses the caller's metadata object; it is reset before use.
  PipelineOutcome process(const PaxosMessage& msg, AcceptorMetadata& meta) {
    meta.reset();
    Context ctx{msg, meta, *this};
    PipelineOutcome out = run(ctx);
    stats_.count(out);
    return out;
  }

  // Crash amnesia: all registers zeroed, counters kept.
  void reset() {
    rnds_ = Register<std::uint16_t>("rnds", cfg_.instance_window, 16);
    vrnds_ = Register<std::uint32_t>("vrnds", cfg_.instance_window, kVrndCellWidth);
    values_ = Register<Value>("values", cfg_.instance_window);
  }

  std::optional<AcceptorCell> cell(std::uint32_t inst) const {
    auto rnd = rnds_.peek(inst);
    if (!rnd) return std::nullopt;
    std::uint32_t vr = *vrnds_.peek(inst);
    return AcceptorCell{*rnd, static_cast<std::uint16_t>(vr & 0xffff),
                        (vr & kVotedBit) != 0, *values_.peek(inst)};
  }

  const AcceptorConfig& config() const { return cfg_; }
  std::uint16_t id() const { return cfg_.acceptor_id; }
  const PipelineStats& stats() const { return stats_; }
  const Register<std::uint16_t>& rnds() const { return rnds_; }
  const Register<std::uint32_t>& vrnds() const { return vrnds_; }
  const Register<Value>& values() const { return values_; }

  std::string counters() const {
    return format_table_counters(tbl_rnd_) + ',' + format_table_counters(tbl_acceptor_);
  }

 private:
  struct Context {
    PaxosMessage hdr;
    AcceptorMetadata& meta;
    AcceptorProgram& self;
  };

  PipelineOutcome run(Context& ctx) {
    if (auto out = tbl_rnd_.apply(ctx)) return *out;
    if (ctx.hdr.rnd >= ctx.meta.round) {
      if (auto out = tbl_acceptor_.apply(ctx)) return *out;
      return PipelineOutcome::drop(DropReason::kNoMatch);
    }
    return PipelineOutcome::drop(DropReason::kStaleRound);
  }

  static ActionResult read_rnd(Context& ctx, const ActionScope& scope) {
    auto rnd = ctx.self.rnds_.read(scope, ctx.hdr.inst);
    if (!rnd) return drop_for(rnd.error());
    ctx.meta.round = *rnd;
    return continue_control();
  }

  static ActionResult handle_1a(Context& ctx, const ActionScope& scope) {
    AcceptorProgram& a = ctx.self;
    PaxosMessage& h = ctx.hdr;
    auto vrnd = a.vrnds_.read(scope, h.inst);
    if (!vrnd) return drop_for(vrnd.error());
    auto value = a.values_.read(scope, h.inst);
    if (!value) return drop_for(value.error());
    if (auto st = a.rnds_.write(scope, h.inst, h.rnd); !st) return drop_for(st.error());
    h.msgtype = MsgType::kPhase1B;
    h.vrnd = static_cast<std::uint16_t>(*vrnd & 0xffff);
    h.value = *value;
    h.acpt = a.cfg_.acceptor_id;
    return PipelineOutcome::forward(h, a.cfg_.coordinator_group);
  }

  static ActionResult handle_2a(Context& ctx, const ActionScope& scope) {
    AcceptorProgram& a = ctx.self;
    PaxosMessage& h = ctx.hdr;
    if (auto st = a.rnds_.write(scope, h.inst, h.rnd); !st) return drop_for(st.error());
    if (auto st = a.vrnds_.write(scope, h.inst, h.rnd | kVotedBit); !st) {
      return drop_for(st.error());
    }
    if (auto st = a.values_.write(scope, h.inst, h.value); !st) return drop_for(st.error());
    h.msgtype = MsgType::kPhase2B;
    h.vrnd = h.rnd;
    h.acpt = a.cfg_.acceptor_id;
    return PipelineOutcome::forward(h, a.cfg_.learner_group);
  }

  AcceptorConfig cfg_;
  Register<std::uint16_t> rnds_;
  Register<std::uint32_t> vrnds_;
  Register<Value> values_;
  Table<Context> tbl_rnd_;
  Table<Context> tbl_acceptor_;
  PipelineStats stats_;
};

}  // namespace swpaxos

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

// Coordinator node: a sequencing pipeline plus its control-plane companion.
//
// The pipeline (SequencerProgram) stamps instance numbers on 2A messages:
// copy reg_inst into the header, increment it, store it back. It only
// sequences inside the window [0, reg_window_hi) for which Phase 1 has
// completed; everything else is dropped with OutOfRange.
//
// The control plane (Phase1Driver + Coordinator) pre-executes Phase 1 for
// bounded instance ranges, tallies 1B replies, re-proposes values found in
// earlier rounds, and writes the sequencer's registers.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "swpaxos/pipeline.hpp"
#include "swpaxos/wire.hpp"

namespace swpaxos {

inline constexpr std::uint16_t kMaxCoordinators = 16;
inline constexpr std::uint16_t kMaxEpoch = 0xffff / kMaxCoordinators;
inline constexpr std::uint32_t kDefaultSweepSpan = 256;

// Round owned by `rank` in a given epoch. Epochs start at 1 so round 0 is
// never issued by a coordinator.
constexpr std::uint16_t coordinator_round(std::uint16_t epoch, std::uint16_t rank) {
  return static_cast<std::uint16_t>(epoch * kMaxCoordinators + rank);
}

// ---------------------------------------------------------------------------

class SequencerProgram {
 public:
  SequencerProgram(GroupId acceptor_group, AuditLog* audit = nullptr)
      : acceptor_group_(acceptor_group),
        reg_inst_("reg_inst", 1, 32),
        reg_rnd_("reg_rnd", 1, 16),
        reg_window_hi_("reg_window_hi", 1, 32),
        tbl_sequence_("tbl_sequence", audit),
        audit_(audit) {
    tbl_sequence_.add_entry(MsgType::kPhase2A, "handle_2a", &handle_2a);
  }

  PipelineOutcome process(const PaxosMessage& msg) {
    Context ctx{msg, *this};
    auto out = tbl_sequence_.apply(ctx);
    PipelineOutcome result = out ? *out : PipelineOutcome::drop(DropReason::kNoMatch);
    stats_.count(result);
    return result;
  }

  // Runtime register writes from the control plane.
  void set_next_instance(std::uint32_t v) { cp_write(reg_inst_, v); }
  void set_round(std::uint16_t v) { cp_write(reg_rnd_, v); }
  void set_window_hi(std::uint32_t v) { cp_write(reg_window_hi_, v); }

  std::uint32_t next_instance() const { return *reg_inst_.peek(0); }
  std::uint16_t round() const { return *reg_rnd_.peek(0); }
  std::uint32_t window_hi() const { return *reg_window_hi_.peek(0); }
  const PipelineStats& stats() const { return stats_; }
  std::string counters() const { return format_table_counters(tbl_sequence_); }

 private:
  struct Context {
    PaxosMessage hdr;
    SequencerProgram& self;
  };

  template <typename Cell>
  void cp_write(Register<Cell>& reg, Cell v) {
    (void)reg.write(ActionScope::control_plane(audit_), 0, v);
  }

  static ActionResult handle_2a(Context& ctx, const ActionScope& scope) {
    SequencerProgram& s = ctx.self;
    auto inst = s.reg_inst_.read(scope, 0);
    if (!inst) return drop_for(inst.error());
    auto hi = s.reg_window_hi_.read(scope, 0);
    if (!hi) return drop_for(hi.error());
    if (*inst >= *hi) return PipelineOutcome::drop(DropReason::kOutOfRange);
    auto rnd = s.reg_rnd_.read(scope, 0);
    if (!rnd) return drop_for(rnd.error());
    PaxosMessage& h = ctx.hdr;
    h.msgtype = MsgType::kPhase2A;
    h.inst = *inst;
    h.rnd = *rnd;
    h.vrnd = 0;
    h.acpt = 0;
    if (auto st = s.reg_inst_.write(scope, 0, *inst + 1); !st) return drop_for(st.error());
    return PipelineOutcome::forward(h, s.acceptor_group_);
  }

  GroupId acceptor_group_;
  Register<std::uint32_t> reg_inst_;
  Register<std::uint16_t> reg_rnd_;
  Register<std::uint32_t> reg_window_hi_;
  Table<Context> tbl_sequence_;
  AuditLog* audit_;
  PipelineStats stats_;
};

// ---------------------------------------------------------------------------

enum class SweepError {
  kBadRange,      // lo >= hi
  kBeyondWindow,  // hi > instance window
  kStaleRound,    // new round not above the current one
};

inline constexpr std::string_view to_string(SweepError e) {
  switch (e) {
    case SweepError::kBadRange: return "BadRange";
    case SweepError::kBeyondWindow: return "BeyondWindow";
    case SweepError::kStaleRound: return "StaleRound";
  }
  return "?";
}

// Outcome of Phase 1 for one instance once a quorum of 1Bs is in.
struct InstanceRecovery {
  std::uint32_t inst = 0;
  std::uint16_t rnd = 0;  // round Phase 1 completed in
  bool open = true;       // no acceptor in the quorum reported a vote
  std::uint16_t vrnd = 0;
  Value value{};          // value bound to the instance when !open

  bool operator==(const InstanceRecovery&) const = default;
};

// A 1B reports a vote when it carries a nonzero round or a nonzero value.
inline bool reports_vote(const PaxosMessage& m) {
  return m.vrnd != 0 || !is_zero(m.value);
}

class Phase1Driver {
 public:
  Phase1Driver(std::uint16_t f, std::uint32_t instance_window)
      : quorum_(static_cast<std::size_t>(f) + 1), window_(instance_window) {}

  // 1A messages for every instance in [lo, hi) at round new_rnd. Replaces any
  // sweep in progress.
  Result<std::vector<PaxosMessage>, SweepError> phase1_sweep(std::uint32_t lo, std::uint32_t hi,
                                                             std::uint16_t new_rnd) {
    if (lo >= hi) return unexpected(SweepError::kBadRange);
    if (hi > window_) return unexpected(SweepError::kBeyondWindow);
    if (new_rnd <= crnd_) return unexpected(SweepError::kStaleRound);
    crnd_ = new_rnd;
    lo_ = lo;
    hi_ = hi;
    active_ = true;
    tallies_.assign(hi - lo, Tally{});
    remaining_ = hi - lo;
    frontier_ = lo;
    progress_ = false;
    return pending_1a();
  }

  std::optional<InstanceRecovery> phase1_on_1b(const PaxosMessage& msg) {
    if (msg.msgtype != MsgType::kPhase1B || !active_ || msg.rnd != crnd_) {
      ++stale_;
      return std::nullopt;
    }
    if (msg.inst < lo_ || msg.inst >= hi_) {
      ++stale_;
      return std::nullopt;
    }
    Tally& t = tallies_[msg.inst - lo_];
    if (t.complete || t.promises.count(msg.acpt) != 0) {
      ++duplicates_;
      return std::nullopt;
    }
    t.promises.emplace(msg.acpt, msg);
    progress_ = true;
    if (t.promises.size() < quorum_) return std::nullopt;

    t.complete = true;
    --remaining_;
    while (frontier_ < hi_ && tallies_[frontier_ - lo_].complete) ++frontier_;

    InstanceRecovery r;
    r.inst = msg.inst;
    r.rnd = crnd_;
    for (const auto& [acpt, p] : t.promises) {
      if (!reports_vote(p)) continue;
      if (r.open || p.vrnd > r.vrnd) {
        r.open = false;
        r.vrnd = p.vrnd;
        r.value = p.value;
      }
    }
    t.promises.clear();
    return r;
  }

  // 1As for instances whose Phase 1 is still incomplete.
  std::vector<PaxosMessage> pending_1a() const {
    std::vector<PaxosMessage> out;
    if (!active_) return out;
    for (std::uint32_t i = lo_; i < hi_; ++i) {
      if (tallies_[i - lo_].complete) continue;
      PaxosMessage m;
      m.msgtype = MsgType::kPhase1A;
      m.inst = i;
      m.rnd = crnd_;
      out.push_back(m);
    }
    return out;
  }

  bool sweep_active() const { return active_; }
  bool sweep_complete() const { return active_ && remaining_ == 0; }
  std::uint16_t crnd() const { return crnd_; }
  std::uint32_t lo() const { return lo_; }
  std::uint32_t hi() const { return hi_; }
  // End of the contiguous run of completed instances starting at lo.
  std::uint32_t frontier() const { return frontier_; }
  std::size_t quorum() const { return quorum_; }
  std::uint64_t stale_1b() const { return stale_; }
  std::uint64_t duplicate_1b() const { return duplicates_; }

  // Whether any new promise arrived since the last call.
  bool take_progress() {
    bool p = progress_;
    progress_ = false;
    return p;
  }

  void finish() { active_ = false; }

 private:
  struct Tally {
    std::map<std::uint16_t, PaxosMessage> promises;
    bool complete = false;
  };

  std::size_t quorum_;
  std::uint32_t window_;
  std::uint16_t crnd_ = 0;
  bool active_ = false;
  std::uint32_t lo_ = 0;
  std::uint32_t hi_ = 0;
  std::uint32_t frontier_ = 0;
  std::uint32_t remaining_ = 0;
  bool progress_ = false;
  std::vector<Tally> tallies_;
  std::uint64_t stale_ = 0;
  std::uint64_t duplicates_ = 0;
};

// ---------------------------------------------------------------------------

struct CoordinatorConfig {
  std::uint16_t rank = 0;
  std::uint16_t f = 1;
  std::uint32_t instance_window = kDefaultInstanceWindow;
  std::uint32_t sweep_span = kDefaultSweepSpan;
  GroupId acceptor_group = 0;
};

enum class CoordinatorMode { kStandby, kRecovering, kActive };

inline constexpr std::string_view to_string(CoordinatorMode m) {
  switch (m) {
    case CoordinatorMode::kStandby: return "standby";
    case CoordinatorMode::kRecovering: return "recovering";
    case CoordinatorMode::kActive: return "active";
  }
  return "?";
}

// Lifecycle:
//   standby --activate--> recovering --recovery sweep done--> active
//   active --refresh finds a vote / sweep stalls--> recovering
//
// Recovery sweeps [0, span), then further spans while the highest instance
// holding a vote sits in the top eighth of the swept range. Bound instances
// are re-proposed as soon as their quorum is in; open instances below the
// new starting instance are filled with the all-zero no-op value.
class Coordinator {
 public:
  explicit Coordinator(CoordinatorConfig cfg, AuditLog* audit = nullptr)
      : cfg_(cfg), seq_(cfg.acceptor_group, audit), driver_(cfg.f, cfg.instance_window) {}

  struct Reaction {
    std::optional<PipelineOutcome> pipeline;  // set when the packet went through tbl_sequence
    std::vector<Forward> control;             // control-plane emissions
  };

  // Takes over coordination (initial election or failover).
  std::vector<Forward> activate() { return start_recovery(); }

  Reaction on_message(const PaxosMessage& msg) {
    Reaction r;
    if (msg.msgtype == MsgType::kPhase1B) {
      r.control = on_1b(msg);
      return r;
    }
    PipelineOutcome out = seq_.process(msg);
    r.pipeline = out;
    if (mode_ == CoordinatorMode::kActive) r.control = maybe_refresh();
    return r;
  }

  std::vector<Forward> on_1b(const PaxosMessage& msg) {
    std::vector<Forward> out;
    if (mode_ == CoordinatorMode::kStandby) return out;
    auto rec = driver_.phase1_on_1b(msg);
    if (!rec) return out;
    if (!rec->open) {
      out.push_back(propose(rec->inst, rec->rnd, rec->value));
      if (mode_ == CoordinatorMode::kRecovering) {
        highest_voted_ = std::max(highest_voted_.value_or(0), rec->inst);
      } else {
        // A vote beyond our window: someone else sequenced here.
        ++escalations_;
        append(out, start_recovery());
        return out;
      }
    } else if (mode_ == CoordinatorMode::kRecovering) {
      open_.insert(rec->inst);
    }

    if (mode_ == CoordinatorMode::kActive) {
      if (driver_.frontier() > seq_.window_hi()) {
        seq_.set_round(driver_.crnd());
        seq_.set_window_hi(driver_.frontier());
      }
      if (driver_.sweep_complete()) driver_.finish();
    } else if (driver_.sweep_complete()) {
      append(out, finish_recovery_sweep());
    }
    return out;
  }

  // Periodic while a sweep is in progress: resend 1As when promises are still
  // arriving, otherwise assume the round is stale and start over higher.
  std::vector<Forward> on_sweep_timer() {
    if (!sweep_in_progress()) return {};
    if (driver_.take_progress()) return to_acceptors(driver_.pending_1a());
    ++stalls_;
    if (mode_ == CoordinatorMode::kRecovering) return start_recovery();
    return start_sweep(seq_.window_hi(), refresh_end(seq_.window_hi()));
  }

  bool sweep_in_progress() const {
    return mode_ != CoordinatorMode::kStandby && driver_.sweep_active() &&
           !driver_.sweep_complete();
  }

  CoordinatorMode mode() const { return mode_; }
  std::uint16_t crnd() const { return driver_.crnd(); }
  std::uint32_t next_instance() const { return seq_.next_instance(); }
  std::uint32_t window_hi() const { return seq_.window_hi(); }
  std::uint64_t escalations() const { return escalations_; }
  std::uint64_t stalls() const { return stalls_; }
  const SequencerProgram& sequencer() const { return seq_; }
  const Phase1Driver& driver() const { return driver_; }
  const CoordinatorConfig& config() const { return cfg_; }

 private:
  static void append(std::vector<Forward>& out, std::vector<Forward> more) {
    out.insert(out.end(), std::make_move_iterator(more.begin()),
               std::make_move_iterator(more.end()));
  }

  std::vector<Forward> to_acceptors(const std::vector<PaxosMessage>& msgs) const {
    std::vector<Forward> out;
    out.reserve(msgs.size());
    for (const auto& m : msgs) out.push_back(Forward{m, cfg_.acceptor_group});
    return out;
  }

  Forward propose(std::uint32_t inst, std::uint16_t rnd, const Value& value) const {
    PaxosMessage m;
    m.msgtype = MsgType::kPhase2A;
    m.inst = inst;
    m.rnd = rnd;
    m.value = value;
    return Forward{m, cfg_.acceptor_group};
  }

  std::uint32_t refresh_end(std::uint32_t lo) const {
    std::uint64_t end = std::uint64_t{lo} + cfg_.sweep_span;
    return static_cast<std::uint32_t>(std::min<std::uint64_t>(end, cfg_.instance_window));
  }

  // Bumps the epoch and sweeps [lo, hi) with the new round.
  std::vector<Forward> start_sweep(std::uint32_t lo, std::uint32_t hi) {
    if (lo >= hi || epoch_ >= kMaxEpoch) {
      driver_.finish();
      return {};
    }
    ++epoch_;
    auto msgs = driver_.phase1_sweep(lo, hi, coordinator_round(epoch_, cfg_.rank));
    if (!msgs) {
      driver_.finish();
      return {};
    }
    driver_.take_progress();
    return to_acceptors(*msgs);
  }

  std::vector<Forward> start_recovery() {
    mode_ = CoordinatorMode::kRecovering;
    floor_ = seq_.next_instance();
    seq_.set_window_hi(floor_);
    highest_voted_.reset();
    open_.clear();
    return start_sweep(0, refresh_end(0));
  }

  std::vector<Forward> finish_recovery_sweep() {
    std::uint32_t hi = driver_.hi();
    std::uint32_t start = floor_;
    if (highest_voted_) start = std::max(start, *highest_voted_ + 1);
    driver_.finish();
    if (hi < cfg_.instance_window && std::uint64_t{start} * 8 >= std::uint64_t{hi} * 7) {
      return start_sweep(hi, refresh_end(hi));
    }
    std::vector<Forward> out;
    for (std::uint32_t inst : open_) {
      if (inst < start) out.push_back(propose(inst, driver_.crnd(), Value{}));
    }
    open_.clear();
    seq_.set_next_instance(start);
    seq_.set_round(driver_.crnd());
    seq_.set_window_hi(hi);
    mode_ = CoordinatorMode::kActive;
    return out;
  }

  std::vector<Forward> maybe_refresh() {
    if (driver_.sweep_active()) return {};
    std::uint32_t hi = seq_.window_hi();
    if (hi >= cfg_.instance_window) return {};
    if (std::uint64_t{seq_.next_instance()} * 8 < std::uint64_t{hi} * 7) return {};
    return start_sweep(hi, refresh_end(hi));
  }

  CoordinatorConfig cfg_;
  SequencerProgram seq_;
  Phase1Driver driver_;
  CoordinatorMode mode_ = CoordinatorMode::kStandby;
  std::uint16_t epoch_ = 0;
  std::uint32_t floor_ = 0;
  std::optional<std::uint32_t> highest_voted_;
  std::set<std::uint32_t> open_;
  std::uint64_t escalations_ = 0;
  std::uint64_t stalls_ = 0;
};

}  // namespace swpaxos

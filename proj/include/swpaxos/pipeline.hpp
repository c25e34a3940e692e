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

// Match-action execution model for the switch programs.
//
// Registers can only be touched through an ActionScope, and the only ways to
// obtain one are Table::apply (data plane) and ActionScope::control_plane
// (runtime register writes). Every access outside a register's bounds is
// refused and the packet is dropped with OutOfRange; there is no unchecked
// mode.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "swpaxos/result.hpp"
#include "swpaxos/wire.hpp"

namespace swpaxos {

using GroupId = std::uint16_t;
using SimTime = std::uint64_t;  // simulated microseconds

inline constexpr std::uint32_t kDefaultInstanceWindow = 16384;

enum class DropReason : std::uint8_t {
  kParseError,
  kStaleRound,
  kOutOfRange,
  kNoMatch,
};

inline constexpr std::size_t kNumDropReasons = 4;

inline constexpr std::string_view to_string(DropReason r) {
  switch (r) {
    case DropReason::kParseError: return "ParseError";
    case DropReason::kStaleRound: return "StaleRound";
    case DropReason::kOutOfRange: return "OutOfRange";
    case DropReason::kNoMatch: return "NoMatch";
  }
  return "?";
}

struct Forward {
  PaxosMessage msg;
  GroupId group = 0;

  bool operator==(const Forward&) const = default;
};

struct Drop {
  DropReason reason = DropReason::kNoMatch;

  bool operator==(const Drop&) const = default;
};

struct PipelineOutcome {
  std::variant<Forward, Drop> verdict;

  static PipelineOutcome forward(PaxosMessage msg, GroupId group) {
    return PipelineOutcome{Forward{std::move(msg), group}};
  }
  static PipelineOutcome drop(DropReason reason) {
    return PipelineOutcome{Drop{reason}};
  }

  bool is_forward() const { return std::holds_alternative<Forward>(verdict); }
  bool is_drop() const { return std::holds_alternative<Drop>(verdict); }
  const Forward& forwarded() const { return std::get<Forward>(verdict); }
  DropReason drop_reason() const { return std::get<Drop>(verdict).reason; }

  bool operator==(const PipelineOutcome&) const = default;
};

// ---------------------------------------------------------------------------
// Audit of register accesses, attributed to the table/action that made them.

struct RegisterAccess {
  std::string reg;
  std::size_t index = 0;
  bool write = false;
  bool refused = false;  // out of range
  std::string table;
  std::string action;
};

struct AuditLog {
  std::vector<RegisterAccess> entries;
};

inline constexpr std::string_view kControlPlaneTable = "<control-plane>";

class ActionScope {
 public:
  static ActionScope control_plane(AuditLog* audit = nullptr) {
    return ActionScope(kControlPlaneTable, "runtime_write", audit);
  }

  std::string_view table() const { return table_; }
  std::string_view action() const { return action_; }

  void record(std::string_view reg, std::size_t idx, bool write, bool refused) const {
    if (audit_ == nullptr) return;
    audit_->entries.push_back(RegisterAccess{std::string(reg), idx, write, refused,
                                             std::string(table_), std::string(action_)});
  }

 private:
  template <typename Context>
  friend class Table;

  ActionScope(std::string_view table, std::string_view action, AuditLog* audit)
      : table_(table), action_(action), audit_(audit) {}

  std::string_view table_;
  std::string_view action_;
  AuditLog* audit_;
};

// ---------------------------------------------------------------------------
// Registers

enum class RegisterError { kOutOfRange };

template <typename Cell>
class Register {
 public:
  static constexpr unsigned kNativeWidth =
      std::is_integral_v<Cell> ? std::numeric_limits<Cell>::digits
                               : static_cast<unsigned>(sizeof(Cell) * 8);

  Register(std::string name, std::size_t num_cells, unsigned cell_width = kNativeWidth)
      : name_(std::move(name)), width_(cell_width), cells_(num_cells) {
    if (cell_width == 0 || cell_width > kNativeWidth) {
      throw std::invalid_argument("register " + name_ + ": bad cell width");
    }
  }

  const std::string& name() const { return name_; }
  std::size_t size() const { return cells_.size(); }
  unsigned cell_width() const { return width_; }

  Result<Cell, RegisterError> read(const ActionScope& scope, std::size_t idx) const {
    bool in_range = idx < cells_.size();
    scope.record(name_, idx, false, !in_range);
    if (!in_range) return unexpected(RegisterError::kOutOfRange);
    return cells_[idx];
  }

  Status<RegisterError> write(const ActionScope& scope, std::size_t idx, const Cell& v) {
    if (!fits(v)) {
      throw std::invalid_argument("register " + name_ + ": value exceeds cell width");
    }
    bool in_range = idx < cells_.size();
    scope.record(name_, idx, true, !in_range);
    if (!in_range) return unexpected(RegisterError::kOutOfRange);
    cells_[idx] = v;
    return {};
  }

  // Unscoped inspection for snapshots and tests; never mutates.
  std::optional<Cell> peek(std::size_t idx) const {
    if (idx >= cells_.size()) return std::nullopt;
    return cells_[idx];
  }

  bool operator==(const Register& o) const {
    return name_ == o.name_ && width_ == o.width_ && cells_ == o.cells_;
  }

 private:
  bool fits(const Cell& v) const {
    if constexpr (std::is_integral_v<Cell>) {
      if (width_ >= kNativeWidth) return true;
      return static_cast<std::uint64_t>(v) < (std::uint64_t{1} << width_);
    } else {
      return true;
    }
  }

  std::string name_;
  unsigned width_;
  std::vector<Cell> cells_;
};

// ---------------------------------------------------------------------------
// Tables

// Either a final verdict for the packet, or nullopt to hand control back to
// the control block.
using ActionResult = std::optional<PipelineOutcome>;

inline ActionResult continue_control() { return std::nullopt; }

inline PipelineOutcome drop_for(RegisterError) {
  return PipelineOutcome::drop(DropReason::kOutOfRange);
}

// Exact match on msgtype. Context must expose a `hdr` PaxosMessage member.
// Actions receive all state through the context, so tables stay copyable.
template <typename Context>
class Table {
 public:
  using Action = std::function<ActionResult(Context&, const ActionScope&)>;

  explicit Table(std::string name, AuditLog* audit = nullptr)
      : name_(std::move(name)), audit_(audit) {
    default_name_ = "_drop";
    default_action_ = [](Context&, const ActionScope&) -> ActionResult {
      return PipelineOutcome::drop(DropReason::kNoMatch);
    };
  }

  void add_entry(MsgType key, std::string action_name, Action action) {
    entries_[key] = Entry{std::move(action_name), std::move(action)};
  }

  void set_default(std::string action_name, Action action) {
    default_name_ = std::move(action_name);
    default_action_ = std::move(action);
  }

  // Runs exactly one action: the one bound to the header's msgtype, or the
  // default action.
  ActionResult apply(Context& ctx) {
    auto it = entries_.find(ctx.hdr.msgtype);
    if (it == entries_.end()) {
      ++misses_;
      ++action_hits_[default_name_];
      ActionScope scope(name_, default_name_, audit_);
      return default_action_(ctx, scope);
    }
    ++hits_;
    ++action_hits_[it->second.name];
    ActionScope scope(name_, it->second.name, audit_);
    return it->second.action(ctx, scope);
  }

  const std::string& name() const { return name_; }
  std::uint64_t hits() const { return hits_; }
  std::uint64_t misses() const { return misses_; }
  const std::map<std::string, std::uint64_t>& action_hits() const { return action_hits_; }

  void reset_counters() {
    hits_ = misses_ = 0;
    action_hits_.clear();
  }

 private:
  struct Entry {
    std::string name;
    Action action;
  };

  std::string name_;
  AuditLog* audit_;
  std::map<MsgType, Entry> entries_;
  std::string default_name_;
  Action default_action_;
  std::uint64_t hits_ = 0;
  std::uint64_t misses_ = 0;
  std::map<std::string, std::uint64_t> action_hits_;
};

// Per-switch counters exported in the trace.
struct PipelineStats {
  std::array<std::uint64_t, kNumDropReasons> drops{};
  std::uint64_t forwarded = 0;

  void count(const PipelineOutcome& out) {
    if (out.is_forward()) {
      ++forwarded;
    } else {
      ++drops[static_cast<std::size_t>(out.drop_reason())];
    }
  }

  std::uint64_t dropped(DropReason r) const { return drops[static_cast<std::size_t>(r)]; }
};

template <typename Context>
std::string format_table_counters(const Table<Context>& t) {
  std::string s;
  for (const auto& [action, n] : t.action_hits()) {
    if (!s.empty()) s += ',';
    s += t.name() + '.' + action + '=' + std::to_string(n);
  }
  return s;
}

}  // namespace swpaxos

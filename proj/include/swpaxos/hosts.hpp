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

// Host-side libraries: the proposer's submit/retransmit loop and the
// learner's 2B quorum matrix with in-order delivery.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "swpaxos/pipeline.hpp"
#include "swpaxos/result.hpp"
#include "swpaxos/wire.hpp"

namespace swpaxos {

using RequestId = std::uint64_t;

inline constexpr SimTime kDefaultRetransmitTimeout = 50'000;
inline constexpr std::uint32_t kDefaultMaxRetries = 10;

struct ProposerConfig {
  std::uint16_t client_id = 0;
  SimTime retransmit_timeout = kDefaultRetransmitTimeout;
  std::uint32_t max_retries = kDefaultMaxRetries;
  GroupId coordinator_group = 0;
};

class Proposer {
 public:
  struct Pending {
    Value value{};
    SimTime submitted = 0;
    SimTime last_sent = 0;
    std::uint32_t retries = 0;
  };

  struct Submission {
    RequestId id = 0;
    Forward out;
  };

  struct TimerResult {
    std::vector<std::pair<RequestId, Forward>> resent;
    std::vector<std::pair<RequestId, Pending>> failed;
  };

  explicit Proposer(ProposerConfig cfg) : cfg_(cfg) {}

  // Builds the 2A for the coordinator group. The coordinator overwrites inst
  // and rnd, so both go out as zero.
  Result<Submission, ValueError> submit(std::span<const Byte> payload, SimTime now) {
    auto value = make_value(payload);
    if (!value) return unexpected(value.error());
    RequestId id = (RequestId{cfg_.client_id} << 48) | next_seq_++;
    pending_.emplace(id, Pending{*value, now, now, 0});
    return Submission{id, Forward{request_2a(*value), cfg_.coordinator_group}};
  }

  Result<Submission, ValueError> submit(std::string_view payload, SimTime now) {
    return submit(std::span<const Byte>(reinterpret_cast<const Byte*>(payload.data()),
                                        payload.size()),
                  now);
  }

  TimerResult on_timer(SimTime now) {
    TimerResult r;
    for (auto it = pending_.begin(); it != pending_.end();) {
      Pending& p = it->second;
      if (now < p.last_sent + cfg_.retransmit_timeout) {
        ++it;
        continue;
      }
      if (p.retries >= cfg_.max_retries) {
        r.failed.emplace_back(it->first, p);
        it = pending_.erase(it);
        continue;
      }
      ++p.retries;
      p.last_sent = now;
      r.resent.emplace_back(it->first, Forward{request_2a(p.value), cfg_.coordinator_group});
      ++it;
    }
    return r;
  }

  // Responses are matched to requests by value bytes; the oldest pending
  // request with that value completes.
  std::optional<RequestId> on_response(const LearnerResponse& resp) {
    for (auto it = pending_.begin(); it != pending_.end(); ++it) {
      if (it->second.value == resp.value) {
        RequestId id = it->first;
        pending_.erase(it);
        return id;
      }
    }
    return std::nullopt;
  }

  // Earliest time a pending request becomes due, if any.
  std::optional<SimTime> next_deadline() const {
    std::optional<SimTime> t;
    for (const auto& [id, p] : pending_) {
      SimTime due = p.last_sent + cfg_.retransmit_timeout;
      if (!t || due < *t) t = due;
    }
    return t;
  }

  const std::map<RequestId, Pending>& pending() const { return pending_; }
  const ProposerConfig& config() const { return cfg_; }

 private:
  static PaxosMessage request_2a(const Value& value) {
    PaxosMessage m;
    m.msgtype = MsgType::kPhase2A;
    m.value = value;
    return m;
  }

  ProposerConfig cfg_;
  std::uint64_t next_seq_ = 0;
  std::map<RequestId, Pending> pending_;
};

// ---------------------------------------------------------------------------

enum class LearnerError {
  kConflictDetected,  // a second quorum disagrees with a decided value
  kNotPhase2B,
};

struct Decision {
  std::uint32_t inst = 0;
  std::uint16_t rnd = 0;
  Value value{};

  bool operator==(const Decision&) const = default;
};

struct Delivery {
  std::uint32_t inst = 0;
  Value value{};

  bool operator==(const Delivery&) const = default;
};

// votes[inst][acpt] holds the latest (rnd, value) seen from that acceptor.
class LearnerMatrix {
 public:
  struct Vote {
    std::uint16_t rnd = 0;
    Value value{};

    bool operator==(const Vote&) const = default;
  };

  explicit LearnerMatrix(std::uint16_t f) : f_(f) {}

  std::size_t quorum_size() const { return static_cast<std::size_t>(f_) + 1; }

  Result<std::optional<Decision>, LearnerError> on_2b(const PaxosMessage& msg) {
    if (msg.msgtype != MsgType::kPhase2B) return unexpected(LearnerError::kNotPhase2B);
    auto& row = votes_[msg.inst];
    Vote incoming{msg.rnd, msg.value};
    auto it = row.find(msg.acpt);
    if (it == row.end()) {
      row.emplace(msg.acpt, incoming);
    } else if (msg.rnd >= it->second.rnd) {
      it->second = incoming;
    } else {
      return std::optional<Decision>{};
    }

    std::size_t agree = 0;
    for (const auto& [acpt, v] : row) {
      if (v == incoming) ++agree;
    }
    if (agree < quorum_size()) return std::optional<Decision>{};

    auto d = decided_.find(msg.inst);
    if (d != decided_.end()) {
      if (d->second != msg.value) return unexpected(LearnerError::kConflictDetected);
      return std::optional<Decision>{};
    }
    decided_.emplace(msg.inst, msg.value);
    return std::optional<Decision>{Decision{msg.inst, msg.rnd, msg.value}};
  }

  std::optional<Value> decided(std::uint32_t inst) const {
    auto it = decided_.find(inst);
    if (it == decided_.end()) return std::nullopt;
    return it->second;
  }

  const std::map<std::uint32_t, Value>& decisions() const { return decided_; }
  const std::map<std::uint32_t, std::map<std::uint16_t, Vote>>& votes() const { return votes_; }

 private:
  std::uint16_t f_;
  std::map<std::uint32_t, std::map<std::uint16_t, Vote>> votes_;
  std::map<std::uint32_t, Value> decided_;
};

struct LearnerConfig {
  std::uint16_t f = 1;
  GroupId proposer_group = 0;
};

class Learner {
 public:
  struct Response {
    LearnerResponse body;
    GroupId group = 0;
  };

  struct Respond {
    Response response;
    std::vector<Delivery> delivered;  // appended to the log, in instance order
  };

  explicit Learner(LearnerConfig cfg) : cfg_(cfg), matrix_(cfg.f) {}

  Result<std::optional<Decision>, LearnerError> on_2b(const PaxosMessage& msg) {
    return matrix_.on_2b(msg);
  }

  // Answers the proposers right away and executes in instance order; values
  // decided past a gap wait in the hold-back queue.
  Respond learner_respond(std::uint32_t inst, const Value& value) {
    Respond r;
    r.response = Response{LearnerResponse{inst, value}, cfg_.proposer_group};
    if (inst >= next_ && held_.count(inst) == 0) held_.emplace(inst, value);
    for (auto it = held_.find(next_); it != held_.end(); it = held_.find(next_)) {
      log_.push_back(Delivery{it->first, it->second});
      r.delivered.push_back(log_.back());
      held_.erase(it);
      ++next_;
    }
    return r;
  }

  const std::vector<Delivery>& log() const { return log_; }
  const std::map<std::uint32_t, Value>& held_back() const { return held_; }
  const LearnerMatrix& matrix() const { return matrix_; }
  const LearnerConfig& config() const { return cfg_; }

 private:
  LearnerConfig cfg_;
  LearnerMatrix matrix_;
  std::uint32_t next_ = 0;
  std::map<std::uint32_t, Value> held_;
  std::vector<Delivery> log_;
};

}  // namespace swpaxos

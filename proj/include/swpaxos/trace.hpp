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

// Simulation trace: one record per observable event, serialized as
// JSON lines. Record ids are positions in the trace and are what checker
// counterexamples cite.

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "swpaxos/pipeline.hpp"
#include "swpaxos/wire.hpp"

namespace swpaxos {

enum class TraceKind : std::uint8_t {
  kSubmit,      // proposer sent a request (first send or retransmission)
  kEmit,        // node multicast a packet
  kRecv,        // packet delivered to a node
  kDrop,        // packet lost in the network or dropped by a pipeline
  kBypass,      // non-Paxos UDP packet skipped the Paxos tables
  kDecide,      // learner reached a quorum
  kDeliver,     // learner appended to its delivered log
  kComplete,    // proposer matched a response to a request
  kFail,        // proposer gave up on a request
  kFault,       // fault command applied
  kConflict,    // learner saw a quorum contradict a decision
  kSnapshot,    // coordinator register snapshot
  kStats,       // pipeline counters
};

inline constexpr std::string_view to_string(TraceKind k) {
  switch (k) {
    case TraceKind::kSubmit: return "submit";
    case TraceKind::kEmit: return "emit";
    case TraceKind::kRecv: return "recv";
    case TraceKind::kDrop: return "drop";
    case TraceKind::kBypass: return "bypass";
    case TraceKind::kDecide: return "decide";
    case TraceKind::kDeliver: return "deliver";
    case TraceKind::kComplete: return "complete";
    case TraceKind::kFail: return "fail";
    case TraceKind::kFault: return "fault";
    case TraceKind::kConflict: return "conflict";
    case TraceKind::kSnapshot: return "snapshot";
    case TraceKind::kStats: return "stats";
  }
  return "?";
}

inline std::optional<TraceKind> trace_kind_from_string(std::string_view s) {
  for (int k = 0; k <= static_cast<int>(TraceKind::kStats); ++k) {
    if (to_string(static_cast<TraceKind>(k)) == s) return static_cast<TraceKind>(k);
  }
  return std::nullopt;
}

struct TraceRecord {
  std::uint64_t id = 0;
  SimTime time = 0;
  std::string node;
  TraceKind kind = TraceKind::kEmit;
  std::optional<PaxosMessage> msg;   // decoded header, or inst/rnd/value for decide/deliver
  std::optional<GroupId> group;      // multicast destination
  std::optional<std::uint64_t> ref;  // emit record a recv/drop refers to
  std::optional<std::uint16_t> port; // UDP port for non-Paxos packets
  std::string reason;                // drop reason, fault command, ...
  std::string detail;

  bool operator==(const TraceRecord&) const = default;
};

inline nlohmann::ordered_json to_json(const TraceRecord& r) {
  nlohmann::ordered_json j;
  j["id"] = r.id;
  j["t"] = r.time;
  j["node"] = r.node;
  j["kind"] = to_string(r.kind);
  if (r.msg) {
    j["msgtype"] = to_string(r.msg->msgtype);
    j["inst"] = r.msg->inst;
    j["rnd"] = r.msg->rnd;
    j["vrnd"] = r.msg->vrnd;
    j["acpt"] = r.msg->acpt;
    j["value"] = to_hex(r.msg->value);
  }
  if (r.group) j["group"] = *r.group;
  if (r.ref) j["ref"] = *r.ref;
  if (r.port) j["port"] = *r.port;
  if (!r.reason.empty()) j["reason"] = r.reason;
  if (!r.detail.empty()) j["detail"] = r.detail;
  return j;
}

inline std::optional<TraceRecord> trace_record_from_json(const nlohmann::json& j) {
  try {
    TraceRecord r;
    r.id = j.at("id").get<std::uint64_t>();
    r.time = j.at("t").get<SimTime>();
    r.node = j.at("node").get<std::string>();
    auto kind = trace_kind_from_string(j.at("kind").get<std::string>());
    if (!kind) return std::nullopt;
    r.kind = *kind;
    if (j.contains("msgtype")) {
      PaxosMessage m;
      std::string t = j.at("msgtype").get<std::string>();
      if (t == "1A") m.msgtype = MsgType::kPhase1A;
      else if (t == "1B") m.msgtype = MsgType::kPhase1B;
      else if (t == "2A") m.msgtype = MsgType::kPhase2A;
      else if (t == "2B") m.msgtype = MsgType::kPhase2B;
      else return std::nullopt;
      m.inst = j.at("inst").get<std::uint32_t>();
      m.rnd = j.at("rnd").get<std::uint16_t>();
      m.vrnd = j.at("vrnd").get<std::uint16_t>();
      m.acpt = j.at("acpt").get<std::uint16_t>();
      Bytes v = from_hex(j.at("value").get<std::string>());
      if (v.size() != kValueSize) return std::nullopt;
      std::copy(v.begin(), v.end(), m.value.begin());
      r.msg = m;
    }
    if (j.contains("group")) r.group = j.at("group").get<GroupId>();
    if (j.contains("ref")) r.ref = j.at("ref").get<std::uint64_t>();
    if (j.contains("port")) r.port = j.at("port").get<std::uint16_t>();
    if (j.contains("reason")) r.reason = j.at("reason").get<std::string>();
    if (j.contains("detail")) r.detail = j.at("detail").get<std::string>();
    return r;
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
}

class Trace {
 public:
  std::uint64_t append(TraceRecord r) {
    r.id = records_.size();
    records_.push_back(std::move(r));
    return records_.back().id;
  }

  const std::vector<TraceRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const TraceRecord& operator[](std::size_t i) const { return records_[i]; }

  void write_jsonl(std::ostream& os) const {
    for (const auto& r : records_) os << to_json(r).dump() << '\n';
  }

  std::string to_jsonl() const {
    std::ostringstream os;
    write_jsonl(os);
    return os.str();
  }

  // Lines that fail to parse are skipped; ids are reassigned by position.
  static Trace read_jsonl(std::istream& is) {
    Trace t;
    std::string line;
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      auto j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded()) continue;
      if (auto r = trace_record_from_json(j)) t.append(std::move(*r));
    }
    return t;
  }

 private:
  std::vector<TraceRecord> records_;
};

}  // namespace swpaxos

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

// Exhaustive comparison of the acceptor pipeline against ReferenceAcceptor
// over every message sequence up to a given length, for one instance.

#include <cstdint>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "swpaxos/acceptor.hpp"

namespace oracle {

struct ExhaustiveResult {
  std::uint64_t sequences = 0;  // sequences checked (all prefixes included)
  std::uint64_t mismatches = 0;
  std::string first_mismatch;
};

// Letters: 1A at rounds 0..max_round, 2A at rounds 0..max_round with value
// "a" or "b".
inline std::vector<swpaxos::PaxosMessage> acceptor_alphabet(std::uint16_t max_round) {
  std::vector<swpaxos::PaxosMessage> out;
  for (std::uint16_t r = 0; r <= max_round; ++r) {
    swpaxos::PaxosMessage m;
    m.msgtype = swpaxos::MsgType::kPhase1A;
    m.rnd = r;
    out.push_back(m);
  }
  for (std::uint16_t r = 0; r <= max_round; ++r) {
    for (const char* v : {"a", "b"}) {
      swpaxos::PaxosMessage m;
      m.msgtype = swpaxos::MsgType::kPhase2A;
      m.rnd = r;
      m.value = *swpaxos::make_value(v);
      out.push_back(m);
    }
  }
  return out;
}

namespace detail {

inline std::string describe(const swpaxos::PaxosMessage& m) {
  return std::string(swpaxos::to_string(m.msgtype)) + "(r" + std::to_string(m.rnd) + "," +
         swpaxos::value_payload(m.value) + ")";
}

inline void explore(const swpaxos::AcceptorProgram& impl, const ReferenceAcceptor& ref,
                    const std::vector<swpaxos::PaxosMessage>& alphabet, int depth,
                    std::vector<swpaxos::PaxosMessage>& path, ExhaustiveResult& res) {
  if (depth == 0) return;
  for (const auto& letter : alphabet) {
    swpaxos::AcceptorProgram a = impl;
    ReferenceAcceptor r = ref;
    auto got = a.process(letter);
    auto want = r.receive(letter);
    ++res.sequences;
    path.push_back(letter);
    bool same = got.is_forward() == want.has_value();
    if (same && want) {
      const auto& fw = got.forwarded();
      swpaxos::GroupId group = want->msgtype == swpaxos::MsgType::kPhase1B
                                   ? a.config().coordinator_group
                                   : a.config().learner_group;
      same = fw.msg == *want && fw.group == group;
    }
    if (!same) {
      if (res.mismatches++ == 0) {
        for (const auto& m : path) res.first_mismatch += describe(m) + " ";
      }
    } else {
      explore(a, r, alphabet, depth - 1, path, res);
    }
    path.pop_back();
  }
}

}  // namespace detail

inline ExhaustiveResult check_acceptor_exhaustive(int max_len, std::uint16_t max_round,
                                                  std::uint16_t acceptor_id = 1) {
  ExhaustiveResult res;
  swpaxos::AcceptorConfig cfg;
  cfg.acceptor_id = acceptor_id;
  cfg.instance_window = 1;
  cfg.coordinator_group = 1;
  cfg.learner_group = 3;
  swpaxos::AcceptorProgram impl(cfg);
  ReferenceAcceptor ref;
  ref.id = acceptor_id;
  auto alphabet = acceptor_alphabet(max_round);
  std::vector<swpaxos::PaxosMessage> path;
  detail::explore(impl, ref, alphabet, max_len, path, res);
  return res;
}

}  // namespace oracle

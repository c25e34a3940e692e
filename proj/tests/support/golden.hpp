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

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "swpaxos/wire.hpp"

namespace testdata {

struct GoldenVector {
  swpaxos::PaxosMessage msg;
  swpaxos::Bytes packed;
};

// Reads the vectors produced by tests/oracle/pack_golden.py.
inline std::vector<GoldenVector> load_golden(const std::string& path) {
  std::vector<GoldenVector> out;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    unsigned type = 0, inst = 0, rnd = 0, vrnd = 0, acpt = 0;
    std::string value_hex, packed_hex;
    ss >> type >> inst >> rnd >> vrnd >> acpt >> value_hex >> packed_hex;
    GoldenVector g;
    g.msg.msgtype = static_cast<swpaxos::MsgType>(type);
    g.msg.inst = inst;
    g.msg.rnd = static_cast<std::uint16_t>(rnd);
    g.msg.vrnd = static_cast<std::uint16_t>(vrnd);
    g.msg.acpt = static_cast<std::uint16_t>(acpt);
    swpaxos::Bytes v = swpaxos::from_hex(value_hex);
    std::copy(v.begin(), v.end(), g.msg.value.begin());
    g.packed = swpaxos::from_hex(packed_hex);
    out.push_back(std::move(g));
  }
  return out;
}

inline std::string golden_path() { return std::string(SWPAXOS_TEST_DATA_DIR) + "/wire_golden.txt"; }

}  // namespace testdata

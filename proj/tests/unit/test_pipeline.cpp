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

#include <gtest/gtest.h>

#include <random>
#include <tuple>

#include "swpaxos/acceptor.hpp"
#include "swpaxos/coordinator.hpp"
#include "swpaxos/pipeline.hpp"

using namespace swpaxos;

namespace {

PaxosMessage msg(MsgType t, std::uint32_t inst, std::uint16_t rnd, std::string_view v = "") {
  PaxosMessage m;
  m.msgtype = t;
  m.inst = inst;
  m.rnd = rnd;
  if (!v.empty()) m.value = *make_value(v);
  return m;
}

using Access = std::tuple<std::string, std::size_t, bool, std::string, std::string>;

std::vector<Access> accesses(const AuditLog& log) {
  std::vector<Access> out;
  for (const auto& e : log.entries) out.emplace_back(e.reg, e.index, e.write, e.table, e.action);
  return out;
}

}  // namespace

TEST(Register, FreshCellsReadZero) {
  Register<std::uint32_t> r("reg", 8);
  auto scope = ActionScope::control_plane();
  for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(*r.read(scope, i), 0u);
}

TEST(Register, IndexAtSizeIsOutOfRange) {
  Register<std::uint32_t> r("reg", 8);
  auto scope = ActionScope::control_plane();
  auto rd = r.read(scope, 8);
  ASSERT_FALSE(rd.has_value());
  EXPECT_EQ(rd.error(), RegisterError::kOutOfRange);
  auto wr = r.write(scope, 8, 1);
  ASSERT_FALSE(wr.has_value());
  EXPECT_EQ(wr.error(), RegisterError::kOutOfRange);
  EXPECT_EQ(r, Register<std::uint32_t>("reg", 8));
}

TEST(Register, ReadAfterWrite) {
  Register<std::uint16_t> r("reg", 4, 16);
  auto scope = ActionScope::control_plane();
  ASSERT_TRUE(r.write(scope, 3, 77).has_value());
  EXPECT_EQ(*r.read(scope, 3), 77);
}

TEST(Register, CellsDoNotAlias) {
  Register<std::uint16_t> r("reg", 4, 16);
  auto scope = ActionScope::control_plane();
  ASSERT_TRUE(r.write(scope, 1, 10).has_value());
  ASSERT_TRUE(r.write(scope, 2, 20).has_value());
  EXPECT_EQ(*r.read(scope, 1), 10);
  EXPECT_EQ(*r.read(scope, 2), 20);
  EXPECT_EQ(*r.read(scope, 0), 0);
  EXPECT_EQ(*r.read(scope, 3), 0);
}

TEST(Register, RandomWritesMatchArrayModel) {
  std::mt19937_64 rng(3);
  Register<std::uint32_t> r("reg", 16, 17);
  std::vector<std::uint32_t> model(16);
  auto scope = ActionScope::control_plane();
  for (int i = 0; i < 2000; ++i) {
    std::size_t idx = rng() % 20;
    if (rng() % 2) {
      std::uint32_t v = static_cast<std::uint32_t>(rng() % (1u << 17));
      bool ok = r.write(scope, idx, v).has_value();
      ASSERT_EQ(ok, idx < 16);
      if (ok) model[idx] = v;
    } else {
      auto got = r.read(scope, idx);
      ASSERT_EQ(got.has_value(), idx < 16);
      if (got) {
        ASSERT_EQ(*got, model[idx]);
      }
    }
  }
}

TEST(Register, WidthIsEnforced) {
  Register<std::uint32_t> r("vrnds", 2, 17);
  auto scope = ActionScope::control_plane();
  EXPECT_TRUE(r.write(scope, 0, (1u << 17) - 1).has_value());
  EXPECT_THROW((void)r.write(scope, 0, 1u << 17), std::invalid_argument);
  EXPECT_THROW(Register<std::uint16_t>("bad", 1, 17), std::invalid_argument);
}

TEST(Register, AccessesAreAttributedToAction) {
  AuditLog log;
  Register<std::uint32_t> r("reg", 2);
  auto scope = ActionScope::control_plane(&log);
  (void)r.write(scope, 1, 5);
  (void)r.read(scope, 2);
  ASSERT_EQ(log.entries.size(), 2u);
  EXPECT_EQ(log.entries[0].table, kControlPlaneTable);
  EXPECT_EQ(log.entries[0].action, "runtime_write");
  EXPECT_TRUE(log.entries[0].write);
  EXPECT_FALSE(log.entries[0].refused);
  EXPECT_TRUE(log.entries[1].refused);
}

// Each packet runs exactly the actions the reference trace lists, and each
// register access is attributed to the action that made it.
TEST(Table, AcceptorPhase2AReferenceTrace) {
  AuditLog log;
  AcceptorProgram a(AcceptorConfig{1, 8, 1, 3}, &log);
  auto out = a.process(msg(MsgType::kPhase2A, 3, 16, "x"));
  ASSERT_TRUE(out.is_forward());
  std::vector<Access> expect{
      {"rnds", 3, false, "tbl_rnd", "read_rnd"},
      {"rnds", 3, true, "tbl_acceptor", "handle_2a"},
      {"vrnds", 3, true, "tbl_acceptor", "handle_2a"},
      {"values", 3, true, "tbl_acceptor", "handle_2a"},
  };
  EXPECT_EQ(accesses(log), expect);
}

TEST(Table, AcceptorPhase1AReferenceTrace) {
  AuditLog log;
  AcceptorProgram a(AcceptorConfig{1, 8, 1, 3}, &log);
  ASSERT_TRUE(a.process(msg(MsgType::kPhase1A, 0, 16)).is_forward());
  std::vector<Access> expect{
      {"rnds", 0, false, "tbl_rnd", "read_rnd"},
      {"vrnds", 0, false, "tbl_acceptor", "handle_1a"},
      {"values", 0, false, "tbl_acceptor", "handle_1a"},
      {"rnds", 0, true, "tbl_acceptor", "handle_1a"},
  };
  EXPECT_EQ(accesses(log), expect);
}

TEST(Table, UnmatchedTypeRunsDefaultDropOnly) {
  AuditLog log;
  AcceptorProgram a(AcceptorConfig{1, 8, 1, 3}, &log);
  for (MsgType t : {MsgType::kPhase1B, MsgType::kPhase2B}) {
    auto out = a.process(msg(t, 0, 16));
    ASSERT_TRUE(out.is_drop());
    EXPECT_EQ(out.drop_reason(), DropReason::kNoMatch);
  }
  EXPECT_TRUE(log.entries.empty());
  EXPECT_NE(a.counters().find("tbl_rnd._drop=2"), std::string::npos);
}

TEST(Table, StaleRoundSkipsAcceptorTable) {
  AuditLog log;
  AcceptorProgram a(AcceptorConfig{1, 8, 1, 3}, &log);
  ASSERT_TRUE(a.process(msg(MsgType::kPhase1A, 0, 32)).is_forward());
  log.entries.clear();
  auto out = a.process(msg(MsgType::kPhase2A, 0, 16, "x"));
  ASSERT_TRUE(out.is_drop());
  EXPECT_EQ(out.drop_reason(), DropReason::kStaleRound);
  std::vector<Access> expect{{"rnds", 0, false, "tbl_rnd", "read_rnd"}};
  EXPECT_EQ(accesses(log), expect);
}

TEST(Table, SequencerHandles2AOnly) {
  AuditLog log;
  SequencerProgram seq(2, &log);
  seq.set_window_hi(4);
  seq.set_round(17);
  log.entries.clear();

  auto out = seq.process(msg(MsgType::kPhase2A, 0, 0, "x"));
  ASSERT_TRUE(out.is_forward());
  std::vector<Access> expect{
      {"reg_inst", 0, false, "tbl_sequence", "handle_2a"},
      {"reg_window_hi", 0, false, "tbl_sequence", "handle_2a"},
      {"reg_rnd", 0, false, "tbl_sequence", "handle_2a"},
      {"reg_inst", 0, true, "tbl_sequence", "handle_2a"},
  };
  EXPECT_EQ(accesses(log), expect);

  log.entries.clear();
  auto d = seq.process(msg(MsgType::kPhase1B, 0, 0));
  ASSERT_TRUE(d.is_drop());
  EXPECT_EQ(d.drop_reason(), DropReason::kNoMatch);
  EXPECT_TRUE(log.entries.empty());
}

// Metadata is per-packet: the outcome of a packet never depends on the
// metadata left behind by the previous one.
TEST(Metadata, ResetBetweenPackets) {
  std::mt19937_64 rng(5);
  AcceptorProgram reused(AcceptorConfig{1, 4, 1, 3});
  AcceptorProgram fresh(AcceptorConfig{1, 4, 1, 3});
  AcceptorMetadata meta;
  for (int i = 0; i < 3000; ++i) {
    PaxosMessage m = msg(static_cast<MsgType>(1 + rng() % 4), static_cast<std::uint32_t>(rng() % 5),
                         static_cast<std::uint16_t>(rng() % 6), (rng() % 2) ? "a" : "b");
    meta.round = static_cast<std::uint16_t>(rng());  // garbage left over
    auto a = reused.process(m, meta);
    auto b = fresh.process(m);
    ASSERT_EQ(a, b);
  }
}

TEST(Outcome, Accessors) {
  auto f = PipelineOutcome::forward(msg(MsgType::kPhase2B, 1, 2), 3);
  EXPECT_TRUE(f.is_forward());
  EXPECT_EQ(f.forwarded().group, 3);
  auto d = PipelineOutcome::drop(DropReason::kOutOfRange);
  EXPECT_TRUE(d.is_drop());
  EXPECT_EQ(to_string(d.drop_reason()), "OutOfRange");
}

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

// Paxos header carried in UDP payloads.
//
// Layout (byte offsets, big-endian):
//   [0]            msgtype
//   [1, 5)         inst
//   [5, 7)         rnd
//   [7, 9)         vrnd
//   [9, 11)        acpt
//   [11, 11 + V)   value, V = kValueSize
//
// Application values are fixed length. The first two value bytes carry the
// payload length, the rest is payload followed by zero padding.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "swpaxos/result.hpp"

#ifndef SWPAXOS_VALUE_SIZE
#define SWPAXOS_VALUE_SIZE 64
#endif

namespace swpaxos {

inline constexpr std::size_t kValueSize = SWPAXOS_VALUE_SIZE;
static_assert(kValueSize >= 3, "value must hold a length prefix and payload");

inline constexpr std::size_t kHeaderSize = 1 + 4 + 2 + 2 + 2 + kValueSize;
inline constexpr std::size_t kMaxPayload = kValueSize - 2;

inline constexpr std::uint16_t kPaxosPort = 0x8888;
inline constexpr std::uint16_t kResponsePort = 0x8889;

using Byte = std::uint8_t;
using Bytes = std::vector<Byte>;
using Value = std::array<Byte, kValueSize>;

enum class MsgType : std::uint8_t {
  kPhase1A = 0x01,
  kPhase1B = 0x02,
  kPhase2A = 0x03,
  kPhase2B = 0x04,
};

inline constexpr std::string_view to_string(MsgType t) {
  switch (t) {
    case MsgType::kPhase1A: return "1A";
    case MsgType::kPhase1B: return "1B";
    case MsgType::kPhase2A: return "2A";
    case MsgType::kPhase2B: return "2B";
  }
  return "??";
}

struct PaxosMessage {
  MsgType msgtype = MsgType::kPhase2A;
  std::uint32_t inst = 0;
  std::uint16_t rnd = 0;
  std::uint16_t vrnd = 0;
  std::uint16_t acpt = 0;  // sender id on 1B/2B
  Value value{};

  bool operator==(const PaxosMessage&) const = default;
};

enum class ParseError {
  kBufferTooShort,
  kUnknownMsgType,
};

inline constexpr std::string_view to_string(ParseError e) {
  switch (e) {
    case ParseError::kBufferTooShort: return "BufferTooShort";
    case ParseError::kUnknownMsgType: return "UnknownMsgType";
  }
  return "?";
}

namespace detail {

template <typename T>
void put_be(Byte* out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out[i] = static_cast<Byte>(v >> (8 * (sizeof(T) - 1 - i)));
  }
}

template <typename T>
T get_be(const Byte* in) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    v = static_cast<T>((v << 8) | in[i]);
  }
  return v;
}

}  // namespace detail

inline constexpr bool is_known_msgtype(Byte code) {
  return code >= 0x01 && code <= 0x04;
}

inline Bytes encode(const PaxosMessage& msg) {
  Bytes out(kHeaderSize);
  Byte* p = out.data();
  p[0] = static_cast<Byte>(msg.msgtype);
  detail::put_be<std::uint32_t>(p + 1, msg.inst);
  detail::put_be<std::uint16_t>(p + 5, msg.rnd);
  detail::put_be<std::uint16_t>(p + 7, msg.vrnd);
  detail::put_be<std::uint16_t>(p + 9, msg.acpt);
  std::copy(msg.value.begin(), msg.value.end(), p + 11);
  return out;
}

// Trailing bytes past the header are ignored.
inline Result<PaxosMessage, ParseError> decode(std::span<const Byte> buf) {
  if (buf.size() < kHeaderSize) return unexpected(ParseError::kBufferTooShort);
  if (!is_known_msgtype(buf[0])) return unexpected(ParseError::kUnknownMsgType);
  PaxosMessage msg;
  const Byte* p = buf.data();
  msg.msgtype = static_cast<MsgType>(p[0]);
  msg.inst = detail::get_be<std::uint32_t>(p + 1);
  msg.rnd = detail::get_be<std::uint16_t>(p + 5);
  msg.vrnd = detail::get_be<std::uint16_t>(p + 7);
  msg.acpt = detail::get_be<std::uint16_t>(p + 9);
  std::copy(p + 11, p + 11 + kValueSize, msg.value.begin());
  return msg;
}

// ---------------------------------------------------------------------------
// Application values

enum class ValueError { kValueTooLarge };

inline Result<Value, ValueError> make_value(std::span<const Byte> payload) {
  if (payload.size() > kMaxPayload) return unexpected(ValueError::kValueTooLarge);
  Value v{};
  detail::put_be<std::uint16_t>(v.data(), static_cast<std::uint16_t>(payload.size()));
  std::copy(payload.begin(), payload.end(), v.begin() + 2);
  return v;
}

inline Result<Value, ValueError> make_value(std::string_view payload) {
  return make_value(std::span<const Byte>(
      reinterpret_cast<const Byte*>(payload.data()), payload.size()));
}

// Payload bytes of a length-prefixed value; an oversized prefix is clamped.
inline std::string value_payload(const Value& v) {
  std::size_t n = std::min<std::size_t>(detail::get_be<std::uint16_t>(v.data()), kMaxPayload);
  return std::string(reinterpret_cast<const char*>(v.data() + 2), n);
}

inline bool is_zero(const Value& v) {
  return std::all_of(v.begin(), v.end(), [](Byte b) { return b == 0; });
}

inline std::string to_hex(std::span<const Byte> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s;
  s.reserve(bytes.size() * 2);
  for (Byte b : bytes) {
    s.push_back(kDigits[b >> 4]);
    s.push_back(kDigits[b & 0xf]);
  }
  return s;
}

inline Bytes from_hex(std::string_view hex) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  Bytes out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i + 1 < hex.size(); i += 2) {
    int hi = nibble(hex[i]);
    int lo = nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) break;
    out.push_back(static_cast<Byte>((hi << 4) | lo));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Learner -> proposer response, UDP port kResponsePort: [inst:32][value]

inline constexpr std::size_t kResponseSize = 4 + kValueSize;

struct LearnerResponse {
  std::uint32_t inst = 0;
  Value value{};

  bool operator==(const LearnerResponse&) const = default;
};

inline Bytes encode_response(const LearnerResponse& r) {
  Bytes out(kResponseSize);
  detail::put_be<std::uint32_t>(out.data(), r.inst);
  std::copy(r.value.begin(), r.value.end(), out.begin() + 4);
  return out;
}

inline Result<LearnerResponse, ParseError> decode_response(std::span<const Byte> buf) {
  if (buf.size() < kResponseSize) return unexpected(ParseError::kBufferTooShort);
  LearnerResponse r;
  r.inst = detail::get_be<std::uint32_t>(buf.data());
  std::copy(buf.begin() + 4, buf.begin() + 4 + kValueSize, r.value.begin());
  return r;
}

// A UDP datagram as seen by the simulated network.
struct Packet {
  std::uint16_t udp_dst_port = kPaxosPort;
  Bytes payload;

  bool operator==(const Packet&) const = default;
};

inline Packet paxos_packet(const PaxosMessage& msg) {
  return Packet{kPaxosPort, encode(msg)};
}

}  // namespace swpaxos

/*
 * Copyright 2026 The sdnchain Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#pragma once

#include "sdnchain/core/bytes.hpp"
#include "sdnchain/core/net.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

namespace sdnchain::ofwire {

constexpr std::uint8_t kVersion = 4;
constexpr std::size_t kHeaderLen = 8;

// OpenFlow 1.3 type codes for the subset this system understands.
enum class MsgType : std::uint8_t {
    Hello = 0,
    Error = 1,
    EchoRequest = 2,
    EchoReply = 3,
    FeaturesRequest = 5,
    FeaturesReply = 6,
    PacketIn = 10,
    PacketOut = 13,
    FlowMod = 14,
};

std::string_view type_name(std::uint8_t type_code);

// Reserved port numbers.
constexpr std::uint32_t kPortFlood = 0xfffffffb;
constexpr std::uint32_t kPortController = 0xfffffffd;
constexpr std::uint32_t kPortAny = 0xffffffff;
constexpr std::uint32_t kNoBuffer = 0xffffffff;

struct OfHeader {
    std::uint8_t version = kVersion;
    std::uint8_t msg_type = 0;
    std::uint16_t length = 0;
    std::uint32_t xid = 0;

    bool operator==(const OfHeader&) const = default;
};

struct Ipv4Prefix {
    Ipv4Addr addr;
    std::uint8_t prefix_len = 32;

    bool operator==(const Ipv4Prefix&) const = default;
    bool contains(Ipv4Addr a) const;
};

struct MatchFields {
    std::optional<std::uint32_t> in_port;
    std::optional<MacAddr> eth_src;
    std::optional<MacAddr> eth_dst;
    std::optional<Ipv4Prefix> ipv4_src;
    std::optional<Ipv4Prefix> ipv4_dst;

    bool operator==(const MatchFields&) const = default;
    bool empty() const { return !in_port && !eth_src && !eth_dst && !ipv4_src && !ipv4_dst; }
    bool matches(std::uint32_t port, const Frame& f) const;
};

// Output is the only action kind; an empty action list means drop.
struct Action {
    std::uint32_t out_port = 0;

    bool operator==(const Action&) const = default;
};

struct Hello {
    bool operator==(const Hello&) const = default;
};

struct EchoRequest {
    Bytes data;
    bool operator==(const EchoRequest&) const = default;
};

struct EchoReply {
    Bytes data;
    bool operator==(const EchoReply&) const = default;
};

struct FeaturesRequest {
    bool operator==(const FeaturesRequest&) const = default;
};

struct FeaturesReply {
    DatapathId datapath_id = 0;
    std::uint32_t n_buffers = 0;
    std::uint8_t n_tables = 0;

    bool operator==(const FeaturesReply&) const = default;
};

struct PacketIn {
    std::uint32_t buffer_id = kNoBuffer;
    std::uint32_t in_port = 0;
    std::uint8_t reason = 0; // OFPR_NO_MATCH
    Bytes frame;

    bool operator==(const PacketIn&) const = default;
};

struct PacketOut {
    std::uint32_t buffer_id = kNoBuffer;
    std::uint32_t in_port = kPortController;
    std::vector<Action> actions;
    Bytes frame;

    bool operator==(const PacketOut&) const = default;
};

enum class FlowModCommand : std::uint8_t { Add = 0, Modify = 1, Delete = 3 };

struct FlowMod {
    std::uint64_t cookie = 0;
    FlowModCommand command = FlowModCommand::Add;
    MatchFields match;
    std::uint16_t priority = 0;
    std::uint16_t idle_timeout = 0; // seconds, 0 = none
    std::uint16_t hard_timeout = 0;
    std::vector<Action> actions;

    bool operator==(const FlowMod&) const = default;
};

struct ErrorMsg {
    std::uint16_t type = 0;
    std::uint16_t code = 0;

    bool operator==(const ErrorMsg&) const = default;
};

// Anything outside the subset. raw holds the complete message, header included.
struct Passthrough {
    Bytes raw;
    bool operator==(const Passthrough&) const = default;
};

using Body = std::variant<Hello, ErrorMsg, EchoRequest, EchoReply, FeaturesRequest, FeaturesReply,
                          PacketIn, PacketOut, FlowMod, Passthrough>;

struct OfMessage {
    std::uint32_t xid = 0;
    Body body;

    bool operator==(const OfMessage&) const = default;

    std::uint8_t type_code() const;
    template <class T> bool is() const { return std::holds_alternative<T>(body); }
    template <class T> const T& as() const { return std::get<T>(body); }
};

template <class T> OfMessage make(std::uint32_t xid, T body) { return OfMessage{xid, Body(std::move(body))}; }

} // namespace sdnchain::ofwire

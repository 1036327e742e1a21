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


#include "sdnchain/ofwire/message.hpp"

namespace sdnchain::ofwire {

std::string_view type_name(std::uint8_t type_code)
{
    switch (static_cast<MsgType>(type_code)) {
    case MsgType::Hello: return "Hello";
    case MsgType::Error: return "Error";
    case MsgType::EchoRequest: return "EchoRequest";
    case MsgType::EchoReply: return "EchoReply";
    case MsgType::FeaturesRequest: return "FeaturesRequest";
    case MsgType::FeaturesReply: return "FeaturesReply";
    case MsgType::PacketIn: return "PacketIn";
    case MsgType::PacketOut: return "PacketOut";
    case MsgType::FlowMod: return "FlowMod";
    }
    return "Passthrough";
}

bool Ipv4Prefix::contains(Ipv4Addr a) const
{
    if (prefix_len == 0)
        return true;
    std::uint32_t mask = prefix_len >= 32 ? 0xffffffffu : ~(0xffffffffu >> prefix_len);
    return (a.value & mask) == (addr.value & mask);
}

bool MatchFields::matches(std::uint32_t port, const Frame& f) const
{
    if (in_port && *in_port != port) return false;
    if (eth_src && *eth_src != f.eth_src) return false;
    if (eth_dst && *eth_dst != f.eth_dst) return false;
    if (ipv4_src && !ipv4_src->contains(f.ipv4_src)) return false;
    if (ipv4_dst && !ipv4_dst->contains(f.ipv4_dst)) return false;
    return true;
}

std::uint8_t OfMessage::type_code() const
{
    struct Visitor {
        std::uint8_t operator()(const Hello&) const { return std::uint8_t(MsgType::Hello); }
        std::uint8_t operator()(const ErrorMsg&) const { return std::uint8_t(MsgType::Error); }
        std::uint8_t operator()(const EchoRequest&) const { return std::uint8_t(MsgType::EchoRequest); }
        std::uint8_t operator()(const EchoReply&) const { return std::uint8_t(MsgType::EchoReply); }
        std::uint8_t operator()(const FeaturesRequest&) const { return std::uint8_t(MsgType::FeaturesRequest); }
        std::uint8_t operator()(const FeaturesReply&) const { return std::uint8_t(MsgType::FeaturesReply); }
        std::uint8_t operator()(const PacketIn&) const { return std::uint8_t(MsgType::PacketIn); }
        std::uint8_t operator()(const PacketOut&) const { return std::uint8_t(MsgType::PacketOut); }
        std::uint8_t operator()(const FlowMod&) const { return std::uint8_t(MsgType::FlowMod); }
        std::uint8_t operator()(const Passthrough& p) const { return p.raw.size() > 1 ? p.raw[1] : 0xff; }
    };
    return std::visit(Visitor{}, body);
}

} // namespace sdnchain::ofwire

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

#include "sdnchain/ofwire/codec.hpp"

#include <random>

namespace sdnchain::testing {

using Rng = std::mt19937_64;

inline std::uint64_t uniform(Rng& rng, std::uint64_t lo, std::uint64_t hi)
{
    return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng);
}

inline Bytes random_bytes(Rng& rng, std::size_t min_len, std::size_t max_len)
{
    Bytes b(uniform(rng, min_len, max_len));
    for (auto& x : b)
        x = static_cast<std::uint8_t>(uniform(rng, 0, 255));
    return b;
}

inline Frame random_frame(Rng& rng)
{
    Frame f;
    f.eth_src.value = uniform(rng, 1, 8);
    f.eth_dst.value = uniform(rng, 1, 8);
    f.ipv4_src.value = 0x0a000000u + static_cast<std::uint32_t>(uniform(rng, 1, 8));
    f.ipv4_dst.value = 0x0a000000u + static_cast<std::uint32_t>(uniform(rng, 1, 8));
    f.size = static_cast<std::uint16_t>(uniform(rng, 60, 1500));
    return f;
}

inline ofwire::MatchFields random_match(Rng& rng)
{
    ofwire::MatchFields m;
    if (uniform(rng, 0, 1)) m.in_port = static_cast<std::uint32_t>(uniform(rng, 1, 4));
    if (uniform(rng, 0, 1)) m.eth_src = MacAddr{uniform(rng, 1, 8)};
    if (uniform(rng, 0, 1)) m.eth_dst = MacAddr{uniform(rng, 1, 8)};
    if (uniform(rng, 0, 1))
        m.ipv4_src = ofwire::Ipv4Prefix{Ipv4Addr{0x0a000000u + static_cast<std::uint32_t>(uniform(rng, 1, 8))},
                                        static_cast<std::uint8_t>(uniform(rng, 0, 1) ? 32 : uniform(rng, 28, 32))};
    if (uniform(rng, 0, 1))
        m.ipv4_dst = ofwire::Ipv4Prefix{Ipv4Addr{0x0a000000u + static_cast<std::uint32_t>(uniform(rng, 1, 8))},
                                        static_cast<std::uint8_t>(uniform(rng, 0, 1) ? 32 : uniform(rng, 28, 32))};
    return m;
}

inline std::vector<ofwire::Action> random_actions(Rng& rng)
{
    std::vector<ofwire::Action> acts(uniform(rng, 0, 3));
    for (auto& a : acts)
        a.out_port = uniform(rng, 0, 5) == 0 ? ofwire::kPortFlood : static_cast<std::uint32_t>(uniform(rng, 1, 8));
    return acts;
}

// Any constructible message of the supported subset, plus opaque passthroughs.
inline ofwire::OfMessage random_message(Rng& rng)
{
    using namespace ofwire;
    auto xid = static_cast<std::uint32_t>(uniform(rng, 0, 0xffffffff));
    switch (uniform(rng, 0, 9)) {
    case 0: return make(xid, Hello{});
    case 1: return make(xid, ErrorMsg{static_cast<std::uint16_t>(uniform(rng, 0, 12)), static_cast<std::uint16_t>(uniform(rng, 0, 20))});
    case 2: return make(xid, EchoRequest{random_bytes(rng, 0, 16)});
    case 3: return make(xid, EchoReply{random_bytes(rng, 0, 16)});
    case 4: return make(xid, FeaturesRequest{});
    case 5: return make(xid, FeaturesReply{uniform(rng, 0, UINT64_MAX), static_cast<std::uint32_t>(uniform(rng, 0, 4096)),
                                           static_cast<std::uint8_t>(uniform(rng, 1, 254))});
    case 6: {
        PacketIn p;
        p.buffer_id = uniform(rng, 0, 1) ? kNoBuffer : static_cast<std::uint32_t>(uniform(rng, 0, 1000));
        p.in_port = static_cast<std::uint32_t>(uniform(rng, 1, 48));
        p.reason = static_cast<std::uint8_t>(uniform(rng, 0, 2));
        p.frame = uniform(rng, 0, 1) ? encode_frame(random_frame(rng)) : random_bytes(rng, 1, 64);
        return make(xid, p);
    }
    case 7: {
        PacketOut p;
        p.in_port = static_cast<std::uint32_t>(uniform(rng, 1, 48));
        p.actions = random_actions(rng);
        p.frame = random_bytes(rng, 0, 64);
        return make(xid, p);
    }
    case 8: {
        FlowMod f;
        f.cookie = uniform(rng, 0, UINT64_MAX);
        f.command = uniform(rng, 0, 2) == 0 ? FlowModCommand::Delete : FlowModCommand::Add;
        f.match = random_match(rng);
        f.priority = static_cast<std::uint16_t>(uniform(rng, 0, 0xffff));
        f.idle_timeout = static_cast<std::uint16_t>(uniform(rng, 0, 60));
        f.hard_timeout = static_cast<std::uint16_t>(uniform(rng, 0, 60));
        f.actions = random_actions(rng);
        return make(xid, f);
    }
    default: {
        // Type codes outside the subset.
        static constexpr std::uint8_t kOpaque[] = {4, 7, 8, 9, 11, 12, 15, 18, 19, 20, 29, 200, 255};
        Bytes raw;
        Writer w(raw);
        w.u8(kVersion);
        w.u8(kOpaque[uniform(rng, 0, std::size(kOpaque) - 1)]);
        w.u16(0);
        w.u32(xid);
        auto body = random_bytes(rng, 0, 24);
        w.bytes(body);
        w.patch_u16(2, static_cast<std::uint16_t>(raw.size()));
        return make(xid, Passthrough{raw});
    }
    }
}

// Table-building FlowMods: few priority levels so ties are common.
inline ofwire::FlowMod random_table_mod(Rng& rng)
{
    ofwire::FlowMod f;
    auto pick = uniform(rng, 0, 19);
    f.command = pick == 0 ? ofwire::FlowModCommand::Delete
              : pick == 1 ? ofwire::FlowModCommand::Modify
                          : ofwire::FlowModCommand::Add;
    f.match = random_match(rng);
    f.priority = static_cast<std::uint16_t>(uniform(rng, 0, 4));
    f.actions = random_actions(rng);
    return f;
}

} // namespace sdnchain::testing

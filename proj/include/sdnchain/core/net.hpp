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

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace sdnchain {

using DatapathId = std::uint64_t;

struct MacAddr {
    std::uint64_t value = 0; // low 48 bits

    auto operator<=>(const MacAddr&) const = default;
    std::string str() const;
    static MacAddr parse(std::string_view s);
};

struct Ipv4Addr {
    std::uint32_t value = 0;

    auto operator<=>(const Ipv4Addr&) const = default;
    std::string str() const;
    static Ipv4Addr parse(std::string_view s);
};

// Minimal data-plane frame. Only these fields are ever inspected.
struct Frame {
    MacAddr eth_src;
    MacAddr eth_dst;
    Ipv4Addr ipv4_src;
    Ipv4Addr ipv4_dst;
    std::uint16_t size = 64; // bytes on the wire

    bool operator==(const Frame&) const = default;
};

// Serializes as an Ethernet II header followed by a 20-byte IPv4 header (34 bytes).
Bytes encode_frame(const Frame& f);
Frame decode_frame(ByteView bytes);

} // namespace sdnchain

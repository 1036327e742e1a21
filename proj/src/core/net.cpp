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


#include "sdnchain/core/net.hpp"

#include "sdnchain/core/error.hpp"

#include <charconv>
#include <cstdio>

namespace sdnchain {

std::string MacAddr::str() const
{
    char buf[18];
    std::snprintf(buf, sizeof buf, "%02x:%02x:%02x:%02x:%02x:%02x",
                  unsigned(value >> 40 & 0xff), unsigned(value >> 32 & 0xff),
                  unsigned(value >> 24 & 0xff), unsigned(value >> 16 & 0xff),
                  unsigned(value >> 8 & 0xff), unsigned(value & 0xff));
    return buf;
}

MacAddr MacAddr::parse(std::string_view s)
{
    std::uint64_t v = 0;
    int groups = 0;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        auto end = s.find(':', pos);
        if (end == std::string_view::npos)
            end = s.size();
        unsigned part = 0;
        auto [p, ec] = std::from_chars(s.data() + pos, s.data() + end, part, 16);
        if (ec != std::errc() || p != s.data() + end || part > 0xff)
            throw Error(Errc::InvalidArgument, "bad MAC address: " + std::string(s));
        v = v << 8 | part;
        ++groups;
        pos = end + 1;
    }
    if (groups != 6)
        throw Error(Errc::InvalidArgument, "bad MAC address: " + std::string(s));
    return MacAddr{v};
}

std::string Ipv4Addr::str() const
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "%u.%u.%u.%u", value >> 24 & 0xff, value >> 16 & 0xff,
                  value >> 8 & 0xff, value & 0xff);
    return buf;
}

Ipv4Addr Ipv4Addr::parse(std::string_view s)
{
    std::uint32_t v = 0;
    int groups = 0;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        auto end = s.find('.', pos);
        if (end == std::string_view::npos)
            end = s.size();
        unsigned part = 0;
        auto [p, ec] = std::from_chars(s.data() + pos, s.data() + end, part, 10);
        if (ec != std::errc() || p != s.data() + end || part > 255)
            throw Error(Errc::InvalidArgument, "bad IPv4 address: " + std::string(s));
        v = v << 8 | part;
        ++groups;
        pos = end + 1;
    }
    if (groups != 4)
        throw Error(Errc::InvalidArgument, "bad IPv4 address: " + std::string(s));
    return Ipv4Addr{v};
}

Bytes encode_frame(const Frame& f)
{
    Bytes out;
    out.reserve(34);
    Writer w(out);
    w.u16(static_cast<std::uint16_t>(f.eth_dst.value >> 32));
    w.u32(static_cast<std::uint32_t>(f.eth_dst.value));
    w.u16(static_cast<std::uint16_t>(f.eth_src.value >> 32));
    w.u32(static_cast<std::uint32_t>(f.eth_src.value));
    w.u16(0x0800);
    w.u8(0x45);
    w.u8(0);
    w.u16(f.size >= 14 ? static_cast<std::uint16_t>(f.size - 14) : 20); // IPv4 total length
    w.u32(0);
    w.u8(64);  // ttl
    w.u8(17);  // udp
    w.u16(0);  // checksum unused
    w.u32(f.ipv4_src.value);
    w.u32(f.ipv4_dst.value);
    return out;
}

Frame decode_frame(ByteView bytes)
{
    Reader r(bytes);
    Frame f;
    std::uint64_t hi = r.u16();
    f.eth_dst.value = hi << 32 | r.u32();
    hi = r.u16();
    f.eth_src.value = hi << 32 | r.u32();
    if (r.u16() != 0x0800)
        throw Error(Errc::Malformed, "not an IPv4 frame");
    r.skip(2);
    f.size = static_cast<std::uint16_t>(r.u16() + 14);
    r.skip(8);
    f.ipv4_src.value = r.u32();
    f.ipv4_dst.value = r.u32();
    return f;
}

} // namespace sdnchain

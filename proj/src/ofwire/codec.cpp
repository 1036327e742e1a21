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


#include "sdnchain/ofwire/codec.hpp"

#include "sdnchain/core/error.hpp"

#include <bit>

namespace sdnchain::ofwire {

namespace {

// OXM basic class and field numbers.
constexpr std::uint16_t kOxmClassBasic = 0x8000;
constexpr std::uint8_t kOxmInPort = 0;
constexpr std::uint8_t kOxmEthDst = 3;
constexpr std::uint8_t kOxmEthSrc = 4;
constexpr std::uint8_t kOxmEthType = 5;
constexpr std::uint8_t kOxmIpv4Src = 11;
constexpr std::uint8_t kOxmIpv4Dst = 12;

constexpr std::uint16_t kMatchTypeOxm = 1;
constexpr std::uint16_t kInstrApplyActions = 4;
constexpr std::uint16_t kActionOutput = 0;
constexpr std::uint16_t kNoBufferMaxLen = 0xffff;

void oxm_header(Writer& w, std::uint8_t field, bool masked, std::uint8_t len)
{
    w.u16(kOxmClassBasic);
    w.u8(static_cast<std::uint8_t>(field << 1 | (masked ? 1 : 0)));
    w.u8(len);
}

void put_mac(Writer& w, MacAddr m)
{
    w.u16(static_cast<std::uint16_t>(m.value >> 32));
    w.u32(static_cast<std::uint32_t>(m.value));
}

MacAddr get_mac(Reader& r)
{
    std::uint64_t hi = r.u16();
    return MacAddr{hi << 32 | r.u32()};
}

std::uint32_t prefix_mask(std::uint8_t len)
{
    return len >= 32 ? 0xffffffffu : len == 0 ? 0u : ~(0xffffffffu >> len);
}

void put_ipv4(Writer& w, std::uint8_t field, const Ipv4Prefix& p)
{
    if (p.prefix_len > 32)
        throw Error(Errc::InvariantViolation, "prefix length > 32");
    bool masked = p.prefix_len < 32;
    oxm_header(w, field, masked, masked ? 8 : 4);
    w.u32(p.addr.value);
    if (masked)
        w.u32(prefix_mask(p.prefix_len));
}

void put_match(Writer& w, const MatchFields& m)
{
    std::size_t start = w.size();
    w.u16(kMatchTypeOxm);
    w.u16(0); // patched
    if (m.in_port) {
        oxm_header(w, kOxmInPort, false, 4);
        w.u32(*m.in_port);
    }
    if (m.eth_dst) {
        oxm_header(w, kOxmEthDst, false, 6);
        put_mac(w, *m.eth_dst);
    }
    if (m.eth_src) {
        oxm_header(w, kOxmEthSrc, false, 6);
        put_mac(w, *m.eth_src);
    }
    if (m.ipv4_src || m.ipv4_dst) {
        // IPv4 fields require the eth_type prerequisite.
        oxm_header(w, kOxmEthType, false, 2);
        w.u16(0x0800);
    }
    if (m.ipv4_src) put_ipv4(w, kOxmIpv4Src, *m.ipv4_src);
    if (m.ipv4_dst) put_ipv4(w, kOxmIpv4Dst, *m.ipv4_dst);
    std::size_t len = w.size() - start;
    w.patch_u16(start + 2, static_cast<std::uint16_t>(len));
    w.zeros((len + 7) / 8 * 8 - len);
}

Ipv4Prefix get_ipv4(Reader& r, bool masked)
{
    Ipv4Prefix p;
    p.addr.value = r.u32();
    if (masked) {
        std::uint32_t mask = r.u32();
        int ones = std::countl_one(mask);
        if (prefix_mask(static_cast<std::uint8_t>(ones)) != mask)
            throw Error(Errc::Malformed, "non-contiguous IPv4 mask");
        p.prefix_len = static_cast<std::uint8_t>(ones);
    }
    return p;
}

MatchFields get_match(Reader& r)
{
    if (r.u16() != kMatchTypeOxm)
        throw Error(Errc::Malformed, "unsupported match type");
    std::uint16_t len = r.u16();
    if (len < 4)
        throw Error(Errc::Malformed, "match length");
    Reader fields(r.take(len - 4u));
    r.skip((len + 7u) / 8 * 8 - len);

    MatchFields m;
    while (fields.remaining() > 0) {
        std::uint16_t cls = fields.u16();
        std::uint8_t fh = fields.u8();
        std::uint8_t flen = fields.u8();
        Reader value(fields.take(flen));
        if (cls != kOxmClassBasic)
            continue;
        bool masked = fh & 1;
        switch (fh >> 1) {
        case kOxmInPort: m.in_port = value.u32(); break;
        case kOxmEthDst: m.eth_dst = get_mac(value); break;
        case kOxmEthSrc: m.eth_src = get_mac(value); break;
        case kOxmIpv4Src: m.ipv4_src = get_ipv4(value, masked); break;
        case kOxmIpv4Dst: m.ipv4_dst = get_ipv4(value, masked); break;
        default: break;
        }
    }
    return m;
}

void put_actions(Writer& w, const std::vector<Action>& actions)
{
    for (const auto& a : actions) {
        w.u16(kActionOutput);
        w.u16(16);
        w.u32(a.out_port);
        w.u16(kNoBufferMaxLen);
        w.zeros(6);
    }
}

std::vector<Action> get_actions(Reader r)
{
    std::vector<Action> out;
    while (r.remaining() > 0) {
        std::uint16_t type = r.u16();
        std::uint16_t len = r.u16();
        if (len < 8 || len % 8 != 0)
            throw Error(Errc::Malformed, "action length");
        Reader body(r.take(len - 4u));
        if (type == kActionOutput)
            out.push_back(Action{body.u32()});
    }
    return out;
}

struct BodyWriter {
    Writer& w;

    void operator()(const Hello&) const { }
    void operator()(const ErrorMsg& e) const
    {
        w.u16(e.type);
        w.u16(e.code);
    }
    void operator()(const EchoRequest& e) const { w.bytes(e.data); }
    void operator()(const EchoReply& e) const { w.bytes(e.data); }
    void operator()(const FeaturesRequest&) const { }
    void operator()(const FeaturesReply& f) const
    {
        w.u64(f.datapath_id);
        w.u32(f.n_buffers);
        w.u8(f.n_tables);
        w.u8(0);   // auxiliary_id
        w.zeros(2);
        w.u32(0);  // capabilities
        w.u32(0);  // reserved
    }
    void operator()(const PacketIn& p) const
    {
        if (p.frame.empty())
            throw Error(Errc::InvariantViolation, "PacketIn with empty frame");
        w.u32(p.buffer_id);
        w.u16(static_cast<std::uint16_t>(p.frame.size()));
        w.u8(p.reason);
        w.u8(0);   // table_id
        w.u64(0);  // cookie
        MatchFields m;
        m.in_port = p.in_port;
        put_match(w, m);
        w.zeros(2);
        w.bytes(p.frame);
    }
    void operator()(const PacketOut& p) const
    {
        w.u32(p.buffer_id);
        w.u32(p.in_port);
        w.u16(static_cast<std::uint16_t>(16 * p.actions.size()));
        w.zeros(6);
        put_actions(w, p.actions);
        w.bytes(p.frame);
    }
    void operator()(const FlowMod& f) const
    {
        w.u64(f.cookie);
        w.u64(0); // cookie_mask
        w.u8(0);  // table_id
        w.u8(static_cast<std::uint8_t>(f.command));
        w.u16(f.idle_timeout);
        w.u16(f.hard_timeout);
        w.u16(f.priority);
        w.u32(kNoBuffer);
        w.u32(kPortAny);
        w.u32(0xffffffff); // out_group any
        w.u16(0);          // flags
        w.zeros(2);
        put_match(w, f.match);
        if (!f.actions.empty()) {
            w.u16(kInstrApplyActions);
            w.u16(static_cast<std::uint16_t>(8 + 16 * f.actions.size()));
            w.zeros(4);
            put_actions(w, f.actions);
        }
    }
    void operator()(const Passthrough&) const { }
};

Body decode_body(std::uint8_t type, ByteView payload, ByteView whole)
{
    Reader r(payload);
    switch (static_cast<MsgType>(type)) {
    case MsgType::Hello: return Hello{};
    case MsgType::Error: {
        ErrorMsg e;
        e.type = r.u16();
        e.code = r.u16();
        return e;
    }
    case MsgType::EchoRequest: return EchoRequest{Bytes(payload.begin(), payload.end())};
    case MsgType::EchoReply: return EchoReply{Bytes(payload.begin(), payload.end())};
    case MsgType::FeaturesRequest: return FeaturesRequest{};
    case MsgType::FeaturesReply: {
        FeaturesReply f;
        f.datapath_id = r.u64();
        f.n_buffers = r.u32();
        f.n_tables = r.u8();
        r.skip(11);
        return f;
    }
    case MsgType::PacketIn: {
        PacketIn p;
        p.buffer_id = r.u32();
        std::uint16_t total_len = r.u16();
        p.reason = r.u8();
        r.skip(9); // table_id, cookie
        MatchFields m = get_match(r);
        r.skip(2);
        auto data = r.take(r.remaining());
        p.frame.assign(data.begin(), data.end());
        if (!m.in_port)
            throw Error(Errc::Malformed, "PacketIn without in_port");
        p.in_port = *m.in_port;
        if (p.frame.empty() || total_len != p.frame.size())
            throw Error(Errc::Malformed, "PacketIn frame length");
        return p;
    }
    case MsgType::PacketOut: {
        PacketOut p;
        p.buffer_id = r.u32();
        p.in_port = r.u32();
        std::uint16_t actions_len = r.u16();
        r.skip(6);
        p.actions = get_actions(Reader(r.take(actions_len)));
        auto data = r.take(r.remaining());
        p.frame.assign(data.begin(), data.end());
        return p;
    }
    case MsgType::FlowMod: {
        FlowMod f;
        f.cookie = r.u64();
        r.skip(9); // cookie_mask, table_id
        std::uint8_t cmd = r.u8();
        if (cmd != 0 && cmd != 1 && cmd != 3)
            throw Error(Errc::Malformed, "unsupported flow_mod command");
        f.command = static_cast<FlowModCommand>(cmd);
        f.idle_timeout = r.u16();
        f.hard_timeout = r.u16();
        f.priority = r.u16();
        r.skip(16); // buffer_id, out_port, out_group, flags, pad
        f.match = get_match(r);
        while (r.remaining() > 0) {
            std::uint16_t itype = r.u16();
            std::uint16_t ilen = r.u16();
            if (ilen < 8)
                throw Error(Errc::Malformed, "instruction length");
            Reader instr(r.take(ilen - 4u));
            if (itype == kInstrApplyActions) {
                instr.skip(4);
                auto acts = get_actions(Reader(instr.take(instr.remaining())));
                f.actions.insert(f.actions.end(), acts.begin(), acts.end());
            }
        }
        return f;
    }
    }
    return Passthrough{Bytes(whole.begin(), whole.end())};
}

} // namespace

Bytes encode(const OfMessage& msg)
{
    if (auto* p = std::get_if<Passthrough>(&msg.body)) {
        if (p->raw.size() < kHeaderLen)
            throw Error(Errc::InvariantViolation, "passthrough shorter than a header");
        OfHeader h = peek_header(p->raw);
        if (h.version != kVersion || h.length != p->raw.size() || h.xid != msg.xid)
            throw Error(Errc::InvariantViolation, "passthrough header inconsistent");
        return p->raw;
    }
    Bytes out;
    out.reserve(64);
    Writer w(out);
    w.u8(kVersion);
    w.u8(msg.type_code());
    w.u16(0);
    w.u32(msg.xid);
    std::visit(BodyWriter{w}, msg.body);
    if (out.size() > 0xffff)
        throw Error(Errc::InvariantViolation, "message exceeds 64 KiB");
    w.patch_u16(2, static_cast<std::uint16_t>(out.size()));
    return out;
}

OfHeader peek_header(ByteView bytes)
{
    Reader r(bytes);
    OfHeader h;
    h.version = r.u8();
    h.msg_type = r.u8();
    h.length = r.u16();
    h.xid = r.u32();
    return h;
}

std::optional<Decoded> try_decode(ByteView bytes)
{
    if (bytes.size() < kHeaderLen)
        return std::nullopt;
    OfHeader h = peek_header(bytes);
    if (h.length < kHeaderLen)
        throw Error(Errc::Malformed, "header length < 8");
    if (h.version != kVersion)
        throw Error(Errc::Malformed, "unsupported version " + std::to_string(h.version));
    if (bytes.size() < h.length)
        return std::nullopt;
    auto whole = bytes.first(h.length);
    Decoded d;
    d.msg.xid = h.xid;
    d.msg.body = decode_body(h.msg_type, whole.subspan(kHeaderLen), whole);
    d.consumed = h.length;
    return d;
}

std::pair<OfMessage, ByteView> decode(ByteView bytes)
{
    auto d = try_decode(bytes);
    if (!d)
        throw Error(Errc::Incomplete, "need more bytes");
    return {std::move(d->msg), bytes.subspan(d->consumed)};
}

std::optional<StreamDecoder::Item> StreamDecoder::next()
{
    auto d = try_decode(buf_);
    if (!d)
        return std::nullopt;
    Item item{std::move(d->msg), Bytes(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(d->consumed))};
    buf_.erase(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(d->consumed));
    return item;
}

} // namespace sdnchain::ofwire

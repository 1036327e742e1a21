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


#include "sdnchain/core/error.hpp"
#include "sdnchain/ofwire/capture.hpp"
#include "sdnchain/ofwire/codec.hpp"
#include "sdnchain/ofwire/session.hpp"

#include "../support/generators.hpp"

#include <doctest.h>

#include <sstream>

using namespace sdnchain;
using namespace sdnchain::ofwire;

namespace {

// Produced by tests/oracles/of13_dissector.py (os-ken OpenFlow 1.3 encoder/parser).
const char* kFrameHex = "00000000000200000000000108004500001400000000401100000a0000010a000002";

Frame sample_frame()
{
    Frame f;
    f.eth_src = MacAddr::parse("00:00:00:00:00:01");
    f.eth_dst = MacAddr::parse("00:00:00:00:00:02");
    f.ipv4_src = Ipv4Addr::parse("10.0.0.1");
    f.ipv4_dst = Ipv4Addr::parse("10.0.0.2");
    f.size = 34;
    return f;
}

Errc error_code(auto&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return Errc::InvalidArgument;
}

} // namespace

TEST_CASE("frame bytes match the dissector capture")
{
    CHECK(to_hex(encode_frame(sample_frame())) == kFrameHex);
    CHECK(decode_frame(from_hex(kFrameHex)) == sample_frame());
}

TEST_CASE("encode matches independent dissector bytes")
{
    CHECK(to_hex(encode(make(1, Hello{}))) == "0400000800000001");
    CHECK(to_hex(encode(make(0, EchoRequest{}))) == "0402000800000000");
    CHECK(to_hex(encode(make(7, FeaturesReply{0x1122334455667788ull, 256, 254}))) ==
          "0406002000000007112233445566778800000100fe0000000000000000000000");
    CHECK(to_hex(encode(make(14, ErrorMsg{0, 0}))) == "0401000c0000000e00000000");

    PacketIn pin;
    pin.in_port = 3;
    pin.frame = from_hex(kFrameHex);
    CHECK(to_hex(encode(make(9, pin))) ==
          "040a004c00000009ffffffff0022000000000000000000000001000c800000040000000300000000000000000000000200000000000108004500001400000000401100000a0000010a000002");

    FlowMod drop;
    drop.cookie = 0xabc;
    drop.match.in_port = 2;
    drop.match.ipv4_src = Ipv4Prefix{Ipv4Addr::parse("10.0.0.66"), 32};
    drop.priority = 100;
    drop.idle_timeout = 30;
    CHECK(to_hex(encode(make(11, drop))) ==
          "040e00500000000b0000000000000abc00000000000000000000001e00000064ffffffffffffffffffffffff000000000001001a800000040000000280000a020800800016040a000042000000000000");

    FlowMod fwd;
    fwd.match.eth_dst = MacAddr::parse("00:00:00:00:00:02");
    fwd.match.eth_src = MacAddr::parse("00:00:00:00:00:01");
    fwd.match.ipv4_dst = Ipv4Prefix{Ipv4Addr::parse("10.0.1.0"), 24};
    fwd.priority = 10;
    fwd.idle_timeout = 5;
    fwd.hard_timeout = 10;
    fwd.actions = {Action{2}};
    CHECK(to_hex(encode(make(12, fwd))) ==
          "040e00780000000c0000000000000000000000000000000000000005000a000affffffffffffffffffffffff000000000001002a800006060000000000028000080600000000000180000a020800800019080a000100ffffff0000000000000000040018000000000000001000000002ffff000000000000");

    PacketOut pout;
    pout.actions = {Action{kPortFlood}};
    pout.frame = from_hex(kFrameHex);
    CHECK(to_hex(encode(make(13, pout))) ==
          "040d004a0000000dfffffffffffffffd001000000000000000000010fffffffbffff00000000000000000000000200000000000108004500001400000000401100000a0000010a000002");
}

TEST_CASE("header length equals encoded size and version is 4")
{
    testing::Rng rng(7);
    for (int i = 0; i < 500; ++i) {
        auto bytes = encode(testing::random_message(rng));
        auto h = peek_header(bytes);
        CHECK(h.length == bytes.size());
        CHECK(h.version == kVersion);
        CHECK(h.length >= kHeaderLen);
    }
}

TEST_CASE("decode edge cases")
{
    Bytes four{4, 0, 0, 8};
    CHECK(error_code([&] { decode(four); }) == Errc::Incomplete);
    CHECK_FALSE(try_decode(four).has_value());

    CHECK(error_code([&] { decode(from_hex("0400000400000001")); }) == Errc::Malformed);
    CHECK(error_code([&] { decode(from_hex("0100000800000001")); }) == Errc::Malformed);
    CHECK(error_code([&] { decode(from_hex("04000010000000010000")); }) == Errc::Incomplete);

    // Unknown type, length 16, followed by trailing bytes that must not be consumed.
    auto raw = from_hex("04c80010000000050101010101010101");
    Bytes input = raw;
    input.push_back(0xee);
    auto [msg, rest] = decode(input);
    REQUIRE(msg.is<Passthrough>());
    CHECK(msg.as<Passthrough>().raw == raw);
    CHECK(msg.xid == 5);
    CHECK(rest.size() == 1);
    CHECK(encode(msg) == raw);

    // Known body that does not parse.
    CHECK(error_code([&] { decode(from_hex("0406000c0000000700000000")); }) == Errc::Malformed);
}

TEST_CASE("every unknown one-byte type is passed through whole")
{
    for (int t = 0; t < 256; ++t) {
        Bytes raw{kVersion, static_cast<std::uint8_t>(t), 0, 16, 0, 0, 0, 9, 1, 2, 3, 4, 5, 6, 7, 8};
        bool known = t == 0 || t == 1 || t == 2 || t == 3 || t == 5 || t == 6 || t == 10 || t == 13 || t == 14;
        if (known) {
            // Known types either parse or are rejected, never passed through.
            try {
                auto k = try_decode(raw);
                REQUIRE(k);
                CHECK_FALSE(k->msg.is<Passthrough>());
            } catch (const Error& e) {
                CHECK(e.code() == Errc::Malformed);
            }
            continue;
        }
        auto d = try_decode(raw);
        REQUIRE(d);
        CHECK(d->consumed == 16);
        CHECK(d->msg.is<Passthrough>());
        CHECK(d->msg.as<Passthrough>().raw == raw);
    }
}

TEST_CASE("encode rejects invariant violations")
{
    CHECK(error_code([] { encode(make(1, PacketIn{})); }) == Errc::InvariantViolation);
    auto raw = from_hex("04c80010000000050101010101010101");
    CHECK(error_code([&] { encode(make(6, Passthrough{raw})); }) == Errc::InvariantViolation);
}

TEST_CASE("round trip over generated messages")
{
    testing::Rng rng(42);
    for (int i = 0; i < 2000; ++i) {
        auto m = testing::random_message(rng);
        auto bytes = encode(m);
        auto [back, rest] = decode(bytes);
        REQUIRE(back == m);
        CHECK(rest.empty());
    }
}

TEST_CASE("stream decoding is independent of chunking")
{
    testing::Rng rng(3);
    std::vector<OfMessage> msgs;
    Bytes stream;
    for (int i = 0; i < 200; ++i) {
        msgs.push_back(testing::random_message(rng));
        auto b = encode(msgs.back());
        stream.insert(stream.end(), b.begin(), b.end());
    }
    for (int trial = 0; trial < 20; ++trial) {
        StreamDecoder dec;
        std::vector<OfMessage> got;
        std::size_t pos = 0;
        while (pos < stream.size()) {
            std::size_t n = std::min<std::size_t>(testing::uniform(rng, 1, 97), stream.size() - pos);
            dec.feed(ByteView(stream).subspan(pos, n));
            pos += n;
            while (auto item = dec.next()) {
                CHECK(encode(item->msg) == item->raw);
                got.push_back(std::move(item->msg));
            }
        }
        CHECK(got == msgs);
        CHECK(dec.buffered() == 0);
    }
}

TEST_CASE("handshake with a switch peer")
{
    auto fsm = SessionFsm::for_peer(PeerRole::Switch);
    auto r = step(fsm, Received{make(1, Hello{})});
    CHECK(r.fsm.state == SessionState::AwaitFeatures);
    REQUIRE(r.actions.size() == 2);
    CHECK(std::get<Send>(r.actions[0]).msg == make(1, Hello{}));
    CHECK(std::get<Send>(r.actions[1]).msg == make(2, FeaturesRequest{}));

    r = step(r.fsm, Received{make(2, FeaturesReply{0x42, 256, 254})});
    CHECK(r.fsm.state == SessionState::Established);
    CHECK(r.fsm.features->datapath_id == 0x42);
    REQUIRE(r.actions.size() == 1);
    CHECK(std::holds_alternative<Deliver>(r.actions[0]));
}

TEST_CASE("handshake with a controller peer")
{
    auto r = step(SessionFsm::for_peer(PeerRole::Controller), Received{make(1, Hello{})});
    CHECK(r.fsm.state == SessionState::Established);
    CHECK(r.actions.empty());
}

TEST_CASE("non-Hello before handshake yields Error and Disconnect")
{
    auto r = step(SessionFsm::for_peer(PeerRole::Switch), Received{make(5, FeaturesRequest{})});
    CHECK(r.fsm.state == SessionState::Disconnected);
    REQUIRE(r.actions.size() == 2);
    CHECK(std::get<Send>(r.actions[0]).msg.is<ErrorMsg>());
    CHECK(std::holds_alternative<Disconnect>(r.actions[1]));
    CHECK_THROWS_AS(step(r.fsm, TimerTick{0}), Error);
}

namespace {
SessionFsm established()
{
    SessionFsm f = SessionFsm::for_peer(PeerRole::Controller);
    f.state = SessionState::Established;
    return f;
}
} // namespace

TEST_CASE("echo request is always answered")
{
    auto r = step(established(), Received{make(77, EchoRequest{Bytes{1, 2}})});
    REQUIRE(r.actions.size() == 1);
    CHECK(std::get<Send>(r.actions[0]).msg == make(77, EchoReply{Bytes{1, 2}}));

    r = step(SessionFsm::for_peer(PeerRole::Switch), Received{make(3, EchoRequest{})});
    CHECK(r.fsm.state == SessionState::AwaitHello);
    CHECK(std::get<Send>(r.actions[0]).msg.is<EchoReply>());
}

TEST_CASE("three unanswered echo requests disconnect at 15 s")
{
    auto fsm = established();
    int sent = 0;
    for (TimeUs t : {0 * kSec, 5 * kSec, 10 * kSec}) {
        auto r = step(fsm, TimerTick{t});
        fsm = r.fsm;
        REQUIRE(r.actions.size() == 1);
        CHECK(std::get<Send>(r.actions[0]).msg.is<EchoRequest>());
        ++sent;
    }
    CHECK(fsm.missed_echoes == 2);
    auto r = step(fsm, TimerTick{15 * kSec});
    CHECK(r.fsm.state == SessionState::Disconnected);
    REQUIRE(r.actions.size() == 1);
    CHECK(std::holds_alternative<Disconnect>(r.actions[0]));
    CHECK(sent == 3);
}

TEST_CASE("echo reply after two misses resets the counter")
{
    auto fsm = established();
    for (TimeUs t : {0 * kSec, 5 * kSec, 10 * kSec})
        fsm = step(fsm, TimerTick{t}).fsm;
    CHECK(fsm.missed_echoes == 2);
    fsm = step(fsm, Received{make(fsm.next_echo_xid - 1, EchoReply{})}).fsm;
    CHECK(fsm.missed_echoes == 0);
    CHECK(fsm.state == SessionState::Established);
    fsm = step(fsm, TimerTick{15 * kSec}).fsm;
    CHECK(fsm.state == SessionState::Established);
}

TEST_CASE("keepalive bound with scheduler ticks")
{
    // Silent peer from establishment at t0; ticks every 100 ms.
    for (TimeUs t0 : {TimeUs{0}, 20 * kSec, 1234 * kMs}) {
        auto fsm = established();
        TimeUs first_request = -1, disconnect_at = -1;
        for (TimeUs t = t0; t < t0 + 30 * kSec && disconnect_at < 0; t += kSchedulerTick) {
            auto r = step(fsm, TimerTick{t});
            fsm = r.fsm;
            for (auto& a : r.actions) {
                if (std::holds_alternative<Send>(a) && first_request < 0)
                    first_request = t;
                if (std::holds_alternative<Disconnect>(a))
                    disconnect_at = t;
            }
        }
        CHECK(disconnect_at - first_request == 3 * kDefaultEchoInterval);
        CHECK(fsm.missed_echoes <= kMaxMissedEchoes);
    }
}

TEST_CASE("established sessions pass through everything else")
{
    auto r = step(established(), Received{make(9, FlowMod{})});
    REQUIRE(r.actions.size() == 1);
    CHECK(std::get<Deliver>(r.actions[0]).msg == make(9, FlowMod{}));
}

TEST_CASE("capture records round trip")
{
    std::stringstream ss;
    CaptureRecord a{1500, "ctrl_to_switch", encode(make(1, Hello{}))};
    CaptureRecord b{2500, "switch_to_ctrl", encode(make(2, EchoRequest{}))};
    write_capture(ss, a);
    write_capture(ss, b);
    CHECK(ss.str().find("\"hex\":\"0400000800000001\"") != std::string::npos);
    auto back = read_capture(ss);
    REQUIRE(back.size() == 2);
    CHECK(back[0] == a);
    CHECK(back[1] == b);
}

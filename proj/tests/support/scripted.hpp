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
#include "sdnchain/ofwire/session.hpp"
#include "sdnchain/simnet/pipe.hpp"

#include <map>

namespace sdnchain::testing {

struct LoggedMsg {
    TimeUs at = 0;
    Bytes raw;
    ofwire::OfMessage msg;
};

// Switch end of a scripted exchange: Hello on connect, answers FeaturesRequest
// and EchoRequest, logs everything it receives.
class ScriptedSwitch {
public:
    ScriptedSwitch(Scheduler& sched, DatapathId dpid) : sched_(sched), dpid_(dpid) { }

    void connect(std::shared_ptr<simnet::PipeEnd> end)
    {
        end_ = std::move(end);
        end_->set_receiver([this](ByteView b) { on_bytes(b); }, [this] { closed = true; });
        send(ofwire::make(1, ofwire::Hello{}));
    }
    void send(const ofwire::OfMessage& m) { end_->send(ofwire::encode(m)); }

    std::vector<LoggedMsg> log;
    bool closed = false;
    bool mute = false;

private:
    void on_bytes(ByteView b)
    {
        dec_.feed(b);
        while (auto item = dec_.next()) {
            log.push_back({sched_.now(), item->raw, item->msg});
            if (mute)
                continue;
            if (item->msg.is<ofwire::FeaturesRequest>())
                send(ofwire::make(item->msg.xid, ofwire::FeaturesReply{dpid_, 256, 1}));
            else if (item->msg.is<ofwire::EchoRequest>())
                send(ofwire::make(item->msg.xid, ofwire::EchoReply{item->msg.as<ofwire::EchoRequest>().data}));
        }
    }

    Scheduler& sched_;
    DatapathId dpid_;
    std::shared_ptr<simnet::PipeEnd> end_;
    ofwire::StreamDecoder dec_;
};

// Controller end: runs the session state machine for the handshake and logs
// everything it receives. Works as a middleware ControllerPort or directly.
class ScriptedController : public mw::ControllerPort {
public:
    ScriptedController(Scheduler& sched, TimeUs delay) : sched_(sched), delay_(delay) { }

    std::function<void(mw::ConnId, ByteView)> up_bytes;

    std::shared_ptr<mw::Link> open_channel(mw::ConnId id) override
    {
        auto [mine, theirs] = simnet::make_pipe(sched_, delay_);
        theirs->set_receiver([this, id](ByteView b) {
            if (up_bytes)
                up_bytes(id, b);
        });
        accept(mine);
        return theirs;
    }
    void shutdown() override { shut_down = true; }

    void accept(std::shared_ptr<simnet::PipeEnd> end)
    {
        end_ = std::move(end);
        end_->set_receiver([this](ByteView b) { on_bytes(b); });
    }
    void send(const ofwire::OfMessage& m) { end_->send(ofwire::encode(m)); }
    bool established() const { return fsm_.state == ofwire::SessionState::Established; }

    std::vector<LoggedMsg> log;
    bool shut_down = false;

private:
    void on_bytes(ByteView b)
    {
        dec_.feed(b);
        while (auto item = dec_.next()) {
            log.push_back({sched_.now(), item->raw, item->msg});
            auto r = ofwire::step(fsm_, ofwire::Received{item->msg});
            fsm_ = r.fsm;
            for (auto& a : r.actions)
                if (auto* s = std::get_if<ofwire::Send>(&a))
                    send(s->msg);
        }
    }

    Scheduler& sched_;
    TimeUs delay_;
    std::shared_ptr<simnet::PipeEnd> end_;
    ofwire::StreamDecoder dec_;
    ofwire::SessionFsm fsm_ = ofwire::SessionFsm::for_peer(ofwire::PeerRole::Switch);
};

// The 200-message exchange: alternating switch->controller and controller->switch
// messages of every forwarded kind, 5 ms apart.
inline std::vector<std::pair<bool, ofwire::OfMessage>> scripted_exchange(std::size_t n = 200)
{
    using namespace ofwire;
    std::vector<std::pair<bool, OfMessage>> out;
    for (std::size_t i = 0; i < n; ++i) {
        const auto xid = static_cast<std::uint32_t>(1000 + i);
        const bool up = i % 2 == 0;
        Frame f{MacAddr{1 + i % 7}, MacAddr{2 + i % 5}, Ipv4Addr{0x0a000001u + static_cast<std::uint32_t>(i % 9)},
                Ipv4Addr{0x0a000002}, 100};
        if (up) {
            if (i % 10 == 4) {
                Bytes raw{kVersion, 12, 0, 16, 0, 0, 0, 0, 1, 2, 3, 4, 5, 6, 7, 8}; // port status, opaque
                raw[7] = static_cast<std::uint8_t>(xid);
                out.emplace_back(true, make(static_cast<std::uint32_t>(raw[7]), Passthrough{raw}));
            } else {
                out.emplace_back(true, make(xid, PacketIn{static_cast<std::uint32_t>(i), 1 + static_cast<std::uint32_t>(i % 3), 0,
                                                          encode_frame(f)}));
            }
        } else if (i % 4 == 1) {
            FlowMod fm;
            fm.match.eth_dst = f.eth_dst;
            fm.priority = static_cast<std::uint16_t>(i);
            fm.idle_timeout = 5;
            fm.actions = {{2}};
            out.emplace_back(false, make(xid, fm));
        } else {
            PacketOut po;
            po.buffer_id = static_cast<std::uint32_t>(i - 1);
            po.in_port = 1;
            po.actions = {{2}};
            out.emplace_back(false, make(xid, po));
        }
    }
    return out;
}

} // namespace sdnchain::testing

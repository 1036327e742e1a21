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


#include "sdnchain/ofwire/session.hpp"

#include "sdnchain/core/error.hpp"

namespace sdnchain::ofwire {

std::string_view to_string(SessionState s)
{
    switch (s) {
    case SessionState::AwaitHello: return "AwaitHello";
    case SessionState::AwaitFeatures: return "AwaitFeatures";
    case SessionState::Established: return "Established";
    case SessionState::Disconnected: return "Disconnected";
    }
    return "?";
}

namespace {

constexpr std::uint16_t kErrHelloFailed = 0;
constexpr std::uint16_t kHelloFailedIncompatible = 0;

void on_message(StepResult& r, const OfMessage& msg)
{
    SessionFsm& fsm = r.fsm;
    auto& out = r.actions;

    // Echo is hop-by-hop in every live state.
    if (auto* echo = std::get_if<EchoRequest>(&msg.body)) {
        out.push_back(Send{make(msg.xid, EchoReply{echo->data})});
        return;
    }
    if (msg.is<EchoReply>()) {
        fsm.missed_echoes = 0;
        fsm.echo_outstanding = false;
        return;
    }

    switch (fsm.state) {
    case SessionState::AwaitHello:
        if (!msg.is<Hello>()) {
            out.push_back(Send{make(msg.xid, ErrorMsg{kErrHelloFailed, kHelloFailedIncompatible})});
            out.push_back(Disconnect{"expected Hello, got " + std::string(type_name(msg.type_code()))});
            fsm.state = SessionState::Disconnected;
            return;
        }
        if (fsm.peer_role == PeerRole::Switch) {
            out.push_back(Send{make(msg.xid, Hello{})});
            out.push_back(Send{make(msg.xid + 1, FeaturesRequest{})});
            fsm.state = SessionState::AwaitFeatures;
        } else {
            fsm.state = SessionState::Established;
        }
        return;
    case SessionState::AwaitFeatures:
        if (auto* fr = std::get_if<FeaturesReply>(&msg.body)) {
            fsm.features = *fr;
            fsm.state = SessionState::Established;
        }
        out.push_back(Deliver{msg});
        return;
    case SessionState::Established:
        out.push_back(Deliver{msg});
        return;
    case SessionState::Disconnected:
        return;
    }
}

void on_tick(StepResult& r, TimeUs now)
{
    SessionFsm& fsm = r.fsm;
    if (fsm.state != SessionState::Established)
        return;
    if (fsm.last_echo_sent && now - *fsm.last_echo_sent < fsm.echo_interval)
        return;
    if (fsm.echo_outstanding) {
        ++fsm.missed_echoes;
        if (fsm.missed_echoes >= kMaxMissedEchoes) {
            fsm.state = SessionState::Disconnected;
            r.actions.push_back(Disconnect{"no response to three Echo-Requests"});
            return;
        }
    }
    r.actions.push_back(Send{make(fsm.next_echo_xid++, EchoRequest{})});
    fsm.last_echo_sent = now;
    fsm.echo_outstanding = true;
}

} // namespace

StepResult step(SessionFsm fsm, const SessionEvent& event)
{
    if (fsm.state == SessionState::Disconnected)
        throw Error(Errc::InvariantViolation, "step on a Disconnected session");
    StepResult r{std::move(fsm), {}};
    if (auto* rx = std::get_if<Received>(&event))
        on_message(r, rx->msg);
    else
        on_tick(r, std::get<TimerTick>(event).now);
    return r;
}

} // namespace sdnchain::ofwire

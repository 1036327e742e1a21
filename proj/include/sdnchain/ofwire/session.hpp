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

#include "sdnchain/core/scheduler.hpp"
#include "sdnchain/ofwire/message.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace sdnchain::ofwire {

enum class SessionState { AwaitHello, AwaitFeatures, Established, Disconnected };
enum class PeerRole { Controller, Switch };

std::string_view to_string(SessionState s);

constexpr TimeUs kDefaultEchoInterval = 5 * kSec;
constexpr int kMaxMissedEchoes = 3;
constexpr TimeUs kSchedulerTick = 100 * kMs;

// Per-connection protocol state. The owner of a session feeds it received messages
// and periodic ticks, and executes the returned actions.
//
// With a Switch peer we play the controller: the switch's Hello is answered with
// Hello + FeaturesRequest and the session is Established on FeaturesReply. With a
// Controller peer we play the switch: our Hello is sent by the owner when the
// connection opens, and the controller's Hello establishes the session.
struct SessionFsm {
    SessionState state = SessionState::AwaitHello;
    PeerRole peer_role = PeerRole::Switch;
    std::optional<TimeUs> last_echo_sent;
    bool echo_outstanding = false;
    int missed_echoes = 0;
    TimeUs echo_interval = kDefaultEchoInterval;
    std::uint32_t next_echo_xid = 0x10000;
    std::optional<FeaturesReply> features;

    static SessionFsm for_peer(PeerRole role) { SessionFsm f; f.peer_role = role; return f; }
};

struct Received {
    OfMessage msg;
};

struct TimerTick {
    TimeUs now = 0;
};

using SessionEvent = std::variant<Received, TimerTick>;

struct Send {
    OfMessage msg;
};

// Hand the message to the session owner (forwarding, local handling).
struct Deliver {
    OfMessage msg;
};

struct Disconnect {
    std::string reason;
};

using SessionAction = std::variant<Send, Deliver, Disconnect>;

struct StepResult {
    SessionFsm fsm;
    std::vector<SessionAction> actions;
};

// Pure transition function. Throws Error(InvariantViolation) if fsm is Disconnected.
StepResult step(SessionFsm fsm, const SessionEvent& event);

} // namespace sdnchain::ofwire

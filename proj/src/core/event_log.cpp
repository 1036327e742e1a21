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


#include "sdnchain/core/event_log.hpp"

#include "sdnchain/core/error.hpp"

namespace sdnchain {

std::string_view to_string(EventKind k)
{
    switch (k) {
    case EventKind::BlockCommitted: return "BlockCommitted";
    case EventKind::IntentTransition: return "IntentTransition";
    case EventKind::AnomalyRaised: return "AnomalyRaised";
    case EventKind::DefenseInstalled: return "DefenseInstalled";
    case EventKind::MappingChanged: return "MappingChanged";
    case EventKind::MetricsTick: return "MetricsTick";
    case EventKind::ScenarioEvent: return "ScenarioEvent";
    }
    return "?";
}

nlohmann::json to_json(const ApiEvent& e)
{
    nlohmann::ordered_json j;
    j["seq"] = e.seq;
    j["kind"] = to_string(e.kind);
    j["timestamp_us"] = e.timestamp_us;
    j["payload"] = e.payload;
    return j;
}

std::uint64_t EventLog::append(EventKind kind, nlohmann::json payload, TimeUs at)
{
    ApiEvent ev;
    std::vector<Sink> sinks;
    {
        std::lock_guard lk(mu_);
        ev = ApiEvent{next_++, kind, std::move(payload), at};
        buf_.push_back(ev);
        while (buf_.size() > capacity_)
            buf_.pop_front();
        sinks = sinks_;
    }
    for (const auto& s : sinks)
        s(ev);
    return ev.seq;
}

std::vector<ApiEvent> EventLog::since(std::uint64_t from_seq, std::size_t max) const
{
    std::lock_guard lk(mu_);
    if (from_seq > next_)
        throw Error(Errc::InvalidArgument, "from_seq beyond the stream head");
    const std::uint64_t first = buf_.empty() ? next_ : buf_.front().seq;
    if (from_seq < first && first > 1)
        throw Error(Errc::SeqTooOld, "events before seq " + std::to_string(first) + " were evicted");
    std::vector<ApiEvent> out;
    for (const auto& e : buf_) {
        if (out.size() >= max)
            break;
        if (e.seq >= from_seq)
            out.push_back(e);
    }
    return out;
}

std::uint64_t EventLog::last_seq() const
{
    std::lock_guard lk(mu_);
    return next_ - 1;
}

std::uint64_t EventLog::first_retained() const
{
    std::lock_guard lk(mu_);
    return buf_.empty() ? next_ : buf_.front().seq;
}

void EventLog::subscribe(Sink sink)
{
    std::lock_guard lk(mu_);
    sinks_.push_back(std::move(sink));
}

} // namespace sdnchain

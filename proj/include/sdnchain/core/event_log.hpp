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

#include <json.hpp>

#include <deque>
#include <functional>
#include <mutex>
#include <string>
#include <vector>

namespace sdnchain {

enum class EventKind {
    BlockCommitted,
    IntentTransition,
    AnomalyRaised,
    DefenseInstalled,
    MappingChanged,
    MetricsTick,
    ScenarioEvent,
};

std::string_view to_string(EventKind k);

struct ApiEvent {
    std::uint64_t seq = 0;
    EventKind kind = EventKind::ScenarioEvent;
    nlohmann::json payload;
    TimeUs timestamp_us = 0;
};

nlohmann::json to_json(const ApiEvent& e);

// Ordered, bounded event stream. Sequence numbers start at 1 and never repeat.
// Safe to read from other threads while one thread appends.
class EventLog {
public:
    using Sink = std::function<void(const ApiEvent&)>;

    explicit EventLog(std::size_t capacity = 10000) : capacity_(capacity) { }

    std::uint64_t append(EventKind kind, nlohmann::json payload, TimeUs at);
    // Events with seq >= from_seq. Throws SeqTooOld when from_seq was evicted and
    // InvalidArgument when from_seq is beyond the next sequence number.
    std::vector<ApiEvent> since(std::uint64_t from_seq, std::size_t max = SIZE_MAX) const;
    std::uint64_t last_seq() const;
    std::uint64_t first_retained() const;
    std::vector<ApiEvent> all() const { return since(first_retained()); }

    // Called synchronously from append(), in order, on the appending thread.
    void subscribe(Sink sink);

private:
    std::size_t capacity_;
    mutable std::mutex mu_;
    std::deque<ApiEvent> buf_;
    std::uint64_t next_ = 1;
    std::vector<Sink> sinks_;
};

} // namespace sdnchain

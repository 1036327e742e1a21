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

#include <cstdint>
#include <functional>
#include <memory>
#include <queue>
#include <vector>

namespace sdnchain {

// Virtual time in microseconds.
using TimeUs = std::int64_t;

constexpr TimeUs kMs = 1000;
constexpr TimeUs kSec = 1000 * kMs;

constexpr double to_seconds(TimeUs t) { return static_cast<double>(t) / kSec; }
constexpr TimeUs from_seconds(double s) { return static_cast<TimeUs>(s * kSec + (s >= 0 ? 0.5 : -0.5)); }

class Clock {
public:
    virtual ~Clock() = default;
    virtual TimeUs now() const = 0;
};

// Handle to a scheduled event. Dropping it does not cancel the event.
class TimerHandle {
public:
    TimerHandle() = default;
    void cancel() { if (alive_) *alive_ = false; }
    bool pending() const { return alive_ && *alive_; }

private:
    friend class Scheduler;
    explicit TimerHandle(std::shared_ptr<bool> alive) : alive_(std::move(alive)) { }
    std::shared_ptr<bool> alive_;
};

// Deterministic discrete-event loop. Execution order is (time, insertion sequence).
class Scheduler : public Clock {
public:
    using Task = std::function<void()>;

    TimeUs now() const override { return now_; }

    TimerHandle at(TimeUs when, Task task);
    TimerHandle after(TimeUs delay, Task task) { return at(now_ + delay, std::move(task)); }

    // Runs every event with time <= until, then parks the clock at until.
    void run_until(TimeUs until);
    void run_for(TimeUs span) { run_until(now_ + span); }
    // Runs until the queue is empty or max_events have executed. Returns events executed.
    std::size_t run(std::size_t max_events = SIZE_MAX);
    bool step();

    bool empty() const { return queue_.empty(); }
    std::size_t size() const { return queue_.size(); }
    std::uint64_t executed() const { return executed_; }

private:
    struct Event {
        TimeUs when;
        std::uint64_t seq;
        std::shared_ptr<bool> alive;
        Task task;
    };
    struct Later {
        bool operator()(const Event& a, const Event& b) const
        {
            return a.when != b.when ? a.when > b.when : a.seq > b.seq;
        }
    };

    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    TimeUs now_ = 0;
    std::uint64_t next_seq_ = 0;
    std::uint64_t executed_ = 0;
};

} // namespace sdnchain

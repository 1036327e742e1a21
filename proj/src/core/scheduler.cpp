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


#include "sdnchain/core/scheduler.hpp"

#include "sdnchain/core/error.hpp"

namespace sdnchain {

TimerHandle Scheduler::at(TimeUs when, Task task)
{
    if (when < now_)
        when = now_;
    auto alive = std::make_shared<bool>(true);
    queue_.push(Event{when, next_seq_++, alive, std::move(task)});
    return TimerHandle(std::move(alive));
}

bool Scheduler::step()
{
    while (!queue_.empty()) {
        Event ev = std::move(const_cast<Event&>(queue_.top()));
        queue_.pop();
        if (!*ev.alive)
            continue;
        *ev.alive = false;
        now_ = ev.when;
        ++executed_;
        ev.task();
        return true;
    }
    return false;
}

void Scheduler::run_until(TimeUs until)
{
    while (!queue_.empty()) {
        const Event& top = queue_.top();
        if (!*top.alive) {
            queue_.pop();
            continue;
        }
        if (top.when > until)
            break;
        step();
    }
    if (until > now_)
        now_ = until;
}

std::size_t Scheduler::run(std::size_t max_events)
{
    std::size_t n = 0;
    while (n < max_events && step())
        ++n;
    return n;
}

} // namespace sdnchain

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

#include "sdnchain/mw/middleware.hpp"

#include <functional>
#include <memory>

namespace sdnchain::simnet {

// One end of an in-order, fixed-delay byte pipe on the virtual clock.
class PipeEnd : public mw::Link {
public:
    using BytesFn = std::function<void(ByteView)>;
    using ClosedFn = std::function<void()>;

    PipeEnd(Scheduler& sched, TimeUs delay) : sched_(sched), delay_(delay) { }

    // What this end receives (sent by the peer).
    void set_receiver(BytesFn on_bytes, ClosedFn on_closed = {});

    void send(const Bytes& bytes) override;
    void close() override;
    bool closed() const { return closed_; }
    std::uint64_t bytes_sent() const { return sent_; }

private:
    friend std::pair<std::shared_ptr<PipeEnd>, std::shared_ptr<PipeEnd>> make_pipe(Scheduler&, TimeUs);

    Scheduler& sched_;
    TimeUs delay_;
    std::weak_ptr<PipeEnd> peer_;
    BytesFn on_bytes_;
    ClosedFn on_closed_;
    bool closed_ = false;
    std::uint64_t sent_ = 0;
};

std::pair<std::shared_ptr<PipeEnd>, std::shared_ptr<PipeEnd>> make_pipe(Scheduler& sched, TimeUs delay);

} // namespace sdnchain::simnet

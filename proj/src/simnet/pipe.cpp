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


#include "sdnchain/simnet/pipe.hpp"

namespace sdnchain::simnet {

void PipeEnd::set_receiver(BytesFn on_bytes, ClosedFn on_closed)
{
    on_bytes_ = std::move(on_bytes);
    on_closed_ = std::move(on_closed);
}

void PipeEnd::send(const Bytes& bytes)
{
    if (closed_)
        return;
    sent_ += bytes.size();
    std::weak_ptr<PipeEnd> peer = peer_;
    sched_.after(delay_, [peer, bytes] {
        auto p = peer.lock();
        if (p && p->on_bytes_)
            p->on_bytes_(bytes);
    });
}

void PipeEnd::close()
{
    if (closed_)
        return;
    closed_ = true;
    auto peer = peer_.lock();
    if (!peer)
        return;
    peer->closed_ = true;
    std::weak_ptr<PipeEnd> w = peer;
    // Queued behind any bytes already in flight.
    sched_.after(delay_, [w] {
        auto p = w.lock();
        if (p && p->on_closed_)
            p->on_closed_();
    });
}

std::pair<std::shared_ptr<PipeEnd>, std::shared_ptr<PipeEnd>> make_pipe(Scheduler& sched, TimeUs delay)
{
    auto a = std::make_shared<PipeEnd>(sched, delay);
    auto b = std::make_shared<PipeEnd>(sched, delay);
    a->peer_ = b;
    b->peer_ = a;
    return {a, b};
}

} // namespace sdnchain::simnet

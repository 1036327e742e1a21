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

#include "sdnchain/ofwire/message.hpp"

#include <deque>
#include <optional>
#include <utility>

namespace sdnchain::ofwire {

// Big-endian OpenFlow 1.3 framing. Throws Error(InvariantViolation) for messages
// that break the type invariants (empty PacketIn frame, oversize, bad passthrough).
Bytes encode(const OfMessage& msg);

OfHeader peek_header(ByteView bytes);

struct Decoded {
    OfMessage msg;
    std::size_t consumed = 0;
};

// Returns nullopt when more bytes are needed. Throws Error(Malformed) for
// length < 8, version != 4, or a known body that does not parse.
std::optional<Decoded> try_decode(ByteView bytes);

// Throwing form: Error(Incomplete) instead of nullopt. Returns the message and the
// unconsumed tail of the input.
std::pair<OfMessage, ByteView> decode(ByteView bytes);

// Reassembles a TCP byte stream into whole messages, keeping each message's raw bytes
// so a proxy can forward them untouched.
class StreamDecoder {
public:
    struct Item {
        OfMessage msg;
        Bytes raw;
    };

    void feed(ByteView chunk) { buf_.insert(buf_.end(), chunk.begin(), chunk.end()); }
    // Throws Error(Malformed); the stream is unusable afterwards.
    std::optional<Item> next();
    std::size_t buffered() const { return buf_.size(); }

private:
    Bytes buf_;
};

} // namespace sdnchain::ofwire

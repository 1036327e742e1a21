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

#include <map>
#include <span>
#include <unordered_map>

namespace sdnchain::simnet {

struct FlowEntry {
    ofwire::MatchFields match;
    std::uint16_t priority = 0;
    std::vector<ofwire::Action> actions; // empty = drop
    std::uint16_t idle_timeout = 0;      // seconds, 0 = none
    std::uint16_t hard_timeout = 0;
    std::uint64_t cookie = 0;
    std::uint64_t seq = 0; // install order; breaks priority ties (earliest wins)
    TimeUs installed_at = 0;
    TimeUs last_hit = 0;
    std::uint64_t packets = 0;
    std::uint64_t bytes = 0;
};

// Priority-ordered table. Lookup walks priority levels from the top and only
// scans entries whose eth_dst matches the frame or is wildcarded.
class FlowTable {
public:
    FlowTable() = default;
    FlowTable(const FlowTable&) = delete; // buckets point into entries_
    FlowTable& operator=(const FlowTable&) = delete;
    FlowTable(FlowTable&&) = default;
    FlowTable& operator=(FlowTable&&) = default;

    // Add replaces an entry with identical match and priority. Modify rewrites
    // the actions of identical matches. Delete removes identical matches, or
    // everything when the match is empty.
    void apply(const ofwire::FlowMod& fm, TimeUs now);
    const FlowEntry* lookup(std::uint32_t in_port, const Frame& f) const;
    // lookup() plus counter update.
    const FlowEntry* hit(std::uint32_t in_port, const Frame& f, TimeUs now);
    // Removes idle/hard-expired entries. Returns how many were removed.
    std::size_t expire(TimeUs now);

    std::size_t size() const { return entries_.size(); }
    std::vector<FlowEntry> entries() const; // in lookup order
    void clear();

private:
    struct Level {
        std::unordered_map<std::uint64_t, std::vector<FlowEntry*>> by_dst; // eth_dst -> entries in seq order
        std::vector<FlowEntry*> wildcard;                                  // entries without eth_dst
    };

    void insert(FlowEntry e);
    void erase(std::uint64_t seq);

    std::map<std::uint64_t, FlowEntry> entries_;                  // by seq
    std::map<std::uint16_t, Level, std::greater<>> levels_;       // highest priority first
    std::uint64_t next_seq_ = 1;
};

// Linear reference: highest priority, then earliest install.
const FlowEntry* lookup_linear(std::span<const FlowEntry> entries, std::uint32_t in_port, const Frame& f);

} // namespace sdnchain::simnet

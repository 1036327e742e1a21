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


#include "sdnchain/simnet/flow_table.hpp"

#include <algorithm>

namespace sdnchain::simnet {

void FlowTable::insert(FlowEntry e)
{
    e.seq = next_seq_++;
    auto& level = levels_[e.priority];
    FlowEntry* p = &entries_.emplace(e.seq, std::move(e)).first->second;
    if (p->match.eth_dst)
        level.by_dst[p->match.eth_dst->value].push_back(p);
    else
        level.wildcard.push_back(p);
}

void FlowTable::erase(std::uint64_t seq)
{
    auto it = entries_.find(seq);
    if (it == entries_.end())
        return;
    auto lv = levels_.find(it->second.priority);
    FlowEntry* p = &it->second;
    auto drop = [p](std::vector<FlowEntry*>& v) { v.erase(std::find(v.begin(), v.end(), p)); };
    if (it->second.match.eth_dst) {
        auto b = lv->second.by_dst.find(it->second.match.eth_dst->value);
        drop(b->second);
        if (b->second.empty())
            lv->second.by_dst.erase(b);
    } else {
        drop(lv->second.wildcard);
    }
    if (lv->second.by_dst.empty() && lv->second.wildcard.empty())
        levels_.erase(lv);
    entries_.erase(it);
}

void FlowTable::apply(const ofwire::FlowMod& fm, TimeUs now)
{
    using ofwire::FlowModCommand;
    std::vector<std::uint64_t> same;
    if (fm.command == FlowModCommand::Delete) {
        for (const auto& [seq, e] : entries_)
            if (e.match == fm.match)
                same.push_back(seq);
    } else if (auto lv = levels_.find(fm.priority); lv != levels_.end()) {
        // Identical matches share the priority level and the eth_dst bucket.
        const std::vector<FlowEntry*>* bucket = &lv->second.wildcard;
        if (fm.match.eth_dst) {
            auto b = lv->second.by_dst.find(fm.match.eth_dst->value);
            bucket = b == lv->second.by_dst.end() ? nullptr : &b->second;
        }
        if (bucket)
            for (const FlowEntry* e : *bucket)
                if (e->match == fm.match)
                    same.push_back(e->seq);
    }
    switch (fm.command) {
    case FlowModCommand::Add: {
        for (auto s : same)
            erase(s);
        FlowEntry e;
        e.match = fm.match;
        e.priority = fm.priority;
        e.actions = fm.actions;
        e.idle_timeout = fm.idle_timeout;
        e.hard_timeout = fm.hard_timeout;
        e.cookie = fm.cookie;
        e.installed_at = now;
        e.last_hit = now;
        insert(std::move(e));
        break;
    }
    case FlowModCommand::Modify:
        for (auto s : same)
            entries_.at(s).actions = fm.actions;
        break;
    case FlowModCommand::Delete:
        if (fm.match.empty()) {
            clear();
            break;
        }
        for (auto s : same)
            erase(s);
        break;
    }
}

const FlowEntry* FlowTable::lookup(std::uint32_t in_port, const Frame& f) const
{
    for (const auto& [prio, level] : levels_) {
        const FlowEntry* best = nullptr;
        auto consider = [&](const std::vector<FlowEntry*>& bucket) {
            for (const FlowEntry* e : bucket) {
                if (best && best->seq < e->seq)
                    break; // buckets are appended in increasing seq order
                if (e->match.matches(in_port, f)) {
                    best = e;
                    break;
                }
            }
        };
        if (auto it = level.by_dst.find(f.eth_dst.value); it != level.by_dst.end())
            consider(it->second);
        consider(level.wildcard);
        if (best)
            return best;
    }
    return nullptr;
}

const FlowEntry* FlowTable::hit(std::uint32_t in_port, const Frame& f, TimeUs now)
{
    auto* e = const_cast<FlowEntry*>(lookup(in_port, f));
    if (e) {
        ++e->packets;
        e->bytes += f.size;
        e->last_hit = now;
    }
    return e;
}

std::size_t FlowTable::expire(TimeUs now)
{
    std::vector<std::uint64_t> dead;
    for (const auto& [seq, e] : entries_) {
        bool idle = e.idle_timeout && now - e.last_hit >= e.idle_timeout * kSec;
        bool hard = e.hard_timeout && now - e.installed_at >= e.hard_timeout * kSec;
        if (idle || hard)
            dead.push_back(seq);
    }
    for (auto s : dead)
        erase(s);
    return dead.size();
}

std::vector<FlowEntry> FlowTable::entries() const
{
    std::vector<FlowEntry> out;
    out.reserve(entries_.size());
    for (const auto& [seq, e] : entries_)
        out.push_back(e);
    std::stable_sort(out.begin(), out.end(), [](const FlowEntry& a, const FlowEntry& b) { return a.priority > b.priority; });
    return out;
}

void FlowTable::clear()
{
    entries_.clear();
    levels_.clear();
}

const FlowEntry* lookup_linear(std::span<const FlowEntry> entries, std::uint32_t in_port, const Frame& f)
{
    const FlowEntry* best = nullptr;
    for (const auto& e : entries) {
        if (!e.match.matches(in_port, f))
            continue;
        if (!best || e.priority > best->priority || (e.priority == best->priority && e.seq < best->seq))
            best = &e;
    }
    return best;
}

} // namespace sdnchain::simnet

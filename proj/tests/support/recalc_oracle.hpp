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

#include "sdnchain/intent/translate.hpp"

#include "oracles.hpp"

namespace sdnchain::testing {

inline std::vector<intent::InstallFlow> flows_for(const std::vector<intent::InstallFlow>& all, MacAddr src,
                                                  MacAddr dst)
{
    std::vector<intent::InstallFlow> out;
    for (const auto& f : all)
        if (f.flow_mod.match.eth_src == src && f.flow_mod.match.eth_dst == dst)
            out.push_back(f);
    return out;
}

// Entries the oracle path needs, downstream first.
inline std::vector<intent::InstallFlow> expected_entries(const simnet::Topology& t, std::size_t a, std::size_t b,
                                                         const std::vector<std::size_t>& path)
{
    std::vector<intent::InstallFlow> out;
    for (std::size_t i = path.size(); i-- > 0;) {
        ofwire::FlowMod fm;
        fm.cookie = intent::kRecalcCookie;
        fm.match.eth_src = t.host(a).mac;
        fm.match.eth_dst = t.host(b).mac;
        fm.priority = intent::kRecalcPriority;
        fm.actions.push_back({i + 1 < path.size() ? t.port_toward(path[i], path[i + 1]) : t.host_port(b)});
        out.push_back({t.dpid(path[i]), fm});
    }
    return out;
}

struct RecalcCheck {
    std::size_t pairs = 0;   // ordered host pairs examined
    std::size_t rerouted = 0;
    std::size_t wrong = 0;   // pairs whose entries differ from the oracle, plus stray entries
};

// recalculate_paths around `avoid` against brute-force paths: pairs whose old
// path crossed `avoid` get exactly the entries of the new oracle path, others none.
inline RecalcCheck recalc_mismatches(const simnet::Topology& t, std::size_t avoid,
                                     const std::set<std::size_t>& removed = {})
{
    RecalcCheck r;
    auto got = intent::recalculate_paths(t, avoid, removed);
    auto excluded = removed;
    excluded.insert(avoid);
    std::size_t expected_total = 0;
    for (std::size_t a = 0; a < t.host_count(); ++a)
        for (std::size_t b = 0; b < t.host_count(); ++b) {
            if (a == b)
                continue;
            ++r.pairs;
            auto sa = t.host_switch(a), sb = t.host_switch(b);
            auto mine = flows_for(got, t.host(a).mac, t.host(b).mac);
            auto before = brute_force_path(t, sa, sb, removed);
            bool crosses = std::find(before.begin(), before.end(), avoid) != before.end();
            if (sa == avoid || sb == avoid || !crosses) {
                r.wrong += !mine.empty();
                continue;
            }
            auto after = brute_force_path(t, sa, sb, excluded);
            auto want = after.empty() ? std::vector<intent::InstallFlow>{} : expected_entries(t, a, b, after);
            expected_total += want.size();
            r.rerouted += !want.empty();
            r.wrong += mine != want;
        }
    r.wrong += got.size() != expected_total;
    return r;
}

} // namespace sdnchain::testing

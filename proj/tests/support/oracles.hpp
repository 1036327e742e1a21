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

#include "sdnchain/simnet/topology.hpp"

#include <set>
#include <vector>

namespace sdnchain::testing {

// Every simple path from `from` to `to` avoiding `excluded`, by exhaustive DFS.
inline void all_simple_paths(const simnet::Topology& t, std::size_t cur, std::size_t to,
                             const std::set<std::size_t>& excluded, std::vector<std::size_t>& stack,
                             std::vector<std::vector<std::size_t>>& out)
{
    stack.push_back(cur);
    if (cur == to) {
        out.push_back(stack);
    } else {
        for (const auto& p : t.ports(cur)) {
            if (p.kind != simnet::PortKind::SwitchLink || excluded.count(p.peer))
                continue;
            if (std::find(stack.begin(), stack.end(), p.peer) != stack.end())
                continue;
            all_simple_paths(t, p.peer, to, excluded, stack, out);
        }
    }
    stack.pop_back();
}

// Fewest hops, then lexicographically smallest switch-index sequence.
inline std::vector<std::size_t> brute_force_path(const simnet::Topology& t, std::size_t from, std::size_t to,
                                                 const std::set<std::size_t>& excluded = {})
{
    if (excluded.count(from) || excluded.count(to))
        return {};
    std::vector<std::vector<std::size_t>> paths;
    std::vector<std::size_t> stack;
    all_simple_paths(t, from, to, excluded, stack, paths);
    if (paths.empty())
        return {};
    return *std::min_element(paths.begin(), paths.end(), [](const auto& a, const auto& b) {
        return a.size() != b.size() ? a.size() < b.size() : a < b;
    });
}

} // namespace sdnchain::testing

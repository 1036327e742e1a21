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


#include "sdnchain/parallel/kernels.hpp"

#include <omp.h>

#include <algorithm>

namespace sdnchain::parallel {

std::uint64_t item_seed(std::uint64_t base, std::uint64_t index)
{
    // splitmix64 over the pair.
    std::uint64_t z = base + 0x9e3779b97f4a7c15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

int max_threads()
{
    return omp_get_max_threads();
}

std::vector<SweepCell> sweep_grid(const std::vector<chain::Algorithm>& algorithms,
                                  const std::vector<std::uint32_t>& ns, const std::vector<TimeUs>& delays)
{
    std::vector<SweepCell> out;
    for (auto a : algorithms)
        for (auto n : ns)
            for (auto d : delays)
                out.push_back({a, n, d});
    return out;
}

namespace {

chain::ConsensusConfig cell_config(const SweepCell& c)
{
    chain::ConsensusConfig cfg;
    cfg.algorithm = c.algorithm;
    cfg.n_nodes = c.n_nodes;
    cfg.link_delay = c.link_delay;
    return cfg;
}

SweepPoint run_cell(const SweepCell& c, std::uint32_t rounds, std::uint64_t seed)
{
    return {c, chain::measure_consensus_latency(cell_config(c), rounds, seed)};
}

chain::FaultTrialResult run_trial(const FaultCampaign& c, std::uint32_t i)
{
    return chain::run_fault_trial({c.n_nodes, c.link_delay, item_seed(c.seed, i)});
}

// Checks of one block that do not depend on any other block's verdict.
std::optional<std::string> check_block(std::span<const chain::Block> blocks, std::size_t i)
{
    const auto& b = blocks[i];
    if (b.height != i)
        return "height out of sequence";
    auto expected_prev = i == 0 ? chain::kZeroDigest : blocks[i - 1].block_hash;
    if (b.prev_hash != expected_prev)
        return "prev_hash link broken";
    for (const auto& tx : b.txs)
        if (tx.compute_hash() != tx.tx_hash)
            return "tx hash mismatch";
    if (b.compute_hash() != b.block_hash)
        return "block hash mismatch";
    return std::nullopt;
}

} // namespace

std::vector<SweepPoint> consensus_sweep(const std::vector<SweepCell>& cells, std::uint32_t rounds, std::uint64_t seed)
{
    std::vector<SweepPoint> out(cells.size());
    const auto n = static_cast<std::int64_t>(cells.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < n; ++i)
        out[i] = run_cell(cells[i], rounds, item_seed(seed, i));
    return out;
}

std::vector<SweepPoint> consensus_sweep_serial(const std::vector<SweepCell>& cells, std::uint32_t rounds,
                                               std::uint64_t seed)
{
    std::vector<SweepPoint> out;
    for (std::size_t i = 0; i < cells.size(); ++i)
        out.push_back(run_cell(cells[i], rounds, item_seed(seed, i)));
    return out;
}

std::vector<chain::FaultTrialResult> fault_trials(const FaultCampaign& c)
{
    std::vector<chain::FaultTrialResult> out(c.trials);
    const auto n = static_cast<std::int64_t>(c.trials);
#pragma omp parallel for schedule(dynamic, 8)
    for (std::int64_t i = 0; i < n; ++i)
        out[i] = run_trial(c, static_cast<std::uint32_t>(i));
    return out;
}

std::vector<chain::FaultTrialResult> fault_trials_serial(const FaultCampaign& c)
{
    std::vector<chain::FaultTrialResult> out;
    for (std::uint32_t i = 0; i < c.trials; ++i)
        out.push_back(run_trial(c, i));
    return out;
}

FaultSummary summarize(const std::vector<chain::FaultTrialResult>& results)
{
    FaultSummary s;
    for (const auto& r : results) {
        ++s.trials;
        s.safety_violations += !r.safe;
        s.liveness_failures += !r.live;
        s.byzantine_trials += r.byzantine_primary;
        s.crashed_nodes += r.crashed;
        s.view_changes += r.view_changes;
        s.slowest = std::max(s.slowest, r.finished_at);
    }
    return s;
}

std::vector<std::uint64_t> batch_lookup(const simnet::FlowTable& table, std::span<const Probe> probes)
{
    std::vector<std::uint64_t> out(probes.size());
    const auto n = static_cast<std::int64_t>(probes.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto* e = table.lookup(probes[i].in_port, probes[i].frame);
        out[i] = e ? e->seq : 0;
    }
    return out;
}

std::vector<std::uint64_t> batch_lookup_serial(const simnet::FlowTable& table, std::span<const Probe> probes)
{
    const auto entries = table.entries();
    std::vector<std::uint64_t> out;
    out.reserve(probes.size());
    for (const auto& p : probes) {
        const auto* e = simnet::lookup_linear(entries, p.in_port, p.frame);
        out.push_back(e ? e->seq : 0);
    }
    return out;
}

chain::VerifyResult verify_chain(std::span<const chain::Block> blocks)
{
    const auto n = static_cast<std::int64_t>(blocks.size());
    std::int64_t first_bad = n;
    std::vector<std::optional<std::string>> why(blocks.size());
#pragma omp parallel for schedule(dynamic, 4) reduction(min : first_bad)
    for (std::int64_t i = 0; i < n; ++i) {
        why[i] = check_block(blocks, static_cast<std::size_t>(i));
        if (why[i])
            first_bad = std::min(first_bad, i);
    }
    if (first_bad == n)
        return {};
    return {false, static_cast<std::uint64_t>(first_bad), *why[first_bad]};
}

} // namespace sdnchain::parallel

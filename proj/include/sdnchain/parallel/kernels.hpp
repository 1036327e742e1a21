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

#include "sdnchain/chain/cluster.hpp"
#include "sdnchain/chain/ledger.hpp"
#include "sdnchain/simnet/flow_table.hpp"

#include <span>
#include <vector>

// OpenMP kernels. Each has a serial twin with identical results for any thread
// count; work items carry their own seeds and results land in fixed slots.
namespace sdnchain::parallel {

// Seed for work item `index` of a batch seeded with `base`.
std::uint64_t item_seed(std::uint64_t base, std::uint64_t index);

int max_threads();

struct SweepCell {
    chain::Algorithm algorithm = chain::Algorithm::Pbft;
    std::uint32_t n_nodes = 4;
    TimeUs link_delay = 10 * kMs;
};

struct SweepPoint {
    SweepCell cell;
    chain::LatencyStats stats;
};

// Cartesian product in (algorithm, n, delay) order.
std::vector<SweepCell> sweep_grid(const std::vector<chain::Algorithm>& algorithms,
                                  const std::vector<std::uint32_t>& ns, const std::vector<TimeUs>& delays);

std::vector<SweepPoint> consensus_sweep(const std::vector<SweepCell>& cells, std::uint32_t rounds, std::uint64_t seed);
std::vector<SweepPoint> consensus_sweep_serial(const std::vector<SweepCell>& cells, std::uint32_t rounds,
                                               std::uint64_t seed);

struct FaultCampaign {
    std::uint32_t n_nodes = 4;
    TimeUs link_delay = 10 * kMs;
    std::uint32_t trials = 1000;
    std::uint64_t seed = 1;
};

struct FaultSummary {
    std::uint32_t trials = 0;
    std::uint32_t safety_violations = 0;
    std::uint32_t liveness_failures = 0;
    std::uint32_t byzantine_trials = 0;
    std::uint32_t crashed_nodes = 0;
    std::uint64_t view_changes = 0;
    TimeUs slowest = 0;
};

std::vector<chain::FaultTrialResult> fault_trials(const FaultCampaign& c);
std::vector<chain::FaultTrialResult> fault_trials_serial(const FaultCampaign& c);
FaultSummary summarize(const std::vector<chain::FaultTrialResult>& results);

struct Probe {
    std::uint32_t in_port = 0;
    Frame frame;
};

// Install sequence number of the matching entry per probe, 0 for a miss.
std::vector<std::uint64_t> batch_lookup(const simnet::FlowTable& table, std::span<const Probe> probes);
std::vector<std::uint64_t> batch_lookup_serial(const simnet::FlowTable& table, std::span<const Probe> probes);

// Same verdict and first failing height as chain::verify_chain.
chain::VerifyResult verify_chain(std::span<const chain::Block> blocks);

} // namespace sdnchain::parallel

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

#include "sdnchain/chain/consensus.hpp"

#include <deque>
#include <functional>
#include <random>

namespace sdnchain::chain {

// Per-node processing model: each replica is a single FIFO server that spends
// recv_cost per inbound message and send_cost per outbound copy.
struct BusTiming {
    TimeUs recv_cost = 150;
    TimeUs send_cost = 20;
    double jitter = 0.05; // uniform +/- fraction of link_delay
};

enum class FaultKind { Honest, Crashed, Equivocating };

struct ClusterOptions {
    ConsensusConfig config;
    BusTiming timing;
    std::uint64_t seed = 1;
    std::vector<FaultKind> faults;           // empty means all honest
    std::vector<NodeId> equivocation_group; // receivers of the first conflicting proposal
};

struct HeightTiming {
    TimeUs proposed_at = -1;
    TimeUs primary_quorum_at = -1;
    std::map<NodeId, TimeUs> committed_at;
};

// n replicas on a delay-injecting virtual bus driven by a shared scheduler.
class Cluster {
public:
    using CommitHook = std::function<void(NodeId, const BlockPtr&, TimeUs)>;

    Cluster(Scheduler& sched, ClusterOptions opts);
    Cluster(const Cluster&) = delete;
    Cluster& operator=(const Cluster&) = delete;

    // Client broadcast of a request to every replica.
    void submit(const Transaction& tx);
    void on_commit(CommitHook hook) { hooks_.push_back(std::move(hook)); }

    std::size_t size() const { return nodes_.size(); }
    const Replica& replica(NodeId id) const { return nodes_.at(id).replica; }
    FaultKind fault(NodeId id) const { return nodes_.at(id).fault; }
    bool honest(NodeId id) const { return fault(id) == FaultKind::Honest; }
    // Lowest-numbered honest replica; the service answers queries from it.
    NodeId reference() const;
    const ClusterOptions& options() const { return opts_; }
    const std::map<std::uint64_t, HeightTiming>& timings() const { return timings_; }
    std::uint64_t messages_sent() const { return messages_; }
    // Height every honest replica has reached.
    std::uint64_t min_honest_height() const;
    // Latency of one height: primary quorum for PBFT, last honest commit for RPBFT.
    std::optional<TimeUs> latency(std::uint64_t height) const;

private:
    struct Node {
        Replica replica;
        FaultKind fault;
        TimeUs busy_until = 0;
        TimerHandle timer;
        std::optional<TimeUs> timer_at;
    };

    TimeUs hop_delay();
    void deliver(NodeId from, NodeId to, ConsensusMsg m, TimeUs at);
    void process(NodeId to, NodeId from, const ConsensusMsg& m);
    void emit(NodeId from, std::vector<Outbound> out);
    void after_step(NodeId id);

    Scheduler& sched_;
    ClusterOptions opts_;
    std::vector<Node> nodes_;
    std::mt19937_64 rng_;
    std::map<std::uint64_t, HeightTiming> timings_;
    std::vector<CommitHook> hooks_;
    std::uint64_t messages_ = 0;
    std::vector<TimeUs> request_last_; // client links are FIFO
};

struct LatencyStats {
    std::vector<double> per_round_ms;
    double mean_ms = 0;
    double p50_ms = 0;
    double p95_ms = 0;
    TimeUs virtual_time = 0; // scheduler time spent on all rounds
};

LatencyStats summarize(std::vector<double> samples_ms);

// Runs n_rounds sequential single-tx rounds and reports per-round latency.
LatencyStats measure_consensus_latency(ConsensusConfig cfg, std::uint32_t n_rounds, std::uint64_t seed,
                                       BusTiming timing = {});

struct FaultTrialSpec {
    std::uint32_t n_nodes = 4;
    TimeUs link_delay = 10 * kMs;
    std::uint64_t seed = 1;
};

struct FaultTrialResult {
    std::uint32_t crashed = 0;
    bool byzantine_primary = false;
    bool safe = true;  // no two honest replicas committed different blocks at one height
    bool live = true;  // every honest replica committed every tx within the budget
    TimeUs finished_at = 0;
    std::uint64_t view_changes = 0;
};

// Time allowed for a request to commit when up to f consecutive primaries are faulty.
TimeUs view_change_budget(const ConsensusConfig& cfg);

// One randomized PBFT trial with <= f faults: random crashes, optionally an
// equivocating initial primary with a random split of the other replicas.
FaultTrialResult run_fault_trial(const FaultTrialSpec& spec);

} // namespace sdnchain::chain

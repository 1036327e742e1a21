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


#include "sdnchain/chain/cluster.hpp"

#include "sdnchain/core/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sdnchain::chain {

namespace {

Behavior behavior_of(FaultKind k)
{
    return k == FaultKind::Equivocating ? Behavior::Equivocate : Behavior::Honest;
}

} // namespace

Cluster::Cluster(Scheduler& sched, ClusterOptions opts) : sched_(sched), opts_(std::move(opts)), rng_(opts_.seed)
{
    opts_.config.validate();
    if (opts_.faults.empty())
        opts_.faults.assign(opts_.config.n_nodes, FaultKind::Honest);
    if (opts_.faults.size() != opts_.config.n_nodes)
        throw Error(Errc::InvalidArgument, "fault vector size mismatch");
    nodes_.reserve(opts_.config.n_nodes);
    for (NodeId i = 0; i < opts_.config.n_nodes; ++i)
        nodes_.push_back(Node{Replica(i, opts_.config, behavior_of(opts_.faults[i]), opts_.equivocation_group),
                              opts_.faults[i], 0, {}, std::nullopt});
}

NodeId Cluster::reference() const
{
    for (NodeId i = 0; i < nodes_.size(); ++i)
        if (honest(i))
            return i;
    throw Error(Errc::ChainUnavailable, "no honest replica");
}

std::uint64_t Cluster::min_honest_height() const
{
    std::uint64_t h = UINT64_MAX;
    for (const auto& n : nodes_)
        if (n.fault == FaultKind::Honest)
            h = std::min(h, n.replica.ledger().height());
    return h == UINT64_MAX ? 0 : h;
}

std::optional<TimeUs> Cluster::latency(std::uint64_t height) const
{
    auto it = timings_.find(height);
    if (it == timings_.end() || it->second.proposed_at < 0)
        return std::nullopt;
    const auto& t = it->second;
    if (opts_.config.algorithm == Algorithm::Pbft) {
        if (t.primary_quorum_at < 0)
            return std::nullopt;
        return t.primary_quorum_at - t.proposed_at;
    }
    TimeUs last = -1;
    for (NodeId i = 0; i < nodes_.size(); ++i) {
        if (!honest(i))
            continue;
        auto c = t.committed_at.find(i);
        if (c == t.committed_at.end())
            return std::nullopt;
        last = std::max(last, c->second);
    }
    return last - t.proposed_at;
}

TimeUs Cluster::hop_delay()
{
    TimeUs d = opts_.config.link_delay;
    if (d == 0 || opts_.timing.jitter <= 0)
        return d;
    std::uniform_real_distribution<double> u(-opts_.timing.jitter, opts_.timing.jitter);
    return d + static_cast<TimeUs>(std::llround(static_cast<double>(d) * u(rng_)));
}

void Cluster::submit(const Transaction& tx)
{
    NodeId client = static_cast<NodeId>(nodes_.size());
    request_last_.resize(nodes_.size(), 0);
    for (NodeId i = 0; i < nodes_.size(); ++i) {
        request_last_[i] = std::max(request_last_[i], sched_.now() + hop_delay());
        deliver(client, i, msg::Request{tx}, request_last_[i]);
    }
}

void Cluster::deliver(NodeId from, NodeId to, ConsensusMsg m, TimeUs at)
{
    ++messages_;
    if (nodes_[to].fault == FaultKind::Crashed)
        return;
    sched_.at(at, [this, from, to, m = std::move(m)]() mutable {
        auto& node = nodes_[to];
        TimeUs done = std::max(sched_.now(), node.busy_until) + opts_.timing.recv_cost;
        node.busy_until = done;
        sched_.at(done, [this, from, to, m = std::move(m)] { process(to, from, m); });
    });
}

void Cluster::process(NodeId to, NodeId from, const ConsensusMsg& m)
{
    auto out = nodes_[to].replica.handle(from, m, sched_.now());
    emit(to, std::move(out));
    after_step(to);
}

void Cluster::emit(NodeId from, std::vector<Outbound> out)
{
    auto& node = nodes_[from];
    node.busy_until = std::max(node.busy_until, sched_.now());
    for (auto& o : out)
        for (NodeId to : o.to) {
            node.busy_until += opts_.timing.send_cost;
            deliver(from, to, o.msg, node.busy_until + hop_delay());
        }
}

void Cluster::after_step(NodeId id)
{
    auto& node = nodes_[id];
    for (const auto& ev : node.replica.drain_events()) {
        auto& t = timings_[ev.height];
        switch (ev.kind) {
        case ReplicaEvent::Kind::ProposalSent:
            if (node.fault == FaultKind::Honest || t.proposed_at < 0)
                t.proposed_at = sched_.now();
            t.primary_quorum_at = -1;
            break;
        case ReplicaEvent::Kind::PrimaryQuorum:
            t.primary_quorum_at = sched_.now();
            break;
        case ReplicaEvent::Kind::Committed: {
            t.committed_at.emplace(id, sched_.now());
            const auto& block = node.replica.ledger().blocks()[ev.height];
            for (const auto& hook : hooks_)
                hook(id, block, sched_.now());
            break;
        }
        default:
            break;
        }
    }
    auto deadline = node.replica.next_deadline();
    if (deadline == node.timer_at && node.timer.pending())
        return;
    node.timer.cancel();
    node.timer_at = deadline;
    if (!deadline)
        return;
    node.timer = sched_.at(std::max(*deadline, sched_.now()), [this, id] {
        auto& n = nodes_[id];
        n.timer_at.reset();
        auto out = n.replica.on_timer(sched_.now());
        emit(id, std::move(out));
        after_step(id);
    });
}

LatencyStats summarize(std::vector<double> samples)
{
    LatencyStats s;
    s.per_round_ms = samples;
    if (samples.empty())
        return s;
    s.mean_ms = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
    std::sort(samples.begin(), samples.end());
    auto pct = [&](double p) {
        // nearest-rank
        auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(samples.size())));
        return samples[std::clamp<std::size_t>(rank, 1, samples.size()) - 1];
    };
    s.p50_ms = pct(0.50);
    s.p95_ms = pct(0.95);
    return s;
}

LatencyStats measure_consensus_latency(ConsensusConfig cfg, std::uint32_t n_rounds, std::uint64_t seed, BusTiming timing)
{
    cfg.batch_timeout = 0; // one request per round, proposed on arrival
    Scheduler sched;
    ClusterOptions opts;
    opts.config = cfg;
    opts.timing = timing;
    opts.seed = seed;
    Cluster cluster(sched, opts);
    std::vector<double> samples;
    samples.reserve(n_rounds);
    for (std::uint32_t r = 0; r < n_rounds; ++r) {
        Bytes payload = to_bytes("round " + std::to_string(r));
        cluster.submit(Transaction::make(TxKind::Snapshot, std::move(payload), "bench-client", r + 1, sched.now()));
        sched.run();
        auto lat = cluster.latency(r + 1);
        if (!lat)
            throw Error(Errc::ConsensusTimeout, "round " + std::to_string(r) + " did not commit");
        samples.push_back(static_cast<double>(*lat) / kMs);
    }
    auto stats = summarize(std::move(samples));
    stats.virtual_time = sched.now();
    return stats;
}

TimeUs view_change_budget(const ConsensusConfig& cfg)
{
    return (cfg.f() + 1) * cfg.view_change_timeout() + 20 * cfg.link_delay + cfg.batch_timeout;
}

FaultTrialResult run_fault_trial(const FaultTrialSpec& spec)
{
    std::mt19937_64 rng(spec.seed);
    ClusterOptions opts;
    opts.config.n_nodes = spec.n_nodes;
    opts.config.link_delay = spec.link_delay;
    opts.seed = rng();
    const std::uint32_t n = spec.n_nodes;
    const std::uint32_t f = opts.config.f();

    FaultTrialResult res;
    std::uint32_t k = std::uniform_int_distribution<std::uint32_t>(0, f)(rng);
    res.byzantine_primary = k > 0 && std::bernoulli_distribution(0.5)(rng);
    opts.faults.assign(n, FaultKind::Honest);
    std::vector<NodeId> ids(n);
    std::iota(ids.begin(), ids.end(), 0);
    if (res.byzantine_primary) {
        opts.faults[0] = FaultKind::Equivocating;
        ids.erase(ids.begin());
        --k;
    }
    std::shuffle(ids.begin(), ids.end(), rng);
    for (std::uint32_t i = 0; i < k; ++i)
        opts.faults[ids[i]] = FaultKind::Crashed;
    res.crashed = k;
    for (NodeId i = 1; i < n; ++i)
        if (std::bernoulli_distribution(0.5)(rng))
            opts.equivocation_group.push_back(i);

    Scheduler sched;
    Cluster cluster(sched, opts);
    std::uint32_t n_tx = std::uniform_int_distribution<std::uint32_t>(1, 3)(rng);
    std::vector<Digest> hashes;
    TimeUs last_submit = 0;
    for (std::uint32_t i = 0; i < n_tx; ++i) {
        TimeUs at = std::uniform_int_distribution<TimeUs>(0, 5 * spec.link_delay)(rng);
        auto tx = Transaction::make(TxKind::Snapshot, to_bytes("trial tx " + std::to_string(i)), "trial-client", i + 1, at);
        hashes.push_back(tx.tx_hash);
        last_submit = std::max(last_submit, at);
        sched.at(at, [&cluster, tx] { cluster.submit(tx); });
    }
    const TimeUs deadline = last_submit + view_change_budget(opts.config);
    auto all_committed = [&] {
        for (NodeId i = 0; i < n; ++i) {
            if (!cluster.honest(i))
                continue;
            for (const auto& h : hashes)
                if (!cluster.replica(i).ledger().contains_tx(h))
                    return false;
        }
        return true;
    };
    while (!sched.empty() && sched.now() <= deadline && !all_committed())
        sched.step();
    res.finished_at = sched.now();
    res.live = all_committed() && sched.now() <= deadline;

    // Safety: honest chains must agree on every height they share.
    for (NodeId a = 0; a < n; ++a) {
        if (!cluster.honest(a))
            continue;
        res.view_changes = std::max(res.view_changes, cluster.replica(a).stats().view_changes);
        for (NodeId b = a + 1; b < n; ++b) {
            if (!cluster.honest(b))
                continue;
            const auto& la = cluster.replica(a).ledger().blocks();
            const auto& lb = cluster.replica(b).ledger().blocks();
            for (std::size_t h = 0; h < std::min(la.size(), lb.size()); ++h)
                if (la[h]->block_hash != lb[h]->block_hash)
                    res.safe = false;
        }
    }
    return res;
}

} // namespace sdnchain::chain

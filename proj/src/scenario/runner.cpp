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


#include "sdnchain/scenario/runner.hpp"

#include "sdnchain/chain/ledger.hpp"
#include "sdnchain/core/error.hpp"

#include <fstream>
#include <sstream>

namespace sdnchain::scenario {

namespace {

std::optional<double> first_annotation(const MetricsTrace& t, const std::string& kind)
{
    for (const auto& a : t.annotations)
        if (a.kind == kind)
            return a.t_s;
    return std::nullopt;
}

nlohmann::json opt(std::optional<double> v)
{
    return v ? nlohmann::json(*v) : nlohmann::json();
}

} // namespace

double mean_packet_in_rate(const MetricsTrace& t, double from_s, double to_s)
{
    double sum = 0;
    std::size_t n = 0;
    for (const auto& p : t.points)
        if (p.t_s >= from_s - 1e-9 && p.t_s <= to_s + 1e-9) {
            sum += p.packet_in_rate;
            ++n;
        }
    return n ? sum / static_cast<double>(n) : 0.0;
}

double mean_controller_load(const MetricsTrace& t, double from_s, double to_s)
{
    double sum = 0;
    std::size_t n = 0;
    for (const auto& p : t.points)
        if (p.t_s >= from_s - 1e-9 && p.t_s <= to_s + 1e-9) {
            sum += p.controller_load;
            ++n;
        }
    return n ? sum / static_cast<double>(n) : 0.0;
}

double peak_packet_in_rate(const MetricsTrace& t)
{
    double peak = 0;
    for (const auto& p : t.points)
        peak = std::max(peak, p.packet_in_rate);
    return peak;
}

ScenarioResult run_scenario(const ScenarioSpec& spec, EventLog::Sink sink, RuntimeOptions opts)
{
    opts.engine.auto_defense = spec.defense == Defense::Active;
    Runtime rt(spec, opts);
    ScenarioResult res;
    res.spec = spec;
    rt.events().subscribe([&res, sink](const ApiEvent& e) {
        res.events.push_back(e);
        if (sink)
            sink(e);
    });
    if (!rt.start())
        throw Error(Errc::InvariantViolation, "testbed did not finish building");

    std::vector<std::string> intent_ids;
    for (const auto& ev : spec.events) {
        rt.run_until_rel(from_seconds(ev.at_s));
        std::visit(
            [&](const auto& w) {
                using T = std::decay_t<decltype(w)>;
                if constexpr (std::is_same_v<T, StartTraffic>)
                    rt.start_traffic(w);
                else if constexpr (std::is_same_v<T, StartDdos>)
                    rt.start_ddos(w);
                else if constexpr (std::is_same_v<T, SubmitIntent>)
                    intent_ids.push_back(rt.submit_intent(w.intent));
                else
                    rt.stop_attack();
            },
            ev.what);
    }
    rt.run_until_rel(from_seconds(spec.duration_s));

    res.trace = rt.trace();
    std::ostringstream chain_out;
    const auto& blocks = rt.testbed().chain().ledger().blocks();
    chain::export_chain(chain_out, blocks);
    res.chain_export = chain_out.str();

    auto head = rt.testbed().chain().head();
    auto intents = nlohmann::json::array();
    for (const auto& in : rt.engine().intents())
        intents.push_back(intent::intent_document(rt.engine(), in.intent_id));
    auto attacks = nlohmann::json::array();
    for (const auto& a : rt.attacks())
        attacks.push_back({{"victim", rt.testbed().net().topology().host(a.victim).name},
                           {"attacker", rt.testbed().net().topology().host(a.attacker).name},
                           {"rate", a.rate}});
    res.summary = {{"name", spec.name},
                   {"seed", spec.seed},
                   {"defense", to_string(spec.defense)},
                   {"duration_s", spec.duration_s},
                   {"attack_start_s", opt(first_annotation(res.trace, "attack_start"))},
                   {"first_anomaly_s", opt(first_annotation(res.trace, "anomaly"))},
                   {"first_defense_s", opt(first_annotation(res.trace, "defense_installed"))},
                   {"peak_packet_in_rate", peak_packet_in_rate(res.trace)},
                   {"attacks", attacks},
                   {"chain", {{"height", head.height},
                              {"total_tx", head.total_tx_count},
                              {"head_hash", chain::digest_hex(head.block_hash)}}},
                   {"frames", {{"injected", rt.testbed().net().accounting().injected},
                               {"delivered", rt.testbed().net().accounting().delivered},
                               {"dropped", rt.testbed().net().accounting().dropped},
                               {"conserved", rt.testbed().net().conserved()}}},
                   {"intents", intents}};
    return res;
}

void write_outputs(const ScenarioResult& r, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    auto write = [&dir](const char* name, const std::string& body) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out)
            throw Error(Errc::InvalidArgument, "cannot write " + (dir / name).string());
        out << body;
    };
    write("metrics.csv", r.trace.csv());
    std::string ev;
    for (const auto& e : r.events)
        ev += to_json(e).dump() + "\n";
    write("events.ndjson", ev);
    write("chain.ndjson", r.chain_export);
    write("summary.json", r.summary.dump(2) + "\n");
    write("scenario.json", to_json(r.spec).dump(2) + "\n");
}

} // namespace sdnchain::scenario

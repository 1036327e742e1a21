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


#include "sdnchain/chain/ledger.hpp"
#include "sdnchain/core/error.hpp"
#include "sdnchain/gateway/documents.hpp"
#include "sdnchain/gateway/service.hpp"
#include "sdnchain/parallel/kernels.hpp"
#include "sdnchain/scenario/runner.hpp"

#include <CLI11.hpp>
#include <httplib.h>

#include <atomic>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>

using namespace sdnchain;

namespace {

constexpr int kOk = 0;
constexpr int kUserError = 1;
constexpr int kInternal = 2;

std::atomic<bool> g_interrupted{false};

// Failure that maps straight to an exit code.
struct Exit {
    int code;
    std::string message;
};

std::string env_or(const char* name, const std::string& fallback)
{
    const char* v = std::getenv(name);
    return v && *v ? v : fallback;
}

std::pair<std::string, int> split_host_port(const std::string& s)
{
    auto colon = s.rfind(':');
    if (colon == std::string::npos)
        throw Exit{kUserError, "expected host:port, got '" + s + "'"};
    try {
        return {s.substr(0, colon), std::stoi(s.substr(colon + 1))};
    } catch (const std::exception&) {
        throw Exit{kUserError, "bad port in '" + s + "'"};
    }
}

scenario::ScenarioSpec load_spec(const std::string& what)
{
    const auto builtins = scenario::builtin_scenarios();
    if (std::find(builtins.begin(), builtins.end(), what) != builtins.end())
        return scenario::builtin_scenario(what);
    if (!std::filesystem::exists(what))
        throw Error(Errc::InvalidArgument, "no scenario file or builtin named " + what);
    return scenario::load_scenario(what);
}

void print(const nlohmann::json& j)
{
    std::cout << j.dump(2) << '\n';
}

// Thin client for the gateway mirrors.
class Remote {
public:
    explicit Remote(std::string addr) : addr_(std::move(addr))
    {
        if (addr_.find("://") == std::string::npos)
            addr_ = "http://" + addr_;
    }

    nlohmann::json get(const std::string& path) { return check(client().Get(path)); }
    nlohmann::json post(const std::string& path, const nlohmann::json& body)
    {
        return check(client().Post(path, body.dump(), "application/json"));
    }

    // Streams NDJSON lines to stdout.
    void stream(const std::string& path)
    {
        int status = 0;
        std::string err;
        auto res = client().Get(
            path,
            [&](const httplib::Response& r) {
                status = r.status;
                return true;
            },
            [&](const char* data, std::size_t len) {
                if (status >= 400) {
                    err.append(data, len);
                    return true;
                }
                std::cout.write(data, static_cast<std::streamsize>(len));
                std::cout.flush();
                return !g_interrupted.load();
            });
        if (!res && !g_interrupted.load())
            throw Exit{kInternal, "cannot reach gateway at " + addr_ + ": " + httplib::to_string(res.error())};
        if (status >= 400)
            fail(status, err);
    }

private:
    httplib::Client client()
    {
        httplib::Client c(addr_);
        c.set_read_timeout(300, 0);
        return c;
    }

    [[noreturn]] static void fail(int status, const std::string& body)
    {
        auto j = nlohmann::json::parse(body, nullptr, false);
        std::string msg = !j.is_discarded() && j.contains("message") ? j["message"].get<std::string>() : body;
        throw Exit{status < 500 ? kUserError : kInternal, msg};
    }

    nlohmann::json check(const httplib::Result& res)
    {
        if (!res)
            throw Exit{kInternal, "cannot reach gateway at " + addr_ + ": " + httplib::to_string(res.error())};
        if (res->status >= 400)
            fail(res->status, res->body);
        auto j = nlohmann::json::parse(res->body, nullptr, false);
        if (j.is_discarded())
            throw Exit{kInternal, "gateway sent a non-JSON body"};
        return j;
    }

    std::string addr_;
};

std::vector<TimeUs> parse_delays(const std::vector<double>& ms)
{
    std::vector<TimeUs> out;
    for (double d : ms)
        out.push_back(static_cast<TimeUs>(d * kMs));
    return out;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"sdnchain: chain-backed SDN middleware simulator"};
    app.require_subcommand(1);
    std::string addr = env_or("SDNCHAIN_ADDR", "127.0.0.1:8080");
    app.add_option("--addr", addr, "gateway address for remote commands (env SDNCHAIN_ADDR)");

    // Local scenario run.
    auto* run = app.add_subcommand("run", "run a scenario and write its outputs");
    std::string run_scenario;
    std::optional<std::uint64_t> run_seed;
    std::string run_out = "out";
    std::string run_defense;
    run->add_option("--scenario", run_scenario, "scenario file or builtin name")->required();
    run->add_option("--seed", run_seed, "override the scenario seed");
    run->add_option("--out", run_out, "output directory");
    run->add_option("--defense", run_defense, "override defense: none|active");

    auto* scenarios = app.add_subcommand("scenarios", "builtin scenarios");
    scenarios->require_subcommand(1);
    auto* sc_list = scenarios->add_subcommand("list", "list builtin names");
    auto* sc_export = scenarios->add_subcommand("export", "write builtin scenarios as JSON files");
    std::string sc_dir = "scenarios";
    sc_export->add_option("dir", sc_dir, "target directory");

    auto* topo = app.add_subcommand("topology", "bundled topologies and the live view");
    topo->require_subcommand(1);
    auto* topo_list = topo->add_subcommand("list", "list bundled topology names");
    auto* topo_export = topo->add_subcommand("export", "write a bundled topology as JSON");
    std::string topo_name;
    std::size_t topo_hosts = 25;
    std::string topo_out;
    topo_export->add_option("name", topo_name)->required();
    topo_export->add_option("--hosts", topo_hosts, "host count");
    topo_export->add_option("--out", topo_out, "file (default stdout)");
    auto* topo_show = topo->add_subcommand("show", "GET /topology");

    auto* verify = app.add_subcommand("verify-chain", "re-verify a chain export");
    std::string verify_file;
    bool verify_serial = false;
    verify->add_option("file", verify_file, "chain.ndjson")->required();
    verify->add_flag("--serial", verify_serial, "use the serial reference check");

    auto* bench = app.add_subcommand("bench", "consensus latency and fault campaigns");
    bench->require_subcommand(1);
    auto* b_cons = bench->add_subcommand("consensus", "latency sweep over algorithm x n x delay");
    std::vector<std::string> b_algs{"pbft", "rpbft"};
    std::vector<std::uint32_t> b_ns{7, 19, 31};
    std::vector<double> b_delays{10, 20, 50, 100};
    std::uint32_t b_rounds = 50;
    std::uint64_t b_seed = 1;
    b_cons->add_option("--algorithms", b_algs);
    b_cons->add_option("--nodes", b_ns);
    b_cons->add_option("--delays-ms", b_delays);
    b_cons->add_option("--rounds", b_rounds);
    b_cons->add_option("--seed", b_seed);
    auto* b_fault = bench->add_subcommand("faults", "randomized PBFT fault trials");
    std::uint32_t f_n = 4, f_trials = 1000;
    double f_delay = 10;
    std::uint64_t f_seed = 1;
    b_fault->add_option("--nodes", f_n);
    b_fault->add_option("--trials", f_trials);
    b_fault->add_option("--delay-ms", f_delay);
    b_fault->add_option("--seed", f_seed);

    auto* serve = app.add_subcommand("serve", "run the HTTP gateway over a live network");
    std::string bind = env_or("SDNCHAIN_BIND", "127.0.0.1:8080");
    std::string serve_scenario = "no_attack";
    double serve_speed = 1.0;
    serve->add_option("--bind", bind, "host:port (env SDNCHAIN_BIND)");
    serve->add_option("--scenario", serve_scenario, "scenario file or builtin providing the live network");
    serve->add_option("--speed", serve_speed, "virtual seconds per wall second");

    // Gateway mirrors.
    auto* chain_cmd = app.add_subcommand("chain", "chain queries");
    chain_cmd->require_subcommand(1);
    auto* c_head = chain_cmd->add_subcommand("head", "GET /chain/head");
    auto* c_block = chain_cmd->add_subcommand("block", "GET /chain/blocks/{height}");
    std::uint64_t c_height = 0;
    c_block->add_option("height", c_height)->required();
    auto* c_tx = chain_cmd->add_subcommand("tx", "GET /chain/tx/{hash}");
    std::string c_hash;
    c_tx->add_option("hash", c_hash)->required();
    auto* registry = app.add_subcommand("registry", "GET /registry");

    auto* intent_cmd = app.add_subcommand("intent", "intents");
    intent_cmd->require_subcommand(1);
    auto* i_submit = intent_cmd->add_subcommand("submit", "POST /intents");
    std::string i_verb, i_target, i_pref = "None";
    i_submit->add_option("--verb", i_verb, "RemoveDevice|RecalculatePaths|ProtectService|LimitTraffic")->required();
    i_submit->add_option("--target", i_target)->required();
    i_submit->add_option("--preference", i_pref, "MaxPerformance|MaxProtection|None");
    auto* i_report = intent_cmd->add_subcommand("report", "GET /intents/{id}/report");
    std::string i_id;
    i_report->add_option("id", i_id)->required();
    auto* i_list = intent_cmd->add_subcommand("list", "GET /intents");

    auto* mapping = app.add_subcommand("mapping", "controller/switch mapping");
    mapping->require_subcommand(1);
    auto* m_show = mapping->add_subcommand("show", "GET /mapping");
    auto* m_remap = mapping->add_subcommand("remap", "POST /mapping/remap");
    std::string m_switch, m_ctrl;
    m_remap->add_option("--switch", m_switch, "switch name, of:<dpid> or datapath id")->required();
    m_remap->add_option("--controller", m_ctrl)->required();

    auto* evict = app.add_subcommand("evict", "POST /elements/{id}/evict");
    std::string e_id, e_reason = "operator";
    evict->add_option("element", e_id)->required();
    evict->add_option("--reason", e_reason);

    auto* remote_run = app.add_subcommand("scenario", "POST /scenarios/run");
    std::string r_scenario;
    std::optional<std::uint64_t> r_seed;
    std::string r_out;
    remote_run->add_option("scenario", r_scenario, "builtin name or scenario file")->required();
    remote_run->add_option("--seed", r_seed);
    remote_run->add_option("--out", r_out, "output directory on the gateway host");

    auto* events = app.add_subcommand("events", "GET /events");
    std::uint64_t ev_from = 0;
    bool ev_follow = false;
    std::optional<std::uint64_t> ev_limit;
    events->add_option("--from-seq", ev_from);
    events->add_flag("--follow", ev_follow, "keep the stream open");
    events->add_option("--limit", ev_limit);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kUserError;
    }

    try {
        Remote remote(addr);
        if (*run) {
            auto spec = load_spec(run_scenario);
            if (run_seed)
                spec.seed = *run_seed;
            if (!run_defense.empty())
                spec.defense = scenario::parse_defense(run_defense);
            auto res = scenario::run_scenario(spec);
            scenario::write_outputs(res, run_out);
            print(res.summary);
        } else if (*sc_list) {
            for (const auto& n : scenario::builtin_scenarios())
                std::cout << n << '\n';
        } else if (*sc_export) {
            std::filesystem::create_directories(sc_dir);
            for (const auto& n : scenario::builtin_scenarios()) {
                std::ofstream out(std::filesystem::path(sc_dir) / (n + ".json"));
                out << to_json(scenario::builtin_scenario(n)).dump(2) << '\n';
            }
        } else if (*topo_list) {
            for (const auto& n : simnet::named_topologies())
                std::cout << n << '\n';
        } else if (*topo_export) {
            auto doc = simnet::to_json(simnet::named_topology(topo_name, topo_hosts)).dump(2) + "\n";
            if (topo_out.empty()) {
                std::cout << doc;
            } else {
                std::ofstream out(topo_out);
                if (!out)
                    throw Error(Errc::InvalidArgument, "cannot write " + topo_out);
                out << doc;
            }
        } else if (*topo_show) {
            print(remote.get("/topology"));
        } else if (*verify) {
            std::ifstream in(verify_file);
            if (!in)
                throw Error(Errc::InvalidArgument, "cannot read " + verify_file);
            auto blocks = chain::import_chain(in);
            auto r = verify_serial ? chain::verify_chain(blocks) : parallel::verify_chain(blocks);
            nlohmann::json j = {{"ok", r.ok}, {"blocks", blocks.size()}};
            if (!r.ok)
                j.update({{"bad_height", r.bad_height}, {"reason", r.reason}});
            print(j);
            return r.ok ? kOk : kUserError;
        } else if (*b_cons) {
            std::vector<chain::Algorithm> algs;
            for (const auto& a : b_algs)
                algs.push_back(chain::parse_algorithm(a));
            auto cells = parallel::sweep_grid(algs, b_ns, parse_delays(b_delays));
            auto pts = parallel::consensus_sweep(cells, b_rounds, b_seed);
            std::cout << "algorithm,n,delay_ms,mean_ms,p50_ms,p95_ms\n";
            for (const auto& p : pts)
                std::printf("%s,%u,%g,%.3f,%.3f,%.3f\n", std::string(chain::to_string(p.cell.algorithm)).c_str(),
                            p.cell.n_nodes, to_seconds(p.cell.link_delay) * 1000, p.stats.mean_ms, p.stats.p50_ms,
                            p.stats.p95_ms);
        } else if (*b_fault) {
            auto s = parallel::summarize(
                parallel::fault_trials({f_n, static_cast<TimeUs>(f_delay * kMs), f_trials, f_seed}));
            print({{"nodes", f_n},
                   {"trials", s.trials},
                   {"safety_violations", s.safety_violations},
                   {"liveness_failures", s.liveness_failures},
                   {"byzantine_trials", s.byzantine_trials},
                   {"crashed_nodes", s.crashed_nodes},
                   {"view_changes", s.view_changes},
                   {"slowest_s", to_seconds(s.slowest)}});
            return s.safety_violations == 0 && s.liveness_failures == 0 ? kOk : kUserError;
        } else if (*serve) {
            auto [host, port] = split_host_port(bind);
            gateway::GatewayConfig cfg;
            cfg.host = host;
            cfg.port = port;
            cfg.live = load_spec(serve_scenario);
            cfg.speed = serve_speed;
            gateway::Gateway gw(cfg);
            gw.start();
            std::signal(SIGINT, [](int) { g_interrupted = true; });
            std::signal(SIGTERM, [](int) { g_interrupted = true; });
            std::cerr << "listening on " << gw.base_url() << '\n';
            while (!g_interrupted.load())
                std::this_thread::sleep_for(std::chrono::milliseconds(100));
            gw.stop();
        } else if (*c_head) {
            print(remote.get("/chain/head"));
        } else if (*c_block) {
            print(remote.get("/chain/blocks/" + std::to_string(c_height)));
        } else if (*c_tx) {
            print(remote.get("/chain/tx/" + c_hash));
        } else if (*registry) {
            print(remote.get("/registry"));
        } else if (*i_submit) {
            print(remote.post("/intents", {{"verb", i_verb}, {"target", i_target}, {"preference", i_pref}}));
        } else if (*i_report) {
            print(remote.get("/intents/" + i_id + "/report"));
        } else if (*i_list) {
            print(remote.get("/intents"));
        } else if (*m_show) {
            print(remote.get("/mapping"));
        } else if (*m_remap) {
            print(remote.post("/mapping/remap", {{"switch", m_switch}, {"controller", m_ctrl}}));
        } else if (*evict) {
            print(remote.post("/elements/" + e_id + "/evict", {{"reason", e_reason}}));
        } else if (*remote_run) {
            nlohmann::json body;
            if (std::filesystem::exists(r_scenario)) {
                std::ifstream in(r_scenario);
                body["scenario"] = nlohmann::json::parse(in);
            } else {
                body["scenario"] = r_scenario;
            }
            if (r_seed)
                body["seed"] = *r_seed;
            if (!r_out.empty())
                body["out"] = r_out;
            print(remote.post("/scenarios/run", body));
        } else if (*events) {
            std::signal(SIGINT, [](int) { g_interrupted = true; });
            std::string path = "/events?from_seq=" + std::to_string(ev_from) + "&follow=" + (ev_follow ? "1" : "0");
            if (ev_limit)
                path += "&limit=" + std::to_string(*ev_limit);
            remote.stream(path);
        }
        return kOk;
    } catch (const Exit& e) {
        std::cerr << "error: " << e.message << '\n';
        return e.code;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return gateway::http_status(e.code()) < 500 ? kUserError : kInternal;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUserError;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInternal;
    }
}

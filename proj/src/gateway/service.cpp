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


#include "sdnchain/gateway/service.hpp"

#include "sdnchain/gateway/documents.hpp"
#include "sdnchain/mw/middleware.hpp"
#include "sdnchain/scenario/runner.hpp"

#include <httplib.h>

#include <charconv>

namespace sdnchain::gateway {

namespace {

using Clock = std::chrono::steady_clock;

void reply(httplib::Response& res, int status, const nlohmann::json& body)
{
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

// Runs a handler body, turning errors into JSON documents.
template <class F>
void guarded(httplib::Response& res, F&& f)
{
    try {
        f();
    } catch (const Error& e) {
        reply(res, http_status(e.code()), error_document(e));
    } catch (const nlohmann::json::exception& e) {
        reply(res, 400, error_document(Error(Errc::InvalidArgument, e.what())));
    } catch (const std::exception& e) {
        reply(res, 500, error_document(Error(Errc::InvariantViolation, e.what())));
    }
}

nlohmann::json parse_body(const httplib::Request& req)
{
    if (req.body.empty())
        return nlohmann::json::object();
    auto j = nlohmann::json::parse(req.body, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw Error(Errc::InvalidArgument, "request body is not a JSON object");
    return j;
}

std::uint64_t parse_u64(const std::string& s, const char* what)
{
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw Error(Errc::InvalidArgument, std::string("bad ") + what + " '" + s + "'");
    return v;
}

DatapathId resolve_switch(scenario::Runtime& rt, const nlohmann::json& v)
{
    if (v.is_number_unsigned())
        return v.get<DatapathId>();
    if (!v.is_string())
        throw Error(Errc::InvalidArgument, "switch must be a name, element id or datapath id");
    auto s = v.get<std::string>();
    if (auto id = mw::parse_switch_element_id(s))
        return *id;
    const auto& topo = rt.testbed().net().topology();
    if (auto sw = topo.switch_by_name(s))
        return topo.dpid(*sw);
    throw Error(Errc::UnknownElement, "no switch " + s);
}

} // namespace

struct Gateway::Http {
    httplib::Server server;
};

Gateway::Gateway(GatewayConfig cfg) : cfg_(std::move(cfg)), http_(std::make_unique<Http>()) { }

Gateway::~Gateway()
{
    stop();
}

std::string Gateway::base_url() const
{
    return "http://" + cfg_.host + ":" + std::to_string(port_);
}

void Gateway::start()
{
    if (started_)
        return;
    auto opts = cfg_.runtime;
    opts.engine.auto_defense = cfg_.live.defense == scenario::Defense::Active;
    auto spec = cfg_.live;
    spec.duration_s = 1e6; // background traffic runs for the whole session
    rt_ = std::make_unique<scenario::Runtime>(spec, opts);
    rt_->events().subscribe([this](const ApiEvent& e) {
        {
            std::lock_guard lk(ev_mu_);
            ev_seq_ = e.seq;
        }
        ev_cv_.notify_all();
    });
    if (!rt_->start())
        throw Error(Errc::InvariantViolation, "live testbed did not finish building");
    rt_->schedule(cfg_.live.events);
    sync_chain();
    publish();

    routes();
    auto& svr = http_->server;
    // httplib's default adds SO_REUSEPORT, which would let two gateways share a port.
    svr.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    if (cfg_.port == 0) {
        port_ = svr.bind_to_any_port(cfg_.host);
        if (port_ <= 0)
            throw Error(Errc::BindFailure, "cannot bind " + cfg_.host);
    } else {
        if (!svr.bind_to_port(cfg_.host, cfg_.port))
            throw Error(Errc::BindFailure, "cannot bind " + cfg_.host + ":" + std::to_string(cfg_.port));
        port_ = cfg_.port;
    }
    started_ = true;
    sim_thread_ = std::thread([this] { sim_loop(); });
    http_thread_ = std::thread([this] { http_->server.listen_after_bind(); });
    http_->server.wait_until_ready();
}

void Gateway::stop()
{
    {
        std::lock_guard lk(jobs_mu_);
        if (stopping_ || !started_)
            return;
        stopping_ = true;
    }
    jobs_cv_.notify_all();
    ev_cv_.notify_all();
    http_->server.stop();
    if (http_thread_.joinable())
        http_thread_.join();
    if (sim_thread_.joinable())
        sim_thread_.join();
}

void Gateway::wait()
{
    std::unique_lock lk(jobs_mu_);
    jobs_cv_.wait(lk, [this] { return stopping_.load(); });
}

void Gateway::sim_loop()
{
    auto wall0 = Clock::now();
    TimeUs virt0 = rt_->now_rel();
    for (;;) {
        {
            std::unique_lock lk(jobs_mu_);
            jobs_cv_.wait_for(lk, std::chrono::milliseconds(10), [this] { return stopping_.load() || !jobs_.empty(); });
            if (stopping_)
                break;
        }
        drain();
        if (cfg_.speed > 0) {
            auto wall = std::chrono::duration<double>(Clock::now() - wall0).count();
            TimeUs target = virt0 + from_seconds(wall * cfg_.speed);
            TimeUs now = rt_->now_rel();
            if (target > now)
                rt_->run_until_rel(std::min(target, now + cfg_.step));
        }
        sync_chain();
        publish();
    }
    // Fail anything still queued.
    std::deque<std::shared_ptr<Job>> left;
    {
        std::lock_guard lk(jobs_mu_);
        left.swap(jobs_);
    }
    for (auto& j : left)
        j->done.set_exception(std::make_exception_ptr(Error(Errc::ChainUnavailable, "gateway stopping")));
}

void Gateway::drain()
{
    for (;;) {
        std::shared_ptr<Job> job;
        {
            std::lock_guard lk(jobs_mu_);
            if (jobs_.empty())
                return;
            job = jobs_.front();
            jobs_.pop_front();
        }
        nlohmann::json result;
        std::exception_ptr err;
        try {
            result = job->cmd(*rt_);
        } catch (...) {
            err = std::current_exception();
        }
        // Publish first so the caller reads its own write.
        sync_chain();
        publish();
        if (err)
            job->done.set_exception(err);
        else
            job->done.set_value(std::move(result));
    }
}

nlohmann::json Gateway::call(Command cmd)
{
    auto job = std::make_shared<Job>();
    job->cmd = std::move(cmd);
    auto fut = job->done.get_future();
    {
        std::lock_guard lk(jobs_mu_);
        if (stopping_ || !started_)
            throw Error(Errc::ChainUnavailable, "gateway not running");
        jobs_.push_back(job);
    }
    jobs_cv_.notify_all();
    if (fut.wait_for(cfg_.request_timeout) != std::future_status::ready)
        throw Error(Errc::ConsensusTimeout, "simulation thread did not answer in time");
    return fut.get();
}

void Gateway::advance(TimeUs span)
{
    call([span](scenario::Runtime& rt) {
        rt.run_until_rel(rt.now_rel() + span);
        return nlohmann::json{{"now_us", rt.now_rel()}};
    });
}

void Gateway::sync_chain()
{
    const auto& all = rt_->testbed().chain().ledger().blocks();
    std::unique_lock lk(chain_mu_);
    for (std::size_t h = blocks_.size(); h < all.size(); ++h) {
        for (std::size_t i = 0; i < all[h]->txs.size(); ++i)
            tx_index_[all[h]->txs[i].tx_hash] = {h, i};
        blocks_.push_back(all[h]);
    }
}

void Gateway::publish()
{
    auto p = std::make_shared<Published>();
    auto& tb = rt_->testbed();
    p->now_rel = rt_->now_rel();
    p->last_seq = rt_->events().last_seq();
    const auto& ledger = tb.chain().ledger();
    p->head = head_document(ledger.chain_head(), tb.chain().node_count(), ledger.head().txs.size());
    p->registry = registry_document(tb.chain().registry_view());
    auto mapping = tb.mw().mapping();
    p->mapping = mapping_document(mapping, tb.mw().controllers(), tb.mw().pending_switches());
    p->topology = topology_document(tb.net().topology(), mapping);
    for (const auto& in : rt_->engine().intents()) {
        p->intent_order.push_back(in.intent_id);
        p->intents[in.intent_id] = intent::intent_document(rt_->engine(), in.intent_id);
    }
    std::lock_guard lk(pub_mu_);
    pub_ = std::move(p);
}

std::shared_ptr<const Published> Gateway::published() const
{
    std::lock_guard lk(pub_mu_);
    return pub_;
}

chain::BlockPtr Gateway::block(std::uint64_t height) const
{
    std::shared_lock lk(chain_mu_);
    if (height >= blocks_.size())
        throw Error(Errc::NotFound, "no block at height " + std::to_string(height));
    return blocks_[height];
}

std::pair<chain::BlockPtr, std::size_t> Gateway::find_tx(const chain::Digest& hash) const
{
    std::shared_lock lk(chain_mu_);
    auto it = tx_index_.find(hash);
    if (it == tx_index_.end())
        throw Error(Errc::NotFound, "no transaction " + chain::digest_hex(hash));
    return {blocks_[it->second.first], it->second.second};
}

std::uint64_t Gateway::height() const
{
    std::shared_lock lk(chain_mu_);
    return blocks_.empty() ? 0 : blocks_.size() - 1;
}

const EventLog& Gateway::events() const
{
    return rt_->events();
}

nlohmann::json Gateway::submit_intent(const nlohmann::json& body)
{
    auto in = intent::intent_from_json(body);
    return call([in](scenario::Runtime& rt) {
        auto id = rt.submit_intent(in);
        return nlohmann::json{{"intent_id", id}, {"status", "Received"}};
    });
}

nlohmann::json Gateway::remap(const nlohmann::json& body)
{
    if (!body.contains("switch") || !body.contains("controller") || !body.at("controller").is_string())
        throw Error(Errc::InvalidArgument, "remap needs switch and controller");
    return call([body](scenario::Runtime& rt) {
        auto dpid = resolve_switch(rt, body.at("switch"));
        auto ctrl = body.at("controller").get<std::string>();
        rt.testbed().mw().remap(dpid, ctrl);
        return nlohmann::json{{"switch_id", mw::switch_element_id(dpid)}, {"controller_id", ctrl}};
    });
}

nlohmann::json Gateway::evict(const std::string& element_id, const nlohmann::json& body)
{
    auto reason = body.value("reason", std::string("operator"));
    return call([element_id, reason](scenario::Runtime& rt) {
        std::string id = element_id;
        // Switch names are accepted for convenience.
        const auto& topo = rt.testbed().net().topology();
        if (auto sw = topo.switch_by_name(id))
            id = mw::switch_element_id(topo.dpid(*sw));
        rt.testbed().mw().evict(id, reason);
        return nlohmann::json{{"element_id", id}, {"status", "Evicted"}, {"reason", reason}};
    });
}

nlohmann::json Gateway::run_scenario_request(const nlohmann::json& body)
{
    if (!body.contains("scenario"))
        throw Error(Errc::InvalidArgument, "missing scenario");
    const auto& s = body.at("scenario");
    auto spec = s.is_string() ? scenario::builtin_scenario(s.get<std::string>()) : scenario::scenario_from_json(s);
    if (body.contains("seed"))
        spec.seed = body.at("seed").get<std::uint64_t>();
    auto res = scenario::run_scenario(spec);
    nlohmann::json out = {{"summary", res.summary}};
    if (body.value("include_metrics", false))
        out["metrics_csv"] = res.trace.csv();
    if (body.contains("out")) {
        auto dir = body.at("out").get<std::string>();
        scenario::write_outputs(res, dir);
        out["out"] = dir;
    }
    return out;
}

void Gateway::routes()
{
    auto& svr = http_->server;
    svr.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
    svr.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
        res.status = 204;
    });

    svr.Get("/chain/head", [this](const httplib::Request&, httplib::Response& res) {
        guarded(res, [&] { reply(res, 200, published()->head); });
    });
    svr.Get(R"(/chain/blocks/(\d+))", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] { reply(res, 200, block_document(*block(parse_u64(req.matches[1], "height")))); });
    });
    svr.Get(R"(/chain/tx/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            chain::Digest d;
            try {
                d = chain::parse_digest(std::string(req.matches[1]));
            } catch (const Error&) {
                throw Error(Errc::InvalidArgument, "malformed tx hash");
            }
            auto [b, i] = find_tx(d);
            reply(res, 200, tx_document(b->txs[i], b->height));
        });
    });
    svr.Get("/registry", [this](const httplib::Request&, httplib::Response& res) {
        guarded(res, [&] { reply(res, 200, published()->registry); });
    });
    svr.Get("/intents", [this](const httplib::Request&, httplib::Response& res) {
        guarded(res, [&] {
            auto p = published();
            auto list = nlohmann::json::array();
            for (const auto& id : p->intent_order)
                list.push_back(p->intents.at(id));
            reply(res, 200, {{"intents", list}});
        });
    });
    svr.Post("/intents", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] { reply(res, 202, submit_intent(parse_body(req))); });
    });
    svr.Get(R"(/intents/([^/]+)/report)", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            auto p = published();
            auto it = p->intents.find(req.matches[1]);
            if (it == p->intents.end())
                throw Error(Errc::NotFound, "no intent " + std::string(req.matches[1]));
            reply(res, 200, it->second);
        });
    });
    svr.Get("/topology", [this](const httplib::Request&, httplib::Response& res) {
        guarded(res, [&] { reply(res, 200, published()->topology); });
    });
    svr.Get("/mapping", [this](const httplib::Request&, httplib::Response& res) {
        guarded(res, [&] { reply(res, 200, published()->mapping); });
    });
    svr.Post("/mapping/remap", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] { reply(res, 200, remap(parse_body(req))); });
    });
    svr.Post(R"(/elements/([^/]+)/evict)", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] { reply(res, 200, evict(req.matches[1], parse_body(req))); });
    });
    svr.Post("/scenarios/run", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            auto body = parse_body(req);
            std::lock_guard lk(run_mu_);
            reply(res, 200, run_scenario_request(body));
        });
    });
    svr.Get("/events", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            std::uint64_t from = req.has_param("from_seq") ? parse_u64(req.get_param_value("from_seq"), "from_seq") : 0;
            bool follow = !req.has_param("follow") || req.get_param_value("follow") != "0";
            std::uint64_t limit =
                req.has_param("limit") ? parse_u64(req.get_param_value("limit"), "limit") : UINT64_MAX;
            // Fail before the stream starts so the status code carries the error.
            events().since(from, 0);
            auto next = std::make_shared<std::uint64_t>(from);
            auto sent = std::make_shared<std::uint64_t>(0);
            res.set_chunked_content_provider(
                "application/x-ndjson", [this, next, sent, follow, limit](std::size_t, httplib::DataSink& sink) {
                    std::vector<ApiEvent> batch;
                    try {
                        batch = events().since(*next, std::min<std::uint64_t>(limit - *sent, 512));
                    } catch (const Error& e) {
                        auto line = error_document(e).dump() + "\n";
                        sink.write(line.data(), line.size());
                        sink.done();
                        return true;
                    }
                    std::string chunk;
                    for (const auto& e : batch) {
                        chunk += to_json(e).dump();
                        chunk += '\n';
                        *next = e.seq + 1;
                    }
                    *sent += batch.size();
                    if (!chunk.empty() && !sink.write(chunk.data(), chunk.size()))
                        return false;
                    if (*sent >= limit || (!follow && batch.empty())) {
                        sink.done();
                        return true;
                    }
                    if (batch.empty()) {
                        std::unique_lock lk(ev_mu_);
                        ev_cv_.wait_for(lk, std::chrono::milliseconds(200),
                                        [&] { return ev_seq_ >= *next || stopping_.load(); });
                        if (stopping_.load()) {
                            sink.done();
                            return true;
                        }
                    }
                    return sink.is_writable();
                });
        });
    });
}

} // namespace sdnchain::gateway

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


#include "sdnchain/ofwire/describe.hpp"

#include "sdnchain/core/error.hpp"

namespace sdnchain::ofwire {

namespace {

std::string port_name(std::uint32_t p)
{
    switch (p) {
    case kPortFlood: return "FLOOD";
    case kPortController: return "CONTROLLER";
    case kPortAny: return "ANY";
    default: return std::to_string(p);
    }
}

std::uint32_t parse_port(const nlohmann::json& j)
{
    if (j.is_number_unsigned())
        return j.get<std::uint32_t>();
    auto s = j.get<std::string>();
    if (s == "FLOOD")
        return kPortFlood;
    if (s == "CONTROLLER")
        return kPortController;
    if (s == "ANY")
        return kPortAny;
    return static_cast<std::uint32_t>(std::stoul(s));
}

std::string prefix_str(const Ipv4Prefix& p)
{
    return p.addr.str() + "/" + std::to_string(p.prefix_len);
}

Ipv4Prefix parse_prefix(const std::string& s)
{
    auto slash = s.find('/');
    Ipv4Prefix p;
    p.addr = Ipv4Addr::parse(s.substr(0, slash));
    if (slash != std::string::npos) {
        int len = std::stoi(s.substr(slash + 1));
        if (len < 0 || len > 32)
            throw Error(Errc::InvalidArgument, "prefix length out of range: " + s);
        p.prefix_len = static_cast<std::uint8_t>(len);
    }
    return p;
}

nlohmann::json actions_json(const std::vector<Action>& acts)
{
    auto out = nlohmann::json::array();
    for (const auto& a : acts)
        out.push_back({{"output", port_name(a.out_port)}});
    return out;
}

std::string_view command_name(FlowModCommand c)
{
    switch (c) {
    case FlowModCommand::Add: return "add";
    case FlowModCommand::Modify: return "modify";
    case FlowModCommand::Delete: return "delete";
    }
    return "?";
}

} // namespace

nlohmann::json to_json(const MatchFields& m)
{
    nlohmann::json j = nlohmann::json::object();
    if (m.in_port) j["in_port"] = *m.in_port;
    if (m.eth_src) j["eth_src"] = m.eth_src->str();
    if (m.eth_dst) j["eth_dst"] = m.eth_dst->str();
    if (m.ipv4_src) j["ipv4_src"] = prefix_str(*m.ipv4_src);
    if (m.ipv4_dst) j["ipv4_dst"] = prefix_str(*m.ipv4_dst);
    return j;
}

MatchFields match_from_json(const nlohmann::json& j)
{
    MatchFields m;
    if (j.contains("in_port")) m.in_port = j.at("in_port").get<std::uint32_t>();
    if (j.contains("eth_src")) m.eth_src = MacAddr::parse(j.at("eth_src").get<std::string>());
    if (j.contains("eth_dst")) m.eth_dst = MacAddr::parse(j.at("eth_dst").get<std::string>());
    if (j.contains("ipv4_src")) m.ipv4_src = parse_prefix(j.at("ipv4_src").get<std::string>());
    if (j.contains("ipv4_dst")) m.ipv4_dst = parse_prefix(j.at("ipv4_dst").get<std::string>());
    return m;
}

nlohmann::json to_json(const FlowMod& fm)
{
    return {{"cookie", fm.cookie},
            {"command", command_name(fm.command)},
            {"match", to_json(fm.match)},
            {"priority", fm.priority},
            {"idle_timeout", fm.idle_timeout},
            {"hard_timeout", fm.hard_timeout},
            {"actions", actions_json(fm.actions)}};
}

FlowMod flow_mod_from_json(const nlohmann::json& j)
{
    try {
        FlowMod fm;
        fm.cookie = j.value("cookie", std::uint64_t{0});
        auto cmd = j.value("command", std::string("add"));
        if (cmd == "add")
            fm.command = FlowModCommand::Add;
        else if (cmd == "modify")
            fm.command = FlowModCommand::Modify;
        else if (cmd == "delete")
            fm.command = FlowModCommand::Delete;
        else
            throw Error(Errc::InvalidArgument, "unknown flow_mod command " + cmd);
        fm.match = match_from_json(j.value("match", nlohmann::json::object()));
        fm.priority = j.value("priority", std::uint16_t{0});
        fm.idle_timeout = j.value("idle_timeout", std::uint16_t{0});
        fm.hard_timeout = j.value("hard_timeout", std::uint16_t{0});
        for (const auto& a : j.value("actions", nlohmann::json::array()))
            fm.actions.push_back({parse_port(a.at("output"))});
        return fm;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::InvalidArgument, std::string("flow_mod document: ") + e.what());
    } catch (const std::logic_error& e) {
        throw Error(Errc::InvalidArgument, std::string("flow_mod document: ") + e.what());
    }
}

nlohmann::json describe(const OfMessage& m)
{
    nlohmann::json j{{"type", type_name(m.type_code())}, {"xid", m.xid}};
    std::visit(
        [&j](const auto& b) {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, ErrorMsg>) {
                j["error_type"] = b.type;
                j["error_code"] = b.code;
            } else if constexpr (std::is_same_v<T, EchoRequest> || std::is_same_v<T, EchoReply>) {
                j["data"] = to_hex(b.data);
            } else if constexpr (std::is_same_v<T, FeaturesReply>) {
                j["datapath_id"] = b.datapath_id;
                j["n_buffers"] = b.n_buffers;
                j["n_tables"] = b.n_tables;
            } else if constexpr (std::is_same_v<T, PacketIn>) {
                j["buffer_id"] = b.buffer_id;
                j["in_port"] = b.in_port;
                j["reason"] = b.reason;
                j["frame"] = to_hex(b.frame);
                try {
                    auto f = decode_frame(b.frame);
                    j["eth_src"] = f.eth_src.str();
                    j["eth_dst"] = f.eth_dst.str();
                    j["ipv4_src"] = f.ipv4_src.str();
                    j["ipv4_dst"] = f.ipv4_dst.str();
                } catch (const Error&) {
                }
            } else if constexpr (std::is_same_v<T, PacketOut>) {
                j["buffer_id"] = b.buffer_id;
                j["in_port"] = port_name(b.in_port);
                j["actions"] = actions_json(b.actions);
                j["frame"] = to_hex(b.frame);
            } else if constexpr (std::is_same_v<T, FlowMod>) {
                j.update(to_json(b));
            } else if constexpr (std::is_same_v<T, Passthrough>) {
                j["raw"] = to_hex(b.raw);
            }
        },
        m.body);
    return j;
}

} // namespace sdnchain::ofwire

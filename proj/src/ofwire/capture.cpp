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


#include "sdnchain/ofwire/capture.hpp"

#include "sdnchain/core/error.hpp"

#include <json.hpp>

#include <istream>
#include <ostream>

namespace sdnchain::ofwire {

void write_capture(std::ostream& out, const CaptureRecord& rec)
{
    nlohmann::ordered_json j;
    j["timestamp_us"] = rec.timestamp_us;
    j["direction"] = rec.direction;
    j["hex"] = to_hex(rec.bytes);
    out << j.dump() << '\n';
}

std::vector<CaptureRecord> read_capture(std::istream& in)
{
    std::vector<CaptureRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.contains("hex"))
            throw Error(Errc::Malformed, "bad capture line");
        out.push_back({j.at("timestamp_us").get<TimeUs>(), j.at("direction").get<std::string>(),
                       from_hex(j.at("hex").get<std::string>())});
    }
    return out;
}

} // namespace sdnchain::ofwire

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

#include "sdnchain/core/bytes.hpp"
#include "sdnchain/core/scheduler.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace sdnchain::ofwire {

// One forwarded message: {"timestamp_us":..,"direction":"..","hex":".."} per line.
struct CaptureRecord {
    TimeUs timestamp_us = 0;
    std::string direction; // "ctrl_to_switch" | "switch_to_ctrl"
    Bytes bytes;

    bool operator==(const CaptureRecord&) const = default;
};

void write_capture(std::ostream& out, const CaptureRecord& rec);
std::vector<CaptureRecord> read_capture(std::istream& in);

} // namespace sdnchain::ofwire

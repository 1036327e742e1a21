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


#include "sdnchain/core/error.hpp"

namespace sdnchain {

std::string_view to_string(Errc code)
{
    switch (code) {
    case Errc::InvariantViolation: return "InvariantViolation";
    case Errc::Incomplete: return "Incomplete";
    case Errc::Malformed: return "Malformed";
    case Errc::NotRegistered: return "NotRegistered";
    case Errc::Evicted: return "Evicted";
    case Errc::ConsensusTimeout: return "ConsensusTimeout";
    case Errc::NotFound: return "NotFound";
    case Errc::HandshakeTimeout: return "HandshakeTimeout";
    case Errc::Unmapped: return "Unmapped";
    case Errc::UnknownElement: return "UnknownElement";
    case Errc::UnknownTarget: return "UnknownTarget";
    case Errc::ChainUnavailable: return "ChainUnavailable";
    case Errc::NoFeasiblePolicy: return "NoFeasiblePolicy";
    case Errc::PartialFailure: return "PartialFailure";
    case Errc::StaleSample: return "StaleSample";
    case Errc::NoOffender: return "NoOffender";
    case Errc::DuplicateDatapathId: return "DuplicateDatapathId";
    case Errc::UnknownVictim: return "UnknownVictim";
    case Errc::BindFailure: return "BindFailure";
    case Errc::SeqTooOld: return "SeqTooOld";
    case Errc::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

} // namespace sdnchain

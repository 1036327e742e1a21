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

#include "sdnchain/chain/block.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sdnchain::chain {

enum class Role { Controller, Switch, Middleware };
enum class RegStatus { Registered, Evicted };

std::string_view to_string(Role r);
Role parse_role(std::string_view s);
std::string_view to_string(RegStatus s);

struct RegistrationRecord {
    std::string element_id;
    Role role = Role::Controller;
    Bytes pubinfo;
    RegStatus status = RegStatus::Registered;
    std::uint64_t registered_at = 0; // block height
    std::optional<std::uint64_t> evicted_at;

    bool operator==(const RegistrationRecord&) const = default;
};

// Payload of a Register-kind transaction.
struct RegisterOp {
    enum class Op { Register, Evict };
    Op op = Op::Register;
    std::string element_id;
    Role role = Role::Controller;
    Bytes pubinfo;
    std::string reason;

    bool operator==(const RegisterOp&) const = default;
};

Bytes encode_register_op(const RegisterOp& op);
RegisterOp decode_register_op(ByteView payload); // throws Error(Malformed)

// The registration contract. Records move Registered -> Evicted only; an evicted id
// cannot be registered again.
class Registry {
public:
    void apply(const Transaction& tx, std::uint64_t height);

    const RegistrationRecord* find(std::string_view element_id) const;
    bool is_registered(std::string_view element_id) const;
    bool is_evicted(std::string_view element_id) const;
    // All records in commit order.
    std::vector<RegistrationRecord> view() const;
    HeaderMeta header_meta() const;
    std::size_t size() const { return order_.size(); }

private:
    std::map<std::string, RegistrationRecord, std::less<>> records_;
    std::vector<std::string> order_;
};

} // namespace sdnchain::chain

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

#include <array>
#include <memory>
#include <string>
#include <string_view>

namespace sdnchain::chain {

// SHA-256 (OpenSSL EVP). The algorithm name is recorded in the genesis block.
inline constexpr std::string_view kDigestName = "sha256";

using Digest = std::array<std::uint8_t, 32>;

inline constexpr Digest kZeroDigest{};

std::string digest_hex(const Digest& d);
Digest parse_digest(std::string_view hex);
Digest sha256(ByteView data);

class Hasher {
public:
    Hasher();
    ~Hasher();
    Hasher(const Hasher&) = delete;
    Hasher& operator=(const Hasher&) = delete;

    Hasher& bytes(ByteView b);
    Hasher& u8(std::uint8_t v);
    Hasher& u64(std::uint64_t v);
    // Length-prefixed, so adjacent fields cannot alias.
    Hasher& field(ByteView b);
    Hasher& field(std::string_view s) { return field(ByteView(reinterpret_cast<const std::uint8_t*>(s.data()), s.size())); }
    Digest finish();

private:
    struct Ctx;
    std::unique_ptr<Ctx> ctx_;
};

} // namespace sdnchain::chain

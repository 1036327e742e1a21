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


#include "sdnchain/chain/digest.hpp"

#include "sdnchain/core/error.hpp"

#include <openssl/evp.h>

#include <algorithm>

namespace sdnchain::chain {

struct Hasher::Ctx {
    EVP_MD_CTX* md = nullptr;
};

Hasher::Hasher() : ctx_(std::make_unique<Ctx>())
{
    ctx_->md = EVP_MD_CTX_new();
    if (!ctx_->md || EVP_DigestInit_ex(ctx_->md, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("EVP sha256 init failed");
}

Hasher::~Hasher()
{
    EVP_MD_CTX_free(ctx_->md);
}

Hasher& Hasher::bytes(ByteView b)
{
    EVP_DigestUpdate(ctx_->md, b.data(), b.size());
    return *this;
}

Hasher& Hasher::u8(std::uint8_t v)
{
    return bytes(ByteView(&v, 1));
}

Hasher& Hasher::u64(std::uint64_t v)
{
    std::uint8_t buf[8];
    for (int i = 7; i >= 0; --i, v >>= 8)
        buf[i] = static_cast<std::uint8_t>(v);
    return bytes(buf);
}

Hasher& Hasher::field(ByteView b)
{
    u64(b.size());
    return bytes(b);
}

Digest Hasher::finish()
{
    Digest d{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_->md, d.data(), &len);
    return d;
}

std::string digest_hex(const Digest& d)
{
    return to_hex(d);
}

Digest parse_digest(std::string_view hex)
{
    Bytes b = from_hex(hex);
    if (b.size() != 32)
        throw Error(Errc::InvalidArgument, "digest must be 32 bytes");
    Digest d;
    std::copy(b.begin(), b.end(), d.begin());
    return d;
}

Digest sha256(ByteView data)
{
    return Hasher().bytes(data).finish();
}

} // namespace sdnchain::chain

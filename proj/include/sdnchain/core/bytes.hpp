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

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sdnchain {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

std::string to_hex(ByteView bytes);
// Throws Error(InvalidArgument) on odd length or non-hex characters.
Bytes from_hex(std::string_view hex);

inline Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }
inline std::string to_string(ByteView b) { return std::string(b.begin(), b.end()); }

// Big-endian append/read helpers shared by the wire codecs.
class Writer {
public:
    explicit Writer(Bytes& out) : out_(out) { }

    void u8(std::uint8_t v) { out_.push_back(v); }
    void u16(std::uint16_t v);
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void bytes(ByteView b) { out_.insert(out_.end(), b.begin(), b.end()); }
    void zeros(std::size_t n) { out_.insert(out_.end(), n, 0); }
    std::size_t size() const { return out_.size(); }

    // Overwrite a previously reserved 16-bit slot.
    void patch_u16(std::size_t at, std::uint16_t v);

private:
    Bytes& out_;
};

class Reader {
public:
    explicit Reader(ByteView in) : in_(in) { }

    bool has(std::size_t n) const { return pos_ + n <= in_.size(); }
    std::size_t remaining() const { return in_.size() - pos_; }
    std::size_t pos() const { return pos_; }

    // All reads throw Error(Malformed) when the input is too short.
    std::uint8_t u8();
    std::uint16_t u16();
    std::uint32_t u32();
    std::uint64_t u64();
    ByteView take(std::size_t n);
    void skip(std::size_t n) { take(n); }

private:
    ByteView in_;
    std::size_t pos_ = 0;
};

} // namespace sdnchain

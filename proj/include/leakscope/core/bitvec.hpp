/*
 * SPDX-FileCopyrightText: Copyright 2026 The leakscope authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
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

namespace leakscope {

/// Four-state bit vector (0, 1, x, z) of arbitrary width.
///
/// Bit 0 is the least significant bit. Unknown bits carry a 0 in the value
/// plane, so Hamming computations treat x and z as 0 without extra masking.
class BitVec {
  public:
    BitVec() = default;
    explicit BitVec(unsigned width);

    static BitVec from_uint(unsigned width, std::uint64_t value);
    static BitVec from_words(unsigned width, std::span<const std::uint64_t> words);
    /// Parses an MSB-first string over {0,1,x,X,z,Z}. When `width` exceeds the
    /// string length the value is left-extended per VCD rules (x and z extend
    /// themselves, 0 and 1 extend with 0).
    static BitVec from_string(std::string_view bits, unsigned width = 0);
    /// Parses hex digits (optional 0x prefix) into a vector of `width` bits.
    static BitVec from_hex(std::string_view hex, unsigned width);

    unsigned width() const noexcept { return width_; }
    bool has_unknown() const noexcept { return !xmask_.empty(); }
    std::size_t unknown_count() const noexcept;

    /// 0 or 1; unknown bits read as 0.
    bool bit(unsigned i) const;
    char bit_char(unsigned i) const;
    void set_bit(unsigned i, char state);

    std::span<const std::uint64_t> words() const noexcept { return value_; }
    std::uint64_t to_uint64() const;

    std::string to_string() const;
    std::string to_hex() const;

    /// Number of bits known to be 1.
    std::size_t count_ones() const noexcept;
    /// popcount(this ^ other) over the value planes; widths must match.
    std::size_t count_differences(const BitVec &other) const;

    /// Concatenation with `*this` in the high bits: (this || low).
    BitVec concat(const BitVec &low) const;

    bool operator==(const BitVec &other) const = default;

  private:
    void normalize();

    unsigned width_ = 0;
    std::vector<std::uint64_t> value_;
    // x and z marks share the `xmask_` plane; `zmask_` distinguishes z.
    std::vector<std::uint64_t> xmask_;
    std::vector<std::uint64_t> zmask_;
};

inline std::size_t words_for(unsigned width) { return (width + 63) / 64; }

} // namespace leakscope

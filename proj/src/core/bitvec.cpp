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

#include "leakscope/core/bitvec.hpp"
#include "leakscope/core/error.hpp"

#include <algorithm>
#include <bit>

namespace leakscope {

namespace {

std::uint64_t top_mask(unsigned width) {
    const unsigned rem = width % 64;
    return rem == 0 ? ~0ULL : ((1ULL << rem) - 1);
}

int hex_digit(char c) {
    if (c >= '0' && c <= '9')
        return c - '0';
    if (c >= 'a' && c <= 'f')
        return c - 'a' + 10;
    if (c >= 'A' && c <= 'F')
        return c - 'A' + 10;
    return -1;
}

} // namespace

BitVec::BitVec(unsigned width) : width_(width), value_(words_for(width), 0) {}

BitVec BitVec::from_uint(unsigned width, std::uint64_t value) {
    BitVec v(width);
    if (!v.value_.empty())
        v.value_[0] = value;
    v.normalize();
    return v;
}

BitVec BitVec::from_words(unsigned width, std::span<const std::uint64_t> words) {
    BitVec v(width);
    std::copy_n(words.begin(), std::min(words.size(), v.value_.size()),
                v.value_.begin());
    v.normalize();
    return v;
}

BitVec BitVec::from_string(std::string_view bits, unsigned width) {
    if (bits.empty())
        throw InputError("empty bit string");
    if (width == 0)
        width = static_cast<unsigned>(bits.size());
    if (bits.size() > width)
        throw InputError("bit string '" + std::string(bits) + "' wider than " +
                         std::to_string(width) + " bits");
    BitVec v(width);
    char pad = bits.front();
    if (pad == '1')
        pad = '0';
    const unsigned given = static_cast<unsigned>(bits.size());
    for (unsigned i = 0; i < width; ++i) {
        const char c = i < given ? bits[given - 1 - i] : pad;
        v.set_bit(i, c);
    }
    v.normalize();
    return v;
}

BitVec BitVec::from_hex(std::string_view hex, unsigned width) {
    if (hex.starts_with("0x") || hex.starts_with("0X"))
        hex.remove_prefix(2);
    if (hex.empty())
        throw InputError("empty hex value");
    BitVec v(width);
    unsigned bitpos = 0;
    for (auto it = hex.rbegin(); it != hex.rend(); ++it) {
        const int d = hex_digit(*it);
        if (d < 0)
            throw InputError("bad hex digit in '" + std::string(hex) + "'");
        for (int b = 0; b < 4; ++b, ++bitpos) {
            if ((d >> b) & 1) {
                if (bitpos >= width)
                    throw InputError("hex value '" + std::string(hex) +
                                     "' does not fit in " +
                                     std::to_string(width) + " bits");
                v.value_[bitpos / 64] |= 1ULL << (bitpos % 64);
            }
        }
    }
    return v;
}

std::size_t BitVec::unknown_count() const noexcept {
    std::size_t n = 0;
    for (auto w : xmask_)
        n += static_cast<std::size_t>(std::popcount(w));
    return n;
}

bool BitVec::bit(unsigned i) const {
    if (i >= width_)
        throw InputError("bit index out of range");
    return (value_[i / 64] >> (i % 64)) & 1;
}

char BitVec::bit_char(unsigned i) const {
    if (i >= width_)
        throw InputError("bit index out of range");
    const std::uint64_t m = 1ULL << (i % 64);
    if (!xmask_.empty() && (xmask_[i / 64] & m))
        return (zmask_[i / 64] & m) ? 'z' : 'x';
    return (value_[i / 64] & m) ? '1' : '0';
}

void BitVec::set_bit(unsigned i, char state) {
    if (i >= width_)
        throw InputError("bit index out of range");
    const std::size_t w = i / 64;
    const std::uint64_t m = 1ULL << (i % 64);
    value_[w] &= ~m;
    if (!xmask_.empty()) {
        xmask_[w] &= ~m;
        zmask_[w] &= ~m;
    }
    switch (state) {
    case '0':
        break;
    case '1':
        value_[w] |= m;
        break;
    case 'x':
    case 'X':
    case 'z':
    case 'Z':
        if (xmask_.empty()) {
            xmask_.assign(value_.size(), 0);
            zmask_.assign(value_.size(), 0);
        }
        xmask_[w] |= m;
        if (state == 'z' || state == 'Z')
            zmask_[w] |= m;
        break;
    default:
        throw InputError(std::string("invalid bit state '") + state + "'");
    }
}

std::uint64_t BitVec::to_uint64() const {
    return value_.empty() ? 0 : value_[0];
}

std::string BitVec::to_string() const {
    std::string s(width_, '0');
    for (unsigned i = 0; i < width_; ++i)
        s[width_ - 1 - i] = bit_char(i);
    return s;
}

std::string BitVec::to_hex() const {
    static constexpr char digits[] = "0123456789abcdef";
    const unsigned ndig = std::max(1u, (width_ + 3) / 4);
    std::string s(ndig, '0');
    for (unsigned d = 0; d < ndig; ++d) {
        unsigned nib = 0;
        for (unsigned b = 0; b < 4; ++b) {
            const unsigned i = d * 4 + b;
            if (i < width_ && bit(i))
                nib |= 1u << b;
        }
        s[ndig - 1 - d] = digits[nib];
    }
    return s;
}

std::size_t BitVec::count_ones() const noexcept {
    std::size_t n = 0;
    for (auto w : value_)
        n += static_cast<std::size_t>(std::popcount(w));
    return n;
}

std::size_t BitVec::count_differences(const BitVec &other) const {
    if (other.width_ != width_)
        throw InputError("width mismatch: " + std::to_string(width_) +
                         " vs " + std::to_string(other.width_));
    std::size_t n = 0;
    for (std::size_t i = 0; i < value_.size(); ++i)
        n += static_cast<std::size_t>(std::popcount(value_[i] ^ other.value_[i]));
    return n;
}

BitVec BitVec::concat(const BitVec &low) const {
    BitVec out(width_ + low.width_);
    for (unsigned i = 0; i < low.width_; ++i)
        out.set_bit(i, low.bit_char(i));
    for (unsigned i = 0; i < width_; ++i)
        out.set_bit(low.width_ + i, bit_char(i));
    out.normalize();
    return out;
}

void BitVec::normalize() {
    if (!value_.empty()) {
        value_.back() &= top_mask(width_);
    }
    if (!xmask_.empty()) {
        xmask_.back() &= top_mask(width_);
        zmask_.back() &= top_mask(width_);
        for (std::size_t i = 0; i < value_.size(); ++i)
            value_[i] &= ~xmask_[i];
        if (std::all_of(xmask_.begin(), xmask_.end(),
                        [](std::uint64_t w) { return w == 0; })) {
            xmask_.clear();
            zmask_.clear();
        }
    }
}

} // namespace leakscope

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

#include "leakscope/core/util.hpp"
#include "leakscope/metrics/svf.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace leakscope::aes {

/// FIPS-197 S-box.
const std::array<std::uint8_t, 256> &sbox_table();
inline std::uint8_t sbox(std::uint8_t x) { return sbox_table()[x]; }

/// Multiplication by x in GF(2^8) modulo x^8 + x^4 + x^3 + x + 1.
constexpr std::uint8_t xtime(std::uint8_t v) {
    return static_cast<std::uint8_t>((v << 1) ^ ((v & 0x80) ? 0x1B : 0x00));
}

using RoundKeys = std::array<Block, 11>;

RoundKeys expand_key(const Block &key);

/// FIPS-197 AES-128; bytes in FIPS order (column-major state).
Block aes128_encrypt(const Block &plaintext, const Block &key);

/// State snapshots of one round: after SubBytes, ShiftRows, MixColumns (equal
/// to shift_rows in round 10) and AddRoundKey.
struct RoundTrace {
    Block sub_bytes{};
    Block shift_rows{};
    Block mix_columns{};
    Block add_round_key{};
};

struct EncryptTrace {
    /// plaintext xor round key 0.
    Block initial{};
    /// rounds[0] is round 1.
    std::array<RoundTrace, 10> rounds{};
    Block ciphertext{};
};

EncryptTrace aes128_encrypt_traced(const Block &plaintext, const Block &key);

enum class Point { XorKey, SboxOut, SboxOutTimes2 };

/// "xor_key", "sbox_out", "sbox_out_times2".
std::string_view point_name(Point p);
Point parse_point(std::string_view name);

std::uint8_t first_round_value(std::uint8_t p, std::uint8_t k, Point point);

struct InterestingPoint {
    Point point = Point::SboxOut;
    unsigned byte_index = 0;

    /// e.g. "sbox_out_byte0".
    std::string label() const;
};

/// Per-run 8-bit oracle value at the given first-round point. Throws
/// InputError with fewer than 2 plaintexts or byte_index > 15.
metrics::OracleTrace gen_oracle(const std::vector<Block> &plaintexts, const Block &key,
                                InterestingPoint point);

/// Custom interesting point: `fn` maps (plaintext, key) to an 8-bit value.
metrics::OracleTrace
gen_oracle(const std::vector<Block> &plaintexts, const Block &key, std::string label,
           const std::function<std::uint8_t(const Block &, const Block &)> &fn);

} // namespace leakscope::aes

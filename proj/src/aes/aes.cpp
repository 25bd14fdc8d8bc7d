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

#include "leakscope/aes/aes.hpp"
#include "leakscope/core/error.hpp"

namespace leakscope::aes {

namespace {

constexpr std::uint8_t gf_mul(std::uint8_t a, std::uint8_t b) {
    std::uint8_t r = 0;
    while (b) {
        if (b & 1)
            r ^= a;
        a = xtime(a);
        b >>= 1;
    }
    return r;
}

constexpr std::array<std::uint8_t, 256> build_sbox() {
    std::array<std::uint8_t, 256> s{};
    for (unsigned x = 0; x < 256; ++x) {
        std::uint8_t inv = 0;
        for (unsigned y = 1; y < 256 && x != 0; ++y)
            if (gf_mul(static_cast<std::uint8_t>(x), static_cast<std::uint8_t>(y)) == 1) {
                inv = static_cast<std::uint8_t>(y);
                break;
            }
        std::uint8_t b = inv;
        auto rotl = [](std::uint8_t v, int n) {
            return static_cast<std::uint8_t>((v << n) | (v >> (8 - n)));
        };
        s[x] = static_cast<std::uint8_t>(b ^ rotl(b, 1) ^ rotl(b, 2) ^ rotl(b, 3) ^ rotl(b, 4) ^
                                         0x63);
    }
    return s;
}

Block shift_rows(const Block &s) {
    Block o{};
    for (int c = 0; c < 4; ++c)
        for (int r = 0; r < 4; ++r)
            o[4 * c + r] = s[4 * ((c + r) % 4) + r];
    return o;
}

Block mix_columns(const Block &s) {
    Block o{};
    for (int c = 0; c < 4; ++c) {
        const std::uint8_t *a = &s[4 * c];
        const std::uint8_t all = a[0] ^ a[1] ^ a[2] ^ a[3];
        for (int r = 0; r < 4; ++r)
            o[4 * c + r] = a[r] ^ all ^ xtime(a[r] ^ a[(r + 1) % 4]);
    }
    return o;
}

Block xor_block(const Block &a, const Block &b) {
    Block o{};
    for (int i = 0; i < 16; ++i)
        o[i] = a[i] ^ b[i];
    return o;
}

} // namespace

const std::array<std::uint8_t, 256> &sbox_table() {
    static constexpr auto table = build_sbox();
    return table;
}

RoundKeys expand_key(const Block &key) {
    RoundKeys rk{};
    rk[0] = key;
    std::uint8_t rcon = 1;
    for (int r = 1; r <= 10; ++r) {
        const Block &p = rk[r - 1];
        Block &k = rk[r];
        std::uint8_t t[4] = {sbox(p[13]), sbox(p[14]), sbox(p[15]), sbox(p[12])};
        t[0] ^= rcon;
        rcon = xtime(rcon);
        for (int i = 0; i < 4; ++i)
            k[i] = p[i] ^ t[i];
        for (int i = 4; i < 16; ++i)
            k[i] = p[i] ^ k[i - 4];
    }
    return rk;
}

EncryptTrace aes128_encrypt_traced(const Block &plaintext, const Block &key) {
    const auto rk = expand_key(key);
    EncryptTrace t;
    Block s = xor_block(plaintext, rk[0]);
    t.initial = s;
    for (int r = 1; r <= 10; ++r) {
        auto &rt = t.rounds[r - 1];
        for (int i = 0; i < 16; ++i)
            rt.sub_bytes[i] = sbox(s[i]);
        rt.shift_rows = shift_rows(rt.sub_bytes);
        rt.mix_columns = r == 10 ? rt.shift_rows : mix_columns(rt.shift_rows);
        rt.add_round_key = xor_block(rt.mix_columns, rk[r]);
        s = rt.add_round_key;
    }
    t.ciphertext = s;
    return t;
}

Block aes128_encrypt(const Block &plaintext, const Block &key) {
    return aes128_encrypt_traced(plaintext, key).ciphertext;
}

std::string_view point_name(Point p) {
    switch (p) {
    case Point::XorKey:
        return "xor_key";
    case Point::SboxOut:
        return "sbox_out";
    case Point::SboxOutTimes2:
        return "sbox_out_times2";
    }
    return "?";
}

Point parse_point(std::string_view name) {
    for (auto p : {Point::XorKey, Point::SboxOut, Point::SboxOutTimes2})
        if (point_name(p) == name)
            return p;
    throw InputError("unknown interesting point '" + std::string(name) +
                     "' (expected xor_key, sbox_out or sbox_out_times2)");
}

std::uint8_t first_round_value(std::uint8_t p, std::uint8_t k, Point point) {
    const std::uint8_t x = p ^ k;
    switch (point) {
    case Point::XorKey:
        return x;
    case Point::SboxOut:
        return sbox(x);
    case Point::SboxOutTimes2:
        return xtime(sbox(x));
    }
    return 0;
}

std::string InterestingPoint::label() const {
    return std::string(point_name(point)) + "_byte" + std::to_string(byte_index);
}

metrics::OracleTrace
gen_oracle(const std::vector<Block> &plaintexts, const Block &key, std::string label,
           const std::function<std::uint8_t(const Block &, const Block &)> &fn) {
    if (plaintexts.size() < 2)
        throw InputError("an oracle needs at least 2 plaintexts, got " +
                         std::to_string(plaintexts.size()));
    metrics::OracleTrace o;
    o.label = std::move(label);
    o.values.reserve(plaintexts.size());
    for (const auto &p : plaintexts)
        o.values.push_back(BitVec::from_uint(8, fn(p, key)));
    return o;
}

metrics::OracleTrace gen_oracle(const std::vector<Block> &plaintexts, const Block &key,
                                InterestingPoint point) {
    if (point.byte_index > 15)
        throw InputError("byte index " + std::to_string(point.byte_index) + " out of range 0..15");
    return gen_oracle(plaintexts, key, point.label(), [point](const Block &p, const Block &k) {
        return first_round_value(p[point.byte_index], k[point.byte_index], point.point);
    });
}

} // namespace leakscope::aes

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

#include <gtest/gtest.h>

#include <random>
#include <set>

using namespace leakscope;
using namespace leakscope::aes;

namespace {

Block random_block(std::mt19937_64 &rng) {
    Block b;
    for (auto &x : b)
        x = static_cast<std::uint8_t>(rng());
    return b;
}

std::uint8_t gf_mul(std::uint8_t a, std::uint8_t b) {
    std::uint8_t p = 0;
    for (int i = 0; i < 8; ++i) {
        if (b & 1)
            p ^= a;
        const bool hi = a & 0x80;
        a = static_cast<std::uint8_t>(a << 1);
        if (hi)
            a ^= 0x1B;
        b >>= 1;
    }
    return p;
}

} // namespace

TEST(Aes, Fips197AppendixC1) {
    const auto ct = aes128_encrypt(parse_block("00112233445566778899aabbccddeeff"),
                                   parse_block("000102030405060708090a0b0c0d0e0f"));
    EXPECT_EQ(block_to_hex(ct), "69c4e0d86a7b0430d8cdb78070b4c55a");
}

TEST(Aes, Fips197AppendixB) {
    const auto ct = aes128_encrypt(parse_block("3243f6a8885a308d313198a2e0370734"),
                                   parse_block("2b7e151628aed2a6abf7158809cf4f3c"));
    EXPECT_EQ(block_to_hex(ct), "3925841d02dc09fbdc118597196a0b32");
}

TEST(Aes, KeyExpansionLastRoundKey) {
    // FIPS-197 Appendix A.1, w[40..43].
    const auto rk = expand_key(parse_block("2b7e151628aed2a6abf7158809cf4f3c"));
    EXPECT_EQ(block_to_hex(rk[10]), "d014f9a8c9ee2589e13f0cc8b6630ca6");
}

TEST(Aes, SboxAgainstGfInverse) {
    EXPECT_EQ(sbox(0x00), 0x63);
    for (unsigned x = 1; x < 256; ++x) {
        std::uint8_t inv = 0;
        for (unsigned y = 1; y < 256; ++y)
            if (gf_mul(static_cast<std::uint8_t>(x), static_cast<std::uint8_t>(y)) == 1)
                inv = static_cast<std::uint8_t>(y);
        std::uint8_t s = 0x63;
        for (int i = 0; i < 8; ++i) {
            const int b = ((inv >> i) ^ (inv >> ((i + 4) % 8)) ^ (inv >> ((i + 5) % 8)) ^
                           (inv >> ((i + 6) % 8)) ^ (inv >> ((i + 7) % 8))) &
                          1;
            s ^= static_cast<std::uint8_t>(b << i);
        }
        EXPECT_EQ(sbox(static_cast<std::uint8_t>(x)), s) << x;
    }
}

TEST(Aes, EncryptIsInjectivePerKey) {
    std::mt19937_64 rng(1);
    const Block key = random_block(rng);
    std::set<Block> pts, cts;
    while (pts.size() < 1000)
        pts.insert(random_block(rng));
    for (const auto &p : pts)
        cts.insert(aes128_encrypt(p, key));
    EXPECT_EQ(cts.size(), 1000u);
}

TEST(Aes, TracedEncryptMatchesPlain) {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 50; ++i) {
        const Block p = random_block(rng), k = random_block(rng);
        const auto t = aes128_encrypt_traced(p, k);
        EXPECT_EQ(t.ciphertext, aes128_encrypt(p, k));
        for (int b = 0; b < 16; ++b)
            EXPECT_EQ(t.rounds[0].sub_bytes[b], sbox(p[b] ^ k[b]));
    }
}

TEST(FirstRoundValue, Examples) {
    EXPECT_EQ(first_round_value(0x00, 0x00, Point::XorKey), 0x00);
    EXPECT_EQ(first_round_value(0x00, 0x00, Point::SboxOut), 0x63);
    EXPECT_EQ(first_round_value(0x00, 0x00, Point::SboxOutTimes2), 0xC6);
    EXPECT_EQ(gf_mul(0x63, 2), 0xC6);
}

TEST(FirstRoundValue, Properties) {
    for (unsigned k = 0; k < 256; ++k) {
        std::set<std::uint8_t> seen;
        for (unsigned p = 0; p < 256; ++p) {
            const auto pb = static_cast<std::uint8_t>(p), kb = static_cast<std::uint8_t>(k);
            EXPECT_EQ(first_round_value(pb, kb, Point::XorKey),
                      first_round_value(kb, pb, Point::XorKey));
            EXPECT_EQ(first_round_value(pb, kb, Point::SboxOutTimes2),
                      gf_mul(first_round_value(pb, kb, Point::SboxOut), 2));
            seen.insert(first_round_value(pb, kb, Point::SboxOut));
        }
        EXPECT_EQ(seen.size(), 256u);
    }
}

TEST(Point, NamesRoundTrip) {
    for (auto p : {Point::XorKey, Point::SboxOut, Point::SboxOutTimes2})
        EXPECT_EQ(parse_point(point_name(p)), p);
    EXPECT_EQ(point_name(Point::SboxOutTimes2), "sbox_out_times2");
    EXPECT_THROW(parse_point("mix_columns"), InputError);
    EXPECT_EQ((InterestingPoint{Point::SboxOut, 5}).label(), "sbox_out_byte5");
}

TEST(GenOracle, XorKeyDefinition) {
    const Block k = parse_block("2b7e151628aed2a6abf7158809cf4f3c");
    const std::vector<Block> pts{parse_block("00000000000000000000000000000000"),
                                 parse_block("ff000000000000000000000000000000")};
    const auto o = gen_oracle(pts, k, {Point::XorKey, 0});
    ASSERT_EQ(o.size(), 2u);
    EXPECT_EQ(o.values[0].to_uint64(), 0x2bu);
    EXPECT_EQ(o.values[1].to_uint64(), 0xd4u);
    EXPECT_EQ(o.values[0].width(), 8u);
    EXPECT_EQ(o.label, "xor_key_byte0");
}

TEST(GenOracle, EqualPlaintextsGiveConstantTrace) {
    const Block k{};
    const std::vector<Block> pts(5, parse_block("00112233445566778899aabbccddeeff"));
    const auto o = gen_oracle(pts, k, {Point::SboxOut, 3});
    for (const auto &v : o.values)
        EXPECT_EQ(v, o.values[0]);
}

TEST(GenOracle, MatchesInstrumentedEncrypt) {
    std::mt19937_64 rng(3);
    const Block k = random_block(rng);
    std::vector<Block> pts;
    for (int i = 0; i < 100; ++i)
        pts.push_back(random_block(rng));
    const auto o = gen_oracle(pts, k, {Point::SboxOut, 5});
    for (std::size_t i = 0; i < pts.size(); ++i)
        EXPECT_EQ(o.values[i].to_uint64(), aes128_encrypt_traced(pts[i], k).rounds[0].sub_bytes[5]);
}

TEST(GenOracle, CustomPointAndErrors) {
    const Block k{};
    std::vector<Block> pts(3);
    pts[1][2] = 7;
    const auto o = gen_oracle(pts, k, "byte2", [](const Block &p, const Block &) { return p[2]; });
    EXPECT_EQ(o.values[1].to_uint64(), 7u);
    EXPECT_EQ(o.label, "byte2");
    EXPECT_THROW(gen_oracle({pts[0]}, k, {Point::SboxOut, 0}), InputError);
    EXPECT_THROW(gen_oracle(pts, k, {Point::SboxOut, 16}), InputError);
}

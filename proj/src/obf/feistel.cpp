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

#include "leakscope/obf/feistel.hpp"
#include "leakscope/core/error.hpp"
#include "leakscope/core/util.hpp"

#include <nlohmann/json.hpp>

#include <bit>
#include <fstream>
#include <sstream>

namespace leakscope::obf {

AffineSpec generate_affine_spec(std::uint64_t seed, std::string version) {
    AffineSpec spec;
    spec.version = std::move(version);
    std::uint64_t s = seed;
    auto draw = [&s] {
        s += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = s;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    };
    for (auto &row : spec.rows)
        do
            row = static_cast<std::uint32_t>(draw());
        while (row == 0);
    do
        spec.constant = static_cast<std::uint16_t>(draw());
    while (spec.constant == 0);
    return spec;
}

const AffineSpec &default_affine_spec() {
    static const AffineSpec spec = generate_affine_spec(kDefaultAffineSeed, "v1");
    return spec;
}

std::string affine_spec_to_json(const AffineSpec &spec) {
    nlohmann::ordered_json j;
    j["version"] = spec.version;
    j["input_layout"] = "bits 31..16 = R, bits 15..0 = K";
    auto rows = nlohmann::json::array();
    for (auto r : spec.rows)
        rows.push_back(hex_u64(r, 8));
    j["rows"] = rows;
    j["constant"] = hex_u64(spec.constant, 4);
    return j.dump(2) + "\n";
}

AffineSpec affine_spec_from_json(const std::string &text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
        throw ParseError(std::string("affine spec: ") + e.what());
    }
    if (!j.is_object() || !j.contains("rows") || !j.contains("constant"))
        throw ParseError("affine spec: expected an object with 'rows' and 'constant'");
    const auto &rows = j["rows"];
    if (!rows.is_array() || rows.size() != 16)
        throw ParseError("affine spec: 'rows' must hold exactly 16 hex strings");
    AffineSpec spec;
    spec.version = j.value("version", std::string("custom"));
    for (std::size_t i = 0; i < 16; ++i) {
        if (!rows[i].is_string())
            throw ParseError("affine spec: row " + std::to_string(i) + " is not a string");
        spec.rows[i] = static_cast<std::uint32_t>(parse_hex_u64(rows[i].get<std::string>(), 32));
    }
    if (!j["constant"].is_string())
        throw ParseError("affine spec: 'constant' is not a string");
    spec.constant =
        static_cast<std::uint16_t>(parse_hex_u64(j["constant"].get<std::string>(), 16));
    return spec;
}

AffineSpec load_affine_spec(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open affine spec '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return affine_spec_from_json(ss.str());
    } catch (const ParseError &e) {
        throw ParseError(path + ": " + e.what());
    }
}

std::uint16_t affine_f(std::uint16_t r, std::uint16_t k, const AffineSpec &spec) {
    const std::uint32_t in = (static_cast<std::uint32_t>(r) << 16) | k;
    std::uint16_t out = 0;
    for (unsigned i = 0; i < 16; ++i)
        out |= static_cast<std::uint16_t>((std::popcount(spec.rows[i] & in) & 1) << i);
    return out ^ spec.constant;
}

namespace {

std::uint32_t network(std::uint32_t x, const std::array<std::uint16_t, 4> &k,
                      const AffineSpec &spec) {
    auto l = static_cast<std::uint16_t>(x >> 16);
    auto r = static_cast<std::uint16_t>(x);
    for (int i = 0; i < 3; ++i) {
        const auto next = static_cast<std::uint16_t>(l ^ affine_f(r, k[i], spec));
        l = r;
        r = next;
    }
    l = static_cast<std::uint16_t>(l ^ affine_f(r, k[3], spec));
    return (static_cast<std::uint32_t>(l) << 16) | r;
}

} // namespace

std::uint32_t obfuscate32(std::uint32_t x, const RoundKeys &keys, const AffineSpec &spec) {
    return network(x, keys.keys, spec);
}

std::uint32_t deobfuscate32(std::uint32_t x, const RoundKeys &keys, const AffineSpec &spec) {
    const auto &k = keys.keys;
    return network(x, {k[3], k[2], k[1], k[0]}, spec);
}

std::uint64_t obfuscate64(std::uint64_t x, const RoundKeys &keys, const AffineSpec &spec) {
    return (static_cast<std::uint64_t>(obfuscate32(static_cast<std::uint32_t>(x >> 32), keys, spec))
            << 32) |
           obfuscate32(static_cast<std::uint32_t>(x), keys, spec);
}

std::uint64_t deobfuscate64(std::uint64_t x, const RoundKeys &keys, const AffineSpec &spec) {
    return (static_cast<std::uint64_t>(
                deobfuscate32(static_cast<std::uint32_t>(x >> 32), keys, spec))
            << 32) |
           deobfuscate32(static_cast<std::uint32_t>(x), keys, spec);
}

std::uint32_t remap(std::uint32_t d, const RoundKeys &old_keys, const RoundKeys &new_keys,
                    const AffineSpec &spec) {
    return obfuscate32(deobfuscate32(d, old_keys, spec), new_keys, spec);
}

std::uint64_t remap64(std::uint64_t d, const RoundKeys &old_keys, const RoundKeys &new_keys,
                      const AffineSpec &spec) {
    return obfuscate64(deobfuscate64(d, old_keys, spec), new_keys, spec);
}

Obfuscator::Obfuscator(const AffineSpec &spec, const RoundKeys &keys) : keys_(keys) {
    // Column b of A as a 16-bit output mask.
    std::array<std::uint16_t, 32> col{};
    for (unsigned b = 0; b < 32; ++b)
        for (unsigned i = 0; i < 16; ++i)
            col[b] |= static_cast<std::uint16_t>(((spec.rows[i] >> b) & 1) << i);
    for (unsigned half = 0; half < 2; ++half)
        for (unsigned v = 0; v < 256; ++v) {
            std::uint16_t acc = 0;
            for (unsigned j = 0; j < 8; ++j)
                if ((v >> j) & 1)
                    acc ^= col[16 + 8 * half + j];
            tr_[half][v] = acc;
        }
    for (unsigned r = 0; r < 4; ++r) {
        std::uint16_t acc = spec.constant;
        for (unsigned j = 0; j < 16; ++j)
            if ((keys.keys[r] >> j) & 1)
                acc ^= col[j];
        kc_[r] = acc;
    }
}

std::uint32_t Obfuscator::encrypt(std::uint32_t x) const {
    auto l = static_cast<std::uint16_t>(x >> 16);
    auto r = static_cast<std::uint16_t>(x);
    for (int i = 0; i < 3; ++i) {
        const auto next = static_cast<std::uint16_t>(l ^ f(r, i));
        l = r;
        r = next;
    }
    l = static_cast<std::uint16_t>(l ^ f(r, 3));
    return (static_cast<std::uint32_t>(l) << 16) | r;
}

std::uint32_t Obfuscator::decrypt(std::uint32_t x) const {
    auto l = static_cast<std::uint16_t>(x >> 16);
    auto r = static_cast<std::uint16_t>(x);
    for (int i = 3; i > 0; --i) {
        const auto next = static_cast<std::uint16_t>(l ^ f(r, i));
        l = r;
        r = next;
    }
    l = static_cast<std::uint16_t>(l ^ f(r, 0));
    return (static_cast<std::uint32_t>(l) << 16) | r;
}

std::uint64_t Obfuscator::encrypt64(std::uint64_t x) const {
    return (static_cast<std::uint64_t>(encrypt(static_cast<std::uint32_t>(x >> 32))) << 32) |
           encrypt(static_cast<std::uint32_t>(x));
}

std::uint64_t Obfuscator::decrypt64(std::uint64_t x) const {
    return (static_cast<std::uint64_t>(decrypt(static_cast<std::uint32_t>(x >> 32))) << 32) |
           decrypt(static_cast<std::uint32_t>(x));
}

void AddressGeometry::validate() const {
    if (offset_bits < 1 || offset_bits > 31)
        throw InputError("offset_bits must be in 1..31, got " + std::to_string(offset_bits));
    if (address_width != 32 + offset_bits)
        throw InputError("address width " + std::to_string(address_width) +
                         " leaves " + std::to_string(address_width - offset_bits) +
                         " tag+set bits; exactly 32 are required");
}

namespace {

void check_address(std::uint64_t a, const AddressGeometry &geom) {
    geom.validate();
    if (geom.address_width < 64 && (a >> geom.address_width) != 0)
        throw InputError("address 0x" + hex_u64(a, 16) + " exceeds " +
                         std::to_string(geom.address_width) + " bits");
}

} // namespace

std::uint64_t obfuscate_address(std::uint64_t a, const AddressGeometry &geom,
                                const RoundKeys &keys, const AffineSpec &spec) {
    check_address(a, geom);
    const auto tagset = static_cast<std::uint32_t>(a >> geom.offset_bits);
    return (static_cast<std::uint64_t>(obfuscate32(tagset, keys, spec)) << geom.offset_bits) |
           (a & geom.offset_mask());
}

std::uint64_t deobfuscate_address(std::uint64_t a, const AddressGeometry &geom,
                                  const RoundKeys &keys, const AffineSpec &spec) {
    check_address(a, geom);
    const auto tagset = static_cast<std::uint32_t>(a >> geom.offset_bits);
    return (static_cast<std::uint64_t>(deobfuscate32(tagset, keys, spec)) << geom.offset_bits) |
           (a & geom.offset_mask());
}

Lfsr::Lfsr(std::uint64_t seed) : state_(seed) {
    if (seed == 0)
        throw InputError("LFSR seed must be non-zero");
}

bool Lfsr::step() {
    const bool out = (state_ >> 63) != 0;
    const auto fb = static_cast<std::uint64_t>(std::popcount(state_ & kTaps) & 1);
    state_ = (state_ << 1) | fb;
    return out;
}

RoundKeys next_round_keys(Lfsr &lfsr) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 64; ++i)
        bits = (bits << 1) | static_cast<std::uint64_t>(lfsr.step());
    RoundKeys k;
    for (int i = 0; i < 4; ++i)
        k.keys[i] = static_cast<std::uint16_t>(bits >> (48 - 16 * i));
    k.epoch = ++lfsr.epoch_;
    return k;
}

} // namespace leakscope::obf

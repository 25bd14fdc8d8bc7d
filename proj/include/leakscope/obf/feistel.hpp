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

#include <array>
#include <cstdint>
#include <string>

namespace leakscope::obf {

/// Affine round function Y = A (R || K) + C over GF(2).
///
/// rows[i] is output bit i; its bit b selects input bit b of the 32-bit word
/// (R << 16) | K, so bits 31..16 are R and bits 15..0 are K.
struct AffineSpec {
    std::array<std::uint32_t, 16> rows{};
    std::uint16_t constant = 0;
    std::string version;

    bool operator==(const AffineSpec &) const = default;
};

/// The shipped default (version "v1"): rows then constant drawn from
/// splitmix64 seeded with kDefaultAffineSeed, each 64-bit draw truncated to
/// the field width, zero values redrawn.
inline constexpr std::uint64_t kDefaultAffineSeed = 0x1EA5C09EAFF10001ULL;
const AffineSpec &default_affine_spec();
AffineSpec generate_affine_spec(std::uint64_t seed, std::string version);

std::string affine_spec_to_json(const AffineSpec &spec);
AffineSpec affine_spec_from_json(const std::string &text);
AffineSpec load_affine_spec(const std::string &path);

std::uint16_t affine_f(std::uint16_t r, std::uint16_t k, const AffineSpec &spec);

struct RoundKeys {
    std::array<std::uint16_t, 4> keys{};
    std::uint64_t epoch = 0;
};

/// Four Feistel rounds on (L, R) = (x >> 16, x & 0xFFFF). Rounds 1-3 map
/// (L, R) -> (R, L ^ f(R, k_i)); round 4 maps (L, R) -> (L ^ f(R, k_4), R)
/// (no final swap), so the inverse is the same network with reversed keys.
std::uint32_t obfuscate32(std::uint32_t x, const RoundKeys &keys, const AffineSpec &spec);
std::uint32_t deobfuscate32(std::uint32_t x, const RoundKeys &keys, const AffineSpec &spec);

/// 64-bit payloads: two independent 32-bit halves under the same keys.
std::uint64_t obfuscate64(std::uint64_t x, const RoundKeys &keys, const AffineSpec &spec);
std::uint64_t deobfuscate64(std::uint64_t x, const RoundKeys &keys, const AffineSpec &spec);

/// d'' = O_new(O_old^-1(d')).
std::uint32_t remap(std::uint32_t d, const RoundKeys &old_keys, const RoundKeys &new_keys,
                    const AffineSpec &spec);
std::uint64_t remap64(std::uint64_t d, const RoundKeys &old_keys, const RoundKeys &new_keys,
                      const AffineSpec &spec);

/// Table-driven equivalent of obfuscate32/deobfuscate32 for one
/// (spec, keys) pair. The affine map splits into per-byte lookups of R plus
/// a per-round constant from the key, so a round costs three loads.
class Obfuscator {
  public:
    Obfuscator(const AffineSpec &spec, const RoundKeys &keys);

    std::uint32_t encrypt(std::uint32_t x) const;
    std::uint32_t decrypt(std::uint32_t x) const;
    std::uint64_t encrypt64(std::uint64_t x) const;
    std::uint64_t decrypt64(std::uint64_t x) const;
    const RoundKeys &keys() const { return keys_; }

  private:
    std::uint16_t f(std::uint16_t r, int round) const {
        return static_cast<std::uint16_t>(tr_[0][r & 0xFF] ^ tr_[1][r >> 8] ^ kc_[round]);
    }

    std::array<std::array<std::uint16_t, 256>, 2> tr_{};
    std::array<std::uint16_t, 4> kc_{};
    RoundKeys keys_;
};

struct AddressGeometry {
    unsigned address_width = 38;
    unsigned offset_bits = 6;

    unsigned tagset_bits() const { return address_width - offset_bits; }
    std::uint64_t offset_mask() const { return (std::uint64_t{1} << offset_bits) - 1; }
    /// Throws InputError unless offset_bits >= 1 and tagset_bits == 32.
    void validate() const;
};

/// a' = obfuscate32(tagset(a)) || offset(a). Throws InputError when `a`
/// does not fit the geometry.
std::uint64_t obfuscate_address(std::uint64_t a, const AddressGeometry &geom,
                                const RoundKeys &keys, const AffineSpec &spec);
std::uint64_t deobfuscate_address(std::uint64_t a, const AddressGeometry &geom,
                                  const RoundKeys &keys, const AffineSpec &spec);

/// 64-bit Fibonacci LFSR, shifting left. The feedback bit is the parity of
/// state & kTaps (bits 63, 62, 60, 59, i.e. x^64 + x^63 + x^61 + x^60 + 1);
/// the output bit is the outgoing bit 63.
class Lfsr {
  public:
    static constexpr std::uint64_t kTaps = (1ULL << 63) | (1ULL << 62) | (1ULL << 60) | (1ULL << 59);

    /// Throws InputError for a zero seed.
    explicit Lfsr(std::uint64_t seed);

    bool step();
    std::uint64_t state() const { return state_; }
    std::uint64_t epoch() const { return epoch_; }

  private:
    friend RoundKeys next_round_keys(Lfsr &lfsr);
    std::uint64_t state_;
    std::uint64_t epoch_ = 0;
};

/// Draws 64 output bits (first bit most significant) and splits them into
/// k1 = bits 63..48, ..., k4 = bits 15..0. The returned epoch is the
/// LFSR's draw count after the call (first draw: epoch 1).
RoundKeys next_round_keys(Lfsr &lfsr);

} // namespace leakscope::obf

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
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace leakscope {

using Block = std::array<std::uint8_t, 16>;

/// Parses exactly 32 hex digits into a 16-byte block.
Block parse_block(std::string_view hex);
std::string block_to_hex(const Block &b);

/// Parses an unsigned hex integer (optional 0x prefix) that must fit `bits`.
std::uint64_t parse_hex_u64(std::string_view hex, unsigned bits = 64);
std::string hex_u64(std::uint64_t v, unsigned digits);

/// Reads a block file: one 32-hex-char block per line; blank lines and
/// lines starting with '#' are skipped.
std::vector<Block> read_block_file(const std::string &path);
void write_block_file(const std::string &path, const std::vector<Block> &blocks);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);

/// Derives an independent 64-bit seed from a master seed and a label, so
/// every random stream of an experiment is reproducible from one number.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label,
                          std::uint64_t index = 0);

/// splitmix64 step.
std::uint64_t mix64(std::uint64_t x);

/// Runs fn(i) for i in [0, n) on up to `threads` worker threads. Each index
/// is processed exactly once; callers write results into per-index slots.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)> &fn);

/// Worker count to use when the caller asked for `requested` (0 = auto).
unsigned resolve_threads(unsigned requested);

} // namespace leakscope

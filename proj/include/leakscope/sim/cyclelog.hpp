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

#include "leakscope/core/bitvec.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace leakscope::sim {

struct SignalInfo {
    std::vector<std::string> scope;
    std::string name;
    unsigned width = 1;
    /// Clocked storage. Combinational nets (false) are logged but carry no
    /// toggle power of their own.
    bool is_state = true;

    std::string full_name() const;
};

/// Value history of every modeled signal. The value "at cycle c" is the
/// state after the c-th clock edge; reset values precede cycle 0.
class CycleLog {
  public:
    struct Change {
        std::uint32_t cycle;
        std::uint32_t signal;
        std::uint32_t offset; // into the change pool
    };

    std::size_t declare(SignalInfo info, std::span<const std::uint64_t> reset);

    const std::vector<SignalInfo> &signals() const { return signals_; }
    std::size_t cycles() const { return cycles_; }
    void set_cycles(std::size_t n) { cycles_ = n; }
    const std::vector<Change> &changes() const { return changes_; }

    /// Appends a change; changes must arrive in non-decreasing cycle order.
    void record(std::uint32_t cycle, std::uint32_t signal, std::span<const std::uint64_t> words);

    std::span<const std::uint64_t> reset_words(std::size_t signal) const;
    std::span<const std::uint64_t> change_words(const Change &c) const;

    BitVec reset_value(std::size_t signal) const;
    BitVec change_value(const Change &c) const;
    /// Per-cycle values of one signal (length cycles()).
    std::vector<BitVec> series(std::size_t signal) const;
    std::size_t find(std::string_view full_name) const;

    void clear_history();

  private:
    std::vector<SignalInfo> signals_;
    std::vector<std::uint32_t> reset_offset_;
    std::vector<std::uint64_t> reset_pool_;
    std::vector<Change> changes_;
    std::vector<std::uint64_t> change_pool_;
    std::size_t cycles_ = 0;
};

/// Hamming-distance power: sample[c] = sum over state signals of
/// HD(value at c-1, value at c) + N(0, sigma^2); cycle 0 compares against
/// the reset values.
std::vector<double> synth_power(const CycleLog &log, double sigma, std::uint64_t seed);

/// Deterministic Gaussian stream (Box-Muller over xoshiro256**), identical on
/// every platform.
class GaussianNoise {
  public:
    GaussianNoise(std::uint64_t seed, double sigma);
    double next();

  private:
    std::uint64_t state_[4];
    double sigma_;
    bool have_spare_ = false;
    double spare_ = 0;
    std::uint64_t draw();
};

/// Writes the log as VCD: a `clk` wire in the top scope rises at 10c+5
/// (carrying cycle c's changes) and falls at 10c+10. Reset values are in
/// the #0 $dumpvars block. A log without cycles yields the header only.
std::string emit_vcd(const CycleLog &log, std::string_view top_scope = "soc");

} // namespace leakscope::sim

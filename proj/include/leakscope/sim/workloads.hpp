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

#include "leakscope/aes/aes.hpp"
#include "leakscope/sim/processor.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace leakscope::sim {

/// Memory map of the AES program.
inline constexpr std::uint64_t kSboxBase = 0x1000;
inline constexpr std::uint64_t kRoundKeyBase = 0x2000;
inline constexpr std::uint64_t kPlaintextBase = 0x3000;
inline constexpr std::uint64_t kCiphertextBase = 0x3040;

/// Straight-line AES-128 micro-op schedule. The state lives in registers;
/// SubBytes is one byte load per state byte from the 256-byte table.
/// Memory holds the table, the expanded key and the plaintext.
Program build_aes_program(const Block &plaintext, const Block &key);

/// Rewrites only the plaintext bytes of a program built by build_aes_program.
void set_plaintext(Program &program, const Block &plaintext);

struct WorkloadResult {
    CycleLog log; // empty unless requested
    std::vector<double> power;
    std::size_t cycles = 0;
    bool completed = false;
    Block ciphertext{}; // valid when completed
};

struct RunOptions {
    LogMode log_mode = LogMode::Full;
    /// Stop after this many cycles (0 = run to completion).
    std::size_t stop_cycle = 0;
    std::uint64_t noise_seed = 0;
    std::uint64_t replacement_seed = 0;
};

/// Runs `program` on a fresh processor with the given obfuscation keys and
/// returns per-cycle power: toggles + N(0, sigma^2) from `noise_seed`.
WorkloadResult run_program(const SimConfig &cfg, const obf::RoundKeys &keys,
                           const Program &program, const RunOptions &opts);

/// One AES encryption with epoch-1 keys and seeds derived from cfg.seed.
WorkloadResult run_workload(const SimConfig &cfg, const Block &plaintext, const Block &key);

/// Obfuscation keys of epochs 1..count drawn from the LFSR seeded by
/// cfg.seed. keys[e - 1] belongs to epoch e.
std::vector<obf::RoundKeys> epoch_keys(const SimConfig &cfg, std::size_t count);

/// Epoch of run `index` in a batch: 1 + index / rekey_interval_runs in param
/// mode (always 1 when rekeying is off), 0 in baseline mode (no keys).
std::uint64_t run_epoch(const SimConfig &cfg, std::size_t index);

struct BatchOptions {
    std::size_t stop_cycle = 0;
    bool keep_logs = false;
    unsigned threads = 1;
};

struct BatchRun {
    std::vector<double> power;
    std::size_t cycles = 0;
    std::uint64_t epoch = 0;
    std::optional<Block> ciphertext;
    CycleLog log;
};

/// Encrypts every plaintext on a fresh processor. Run i uses noise seed
/// derive_seed(cfg.seed, "noise", i) and the keys of run_epoch(cfg, i).
/// Results are in run-index order regardless of thread count.
std::vector<BatchRun> run_aes_batch(const SimConfig &cfg, const Block &key,
                                    const std::vector<Block> &plaintexts,
                                    const BatchOptions &opts);

/// Long-lived processor that executes successive AES runs against shared
/// cache and memory state and rekeys every `interval` runs, at the cycle
/// `rekey_cycle` of the run that crosses the boundary.
class AesSession {
  public:
    AesSession(const SimConfig &cfg, const Block &key, std::size_t rekey_cycle);
    Block encrypt(const Block &plaintext);
    std::size_t runs() const { return runs_; }
    std::size_t rekeys() const { return rekeys_; }

  private:
    SimConfig cfg_;
    Program program_;
    obf::Lfsr lfsr_;
    Processor proc_;
    std::size_t rekey_cycle_;
    std::size_t runs_ = 0;
    std::size_t rekeys_ = 0;
};

/// Random straight-line program over registers x1..x15 with loads and
/// stores confined to a 4 KiB data window. Used for fuzzing.
Program random_program(std::uint64_t seed, std::size_t ops);

/// Cache-set probe: a load from a fixed reference address followed by a
/// load from a random-tag address whose set index is `set`.
struct CacheSetProgram {
    Program program;
    /// Cycle at which the probe load is in MEM.
    std::size_t probe_cycle = 0;
};
CacheSetProgram cache_set_program(const CacheGeometry &geom, unsigned set, std::uint64_t tag);

struct CacheSetOptions {
    std::size_t runs_per_class = 2000;
    unsigned threads = 1;
};

/// Per-class power samples at the probe cycle. Runs are interleaved over
/// classes: global run k probes set k % sets, uses the keys of
/// run_epoch(cfg, k) and a random tag derived from cfg.seed.
std::vector<std::vector<double>> cache_set_experiment(const SimConfig &cfg,
                                                      const CacheSetOptions &opts);

} // namespace leakscope::sim

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

#include "leakscope/obf/feistel.hpp"
#include "leakscope/sim/cyclelog.hpp"
#include "leakscope/sim/isa.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace leakscope::sim {

enum class Mode { Baseline, Param };

std::string_view mode_name(Mode m);
Mode parse_mode(std::string_view s);

struct CacheGeometry {
    unsigned sets = 64;
    unsigned ways = 4;
    unsigned line_bytes = 64;

    unsigned offset_bits() const;
    unsigned index_bits() const;
    /// 32 tag+set bits plus the offset.
    unsigned address_width() const { return 32 + offset_bits(); }
    unsigned tag_bits() const { return address_width() - offset_bits() - index_bits(); }
    /// Throws InputError naming the offending field.
    void validate() const;
};

/// Noise sigma (toggle units per cycle) calibrated so that CPA on baseline
/// traces discloses key byte 0 within a few thousand traces.
inline constexpr double kDefaultNoiseSigma = 24.0;

struct SimConfig {
    Mode mode = Mode::Baseline;
    /// Unset: off in baseline mode, on in param mode.
    std::optional<bool> eda_fix;
    double noise_sigma = kDefaultNoiseSigma;
    std::uint64_t seed = 1;
    CacheGeometry cache;
    /// Runs per key epoch; 0 = never rekey.
    std::uint64_t rekey_interval_runs = 1000;
    obf::AffineSpec affine = obf::default_affine_spec();

    bool eda_fix_on() const { return eda_fix.value_or(mode == Mode::Param); }
    void validate() const;
};

enum class LogMode { PowerOnly, Full };

enum class Access { Load8, Load64, Store8, Store64 };

/// Deobfuscated datapath view used for lockstep comparisons: one plain
/// value per non-array signal, plus the resident cache lines keyed by
/// their plain line address.
struct PlainState {
    struct Line {
        bool dirty = false;
        std::array<std::uint8_t, 64> bytes{};
        bool operator==(const Line &) const = default;
    };
    std::vector<BitVec> signals;
    std::map<std::uint64_t, Line> lines;
};

/// Signal table shared by every processor with the same geometry.
struct Layout {
    std::vector<SignalInfo> info;
    std::vector<std::uint32_t> offset;
    std::size_t total_words = 0;

    std::uint32_t rf = 0, prf = 0, id_a = 0, id_b = 0, em_result = 0, em_store = 0,
                  mw_data = 0, alu_a = 0, alu_b = 0, alu_result = 0, fpu_a = 0, fpu_b = 0,
                  md_a = 0, md_b = 0, bpu_target = 0, csr = 0, req_addr = 0, rdata = 0,
                  wdata = 0, lines = 0, lb_addr = 0, lb_data = 0, hb_data = 0;
    unsigned sets = 0, ways = 0;

    static constexpr unsigned kPrfEntries = 8;

    /// First of the four signals (tag, valid, dirty, data) of a line.
    std::uint32_t line(unsigned set, unsigned way) const { return lines + 4 * (set * ways + way); }
    bool is_array(std::size_t sig) const { return sig >= lines && sig < lb_addr; }

    static std::shared_ptr<const Layout> get(const CacheGeometry &geom);
};

/// 5-stage in-order core (ID, EX, MEM, WB plus an implicit fetch) with a
/// write-back, write-allocate data cache. Every datapath register is a
/// logged signal; in param mode payloads are held in obfuscated form and
/// deobfuscated only inside the ALU and the cache data path.
class Processor {
  public:
    Processor(const SimConfig &cfg, const obf::RoundKeys &keys, LogMode log_mode,
              std::uint64_t replacement_seed);

    /// Installs the schedule and writes its memory image (untimed).
    void load_program(const Program &program);

    /// Executes one clock cycle; false once the program has drained.
    bool step();
    /// Runs until drained or `max_cycles` cycles have elapsed (0: no limit).
    std::size_t run(std::size_t max_cycles = 0);
    bool done() const;
    std::size_t cycle() const { return cycle_; }

    /// Noise-free per-cycle toggle count over state signals.
    const std::vector<double> &toggles() const { return toggles_; }
    const CycleLog &log() const { return log_; }
    CycleLog take_log();

    /// Param mode only: write back dirty lines, invalidate the cache and
    /// remap every obfuscated payload to `new_keys`. Throws Error otherwise.
    void rekey_flush(const obf::RoundKeys &new_keys);
    const obf::RoundKeys &keys() const { return obf_.keys(); }

    struct AccessResult {
        bool hit = false;
        /// Loaded value in plain form (0 for stores).
        std::uint64_t value = 0;
    };
    /// Data-cache access with the MEM stage's side effects on the cache,
    /// line buffer, hit buffer and request address.
    AccessResult cache_access(std::uint64_t addr, Access kind, std::uint64_t store_value = 0);

    /// Untimed host access that keeps any resident line coherent.
    void host_write(std::uint64_t addr, std::span<const std::uint8_t> bytes);
    std::vector<std::uint8_t> functional_read(std::uint64_t addr, std::size_t n) const;

    /// (set, tag) the access would use, after address obfuscation.
    std::pair<unsigned, std::uint64_t> locate(std::uint64_t addr) const;
    std::optional<unsigned> find_way(std::uint64_t addr) const;

    /// Architectural register value in plain form.
    std::uint64_t reg(unsigned r) const;
    PlainState plain_state() const;

    const Layout &layout() const { return *layout_; }
    std::span<const std::uint64_t> signal_words(std::size_t sig) const;
    const SimConfig &config() const { return cfg_; }

  private:
    struct Slot {
        bool valid = false;
        MicroOp u;
    };

    std::uint64_t get(std::uint32_t sig) const { return val_[layout_->offset[sig]]; }
    void set(std::uint32_t sig, std::uint64_t v);
    void set_words(std::uint32_t sig, std::span<const std::uint64_t> w);
    void touch(std::uint32_t sig);
    void end_cycle();

    std::uint64_t enc64(std::uint64_t v) const { return param_ ? obf_.encrypt64(v) : v; }
    std::uint64_t dec64(std::uint64_t v) const { return param_ ? obf_.decrypt64(v) : v; }
    std::uint32_t enc32(std::uint32_t v) const { return param_ ? obf_.encrypt(v) : v; }
    std::uint32_t dec32(std::uint32_t v) const { return param_ ? obf_.decrypt(v) : v; }
    std::uint64_t enc_addr(std::uint64_t a) const;
    std::uint64_t dec_addr(std::uint64_t a) const;

    std::uint32_t line_word(std::uint32_t data_sig, unsigned i) const;
    void set_line_word(std::uint32_t data_sig, unsigned i, std::uint32_t w);
    std::uint64_t line_address(unsigned set, unsigned way) const;
    void write_back(unsigned set, unsigned way);
    std::array<std::uint8_t, 64> &memory_line(std::uint64_t line_addr);

    void write_prf(std::uint64_t v);
    std::uint64_t read_operand(unsigned r, bool &forwarded);

    void stage_wb();
    void stage_mem();
    void stage_ex();
    void stage_id();

    SimConfig cfg_;
    bool param_;
    std::shared_ptr<const Layout> layout_;
    obf::Obfuscator obf_;
    obf::AddressGeometry addr_geom_;
    LogMode log_mode_;

    std::vector<std::uint64_t> val_;
    std::vector<std::uint32_t> touched_;
    std::vector<std::uint8_t> is_touched_;
    std::vector<std::uint64_t> start_pool_;
    std::vector<std::uint32_t> start_off_;

    std::unordered_map<std::uint64_t, std::array<std::uint8_t, 64>> memory_;
    std::vector<unsigned> repl_;
    unsigned prf_ptr_ = 0;
    bool rdata_active_ = false;
    bool wdata_active_ = false;

    std::vector<MicroOp> ops_;
    std::size_t pc_ = 0;
    Slot id_exe_, exe_mem_, mem_wb_;
    std::uint64_t instret_ = 0;
    std::size_t cycle_ = 0;
    std::vector<double> toggles_;
    CycleLog log_;
};

} // namespace leakscope::sim

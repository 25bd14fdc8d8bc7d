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

#include "leakscope/sim/processor.hpp"
#include "leakscope/core/error.hpp"
#include "leakscope/core/util.hpp"

#include <bit>
#include <cmath>
#include <mutex>

namespace leakscope::sim {

std::string_view mode_name(Mode m) { return m == Mode::Baseline ? "baseline" : "param"; }

Mode parse_mode(std::string_view s) {
    if (s == "baseline")
        return Mode::Baseline;
    if (s == "param")
        return Mode::Param;
    throw InputError("mode: expected 'baseline' or 'param', got '" + std::string(s) + "'");
}

unsigned CacheGeometry::offset_bits() const {
    return static_cast<unsigned>(std::countr_zero(line_bytes));
}

unsigned CacheGeometry::index_bits() const { return static_cast<unsigned>(std::countr_zero(sets)); }

void CacheGeometry::validate() const {
    if (line_bytes != 64)
        throw InputError("cache.line_bytes: must be 64, got " + std::to_string(line_bytes));
    if (sets == 0 || !std::has_single_bit(sets) || sets > (1u << 20))
        throw InputError("cache.sets: must be a power of two in 1..2^20, got " +
                         std::to_string(sets));
    if (ways == 0 || ways > 64)
        throw InputError("cache.ways: must be in 1..64, got " + std::to_string(ways));
}

void SimConfig::validate() const {
    if (!(noise_sigma >= 0) || !std::isfinite(noise_sigma))
        throw InputError("noise_sigma: must be a finite value >= 0");
    cache.validate();
}

std::shared_ptr<const Layout> Layout::get(const CacheGeometry &geom) {
    static std::mutex lock;
    static std::map<std::pair<unsigned, unsigned>, std::shared_ptr<const Layout>> cache;
    std::lock_guard<std::mutex> g(lock);
    auto &slot = cache[{geom.sets, geom.ways}];
    if (slot)
        return slot;

    auto l = std::make_shared<Layout>();
    l->sets = geom.sets;
    l->ways = geom.ways;
    auto add = [&](std::vector<std::string> scope, std::string name, unsigned width,
                   bool state = true) {
        l->offset.push_back(static_cast<std::uint32_t>(l->total_words));
        l->total_words += words_for(width);
        l->info.push_back({std::move(scope), std::move(name), width, state});
        return static_cast<std::uint32_t>(l->info.size() - 1);
    };
    const std::vector<std::string> core{"soc", "core"};
    auto in = [](std::vector<std::string> base, const char *leaf) {
        base.emplace_back(leaf);
        return base;
    };
    for (unsigned r = 0; r < 32; ++r) {
        const auto s = add(in(core, "rf"), "x" + std::to_string(r), 64);
        if (r == 0)
            l->rf = s;
    }
    for (unsigned p = 0; p < kPrfEntries; ++p) {
        const auto s = add(in(core, "prf"), "p" + std::to_string(p), 64);
        if (p == 0)
            l->prf = s;
    }
    l->id_a = add(in(core, "id_exe"), "op_a", 64);
    l->id_b = add(in(core, "id_exe"), "op_b", 64);
    l->em_result = add(in(core, "exe_mem"), "result", 64);
    l->em_store = add(in(core, "exe_mem"), "store_data", 64);
    l->mw_data = add(in(core, "mem_wb"), "data", 64);
    l->alu_a = add(in(core, "alu"), "op_a", 64, false);
    l->alu_b = add(in(core, "alu"), "op_b", 64, false);
    l->alu_result = add(in(core, "alu"), "result", 64, false);
    l->fpu_a = add(in(core, "fpu"), "op_a", 64);
    l->fpu_b = add(in(core, "fpu"), "op_b", 64);
    l->md_a = add(in(core, "muldiv"), "op_a", 64);
    l->md_b = add(in(core, "muldiv"), "op_b", 64);
    l->bpu_target = add(in(core, "bpu"), "target", 64);
    l->csr = add(in(core, "csr"), "status", 64);

    const std::vector<std::string> dc{"soc", "dcache"};
    l->req_addr = add(dc, "req_addr", geom.address_width());
    l->rdata = add(dc, "rdata", 64);
    l->wdata = add(dc, "wdata", 64);
    for (unsigned s = 0; s < geom.sets; ++s)
        for (unsigned w = 0; w < geom.ways; ++w) {
            const std::string p = "s" + std::to_string(s) + "w" + std::to_string(w);
            const auto t = add(in(dc, "arrays"), p + "_tag", geom.tag_bits());
            add(in(dc, "arrays"), p + "_valid", 1);
            add(in(dc, "arrays"), p + "_dirty", 1);
            add(in(dc, "arrays"), p + "_data", 8 * geom.line_bytes);
            if (s == 0 && w == 0)
                l->lines = t;
        }
    l->lb_addr = add(in(dc, "lb"), "addr", 32);
    l->lb_data = add(in(dc, "lb"), "data", 8 * geom.line_bytes);
    l->hb_data = add(in(dc, "hb"), "data", 64);
    slot = l;
    return slot;
}

Processor::Processor(const SimConfig &cfg, const obf::RoundKeys &keys, LogMode log_mode,
                     std::uint64_t replacement_seed)
    : cfg_(cfg), param_(cfg.mode == Mode::Param), layout_(Layout::get(cfg.cache)),
      obf_(cfg.affine, keys),
      addr_geom_{cfg.cache.address_width(), cfg.cache.offset_bits()}, log_mode_(log_mode) {
    cfg_.validate();
    const auto &L = *layout_;
    val_.assign(L.total_words, 0);
    is_touched_.assign(L.info.size(), 0);

    if (param_) {
        const std::uint64_t z64 = obf_.encrypt64(0);
        auto reset64 = [&](std::uint32_t sig) { val_[L.offset[sig]] = z64; };
        for (unsigned r = 0; r < 32; ++r)
            reset64(L.rf + r);
        for (unsigned p = 0; p < Layout::kPrfEntries; ++p)
            reset64(L.prf + p);
        for (auto s : {L.id_a, L.id_b, L.em_result, L.em_store, L.mw_data, L.alu_a, L.alu_b,
                       L.alu_result, L.csr, L.hb_data})
            reset64(s);
        const std::uint64_t z32 = obf_.encrypt(0);
        val_[L.offset[L.lb_addr]] = z32;
        for (std::size_t i = 0; i < words_for(L.info[L.lb_data].width); ++i)
            val_[L.offset[L.lb_data] + i] = z32 | (z32 << 32);
        val_[L.offset[L.req_addr]] = enc_addr(0);
    }

    repl_.resize(cfg_.cache.sets);
    for (unsigned s = 0; s < cfg_.cache.sets; ++s)
        repl_[s] = static_cast<unsigned>(derive_seed(replacement_seed, "replacement", s) %
                                         cfg_.cache.ways);

    if (log_mode_ == LogMode::Full)
        for (std::size_t s = 0; s < L.info.size(); ++s)
            log_.declare(L.info[s], signal_words(s));
}

std::span<const std::uint64_t> Processor::signal_words(std::size_t sig) const {
    return {val_.data() + layout_->offset[sig], words_for(layout_->info[sig].width)};
}

void Processor::touch(std::uint32_t sig) {
    if (is_touched_[sig])
        return;
    is_touched_[sig] = 1;
    touched_.push_back(sig);
    start_off_.push_back(static_cast<std::uint32_t>(start_pool_.size()));
    const auto w = signal_words(sig);
    start_pool_.insert(start_pool_.end(), w.begin(), w.end());
}

void Processor::set(std::uint32_t sig, std::uint64_t v) {
    auto &slot = val_[layout_->offset[sig]];
    if (slot == v)
        return;
    touch(sig);
    slot = v;
}

void Processor::set_words(std::uint32_t sig, std::span<const std::uint64_t> w) {
    std::uint64_t *dst = val_.data() + layout_->offset[sig];
    if (std::equal(w.begin(), w.end(), dst))
        return;
    touch(sig);
    std::copy(w.begin(), w.end(), dst);
}

void Processor::end_cycle() {
    double toggles = 0;
    for (std::size_t k = 0; k < touched_.size(); ++k) {
        const auto sig = touched_[k];
        const auto now = signal_words(sig);
        std::size_t hd = 0;
        for (std::size_t i = 0; i < now.size(); ++i)
            hd += static_cast<std::size_t>(std::popcount(now[i] ^ start_pool_[start_off_[k] + i]));
        if (hd == 0) {
            is_touched_[sig] = 0;
            continue;
        }
        if (layout_->info[sig].is_state)
            toggles += static_cast<double>(hd);
        if (log_mode_ == LogMode::Full)
            log_.record(static_cast<std::uint32_t>(cycle_), sig, now);
        is_touched_[sig] = 0;
    }
    touched_.clear();
    start_off_.clear();
    start_pool_.clear();
    toggles_.push_back(toggles);
    ++cycle_;
    log_.set_cycles(cycle_);
}

CycleLog Processor::take_log() { return std::move(log_); }

std::uint64_t Processor::enc_addr(std::uint64_t a) const {
    if (!param_)
        return a;
    const unsigned ob = addr_geom_.offset_bits;
    return (static_cast<std::uint64_t>(obf_.encrypt(static_cast<std::uint32_t>(a >> ob))) << ob) |
           (a & addr_geom_.offset_mask());
}

std::uint64_t Processor::dec_addr(std::uint64_t a) const {
    if (!param_)
        return a;
    const unsigned ob = addr_geom_.offset_bits;
    return (static_cast<std::uint64_t>(obf_.decrypt(static_cast<std::uint32_t>(a >> ob))) << ob) |
           (a & addr_geom_.offset_mask());
}

void Processor::load_program(const Program &program) {
    ops_ = program.ops;
    pc_ = 0;
    for (const auto &[addr, byte] : program.memory)
        host_write(addr, std::span<const std::uint8_t>(&byte, 1));
}

bool Processor::done() const {
    return pc_ >= ops_.size() && !id_exe_.valid && !exe_mem_.valid && !mem_wb_.valid;
}

bool Processor::step() {
    if (done())
        return false;
    stage_wb();
    stage_mem();
    stage_ex();
    stage_id();
    end_cycle();
    return true;
}

std::size_t Processor::run(std::size_t max_cycles) {
    std::size_t n = 0;
    while ((max_cycles == 0 || n < max_cycles) && step())
        ++n;
    return n;
}

void Processor::stage_wb() {
    if (!mem_wb_.valid)
        return;
    const auto &L = *layout_;
    const auto &u = mem_wb_.u;
    ++instret_;
    std::uint64_t status_low = dec64(get(L.csr)) & 0xFFFF;
    if (writes_rd(u.op)) {
        const std::uint64_t data = get(L.mw_data);
        if (u.rd != 0)
            set(L.rf + u.rd, data);
        const std::uint64_t plain = dec64(data);
        const std::uint64_t flags = (plain == 0 ? 1u : 0u) | ((plain >> 63) << 1);
        status_low = (flags << 8) | (plain & 0xFF);
    }
    set(L.csr, enc64((instret_ << 16) | status_low));
}

void Processor::stage_mem() {
    const auto &L = *layout_;
    bool rd_active = false, wr_active = false;
    if (exe_mem_.valid) {
        const auto &u = exe_mem_.u;
        if (is_load(u.op)) {
            const auto res = cache_access(dec64(get(L.em_result)),
                                          u.op == Op::Lbu ? Access::Load8 : Access::Load64);
            const std::uint64_t v = enc64(res.value);
            set(L.mw_data, v);
            set(L.rdata, v);
            rd_active = true;
            if (!res.hit)
                write_prf(v);
        } else if (is_store(u.op)) {
            const std::uint64_t sv = get(L.em_store);
            set(L.wdata, sv);
            wr_active = true;
            cache_access(dec64(get(L.em_result)),
                         u.op == Op::Sb ? Access::Store8 : Access::Store64, dec64(sv));
        } else {
            set(L.mw_data, get(L.em_result));
        }
    }
    if (!rd_active)
        set(L.rdata, 0);
    if (!wr_active)
        set(L.wdata, 0);
    rdata_active_ = rd_active;
    wdata_active_ = wr_active;
    mem_wb_ = exe_mem_;
}

void Processor::stage_ex() {
    const auto &L = *layout_;
    if (id_exe_.valid) {
        const auto &u = id_exe_.u;
        const std::uint64_t a_s = get(L.id_a), b_s = get(L.id_b);
        const std::uint64_t a = dec64(a_s);
        if (is_alu(u.op)) {
            const std::uint64_t b = dec64(b_s);
            const std::uint64_t r = alu_compute(u.op, a, b);
            const std::uint64_t r_s = enc64(r);
            set(L.em_result, r_s);
            set(L.alu_a, a_s);
            set(L.alu_b, b_s);
            set(L.alu_result, r_s);
            const bool eda = cfg_.eda_fix_on();
            // Functional units outside the ALU latch their qualified inputs
            // only with the fix; without it they capture every operand.
            set(L.fpu_a, eda ? 1 : a);
            set(L.fpu_b, eda ? 1 : b);
            set(L.md_a, eda ? 1 : a);
            set(L.md_b, eda ? 1 : b);
            set(L.bpu_target, eda ? 1 : r);
        } else {
            const std::uint64_t imm = static_cast<std::uint64_t>(u.imm);
            const std::uint64_t addr_s = enc64(a + imm);
            set(L.em_result, addr_s);
            set(L.alu_a, a_s);
            set(L.alu_b, is_load(u.op) ? b_s : enc64(imm));
            set(L.alu_result, addr_s);
            if (is_store(u.op))
                set(L.em_store, b_s);
        }
    }
    exe_mem_ = id_exe_;
}

void Processor::write_prf(std::uint64_t v) {
    set(layout_->prf + prf_ptr_, v);
    prf_ptr_ = (prf_ptr_ + 1) % Layout::kPrfEntries;
}

std::uint64_t Processor::read_operand(unsigned r, bool &forwarded) {
    const auto &L = *layout_;
    forwarded = false;
    if (r == 0)
        return get(L.rf);
    std::uint64_t v;
    if (exe_mem_.valid && writes_rd(exe_mem_.u.op) && exe_mem_.u.rd == r) {
        v = get(L.em_result);
    } else if (mem_wb_.valid && writes_rd(mem_wb_.u.op) && mem_wb_.u.rd == r) {
        v = get(L.mw_data);
    } else {
        return get(L.rf + r);
    }
    forwarded = true;
    write_prf(v);
    return v;
}

void Processor::stage_id() {
    const auto &L = *layout_;
    id_exe_.valid = false;
    if (pc_ >= ops_.size())
        return;
    const MicroOp &u = ops_[pc_];
    if (u.op == Op::Nop) {
        ++pc_;
        return;
    }
    if (exe_mem_.valid && is_load(exe_mem_.u.op) && exe_mem_.u.rd != 0 &&
        (exe_mem_.u.rd == u.rs1 || (reads_rs2(u.op) && exe_mem_.u.rd == u.rs2)))
        return; // load-use stall
    bool fwd = false;
    const std::uint64_t a = read_operand(u.rs1, fwd);
    const std::uint64_t b =
        reads_rs2(u.op) ? read_operand(u.rs2, fwd) : enc64(static_cast<std::uint64_t>(u.imm));
    set(L.id_a, a);
    set(L.id_b, b);
    id_exe_ = {true, u};
    ++pc_;
}

std::pair<unsigned, std::uint64_t> Processor::locate(std::uint64_t addr) const {
    const auto &g = cfg_.cache;
    if (addr >> g.address_width())
        throw InputError("address 0x" + hex_u64(addr, 16) + " exceeds " +
                         std::to_string(g.address_width()) + " bits");
    const std::uint64_t a_s = enc_addr(addr);
    return {static_cast<unsigned>((a_s >> g.offset_bits()) & (g.sets - 1)),
            a_s >> (g.offset_bits() + g.index_bits())};
}

std::optional<unsigned> Processor::find_way(std::uint64_t addr) const {
    const auto [set_idx, tag] = locate(addr);
    for (unsigned w = 0; w < cfg_.cache.ways; ++w) {
        const auto base = layout_->line(set_idx, w);
        if (get(base + 1) && get(base) == tag)
            return w;
    }
    return std::nullopt;
}

std::uint32_t Processor::line_word(std::uint32_t data_sig, unsigned i) const {
    return static_cast<std::uint32_t>(val_[layout_->offset[data_sig] + i / 2] >> (32 * (i % 2)));
}

void Processor::set_line_word(std::uint32_t data_sig, unsigned i, std::uint32_t w) {
    auto &slot = val_[layout_->offset[data_sig] + i / 2];
    const unsigned sh = 32 * (i % 2);
    const std::uint64_t next = (slot & ~(0xFFFFFFFFULL << sh)) | (static_cast<std::uint64_t>(w) << sh);
    if (next == slot)
        return;
    touch(data_sig);
    slot = next;
}

std::uint64_t Processor::line_address(unsigned set_idx, unsigned way) const {
    const auto &g = cfg_.cache;
    const std::uint64_t tag = get(layout_->line(set_idx, way));
    const std::uint64_t a_s = (tag << (g.offset_bits() + g.index_bits())) |
                              (static_cast<std::uint64_t>(set_idx) << g.offset_bits());
    return dec_addr(a_s);
}

std::array<std::uint8_t, 64> &Processor::memory_line(std::uint64_t line_addr) {
    return memory_[line_addr];
}

void Processor::write_back(unsigned set_idx, unsigned way) {
    const auto data = layout_->line(set_idx, way) + 3;
    auto &mem = memory_line(line_address(set_idx, way));
    for (unsigned i = 0; i < 16; ++i) {
        const std::uint32_t plain = dec32(line_word(data, i));
        for (unsigned b = 0; b < 4; ++b)
            mem[4 * i + b] = static_cast<std::uint8_t>(plain >> (8 * b));
    }
}

Processor::AccessResult Processor::cache_access(std::uint64_t addr, Access kind,
                                                std::uint64_t store_value) {
    const auto &L = *layout_;
    const auto &g = cfg_.cache;
    const unsigned size = (kind == Access::Load8 || kind == Access::Store8) ? 1 : 8;
    const unsigned off = static_cast<unsigned>(addr & (g.line_bytes - 1));
    if (off + size > g.line_bytes || (size == 8 && off % 8 != 0))
        throw InputError("unaligned " + std::to_string(size) + "-byte access at 0x" +
                         hex_u64(addr, 10));
    const auto [set_idx, tag] = locate(addr);
    set(L.req_addr, enc_addr(addr));

    std::optional<unsigned> way;
    for (unsigned w = 0; w < g.ways; ++w) {
        const auto base = L.line(set_idx, w);
        if (get(base + 1) && get(base) == tag) {
            way = w;
            break;
        }
    }
    const bool hit = way.has_value();
    if (!hit) {
        const unsigned w = repl_[set_idx];
        repl_[set_idx] = (w + 1) % g.ways;
        const auto base = L.line(set_idx, w);
        if (get(base + 1) && get(base + 2))
            write_back(set_idx, w);
        const auto &mem = memory_line(addr & ~static_cast<std::uint64_t>(g.line_bytes - 1));
        std::array<std::uint64_t, 8> packed{};
        for (unsigned i = 0; i < 16; ++i) {
            std::uint32_t plain = 0;
            for (unsigned b = 0; b < 4; ++b)
                plain |= static_cast<std::uint32_t>(mem[4 * i + b]) << (8 * b);
            packed[i / 2] |= static_cast<std::uint64_t>(enc32(plain)) << (32 * (i % 2));
        }
        set_words(L.lb_data, packed);
        set(L.lb_addr, enc_addr(addr) >> g.offset_bits());
        set_words(base + 3, packed);
        set(base, tag);
        set(base + 1, 1);
        set(base + 2, 0);
        way = w;
    }
    const auto base = L.line(set_idx, *way);
    const auto data = base + 3;
    const unsigned wi = off / 4;
    if (hit) {
        const unsigned lo = wi & ~1u;
        set(L.hb_data, (static_cast<std::uint64_t>(line_word(data, lo + 1)) << 32) |
                           line_word(data, lo));
    }
    AccessResult res{hit, 0};
    switch (kind) {
    case Access::Load8:
        res.value = (dec32(line_word(data, wi)) >> (8 * (off % 4))) & 0xFF;
        break;
    case Access::Load64:
        res.value = (static_cast<std::uint64_t>(dec32(line_word(data, wi + 1))) << 32) |
                    dec32(line_word(data, wi));
        break;
    case Access::Store8: {
        const unsigned sh = 8 * (off % 4);
        std::uint32_t plain = dec32(line_word(data, wi));
        plain = (plain & ~(0xFFu << sh)) | (static_cast<std::uint32_t>(store_value & 0xFF) << sh);
        set_line_word(data, wi, enc32(plain));
        set(base + 2, 1);
        break;
    }
    case Access::Store64:
        set_line_word(data, wi, enc32(static_cast<std::uint32_t>(store_value)));
        set_line_word(data, wi + 1, enc32(static_cast<std::uint32_t>(store_value >> 32)));
        set(base + 2, 1);
        break;
    }
    return res;
}

void Processor::host_write(std::uint64_t addr, std::span<const std::uint8_t> bytes) {
    const auto &g = cfg_.cache;
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        const std::uint64_t a = addr + i;
        if (a >> g.address_width())
            throw InputError("address 0x" + hex_u64(a, 16) + " exceeds " +
                             std::to_string(g.address_width()) + " bits");
        const unsigned off = static_cast<unsigned>(a & (g.line_bytes - 1));
        memory_line(a - off)[off] = bytes[i];
        if (auto way = find_way(a)) {
            const auto data = layout_->line(locate(a).first, *way) + 3;
            const unsigned sh = 8 * (off % 4);
            std::uint32_t plain = dec32(line_word(data, off / 4));
            plain = (plain & ~(0xFFu << sh)) | (static_cast<std::uint32_t>(bytes[i]) << sh);
            set_line_word(data, off / 4, enc32(plain));
        }
    }
}

std::vector<std::uint8_t> Processor::functional_read(std::uint64_t addr, std::size_t n) const {
    const auto &g = cfg_.cache;
    std::vector<std::uint8_t> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t a = addr + i;
        const unsigned off = static_cast<unsigned>(a & (g.line_bytes - 1));
        if (auto way = find_way(a)) {
            const auto data = layout_->line(locate(a).first, *way) + 3;
            out[i] = static_cast<std::uint8_t>(dec32(line_word(data, off / 4)) >> (8 * (off % 4)));
        } else if (auto it = memory_.find(a - off); it != memory_.end()) {
            out[i] = it->second[off];
        }
    }
    return out;
}

std::uint64_t Processor::reg(unsigned r) const { return dec64(get(layout_->rf + r)); }

PlainState Processor::plain_state() const {
    const auto &L = *layout_;
    PlainState st;
    st.signals.reserve(L.info.size());
    for (std::uint32_t s = 0; s < L.info.size(); ++s) {
        if (L.is_array(s))
            continue;
        const unsigned width = L.info[s].width;
        if (s == L.fpu_a || s == L.fpu_b || s == L.md_a || s == L.md_b || s == L.bpu_target) {
            st.signals.push_back(BitVec::from_uint(width, get(s)));
        } else if (s == L.req_addr) {
            st.signals.push_back(BitVec::from_uint(width, dec_addr(get(s))));
        } else if (s == L.rdata || s == L.wdata) {
            const bool active = s == L.rdata ? rdata_active_ : wdata_active_;
            st.signals.push_back(BitVec::from_uint(width, active ? dec64(get(s)) : get(s)));
        } else if (s == L.lb_addr) {
            st.signals.push_back(
                BitVec::from_uint(width, dec32(static_cast<std::uint32_t>(get(s)))));
        } else if (s == L.lb_data) {
            std::array<std::uint64_t, 8> w{};
            for (unsigned i = 0; i < 16; ++i)
                w[i / 2] |= static_cast<std::uint64_t>(dec32(line_word(s, i))) << (32 * (i % 2));
            st.signals.push_back(BitVec::from_words(width, w));
        } else {
            st.signals.push_back(BitVec::from_uint(width, dec64(get(s))));
        }
    }
    for (unsigned s = 0; s < L.sets; ++s)
        for (unsigned w = 0; w < L.ways; ++w) {
            const auto base = L.line(s, w);
            if (!get(base + 1))
                continue;
            PlainState::Line line;
            line.dirty = get(base + 2) != 0;
            for (unsigned i = 0; i < 16; ++i) {
                const std::uint32_t plain = dec32(line_word(base + 3, i));
                for (unsigned b = 0; b < 4; ++b)
                    line.bytes[4 * i + b] = static_cast<std::uint8_t>(plain >> (8 * b));
            }
            st.lines[line_address(s, w)] = line;
        }
    return st;
}

void Processor::rekey_flush(const obf::RoundKeys &new_keys) {
    if (!param_)
        throw Error("rekey_flush requires param mode");
    const auto &L = *layout_;
    const std::array<std::uint64_t, 8> zero{};
    for (unsigned s = 0; s < L.sets; ++s)
        for (unsigned w = 0; w < L.ways; ++w) {
            const auto base = L.line(s, w);
            if (get(base + 1) && get(base + 2))
                write_back(s, w);
            set(base, 0);
            set(base + 1, 0);
            set(base + 2, 0);
            set_words(base + 3, zero);
        }

    const obf::Obfuscator old = obf_;
    const std::uint64_t old_req = dec_addr(get(L.req_addr));
    obf_ = obf::Obfuscator(cfg_.affine, new_keys);
    auto remap64 = [&](std::uint32_t sig) { set(sig, obf_.encrypt64(old.decrypt64(get(sig)))); };
    for (unsigned r = 0; r < 32; ++r)
        remap64(L.rf + r);
    for (unsigned p = 0; p < Layout::kPrfEntries; ++p)
        remap64(L.prf + p);
    for (auto s : {L.id_a, L.id_b, L.em_result, L.em_store, L.mw_data, L.alu_a, L.alu_b,
                   L.alu_result, L.csr, L.hb_data})
        remap64(s);
    if (rdata_active_)
        remap64(L.rdata);
    if (wdata_active_)
        remap64(L.wdata);
    set(L.lb_addr, obf_.encrypt(old.decrypt(static_cast<std::uint32_t>(get(L.lb_addr)))));
    for (unsigned i = 0; i < 16; ++i)
        set_line_word(L.lb_data, i, obf_.encrypt(old.decrypt(line_word(L.lb_data, i))));
    set(L.req_addr, enc_addr(old_req));
}

} // namespace leakscope::sim

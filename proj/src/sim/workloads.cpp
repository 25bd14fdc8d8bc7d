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

#include "leakscope/sim/workloads.hpp"
#include "leakscope/core/error.hpp"
#include "leakscope/core/util.hpp"

#include <random>

namespace leakscope::sim {

namespace {

constexpr std::uint8_t kSboxReg = 2;
constexpr std::uint8_t kKeyReg = 3;
constexpr std::uint8_t kPtReg = 4;
constexpr std::uint8_t kCtReg = 5;

class Emitter {
  public:
    explicit Emitter(std::vector<MicroOp> &ops) : ops_(ops) {
        for (std::uint8_t r = 31; r >= 6; --r)
            free_.push_back(r);
    }

    std::uint8_t alloc() {
        if (free_.empty())
            throw Error("AES program builder ran out of registers");
        const auto r = free_.back();
        free_.pop_back();
        return r;
    }
    void release(std::uint8_t r) { free_.push_back(r); }

    void r3(Op op, std::uint8_t rd, std::uint8_t rs1, std::uint8_t rs2) {
        ops_.push_back({op, rd, rs1, rs2, 0});
    }
    void ri(Op op, std::uint8_t rd, std::uint8_t rs1, std::int64_t imm) {
        ops_.push_back({op, rd, rs1, 0, imm});
    }
    void store(Op op, std::uint8_t base, std::uint8_t src, std::int64_t imm) {
        ops_.push_back({op, 0, base, src, imm});
    }

    /// u = xtime(u) on a byte held in a register.
    void xtime(std::uint8_t u) {
        const auto m = alloc();
        ri(Op::SrlI, m, u, 7);
        r3(Op::Sub, m, 0, m);
        ri(Op::AndI, m, m, 0x1B);
        ri(Op::SllI, u, u, 1);
        ri(Op::AndI, u, u, 0xFF);
        r3(Op::Xor, u, u, m);
        release(m);
    }

    void add_round_key(std::array<std::uint8_t, 16> &s, unsigned round) {
        for (unsigned i = 0; i < 16; ++i) {
            const auto t = alloc();
            ri(Op::Lbu, t, kKeyReg, 16 * round + i);
            r3(Op::Xor, s[i], s[i], t);
            release(t);
        }
    }

    void sub_bytes(std::array<std::uint8_t, 16> &s) {
        for (unsigned i = 0; i < 16; ++i) {
            const auto t = alloc();
            r3(Op::Add, t, kSboxReg, s[i]);
            ri(Op::Lbu, s[i], t, 0);
            release(t);
        }
    }

    static void shift_rows(std::array<std::uint8_t, 16> &s) {
        const auto old = s;
        for (unsigned r = 0; r < 4; ++r)
            for (unsigned c = 0; c < 4; ++c)
                s[r + 4 * c] = old[r + 4 * ((c + r) % 4)];
    }

    // out_i = a_i ^ t ^ xtime(a_i ^ a_{i+1}), t = a0 ^ a1 ^ a2 ^ a3.
    void mix_columns(std::array<std::uint8_t, 16> &s) {
        for (unsigned c = 0; c < 4; ++c) {
            std::array<std::uint8_t, 4> a{s[4 * c], s[4 * c + 1], s[4 * c + 2], s[4 * c + 3]};
            const auto t = alloc();
            r3(Op::Xor, t, a[0], a[1]);
            r3(Op::Xor, t, t, a[2]);
            r3(Op::Xor, t, t, a[3]);
            std::array<std::uint8_t, 4> out{};
            for (unsigned i = 0; i < 4; ++i) {
                const auto u = alloc();
                r3(Op::Xor, u, a[i], a[(i + 1) % 4]);
                xtime(u);
                r3(Op::Xor, u, u, t);
                r3(Op::Xor, u, u, a[i]);
                out[i] = u;
            }
            release(t);
            for (unsigned i = 0; i < 4; ++i) {
                release(a[i]);
                s[4 * c + i] = out[i];
            }
        }
    }

  private:
    std::vector<MicroOp> &ops_;
    std::vector<std::uint8_t> free_;
};

} // namespace

Program build_aes_program(const Block &plaintext, const Block &key) {
    Program p;
    p.poke(kSboxBase, aes::sbox_table().data(), 256);
    const auto rk = aes::expand_key(key);
    for (unsigned r = 0; r < rk.size(); ++r)
        p.poke(kRoundKeyBase + 16 * r, rk[r].data(), 16);
    set_plaintext(p, plaintext);

    Emitter e(p.ops);
    e.ri(Op::AddI, kSboxReg, 0, static_cast<std::int64_t>(kSboxBase));
    e.ri(Op::AddI, kKeyReg, 0, static_cast<std::int64_t>(kRoundKeyBase));
    e.ri(Op::AddI, kPtReg, 0, static_cast<std::int64_t>(kPlaintextBase));
    e.ri(Op::AddI, kCtReg, 0, static_cast<std::int64_t>(kCiphertextBase));
    std::array<std::uint8_t, 16> s{};
    for (unsigned i = 0; i < 16; ++i) {
        s[i] = e.alloc();
        e.ri(Op::Lbu, s[i], kPtReg, i);
    }
    e.add_round_key(s, 0);
    for (unsigned round = 1; round <= 10; ++round) {
        e.sub_bytes(s);
        Emitter::shift_rows(s);
        if (round != 10)
            e.mix_columns(s);
        e.add_round_key(s, round);
    }
    for (unsigned i = 0; i < 16; ++i)
        e.store(Op::Sb, kCtReg, s[i], i);
    return p;
}

void set_plaintext(Program &program, const Block &plaintext) {
    program.poke(kPlaintextBase, plaintext.data(), 16);
}

WorkloadResult run_program(const SimConfig &cfg, const obf::RoundKeys &keys,
                           const Program &program, const RunOptions &opts) {
    Processor proc(cfg, keys, opts.log_mode, opts.replacement_seed);
    proc.load_program(program);
    proc.run(opts.stop_cycle);

    WorkloadResult res;
    res.cycles = proc.cycle();
    res.completed = proc.done();
    res.power = proc.toggles();
    GaussianNoise noise(opts.noise_seed, cfg.noise_sigma);
    for (auto &p : res.power)
        p += noise.next();
    if (res.completed) {
        const auto ct = proc.functional_read(kCiphertextBase, 16);
        std::copy(ct.begin(), ct.end(), res.ciphertext.begin());
    }
    if (opts.log_mode == LogMode::Full)
        res.log = proc.take_log();
    return res;
}

std::vector<obf::RoundKeys> epoch_keys(const SimConfig &cfg, std::size_t count) {
    obf::Lfsr lfsr(derive_seed(cfg.seed, "lfsr") | 1);
    std::vector<obf::RoundKeys> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(obf::next_round_keys(lfsr));
    return out;
}

std::uint64_t run_epoch(const SimConfig &cfg, std::size_t index) {
    if (cfg.mode != Mode::Param)
        return 0;
    if (cfg.rekey_interval_runs == 0)
        return 1;
    return 1 + index / cfg.rekey_interval_runs;
}

namespace {

obf::RoundKeys keys_for(const std::vector<obf::RoundKeys> &keys, std::uint64_t epoch) {
    return epoch == 0 ? obf::RoundKeys{} : keys[epoch - 1];
}

std::size_t epochs_needed(const SimConfig &cfg, std::size_t runs) {
    return runs == 0 ? 0 : run_epoch(cfg, runs - 1);
}

} // namespace

WorkloadResult run_workload(const SimConfig &cfg, const Block &plaintext, const Block &key) {
    cfg.validate();
    const auto keys = epoch_keys(cfg, 1);
    RunOptions opts;
    opts.noise_seed = derive_seed(cfg.seed, "noise", 0);
    opts.replacement_seed = derive_seed(cfg.seed, "replacement");
    return run_program(cfg, cfg.mode == Mode::Param ? keys[0] : obf::RoundKeys{},
                       build_aes_program(plaintext, key), opts);
}

std::vector<BatchRun> run_aes_batch(const SimConfig &cfg, const Block &key,
                                    const std::vector<Block> &plaintexts,
                                    const BatchOptions &opts) {
    cfg.validate();
    const auto keys = epoch_keys(cfg, epochs_needed(cfg, plaintexts.size()));
    const Program base = build_aes_program(plaintexts.empty() ? Block{} : plaintexts[0], key);
    const std::uint64_t repl_seed = derive_seed(cfg.seed, "replacement");
    std::vector<BatchRun> out(plaintexts.size());
    parallel_for(plaintexts.size(), opts.threads, [&](std::size_t i) {
        Program prog = base;
        set_plaintext(prog, plaintexts[i]);
        RunOptions ro;
        ro.log_mode = opts.keep_logs ? LogMode::Full : LogMode::PowerOnly;
        ro.stop_cycle = opts.stop_cycle;
        ro.noise_seed = derive_seed(cfg.seed, "noise", i);
        ro.replacement_seed = repl_seed;
        auto &r = out[i];
        r.epoch = run_epoch(cfg, i);
        auto res = run_program(cfg, keys_for(keys, r.epoch), prog, ro);
        r.power = std::move(res.power);
        r.cycles = res.cycles;
        if (res.completed)
            r.ciphertext = res.ciphertext;
        r.log = std::move(res.log);
    });
    return out;
}

AesSession::AesSession(const SimConfig &cfg, const Block &key, std::size_t rekey_cycle)
    : cfg_(cfg), program_(build_aes_program(Block{}, key)),
      lfsr_(derive_seed(cfg.seed, "lfsr") | 1),
      proc_(cfg, cfg.mode == Mode::Param ? obf::next_round_keys(lfsr_) : obf::RoundKeys{},
            LogMode::PowerOnly, derive_seed(cfg.seed, "replacement")),
      rekey_cycle_(rekey_cycle) {}

Block AesSession::encrypt(const Block &plaintext) {
    set_plaintext(program_, plaintext);
    proc_.load_program(program_);
    const bool rekey = cfg_.mode == Mode::Param && cfg_.rekey_interval_runs > 0 &&
                       runs_ > 0 && runs_ % cfg_.rekey_interval_runs == 0;
    std::size_t c = 0;
    bool pending = rekey;
    do {
        if (pending && c == rekey_cycle_) {
            proc_.rekey_flush(obf::next_round_keys(lfsr_));
            ++rekeys_;
            pending = false;
        }
        ++c;
    } while (proc_.step());
    if (pending) {
        proc_.rekey_flush(obf::next_round_keys(lfsr_));
        ++rekeys_;
    }
    ++runs_;
    Block ct{};
    const auto bytes = proc_.functional_read(kCiphertextBase, 16);
    std::copy(bytes.begin(), bytes.end(), ct.begin());
    return ct;
}

Program random_program(std::uint64_t seed, std::size_t ops) {
    constexpr std::uint64_t kBase = 0x8000;
    std::mt19937_64 rng(seed);
    auto pick = [&](std::uint64_t n) { return rng() % n; };
    Program p;
    for (std::uint64_t a = 0; a < 4096; ++a)
        p.poke(kBase + a, static_cast<std::uint8_t>(pick(256)));
    p.ops.push_back({Op::AddI, 1, 0, 0, static_cast<std::int64_t>(kBase)});
    for (std::uint8_t r = 2; r < 16; ++r)
        p.ops.push_back({Op::AddI, r, 0, 0, static_cast<std::int64_t>(pick(1 << 20))});
    static constexpr Op kAlu[] = {Op::Add, Op::Sub, Op::Xor, Op::And, Op::Or, Op::Sll,
                                  Op::Srl, Op::AddI, Op::XorI, Op::AndI, Op::OrI,
                                  Op::SllI, Op::SrlI};
    auto reg = [&] { return static_cast<std::uint8_t>(2 + pick(14)); };
    for (std::size_t i = 0; i < ops; ++i) {
        const auto kind = pick(10);
        MicroOp u;
        if (kind < 6) {
            u.op = kAlu[pick(std::size(kAlu))];
            u.rd = reg();
            u.rs1 = static_cast<std::uint8_t>(pick(16));
            u.rs2 = static_cast<std::uint8_t>(pick(16));
            u.imm = is_imm(u.op) ? static_cast<std::int64_t>(pick(64)) : 0;
        } else if (kind < 8) {
            u.op = pick(2) ? Op::Lbu : Op::Ld;
            u.rd = reg();
            u.rs1 = 1;
            u.imm = static_cast<std::int64_t>(u.op == Op::Ld ? 8 * pick(512) : pick(4096));
        } else if (kind < 9) {
            u.op = pick(2) ? Op::Sb : Op::Sd;
            u.rs1 = 1;
            u.rs2 = static_cast<std::uint8_t>(pick(16));
            u.imm = static_cast<std::int64_t>(u.op == Op::Sd ? 8 * pick(512) : pick(4096));
        } else {
            u.op = Op::Nop;
        }
        p.ops.push_back(u);
    }
    return p;
}

CacheSetProgram cache_set_program(const CacheGeometry &geom, unsigned set, std::uint64_t tag) {
    if (set >= geom.sets)
        throw InputError("set " + std::to_string(set) + " out of range");
    const unsigned ob = geom.offset_bits(), ib = geom.index_bits();
    const std::uint64_t tag_mask = (1ULL << geom.tag_bits()) - 1;
    // The reference line sits in set 0 with the all-zero tag.
    const std::uint64_t ref = 0;
    const std::uint64_t probe = ((tag & tag_mask) << (ob + ib)) | (std::uint64_t{set} << ob);
    CacheSetProgram c;
    // The probe address is formed first so that its writeback (and the
    // status word it sets) retires before the sampled cycle; only the probe
    // access itself differs between classes at probe_cycle.
    c.program.ops = {
        {Op::AddI, 2, 0, 0, static_cast<std::int64_t>(probe)},
        {Op::AddI, 1, 0, 0, static_cast<std::int64_t>(ref)},
        {Op::Ld, 3, 1, 0, 0},
        {Op::Ld, 4, 2, 0, 0},
    };
    // ID of op k at cycle k, MEM at k + 2.
    c.probe_cycle = 5;
    return c;
}

std::vector<std::vector<double>> cache_set_experiment(const SimConfig &cfg,
                                                      const CacheSetOptions &opts) {
    cfg.validate();
    const unsigned sets = cfg.cache.sets;
    const std::size_t total = opts.runs_per_class * sets;
    const auto keys = epoch_keys(cfg, epochs_needed(cfg, total));
    const std::uint64_t repl_seed = derive_seed(cfg.seed, "replacement");
    std::vector<double> sample(total);
    parallel_for(total, opts.threads, [&](std::size_t k) {
        const unsigned set = static_cast<unsigned>(k % sets);
        const auto prog = cache_set_program(cfg.cache, set, derive_seed(cfg.seed, "tag", k));
        RunOptions ro;
        ro.log_mode = LogMode::PowerOnly;
        ro.stop_cycle = prog.probe_cycle + 1;
        ro.noise_seed = derive_seed(cfg.seed, "noise", k);
        ro.replacement_seed = repl_seed;
        const auto res = run_program(cfg, keys_for(keys, run_epoch(cfg, k)), prog.program, ro);
        sample[k] = res.power.at(prog.probe_cycle);
    });
    std::vector<std::vector<double>> classes(sets);
    for (std::size_t k = 0; k < total; ++k)
        classes[k % sets].push_back(sample[k]);
    return classes;
}

} // namespace leakscope::sim

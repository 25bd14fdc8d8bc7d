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

#include "leakscope/sim/cyclelog.hpp"
#include "leakscope/core/error.hpp"
#include "leakscope/core/util.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

namespace leakscope::sim {

std::string SignalInfo::full_name() const {
    std::string s;
    for (const auto &p : scope)
        s += p + '/';
    return s + name;
}

std::size_t CycleLog::declare(SignalInfo info, std::span<const std::uint64_t> reset) {
    if (reset.size() != words_for(info.width))
        throw InputError("reset value of '" + info.full_name() + "' has the wrong size");
    reset_offset_.push_back(static_cast<std::uint32_t>(reset_pool_.size()));
    reset_pool_.insert(reset_pool_.end(), reset.begin(), reset.end());
    signals_.push_back(std::move(info));
    return signals_.size() - 1;
}

void CycleLog::record(std::uint32_t cycle, std::uint32_t signal,
                      std::span<const std::uint64_t> words) {
    changes_.push_back({cycle, signal, static_cast<std::uint32_t>(change_pool_.size())});
    change_pool_.insert(change_pool_.end(), words.begin(), words.end());
}

std::span<const std::uint64_t> CycleLog::reset_words(std::size_t signal) const {
    return {reset_pool_.data() + reset_offset_[signal], words_for(signals_[signal].width)};
}

std::span<const std::uint64_t> CycleLog::change_words(const Change &c) const {
    return {change_pool_.data() + c.offset, words_for(signals_[c.signal].width)};
}

BitVec CycleLog::reset_value(std::size_t signal) const {
    return BitVec::from_words(signals_[signal].width, reset_words(signal));
}

BitVec CycleLog::change_value(const Change &c) const {
    return BitVec::from_words(signals_[c.signal].width, change_words(c));
}

std::vector<BitVec> CycleLog::series(std::size_t signal) const {
    std::vector<BitVec> out(cycles_);
    BitVec cur = reset_value(signal);
    std::size_t c = 0;
    for (const auto &ch : changes_) {
        if (ch.signal != signal)
            continue;
        for (; c < ch.cycle && c < cycles_; ++c)
            out[c] = cur;
        cur = change_value(ch);
    }
    for (; c < cycles_; ++c)
        out[c] = cur;
    return out;
}

std::size_t CycleLog::find(std::string_view full_name) const {
    for (std::size_t i = 0; i < signals_.size(); ++i)
        if (signals_[i].full_name() == full_name)
            return i;
    throw InputError("no signal '" + std::string(full_name) + "' in cycle log");
}

void CycleLog::clear_history() {
    changes_.clear();
    change_pool_.clear();
    cycles_ = 0;
}

GaussianNoise::GaussianNoise(std::uint64_t seed, double sigma) : sigma_(sigma) {
    std::uint64_t s = seed;
    for (auto &w : state_) {
        s = mix64(s);
        w = s;
    }
}

std::uint64_t GaussianNoise::draw() {
    // xoshiro256**
    const std::uint64_t result = std::rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = std::rotl(state_[3], 45);
    return result;
}

double GaussianNoise::next() {
    if (sigma_ == 0)
        return 0;
    if (have_spare_) {
        have_spare_ = false;
        return spare_ * sigma_;
    }
    const double u1 = (static_cast<double>(draw() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(draw() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta) * sigma_;
}

std::vector<double> synth_power(const CycleLog &log, double sigma, std::uint64_t seed) {
    const auto &sigs = log.signals();
    std::vector<std::vector<std::uint64_t>> cur(sigs.size());
    for (std::size_t s = 0; s < sigs.size(); ++s) {
        auto w = log.reset_words(s);
        cur[s].assign(w.begin(), w.end());
    }
    std::vector<double> power(log.cycles(), 0.0);
    for (const auto &ch : log.changes()) {
        auto w = log.change_words(ch);
        auto &c = cur[ch.signal];
        if (sigs[ch.signal].is_state && ch.cycle < power.size()) {
            std::size_t hd = 0;
            for (std::size_t i = 0; i < w.size(); ++i)
                hd += static_cast<std::size_t>(std::popcount(c[i] ^ w[i]));
            power[ch.cycle] += static_cast<double>(hd);
        }
        c.assign(w.begin(), w.end());
    }
    GaussianNoise noise(seed, sigma);
    for (auto &p : power)
        p += noise.next();
    return power;
}

namespace {

std::string id_code(std::size_t index) {
    std::string s;
    do {
        s += static_cast<char>('!' + index % 94);
        index /= 94;
    } while (index);
    return s;
}

void put_value(std::ostringstream &out, unsigned width, std::span<const std::uint64_t> w,
               const std::string &code) {
    if (width == 1) {
        out << ((w[0] & 1) ? '1' : '0') << code << '\n';
        return;
    }
    std::string bits;
    bool started = false;
    for (unsigned i = width; i-- > 0;) {
        const bool b = (w[i / 64] >> (i % 64)) & 1;
        if (b)
            started = true;
        if (started)
            bits += b ? '1' : '0';
    }
    if (bits.empty())
        bits = "0";
    out << 'b' << bits << ' ' << code << '\n';
}

struct ScopeTree {
    std::string name;
    std::vector<std::size_t> signals;
    std::vector<ScopeTree> children;

    ScopeTree &child(const std::string &n) {
        for (auto &c : children)
            if (c.name == n)
                return c;
        children.push_back({n, {}, {}});
        return children.back();
    }
};

void emit_scope(std::ostringstream &out, const ScopeTree &node, const CycleLog &log,
                const std::vector<std::string> &codes, bool with_clk) {
    out << "$scope module " << node.name << " $end\n";
    if (with_clk)
        out << "$var wire 1 " << codes.back() << " clk $end\n";
    for (auto s : node.signals) {
        const auto &info = log.signals()[s];
        out << "$var " << (info.is_state ? "reg" : "wire") << ' ' << info.width << ' '
            << codes[s] << ' ' << info.name << " $end\n";
    }
    for (const auto &c : node.children)
        emit_scope(out, c, log, codes, false);
    out << "$upscope $end\n";
}

} // namespace

std::string emit_vcd(const CycleLog &log, std::string_view top_scope) {
    const auto &sigs = log.signals();
    std::vector<std::string> codes;
    codes.reserve(sigs.size() + 1);
    for (std::size_t i = 0; i <= sigs.size(); ++i)
        codes.push_back(id_code(i));

    ScopeTree root{std::string(top_scope), {}, {}};
    for (std::size_t s = 0; s < sigs.size(); ++s) {
        const auto &scope = sigs[s].scope;
        if (scope.empty() || scope.front() != top_scope)
            throw InputError("signal '" + sigs[s].full_name() + "' is outside scope '" +
                             std::string(top_scope) + "'");
        ScopeTree *node = &root;
        for (std::size_t i = 1; i < scope.size(); ++i)
            node = &node->child(scope[i]);
        node->signals.push_back(s);
    }

    std::ostringstream out;
    out << "$version leakscope emit_vcd $end\n$timescale 1ns $end\n";
    emit_scope(out, root, log, codes, true);
    out << "$enddefinitions $end\n";
    if (log.cycles() == 0)
        return out.str();

    const std::string &clk = codes.back();
    out << "#0\n$dumpvars\n0" << clk << '\n';
    for (std::size_t s = 0; s < sigs.size(); ++s)
        put_value(out, sigs[s].width, log.reset_words(s), codes[s]);
    out << "$end\n";
    const auto &changes = log.changes();
    std::size_t k = 0;
    for (std::size_t c = 0; c < log.cycles(); ++c) {
        out << '#' << (10 * c + 5) << "\n1" << clk << '\n';
        for (; k < changes.size() && changes[k].cycle == c; ++k)
            put_value(out, sigs[changes[k].signal].width, log.change_words(changes[k]),
                      codes[changes[k].signal]);
        out << '#' << (10 * c + 10) << "\n0" << clk << '\n';
    }
    return out.str();
}

} // namespace leakscope::sim

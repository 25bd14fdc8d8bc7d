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

#include "leakscope/trace/runset.hpp"
#include "leakscope/core/error.hpp"
#include "leakscope/core/util.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

namespace leakscope::trace {

std::size_t SignalTrack::index_at(std::size_t cycle) const {
    auto it = std::upper_bound(starts.begin(), starts.end(),
                               static_cast<std::uint32_t>(cycle));
    return static_cast<std::size_t>(it - starts.begin()) - 1;
}

const BitVec &SignalTrack::at(std::size_t cycle) const { return values[index_at(cycle)]; }

namespace {

BitVec all_x(unsigned width) {
    BitVec v(width);
    for (unsigned i = 0; i < width; ++i)
        v.set_bit(i, 'x');
    return v;
}

} // namespace

CycleMatrix resample_per_cycle(const WaveDump &dump, std::string_view clock_name) {
    const std::size_t clk = dump.find_signal(clock_name);
    if (dump.declarations[clk].width != 1)
        throw InputError("clock '" + std::string(clock_name) + "' is " +
                         std::to_string(dump.declarations[clk].width) +
                         " bits wide, expected 1");
    const std::uint32_t clk_code = dump.declarations[clk].code;

    CycleMatrix m;
    char clk_state = 'x';
    for (const auto &ch : dump.changes) {
        if (ch.code != clk_code)
            continue;
        const char next = ch.value.bit_char(0);
        if (next == '1' && clk_state != '1')
            m.edge_times.push_back(ch.time);
        clk_state = next;
    }
    if (m.edge_times.empty())
        throw InputError("clock '" + std::string(clock_name) + "' has no rising edge");
    m.cycles = m.edge_times.size();
    m.cycle_period = m.cycles > 1 ? m.edge_times[1] - m.edge_times[0] : 0;

    // Per code: cycle from which each change is visible, with last-wins
    // collapsing of changes landing on the same cycle.
    std::vector<SignalTrack> by_code(dump.codes.size());
    std::vector<unsigned> code_width(dump.codes.size(), 1);
    for (const auto &d : dump.declarations)
        code_width[d.code] = d.width;
    for (std::size_t c = 0; c < by_code.size(); ++c) {
        by_code[c].starts.push_back(0);
        by_code[c].values.push_back(all_x(code_width[c]));
    }
    for (const auto &ch : dump.changes) {
        auto it = std::lower_bound(m.edge_times.begin(), m.edge_times.end(), ch.time);
        const auto cycle = static_cast<std::uint32_t>(it - m.edge_times.begin());
        if (cycle >= m.cycles)
            continue;
        auto &tr = by_code[ch.code];
        if (tr.starts.back() == cycle) {
            tr.values.back() = ch.value;
            // Drop the entry if it now repeats its predecessor.
            if (tr.starts.size() > 1 && tr.values[tr.values.size() - 2] == tr.values.back()) {
                tr.starts.pop_back();
                tr.values.pop_back();
            }
        } else if (!(tr.values.back() == ch.value)) {
            tr.starts.push_back(cycle);
            tr.values.push_back(ch.value);
        }
    }

    m.signals = dump.declarations;
    m.hierarchy = dump.root;
    m.tracks.reserve(m.signals.size());
    for (const auto &d : m.signals)
        m.tracks.push_back(by_code[d.code]);
    return m;
}

unsigned module_word_width(const std::vector<SignalDecl> &signals, const ModuleNode &node) {
    unsigned w = 0;
    for (auto s : node.signals)
        w += signals[s].width;
    return w;
}

namespace {

std::vector<BitVec> words_from_tracks(const std::vector<SignalDecl> &signals,
                                      const std::vector<SignalTrack> &tracks,
                                      std::size_t cycles, const ModuleNode &node) {
    if (node.signals.empty())
        throw InputError("module '" + node.path_string() + "' owns no signals");
    std::vector<BitVec> out;
    out.reserve(cycles);
    for (std::size_t c = 0; c < cycles; ++c) {
        BitVec word = tracks[node.signals.front()].at(c);
        for (std::size_t k = 1; k < node.signals.size(); ++k)
            word = word.concat(tracks[node.signals[k]].at(c));
        out.push_back(std::move(word));
    }
    (void)signals;
    return out;
}

bool same_declarations(const std::vector<SignalDecl> &a, const std::vector<SignalDecl> &b) {
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].name != b[i].name || a[i].width != b[i].width ||
            a[i].scope_path != b[i].scope_path)
            return false;
    return true;
}

} // namespace

std::vector<BitVec> module_word_series(const CycleMatrix &matrix, const ModuleNode &node) {
    return words_from_tracks(matrix.signals, matrix.tracks, matrix.cycles, node);
}

std::vector<BitVec> RunSet::module_words(std::size_t run, const ModuleNode &node) const {
    return words_from_tracks(signals, runs.at(run).tracks, cycles, node);
}

RunSet make_run_set(std::vector<CycleMatrix> matrices, std::vector<std::string> labels,
                    Alignment alignment) {
    if (matrices.size() < 2)
        throw InputError("a run set needs at least 2 runs, got " +
                         std::to_string(matrices.size()));
    labels.resize(matrices.size());
    RunSet rs;
    rs.signals = matrices.front().signals;
    rs.hierarchy = matrices.front().hierarchy;
    rs.cycle_period = matrices.front().cycle_period;
    rs.cycles = matrices.front().cycles;
    for (std::size_t i = 0; i < matrices.size(); ++i) {
        const auto &m = matrices[i];
        if (!same_declarations(rs.signals, m.signals))
            throw InputError("run " + std::to_string(i) + " (" + labels[i] +
                             ") has a different signal hierarchy than run 0");
        if (m.cycles != rs.cycles && alignment == Alignment::ErrorOnMismatch)
            throw InputError("run " + std::to_string(i) + " has " + std::to_string(m.cycles) +
                             " cycles, run 0 has " + std::to_string(rs.cycles));
        rs.cycles = std::min(rs.cycles, m.cycles);
    }
    for (std::size_t i = 0; i < matrices.size(); ++i) {
        RunSet::Run run;
        run.label = labels[i].empty() ? "run" + std::to_string(i) : labels[i];
        run.tracks = std::move(matrices[i].tracks);
        rs.runs.push_back(std::move(run));
    }
    return rs;
}

RunSet load_run_set(const std::vector<std::string> &paths, std::string_view clock_name,
                    Alignment alignment, unsigned threads) {
    if (paths.size() < 2)
        throw InputError("a run set needs at least 2 dumps, got " +
                         std::to_string(paths.size()));
    std::vector<CycleMatrix> mats(paths.size());
    parallel_for(paths.size(), threads, [&](std::size_t i) {
        mats[i] = resample_per_cycle(parse_vcd_file(paths[i]), clock_name);
    });
    return make_run_set(std::move(mats), paths, alignment);
}

std::vector<ManifestEntry> read_run_manifest(const std::string &manifest_path) {
    std::ifstream in(manifest_path);
    if (!in)
        throw Error("cannot open manifest '" + manifest_path + "'");
    const auto base = std::filesystem::path(manifest_path).parent_path();
    std::vector<ManifestEntry> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto t = trim(line);
        if (t.empty() || t.front() == '#')
            continue;
        const auto ws = t.find_first_of(" \t");
        ManifestEntry e;
        std::filesystem::path p(std::string(t.substr(0, ws)));
        e.path = (p.is_relative() ? base / p : p).string();
        if (ws != std::string_view::npos)
            e.label = std::string(trim(t.substr(ws)));
        if (e.label.find_first_of(" \t") != std::string::npos)
            throw ParseError(manifest_path + ": more than two columns", lineno);
        out.push_back(std::move(e));
    }
    return out;
}

RunSet load_run_set_manifest(const std::string &manifest_path, std::string_view clock_name,
                             Alignment alignment, unsigned threads) {
    const auto entries = read_run_manifest(manifest_path);
    std::vector<std::string> paths, labels;
    for (const auto &e : entries) {
        paths.push_back(e.path);
        labels.push_back(e.label);
    }
    if (paths.size() < 2)
        throw InputError("manifest '" + manifest_path + "' lists " +
                         std::to_string(paths.size()) + " runs; at least 2 required");
    std::vector<CycleMatrix> mats(paths.size());
    parallel_for(paths.size(), threads, [&](std::size_t i) {
        mats[i] = resample_per_cycle(parse_vcd_file(paths[i]), clock_name);
    });
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i].empty())
            labels[i] = paths[i];
    return make_run_set(std::move(mats), std::move(labels), alignment);
}

} // namespace leakscope::trace

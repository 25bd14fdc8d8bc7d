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
#include "leakscope/trace/vcd.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace leakscope::trace {

/// Sample-and-hold value sequence of one signal over the cycles of one run,
/// stored as change points: values[i] holds from cycle starts[i] until the
/// next start. starts[0] is always 0.
struct SignalTrack {
    std::vector<std::uint32_t> starts;
    std::vector<BitVec> values;

    const BitVec &at(std::size_t cycle) const;
    /// Index into `values` of the value held at `cycle`.
    std::size_t index_at(std::size_t cycle) const;
};

/// Per-cycle value matrix of one dump: one track per declaration, sampled at
/// every rising edge of the clock.
struct CycleMatrix {
    std::vector<SignalDecl> signals;
    ModuleNode hierarchy;
    std::vector<SignalTrack> tracks;
    std::vector<std::uint64_t> edge_times;
    std::size_t cycles = 0;
    std::uint64_t cycle_period = 0;

    const BitVec &value(std::size_t signal, std::size_t cycle) const {
        return tracks[signal].at(cycle);
    }
};

/// Samples every signal at each rising edge of `clock_name` (0/x/z -> 1).
/// The held value is the last change at or before the edge timestamp;
/// signals never written read as all-x.
CycleMatrix resample_per_cycle(const WaveDump &dump, std::string_view clock_name);

/// Y(M): per cycle, the concatenation of the node's own signals in
/// declaration order with the first signal in the most significant bits.
/// Sub-module signals are excluded.
std::vector<BitVec> module_word_series(const CycleMatrix &matrix, const ModuleNode &node);

/// Sum of the widths of the node's own signals.
unsigned module_word_width(const std::vector<SignalDecl> &signals, const ModuleNode &node);

enum class Alignment { TruncateToMin, ErrorOnMismatch };

/// N aligned runs sharing one declaration list and hierarchy.
struct RunSet {
    struct Run {
        std::string label;
        std::vector<SignalTrack> tracks;
    };

    std::vector<SignalDecl> signals;
    ModuleNode hierarchy;
    std::vector<Run> runs;
    std::size_t cycles = 0;
    std::uint64_t cycle_period = 0;

    std::size_t size() const { return runs.size(); }
    const BitVec &value(std::size_t run, std::size_t signal, std::size_t cycle) const {
        return runs[run].tracks[signal].at(cycle);
    }
    /// Y(M) for one run.
    std::vector<BitVec> module_words(std::size_t run, const ModuleNode &node) const;
};

/// Aligns already-resampled runs. Requires at least two runs with identical
/// declarations (scope, name, width, order).
RunSet make_run_set(std::vector<CycleMatrix> matrices, std::vector<std::string> labels,
                    Alignment alignment);

/// Parses and resamples each dump (in parallel when threads > 1).
RunSet load_run_set(const std::vector<std::string> &paths, std::string_view clock_name,
                    Alignment alignment, unsigned threads = 1);

struct ManifestEntry {
    std::string path;
    std::string label;
};

/// Manifest: one VCD path per line, optional second whitespace-separated
/// column with a run label. Relative paths resolve against the manifest's
/// directory. '#' starts a comment line.
std::vector<ManifestEntry> read_run_manifest(const std::string &manifest_path);

RunSet load_run_set_manifest(const std::string &manifest_path, std::string_view clock_name,
                             Alignment alignment, unsigned threads = 1);

} // namespace leakscope::trace

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
#include "leakscope/metrics/primitives.hpp"
#include "leakscope/trace/runset.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace leakscope::metrics {

/// Ground-truth value of every run at one interesting point.
struct OracleTrace {
    std::string label;
    std::vector<BitVec> values;

    std::size_t size() const { return values.size(); }
};

/// Reads the oracle CSV format: header `run_index,point_label,value_hex`,
/// rows sorted or unsorted by run_index, indices 0..N-1 each exactly once.
/// A file may hold several labels; one OracleTrace is returned per label in
/// first-appearance order.
/// `width` 0 infers the bit width per label from the longest hex value.
std::vector<OracleTrace> read_oracle_csv(const std::string &path, unsigned width = 0);
void write_oracle_csv(const std::string &path, const std::vector<OracleTrace> &oracles);

struct SvfOptions {
    /// Half-open cycle window [start, end); end = 0 means the full run.
    std::size_t window_start = 0;
    std::size_t window_end = 0;
    /// Oracle shuffles for the permutation noise floor; 0 disables it.
    std::size_t shuffles = 1000;
    double floor_quantile = 0.99;
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

struct SvfResult {
    std::vector<std::string> module_path;
    std::string oracle_label;
    double svf = 0;
    /// 1-based absolute cycle of the first maximum.
    std::size_t peak_cycle = 1;
    std::vector<double> per_cycle_scores;
    double noise_floor = 0;
    /// Fraction of x/z bits in the module's words over the window.
    double xz_ratio = 0;
};

/// SVF of one module: max over cycles of |rho(D_O, D_S,c)|.
/// Cycles with a constant D_S,c (or a constant D_O) score 0.
SvfResult svf_module(const trace::RunSet &runs, const trace::ModuleNode &node,
                     const OracleTrace &oracle, const SvfOptions &opts = {});

/// svf_module for every module owning signals, keeping per module the
/// maximum over the supplied oracles. Sorted by descending svf, ties by
/// module path.
std::vector<SvfResult> svf_all(const trace::RunSet &runs, const std::vector<OracleTrace> &oracles,
                               const SvfOptions &opts = {});

} // namespace leakscope::metrics

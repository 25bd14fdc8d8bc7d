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

#include "leakscope/metrics/svf.hpp"
#include "leakscope/sim/processor.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace leakscope::report {

std::string_view tool_version();

enum class Severity { Red, Orange, Blue };
std::string_view severity_name(Severity s);

/// red: svf >= max(red_min, red_factor * floor); orange: svf > 0 and
/// svf >= orange_factor * floor; blue otherwise.
struct SeverityThresholds {
    double red_min = 0.5;
    double red_factor = 3.0;
    double orange_factor = 2.0;
};
Severity classify(double svf, double noise_floor, const SeverityThresholds &t = {});

struct ReportEntry {
    std::string module_path;
    std::string oracle_label;
    double svf = 0;
    std::size_t peak_cycle = 1;
    double noise_floor = 0;
    double xz_ratio = 0;
    Severity severity = Severity::Blue;
};

struct LeakageReport {
    std::size_t runs = 0;
    std::size_t cycles = 0;
    std::vector<std::string> oracles;
    metrics::SvfOptions options;
    SeverityThresholds thresholds;
    std::vector<ReportEntry> entries; // svf descending
};

LeakageReport build_report(const std::vector<metrics::SvfResult> &results, std::size_t runs,
                           std::size_t cycles, std::vector<std::string> oracles,
                           const metrics::SvfOptions &opts, const SeverityThresholds &t);
std::string report_json(const LeakageReport &r);
std::string report_csv(const LeakageReport &r);
/// Fixed-width ranked table for terminals.
std::string report_table(const LeakageReport &r);

/// Class labels, one per run in run order; blank lines and '#' comments
/// skipped. Returns labels and, per run, the index of its class in
/// first-appearance order.
struct ClassAssignment {
    std::vector<std::string> labels;
    std::vector<std::size_t> run_class;
};
ClassAssignment read_class_file(const std::string &path);

/// Symmetric |t| matrix as CSV: header `class,<labels>`, one row per class.
std::string tmatrix_csv(const std::vector<std::string> &labels,
                        const std::vector<std::vector<double>> &m);

nlohmann::ordered_json config_json(const sim::SimConfig &cfg);

} // namespace leakscope::report

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

#include "leakscope/report/report.hpp"
#include "leakscope/core/error.hpp"
#include "leakscope/core/util.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#ifndef LEAKSCOPE_VERSION
#define LEAKSCOPE_VERSION "0.0.0"
#endif

namespace leakscope::report {

std::string_view tool_version() { return LEAKSCOPE_VERSION; }

std::string_view severity_name(Severity s) {
    switch (s) {
    case Severity::Red:
        return "red";
    case Severity::Orange:
        return "orange";
    case Severity::Blue:
        return "blue";
    }
    return "blue";
}

Severity classify(double svf, double floor, const SeverityThresholds &t) {
    if (svf >= std::max(t.red_min, t.red_factor * floor))
        return Severity::Red;
    if (svf > 0 && svf >= t.orange_factor * floor)
        return Severity::Orange;
    return Severity::Blue;
}

namespace {

std::string join_path(const std::vector<std::string> &p) {
    std::string s;
    for (std::size_t i = 0; i < p.size(); ++i)
        s += (i ? "/" : "") + p[i];
    return s;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

LeakageReport build_report(const std::vector<metrics::SvfResult> &results, std::size_t runs,
                           std::size_t cycles, std::vector<std::string> oracles,
                           const metrics::SvfOptions &opts, const SeverityThresholds &t) {
    LeakageReport r;
    r.runs = runs;
    r.cycles = cycles;
    r.oracles = std::move(oracles);
    r.options = opts;
    r.thresholds = t;
    for (const auto &res : results) {
        ReportEntry e;
        e.module_path = join_path(res.module_path);
        e.oracle_label = res.oracle_label;
        e.svf = res.svf;
        e.peak_cycle = res.peak_cycle;
        e.noise_floor = res.noise_floor;
        e.xz_ratio = res.xz_ratio;
        e.severity = classify(res.svf, res.noise_floor, t);
        r.entries.push_back(std::move(e));
    }
    std::stable_sort(r.entries.begin(), r.entries.end(), [](const auto &a, const auto &b) {
        if (a.svf != b.svf)
            return a.svf > b.svf;
        return a.module_path < b.module_path;
    });
    return r;
}

std::string report_json(const LeakageReport &r) {
    nlohmann::ordered_json j;
    j["tool"] = "leakscope";
    j["version"] = std::string(tool_version());
    j["runs"] = r.runs;
    j["cycles"] = r.cycles;
    j["oracles"] = r.oracles;
    j["window"] = {{"start", r.options.window_start},
                   {"end", r.options.window_end == 0 ? r.cycles : r.options.window_end}};
    j["noise_floor"] = {{"shuffles", r.options.shuffles},
                        {"quantile", r.options.floor_quantile},
                        {"seed", r.options.seed}};
    j["thresholds"] = {{"red_min", r.thresholds.red_min},
                       {"red_factor", r.thresholds.red_factor},
                       {"orange_factor", r.thresholds.orange_factor}};
    auto arr = nlohmann::ordered_json::array();
    for (const auto &e : r.entries) {
        nlohmann::ordered_json o;
        o["module_path"] = e.module_path;
        o["oracle"] = e.oracle_label;
        o["svf"] = e.svf;
        o["peak_cycle"] = e.peak_cycle;
        o["noise_floor"] = e.noise_floor;
        o["xz_ratio"] = e.xz_ratio;
        o["severity"] = std::string(severity_name(e.severity));
        arr.push_back(std::move(o));
    }
    j["modules"] = arr;
    return j.dump(2) + "\n";
}

std::string report_csv(const LeakageReport &r) {
    std::string s = "rank,module_path,oracle,svf,peak_cycle,noise_floor,xz_ratio,severity\n";
    for (std::size_t i = 0; i < r.entries.size(); ++i) {
        const auto &e = r.entries[i];
        s += std::to_string(i + 1) + ',' + e.module_path + ',' + e.oracle_label + ',' +
             fmt(e.svf) + ',' + std::to_string(e.peak_cycle) + ',' + fmt(e.noise_floor) + ',' +
             fmt(e.xz_ratio) + ',' + std::string(severity_name(e.severity)) + '\n';
    }
    return s;
}

std::string report_table(const LeakageReport &r) {
    std::size_t w = 6;
    for (const auto &e : r.entries)
        w = std::max(w, e.module_path.size());
    std::ostringstream out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%4s  %-*s  %8s  %8s  %8s  %s\n", "rank",
                  static_cast<int>(w), "module", "svf", "floor", "peak", "severity");
    out << buf;
    for (std::size_t i = 0; i < r.entries.size(); ++i) {
        const auto &e = r.entries[i];
        std::snprintf(buf, sizeof buf, "%4zu  %-*s  %8.4f  %8.4f  %8zu  %s\n", i + 1,
                      static_cast<int>(w), e.module_path.c_str(), e.svf, e.noise_floor,
                      e.peak_cycle, std::string(severity_name(e.severity)).c_str());
        out << buf;
    }
    return out.str();
}

ClassAssignment read_class_file(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open class file '" + path + "'");
    ClassAssignment c;
    std::map<std::string, std::size_t> index;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto t = trim(line);
        if (t.empty() || t.front() == '#')
            continue;
        if (t.find_first_of(" \t,") != std::string_view::npos)
            throw ParseError(path + ": class label must be a single token", lineno);
        const std::string label(t);
        auto it = index.find(label);
        if (it == index.end()) {
            it = index.emplace(label, c.labels.size()).first;
            c.labels.push_back(label);
        }
        c.run_class.push_back(it->second);
    }
    return c;
}

std::string tmatrix_csv(const std::vector<std::string> &labels,
                        const std::vector<std::vector<double>> &m) {
    std::string s = "class";
    for (const auto &l : labels)
        s += ',' + l;
    s += '\n';
    for (std::size_t i = 0; i < labels.size(); ++i) {
        s += labels[i];
        for (std::size_t j = 0; j < labels.size(); ++j)
            s += ',' + (std::isinf(m[i][j]) ? std::string("inf") : fmt(m[i][j]));
        s += '\n';
    }
    return s;
}

nlohmann::ordered_json config_json(const sim::SimConfig &cfg) {
    nlohmann::ordered_json j;
    j["mode"] = std::string(sim::mode_name(cfg.mode));
    j["eda_fix"] = cfg.eda_fix_on();
    j["noise_sigma"] = cfg.noise_sigma;
    j["seed"] = cfg.seed;
    j["cache"] = {{"sets", cfg.cache.sets},
                  {"ways", cfg.cache.ways},
                  {"line_bytes", cfg.cache.line_bytes},
                  {"address_width", cfg.cache.address_width()}};
    if (cfg.rekey_interval_runs == 0)
        j["rekey_interval_runs"] = "never";
    else
        j["rekey_interval_runs"] = cfg.rekey_interval_runs;
    j["affine_spec"] = nlohmann::ordered_json::parse(obf::affine_spec_to_json(cfg.affine));
    return j;
}

} // namespace leakscope::report

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

#include "leakscope/sim/power_io.hpp"
#include "leakscope/core/error.hpp"
#include "leakscope/core/util.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace leakscope::sim {

void write_power_csv(const std::string &path, const std::vector<std::vector<double>> &runs) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write '" + path + "'");
    out << "run_index,cycle,sample\n";
    char buf[64];
    for (std::size_t r = 0; r < runs.size(); ++r)
        for (std::size_t c = 0; c < runs[r].size(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", runs[r][c]);
            out << r << ',' << c << ',' << buf << '\n';
        }
    if (!out)
        throw Error("error writing '" + path + "'");
}

namespace {

template <typename T> bool parse_num(std::string_view s, T &v) {
    s = trim(s);
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc() && p == s.data() + s.size() && !s.empty();
}

} // namespace

std::vector<std::vector<double>> read_power_csv(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open trace file '" + path + "'");
    std::vector<std::vector<double>> runs;
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        const auto t = trim(line);
        if (t.empty())
            continue;
        const auto cols = split(t, ',');
        auto fail = [&](const std::string &msg) -> void {
            throw ParseError(path + ": " + msg, lineno);
        };
        if (!header) {
            if (cols.size() != 3 || trim(cols[0]) != "run_index" || trim(cols[1]) != "cycle" ||
                trim(cols[2]) != "sample")
                fail("expected header 'run_index,cycle,sample'");
            header = true;
            continue;
        }
        if (cols.size() != 3)
            fail("expected 3 columns, got " + std::to_string(cols.size()));
        std::size_t run = 0, cycle = 0;
        double sample = 0;
        if (!parse_num(cols[0], run))
            fail("bad run_index '" + std::string(trim(cols[0])) + "'");
        if (!parse_num(cols[1], cycle))
            fail("bad cycle '" + std::string(trim(cols[1])) + "'");
        if (!parse_num(cols[2], sample) || !std::isfinite(sample))
            fail("bad sample '" + std::string(trim(cols[2])) + "'");
        if (run == runs.size()) {
            runs.emplace_back();
        } else if (run + 1 != runs.size()) {
            fail("run_index " + std::to_string(run) + " out of order");
        }
        if (cycle != runs.back().size())
            fail("cycle " + std::to_string(cycle) + " out of order for run " +
                 std::to_string(run) + ", expected " + std::to_string(runs.back().size()));
        runs.back().push_back(sample);
    }
    if (!header)
        throw ParseError(path + ": empty trace file");
    return runs;
}

} // namespace leakscope::sim

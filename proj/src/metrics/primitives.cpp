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

#include "leakscope/metrics/primitives.hpp"
#include "leakscope/core/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace leakscope::metrics {

std::size_t hamming_weight(const BitVec &x) { return x.count_ones(); }

std::size_t hamming_distance(const BitVec &x, const BitVec &y) {
    return x.count_differences(y);
}

DistanceVector pairwise_distances(std::span<const BitVec> items) {
    const std::size_t n = items.size();
    if (n < 2)
        throw InputError("pairwise_distances needs at least 2 items, got " + std::to_string(n));
    DistanceVector out;
    out.reserve(pair_count(n));
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = j + 1; i < n; ++i)
            out.push_back(static_cast<std::uint32_t>(items[i].count_differences(items[j])));
    return out;
}

namespace {

void check_lengths(std::size_t a, std::size_t b) {
    if (a != b)
        throw InputError("pearson inputs differ in length (" + std::to_string(a) + " vs " +
                         std::to_string(b) + ")");
    if (a < 2)
        throw InputError("pearson needs at least 2 samples");
}

} // namespace

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
    check_lengths(x.size(), y.size());
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0 || syy == 0)
        return std::nullopt;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::optional<double> pearson_from_moments(const Moments &m) {
    const Int128 sxy = m.n * m.sum_xy - m.sum_x * m.sum_y;
    const Int128 sxx = m.n * m.sum_xx - m.sum_x * m.sum_x;
    const Int128 syy = m.n * m.sum_yy - m.sum_y * m.sum_y;
    if (sxx == 0 || syy == 0)
        return std::nullopt;
    const double r = static_cast<double>(sxy) /
                     std::sqrt(static_cast<double>(sxx) * static_cast<double>(syy));
    return std::clamp(r, -1.0, 1.0);
}

std::optional<double> pearson_exact(std::span<const std::uint32_t> x,
                                    std::span<const std::uint32_t> y) {
    check_lengths(x.size(), y.size());
    Moments m;
    m.n = static_cast<Int128>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const Int128 a = x[i], b = y[i];
        m.sum_x += a;
        m.sum_y += b;
        m.sum_xx += a * a;
        m.sum_yy += b * b;
        m.sum_xy += a * b;
    }
    return pearson_from_moments(m);
}

namespace {

struct GroupStats {
    double mean = 0;
    double var = 0;
    double n = 0;
};

GroupStats group_stats(std::span<const double> v, const char *name) {
    if (v.size() < 2)
        throw InputError(std::string("t-test group ") + name + " has " +
                         std::to_string(v.size()) + " samples; at least 2 required");
    // Welford.
    double mean = 0, m2 = 0;
    std::size_t k = 0;
    for (double s : v) {
        ++k;
        const double d = s - mean;
        mean += d / static_cast<double>(k);
        m2 += d * (s - mean);
    }
    return {mean, m2 / static_cast<double>(k - 1), static_cast<double>(k)};
}

} // namespace

std::optional<double> welch_t(std::span<const double> a, std::span<const double> b) {
    const auto ga = group_stats(a, "A");
    const auto gb = group_stats(b, "B");
    const double se2 = ga.var / ga.n + gb.var / gb.n;
    if (se2 == 0)
        return std::nullopt;
    return (ga.mean - gb.mean) / std::sqrt(se2);
}

std::vector<std::vector<double>>
pairwise_ttest_matrix(const std::vector<std::vector<double>> &classes) {
    const std::size_t k = classes.size();
    if (k < 2)
        throw InputError("t-matrix needs at least 2 classes, got " + std::to_string(k));
    std::vector<std::vector<double>> m(k, std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) {
            double v;
            if (auto t = welch_t(classes[i], classes[j])) {
                v = std::abs(*t);
            } else {
                v = classes[i].front() == classes[j].front()
                        ? 0.0
                        : std::numeric_limits<double>::infinity();
            }
            m[i][j] = m[j][i] = v;
        }
    return m;
}

} // namespace leakscope::metrics

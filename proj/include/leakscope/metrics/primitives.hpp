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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace leakscope::metrics {

/// Number of set bits; x/z bits count as 0.
std::size_t hamming_weight(const BitVec &x);

/// popcount(x ^ y). Throws InputError on width mismatch.
std::size_t hamming_distance(const BitVec &x, const BitVec &y);

/// Pairwise Hamming distances of N items, length N(N-1)/2.
///
/// Canonical pair order: pairs (i, j) with i > j, ordered by j ascending and
/// then i ascending: (1,0), (2,0), ..., (N-1,0), (2,1), ...
using DistanceVector = std::vector<std::uint32_t>;

DistanceVector pairwise_distances(std::span<const BitVec> items);

inline std::size_t pair_count(std::size_t n) { return n * (n - 1) / 2; }

/// Position of pair (i, j), i > j, in the canonical order for N items.
inline std::size_t pair_index(std::size_t n, std::size_t i, std::size_t j) {
    return j * n - j * (j + 1) / 2 + (i - j - 1);
}

/// Two-pass Pearson coefficient. nullopt when either input has zero
/// variance. Throws InputError on length mismatch or fewer than 2 samples.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

/// Pearson coefficient of two integer sequences, computed from exact
/// integer moments: rho = Sxy / sqrt(Sxx * Syy) with
/// Sxy = n*sum(xy) - sum(x)*sum(y). The result depends only on the moments,
/// so any implementation feeding the same integers gets the same double.
std::optional<double> pearson_exact(std::span<const std::uint32_t> x,
                                    std::span<const std::uint32_t> y);

__extension__ typedef __int128 Int128;

/// Exact integer moments of one sequence (or one pair of sequences).
struct Moments {
    Int128 n = 0;
    Int128 sum_x = 0;
    Int128 sum_y = 0;
    Int128 sum_xx = 0;
    Int128 sum_yy = 0;
    Int128 sum_xy = 0;
};

/// Final step of pearson_exact; nullopt when a variance term is zero.
std::optional<double> pearson_from_moments(const Moments &m);

/// Welch's unequal-variance t statistic (mean(a) - mean(b)) / sqrt(va/na + vb/nb).
/// Throws InputError when a group has fewer than 2 samples; nullopt when
/// both variances are zero.
std::optional<double> welch_t(std::span<const double> a, std::span<const double> b);

/// Symmetric matrix of |welch_t| between every pair of classes; diagonal 0.
/// Degenerate pairs (both variances zero) read 0 when the means are equal
/// and +infinity otherwise.
std::vector<std::vector<double>>
pairwise_ttest_matrix(const std::vector<std::vector<double>> &classes);

} // namespace leakscope::metrics

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

#include "leakscope/aes/aes.hpp"
#include "leakscope/core/util.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace leakscope::dpa {

using TraceMatrix = std::vector<std::vector<double>>;

struct AttackResult {
    unsigned target_byte = 0;
    aes::Point point = aes::Point::SboxOut;
    std::size_t traces = 0;
    /// 256 x d, row = guess. Degenerate columns/hypotheses score 0.
    Eigen::MatrixXd correlations;
    /// max_c |rho| per guess.
    std::vector<double> max_abs;
    /// argmax_c |rho| per guess (lowest cycle on ties).
    std::vector<std::size_t> peak_sample;
    std::uint8_t best_guess = 0;
    std::size_t best_sample = 0;
    /// Guesses ordered by max |rho| descending, ties by lower guess. Scores
    /// are compared on a 1e-12 grid so mathematically tied guesses (e.g.
    /// complementary xor_key hypotheses) order by guess value.
    std::vector<std::uint8_t> ranks;

    /// 1-based rank of `guess`.
    unsigned rank_of(std::uint8_t guess) const;
};

/// Streaming CPA state. Traces are bucketed by the targeted plaintext byte,
/// so scoring any prefix costs one 256 x 256 by 256 x d product.
class CpaAccumulator {
  public:
    CpaAccumulator(std::size_t samples, unsigned target_byte,
                   aes::Point point = aes::Point::SboxOut);

    void add(const std::vector<double> &trace, const Block &plaintext);
    std::size_t count() const { return n_; }
    std::size_t samples() const { return d_; }
    AttackResult result() const;

  private:
    std::size_t d_;
    unsigned target_;
    aes::Point point_;
    std::size_t n_ = 0;
    Eigen::MatrixXd hyp_;        // 256 guesses x 256 byte values
    Eigen::MatrixXd bucket_sum_; // 256 byte values x d
    Eigen::VectorXd bucket_n_;
    Eigen::VectorXd sum_t_, sum_t2_;
};

/// Hypothesis HW(point(p[target], g)) against every sample. Requires N >= 2
/// traces of equal length.
AttackResult cpa_attack(const TraceMatrix &traces, const std::vector<Block> &plaintexts,
                        unsigned target_byte, aes::Point point = aes::Point::SboxOut);

struct MtdCurve {
    std::vector<std::pair<std::size_t, unsigned>> checkpoints; // (traces, rank)
    /// First checkpoint from which the true key stays rank 1; nullopt when
    /// not disclosed within the budget.
    std::optional<std::size_t> mtd;
};

/// Checkpoints at step, 2*step, ... and at N itself.
std::vector<std::size_t> checkpoint_counts(std::size_t n, std::size_t step);

MtdCurve mtd(const TraceMatrix &traces, const std::vector<Block> &plaintexts,
             unsigned target_byte, std::uint8_t true_key_byte, std::size_t checkpoint_step,
             aes::Point point = aes::Point::SboxOut);

struct EvolutionRow {
    std::size_t trace_count;
    unsigned guess;
    double max_abs_rho;
};

/// max |rho| for every guess at every checkpoint.
std::vector<EvolutionRow> correlation_evolution(const TraceMatrix &traces,
                                                const std::vector<Block> &plaintexts,
                                                unsigned target_byte,
                                                std::size_t checkpoint_step,
                                                aes::Point point = aes::Point::SboxOut);

/// Both curves from a single pass.
struct AttackSweep {
    AttackResult final;
    MtdCurve curve;
    std::vector<EvolutionRow> evolution;
};
AttackSweep attack_sweep(const TraceMatrix &traces, const std::vector<Block> &plaintexts,
                         unsigned target_byte, std::uint8_t true_key_byte,
                         std::size_t checkpoint_step, aes::Point point = aes::Point::SboxOut);

std::string attack_result_json(const AttackResult &r, const std::optional<MtdCurve> &curve,
                               std::optional<std::uint8_t> true_key_byte,
                               bool include_correlations = true);
void write_evolution_csv(const std::string &path, const std::vector<EvolutionRow> &rows);

} // namespace leakscope::dpa

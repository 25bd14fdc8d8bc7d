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

#include "leakscope/dpa/cpa.hpp"
#include "leakscope/core/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>

namespace leakscope::dpa {

unsigned AttackResult::rank_of(std::uint8_t guess) const {
    const auto it = std::find(ranks.begin(), ranks.end(), guess);
    return static_cast<unsigned>(it - ranks.begin()) + 1;
}

CpaAccumulator::CpaAccumulator(std::size_t samples, unsigned target_byte, aes::Point point)
    : d_(samples), target_(target_byte), point_(point), hyp_(256, 256),
      bucket_sum_(Eigen::MatrixXd::Zero(256, static_cast<Eigen::Index>(samples))),
      bucket_n_(Eigen::VectorXd::Zero(256)),
      sum_t_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(samples))),
      sum_t2_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(samples))) {
    if (target_byte > 15)
        throw InputError("target byte must be in 0..15, got " + std::to_string(target_byte));
    if (samples == 0)
        throw InputError("traces have no samples");
    for (unsigned g = 0; g < 256; ++g)
        for (unsigned v = 0; v < 256; ++v)
            hyp_(g, v) = std::popcount(aes::first_round_value(
                static_cast<std::uint8_t>(v), static_cast<std::uint8_t>(g), point_));
}

void CpaAccumulator::add(const std::vector<double> &trace, const Block &plaintext) {
    if (trace.size() != d_)
        throw InputError("trace " + std::to_string(n_) + " has " + std::to_string(trace.size()) +
                         " samples, expected " + std::to_string(d_));
    const unsigned v = plaintext[target_];
    for (std::size_t c = 0; c < d_; ++c) {
        const double t = trace[c];
        const auto ci = static_cast<Eigen::Index>(c);
        bucket_sum_(v, ci) += t;
        sum_t_(ci) += t;
        sum_t2_(ci) += t * t;
    }
    bucket_n_(v) += 1;
    ++n_;
}

namespace {

std::int64_t grid(double x) { return std::llround(x * 1e12); }

void rank_guesses(AttackResult &r) {
    r.ranks.resize(256);
    for (unsigned g = 0; g < 256; ++g)
        r.ranks[g] = static_cast<std::uint8_t>(g);
    std::stable_sort(r.ranks.begin(), r.ranks.end(), [&](std::uint8_t a, std::uint8_t b) {
        return grid(r.max_abs[a]) > grid(r.max_abs[b]);
    });
    r.best_guess = r.ranks.front();
    r.best_sample = r.peak_sample[r.best_guess];
}

} // namespace

AttackResult CpaAccumulator::result() const {
    if (n_ < 2)
        throw InputError("CPA needs at least 2 traces, got " + std::to_string(n_));
    AttackResult r;
    r.target_byte = target_;
    r.point = point_;
    r.traces = n_;
    const double n = static_cast<double>(n_);
    const Eigen::MatrixXd sht = hyp_ * bucket_sum_;      // 256 x d
    const Eigen::VectorXd sh = hyp_ * bucket_n_;         // 256
    const Eigen::VectorXd sh2 = hyp_.array().square().matrix() * bucket_n_;
    const Eigen::ArrayXd tvar = n * sum_t2_.array() - sum_t_.array().square();
    r.correlations.resize(256, static_cast<Eigen::Index>(d_));
    r.max_abs.assign(256, 0.0);
    r.peak_sample.assign(256, 0);
    for (Eigen::Index g = 0; g < 256; ++g) {
        const double hvar = n * sh2(g) - sh(g) * sh(g);
        for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(d_); ++c) {
            double rho = 0;
            if (hvar > 0 && tvar(c) > 0) {
                rho = (n * sht(g, c) - sh(g) * sum_t_(c)) / std::sqrt(hvar * tvar(c));
                rho = std::clamp(rho, -1.0, 1.0);
            }
            r.correlations(g, c) = rho;
            if (std::abs(rho) > r.max_abs[static_cast<std::size_t>(g)]) {
                r.max_abs[static_cast<std::size_t>(g)] = std::abs(rho);
                r.peak_sample[static_cast<std::size_t>(g)] = static_cast<std::size_t>(c);
            }
        }
    }
    rank_guesses(r);
    return r;
}

namespace {

std::size_t check_inputs(const TraceMatrix &traces, const std::vector<Block> &plaintexts) {
    if (traces.size() != plaintexts.size())
        throw InputError("trace count " + std::to_string(traces.size()) +
                         " does not match plaintext count " + std::to_string(plaintexts.size()));
    if (traces.size() < 2)
        throw InputError("CPA needs at least 2 traces, got " + std::to_string(traces.size()));
    return traces.front().size();
}

} // namespace

AttackResult cpa_attack(const TraceMatrix &traces, const std::vector<Block> &plaintexts,
                        unsigned target_byte, aes::Point point) {
    CpaAccumulator acc(check_inputs(traces, plaintexts), target_byte, point);
    for (std::size_t i = 0; i < traces.size(); ++i)
        acc.add(traces[i], plaintexts[i]);
    return acc.result();
}

std::vector<std::size_t> checkpoint_counts(std::size_t n, std::size_t step) {
    if (step == 0)
        throw InputError("checkpoint step must be >= 1");
    std::vector<std::size_t> out;
    for (std::size_t k = std::max<std::size_t>(step, 2); k < n; k += step)
        out.push_back(k);
    if (n >= 2)
        out.push_back(n);
    return out;
}

AttackSweep attack_sweep(const TraceMatrix &traces, const std::vector<Block> &plaintexts,
                         unsigned target_byte, std::uint8_t true_key_byte,
                         std::size_t checkpoint_step, aes::Point point) {
    const auto counts = checkpoint_counts(traces.size(), checkpoint_step);
    CpaAccumulator acc(check_inputs(traces, plaintexts), target_byte, point);
    AttackSweep sweep;
    std::size_t next = 0;
    for (std::size_t i = 0; i < traces.size(); ++i) {
        acc.add(traces[i], plaintexts[i]);
        if (next < counts.size() && acc.count() == counts[next]) {
            auto r = acc.result();
            sweep.curve.checkpoints.emplace_back(acc.count(), r.rank_of(true_key_byte));
            for (unsigned g = 0; g < 256; ++g)
                sweep.evolution.push_back({acc.count(), g, r.max_abs[g]});
            if (next + 1 == counts.size())
                sweep.final = std::move(r);
            ++next;
        }
    }
    for (std::size_t k = sweep.curve.checkpoints.size(); k-- > 0;) {
        if (sweep.curve.checkpoints[k].second != 1)
            break;
        sweep.curve.mtd = sweep.curve.checkpoints[k].first;
    }
    return sweep;
}

MtdCurve mtd(const TraceMatrix &traces, const std::vector<Block> &plaintexts,
             unsigned target_byte, std::uint8_t true_key_byte, std::size_t checkpoint_step,
             aes::Point point) {
    return attack_sweep(traces, plaintexts, target_byte, true_key_byte, checkpoint_step, point)
        .curve;
}

std::vector<EvolutionRow> correlation_evolution(const TraceMatrix &traces,
                                                const std::vector<Block> &plaintexts,
                                                unsigned target_byte,
                                                std::size_t checkpoint_step, aes::Point point) {
    return attack_sweep(traces, plaintexts, target_byte, 0, checkpoint_step, point).evolution;
}

std::string attack_result_json(const AttackResult &r, const std::optional<MtdCurve> &curve,
                               std::optional<std::uint8_t> true_key_byte,
                               bool include_correlations) {
    nlohmann::ordered_json j;
    j["target_byte"] = r.target_byte;
    j["point"] = std::string(aes::point_name(r.point));
    j["traces"] = r.traces;
    j["samples"] = r.correlations.cols();
    j["best_guess"] = r.best_guess;
    j["best_sample"] = r.best_sample;
    j["ranks"] = r.ranks;
    j["max_abs_rho"] = r.max_abs;
    if (true_key_byte) {
        j["true_key_byte"] = *true_key_byte;
        j["true_key_rank"] = r.rank_of(*true_key_byte);
    }
    if (curve) {
        nlohmann::ordered_json c;
        auto pts = nlohmann::ordered_json::array();
        for (const auto &[count, rank] : curve->checkpoints)
            pts.push_back({{"traces", count}, {"rank", rank}});
        c["checkpoints"] = pts;
        if (curve->mtd)
            c["mtd"] = *curve->mtd;
        else
            c["mtd"] = "not disclosed";
        j["mtd"] = c;
    }
    if (include_correlations) {
        auto rows = nlohmann::ordered_json::array();
        for (Eigen::Index g = 0; g < r.correlations.rows(); ++g) {
            std::vector<double> row(static_cast<std::size_t>(r.correlations.cols()));
            for (Eigen::Index c = 0; c < r.correlations.cols(); ++c)
                row[static_cast<std::size_t>(c)] = r.correlations(g, c);
            rows.push_back(row);
        }
        j["correlations"] = rows;
    }
    return j.dump(2) + "\n";
}

void write_evolution_csv(const std::string &path, const std::vector<EvolutionRow> &rows) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write '" + path + "'");
    out << "trace_count,guess,max_abs_rho\n";
    char buf[64];
    for (const auto &r : rows) {
        std::snprintf(buf, sizeof buf, "%.17g", r.max_abs_rho);
        out << r.trace_count << ',' << r.guess << ',' << buf << '\n';
    }
}

} // namespace leakscope::dpa

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

#include "leakscope/metrics/svf.hpp"
#include "leakscope/core/error.hpp"
#include "leakscope/core/util.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

namespace leakscope::metrics {

namespace {

using Matrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor>;

/// Standardizes v in place to zero mean and unit norm. False if constant.
template <typename Vec> bool standardize(Vec &&v) {
    const float mean = v.mean();
    v.array() -= mean;
    const float norm = v.norm();
    if (norm == 0.0f)
        return false;
    v /= norm;
    return true;
}

/// Per-oracle data shared by every module: the distance vector, its exact
/// moments and the standardized distance vectors of the shuffled oracles.
struct OracleContext {
    const OracleTrace *oracle = nullptr;
    DistanceVector d_o;
    std::int64_t sum_x = 0;
    std::int64_t sum_xx = 0;
    bool degenerate = false;
    Matrix shuffled; // pairs x shuffles
};

OracleContext make_context(const OracleTrace &oracle, std::size_t n, const SvfOptions &opts) {
    if (oracle.size() != n)
        throw InputError("oracle '" + oracle.label + "' has " + std::to_string(oracle.size()) +
                         " values but the run set has " + std::to_string(n) + " runs");
    OracleContext ctx;
    ctx.oracle = &oracle;
    ctx.d_o = pairwise_distances(oracle.values);
    for (auto v : ctx.d_o) {
        ctx.sum_x += v;
        ctx.sum_xx += static_cast<std::int64_t>(v) * v;
    }
    const auto p = static_cast<std::int64_t>(ctx.d_o.size());
    ctx.degenerate = p * ctx.sum_xx == ctx.sum_x * ctx.sum_x;
    if (ctx.degenerate || opts.shuffles == 0)
        return ctx;

    std::mt19937_64 rng(derive_seed(opts.seed, "svf-floor-shuffle"));
    std::vector<std::size_t> perm(n);
    ctx.shuffled.resize(static_cast<Eigen::Index>(ctx.d_o.size()),
                        static_cast<Eigen::Index>(opts.shuffles));
    for (std::size_t s = 0; s < opts.shuffles; ++s) {
        for (std::size_t i = 0; i < n; ++i)
            perm[i] = i;
        for (std::size_t i = n - 1; i > 0; --i)
            std::swap(perm[i], perm[rng() % (i + 1)]);
        auto col = ctx.shuffled.col(static_cast<Eigen::Index>(s));
        Eigen::Index k = 0;
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = j + 1; i < n; ++i)
                col[k++] = static_cast<float>(
                    oracle.values[perm[i]].count_differences(oracle.values[perm[j]]));
        standardize(col);
    }
    return ctx;
}

struct Event {
    std::uint32_t run;
    std::uint32_t signal; // local index within the module
    std::uint32_t value;  // index into the track's values
};

class ModuleScorer {
  public:
    ModuleScorer(const trace::RunSet &runs, const trace::ModuleNode &node,
                 const OracleContext &ctx, const SvfOptions &opts)
        : runs_(runs), node_(node), ctx_(ctx), opts_(opts) {}

    SvfResult run() {
        const std::size_t n = runs_.size();
        const std::size_t begin = opts_.window_start;
        const std::size_t end = opts_.window_end == 0 ? runs_.cycles : opts_.window_end;
        if (begin >= end || end > runs_.cycles)
            throw InputError("analysis window [" + std::to_string(begin) + ", " +
                             std::to_string(end) + ") is outside the " +
                             std::to_string(runs_.cycles) + "-cycle run set");
        if (node_.signals.empty())
            throw InputError("module '" + node_.path_string() + "' owns no signals");
        const std::size_t len = end - begin;
        const std::size_t k_sig = node_.signals.size();

        SvfResult res;
        res.module_path = node_.path;
        res.oracle_label = ctx_.oracle->label;
        res.per_cycle_scores.assign(len, 0.0);
        res.peak_cycle = begin + 1;
        res.xz_ratio = xz_ratio(begin, end);
        if (ctx_.degenerate)
            return res;

        // Change events bucketed by local cycle (CSR layout).
        std::vector<std::size_t> offsets(len + 1, 0);
        auto for_each_change = [&](auto &&fn) {
            for (std::size_t r = 0; r < n; ++r)
                for (std::size_t k = 0; k < k_sig; ++k) {
                    const auto &tr = runs_.runs[r].tracks[node_.signals[k]];
                    auto it = std::upper_bound(tr.starts.begin(), tr.starts.end(),
                                               static_cast<std::uint32_t>(begin));
                    for (; it != tr.starts.end() && *it < end; ++it)
                        fn(r, k, static_cast<std::size_t>(it - tr.starts.begin()), *it - begin);
                }
        };
        for_each_change([&](std::size_t, std::size_t, std::size_t, std::size_t c) {
            ++offsets[c + 1];
        });
        for (std::size_t c = 0; c < len; ++c)
            offsets[c + 1] += offsets[c];
        std::vector<Event> events(offsets[len]);
        {
            auto fill = offsets;
            for_each_change([&](std::size_t r, std::size_t k, std::size_t v, std::size_t c) {
                events[fill[c]++] = {static_cast<std::uint32_t>(r),
                                     static_cast<std::uint32_t>(k),
                                     static_cast<std::uint32_t>(v)};
            });
        }

        // Current value index per (run, signal) and the running distances.
        std::vector<std::size_t> cur(n * k_sig);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t k = 0; k < k_sig; ++k)
                cur[r * k_sig + k] = runs_.runs[r].tracks[node_.signals[k]].index_at(begin);
        auto value = [&](std::size_t r, std::size_t k, std::size_t idx) -> const BitVec & {
            return runs_.runs[r].tracks[node_.signals[k]].values[idx];
        };

        const std::size_t pairs = pair_count(n);
        std::vector<std::int64_t> d(pairs, 0);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = j + 1; i < n; ++i) {
                std::int64_t s = 0;
                for (std::size_t k = 0; k < k_sig; ++k)
                    s += static_cast<std::int64_t>(value(i, k, cur[i * k_sig + k])
                                                       .count_differences(
                                                           value(j, k, cur[j * k_sig + k])));
                d[pair_index(n, i, j)] = s;
            }

        const bool floor = opts_.shuffles > 0;
        shuffle_max_.assign(floor ? opts_.shuffles : 0, 0.0f);
        double score = 0;
        for (std::size_t c = 0; c < len; ++c) {
            const bool changed = c == 0 || offsets[c + 1] > offsets[c];
            if (c > 0) {
                for (std::size_t e = offsets[c]; e < offsets[c + 1]; ++e) {
                    const auto &ev = events[e];
                    const std::size_t slot = ev.run * k_sig + ev.signal;
                    const BitVec &old_v = value(ev.run, ev.signal, cur[slot]);
                    const BitVec &new_v = value(ev.run, ev.signal, ev.value);
                    for (std::size_t q = 0; q < n; ++q) {
                        if (q == ev.run)
                            continue;
                        const BitVec &other = value(q, ev.signal, cur[q * k_sig + ev.signal]);
                        const auto delta =
                            static_cast<std::int64_t>(new_v.count_differences(other)) -
                            static_cast<std::int64_t>(old_v.count_differences(other));
                        d[q > ev.run ? pair_index(n, q, ev.run) : pair_index(n, ev.run, q)] +=
                            delta;
                    }
                    cur[slot] = ev.value;
                }
            }
            if (changed) {
                score = score_column(d);
                if (floor)
                    push_floor_column(d);
            }
            res.per_cycle_scores[c] = score;
        }
        if (floor)
            flush_floor();

        const auto peak = std::max_element(res.per_cycle_scores.begin(),
                                           res.per_cycle_scores.end());
        res.svf = *peak;
        res.peak_cycle = begin + static_cast<std::size_t>(peak - res.per_cycle_scores.begin()) + 1;
        if (floor) {
            std::vector<float> sorted = shuffle_max_;
            std::sort(sorted.begin(), sorted.end());
            auto rank = static_cast<std::size_t>(
                std::ceil(opts_.floor_quantile * static_cast<double>(sorted.size())));
            rank = std::clamp<std::size_t>(rank, 1, sorted.size());
            res.noise_floor = sorted[rank - 1];
        }
        return res;
    }

  private:
    double score_column(const std::vector<std::int64_t> &d) const {
        Moments m;
        std::int64_t sy = 0, syy = 0, sxy = 0;
        for (std::size_t p = 0; p < d.size(); ++p) {
            sy += d[p];
            syy += d[p] * d[p];
            sxy += d[p] * static_cast<std::int64_t>(ctx_.d_o[p]);
        }
        m.n = static_cast<Int128>(d.size());
        m.sum_x = ctx_.sum_x;
        m.sum_xx = ctx_.sum_xx;
        m.sum_y = sy;
        m.sum_yy = syy;
        m.sum_xy = sxy;
        const auto r = pearson_from_moments(m);
        return r ? std::abs(*r) : 0.0;
    }

    static constexpr Eigen::Index kBlock = 128;

    void push_floor_column(const std::vector<std::int64_t> &d) {
        const auto rows = static_cast<Eigen::Index>(d.size());
        if (block_.rows() != rows) {
            block_.resize(rows, kBlock);
            filled_ = 0;
        }
        auto col = block_.col(filled_);
        for (Eigen::Index p = 0; p < rows; ++p)
            col[p] = static_cast<float>(d[static_cast<std::size_t>(p)]);
        if (!standardize(col))
            return; // constant column: scores 0 under every shuffle
        if (++filled_ == kBlock)
            flush_floor();
    }

    void flush_floor() {
        if (filled_ == 0)
            return;
        const Matrix corr = ctx_.shuffled.transpose() * block_.leftCols(filled_);
        const Eigen::VectorXf best = corr.cwiseAbs().rowwise().maxCoeff();
        for (std::size_t s = 0; s < shuffle_max_.size(); ++s)
            shuffle_max_[s] = std::max(shuffle_max_[s], best[static_cast<Eigen::Index>(s)]);
        filled_ = 0;
    }

    double xz_ratio(std::size_t begin, std::size_t end) const {
        double unknown = 0, total = 0;
        for (const auto &run : runs_.runs)
            for (auto s : node_.signals) {
                const auto &tr = run.tracks[s];
                total += static_cast<double>(runs_.signals[s].width) *
                         static_cast<double>(end - begin);
                for (std::size_t i = 0; i < tr.starts.size(); ++i) {
                    if (!tr.values[i].has_unknown())
                        continue;
                    const std::size_t a = std::max<std::size_t>(tr.starts[i], begin);
                    const std::size_t b =
                        std::min<std::size_t>(i + 1 < tr.starts.size() ? tr.starts[i + 1] : end, end);
                    if (b > a)
                        unknown += static_cast<double>(tr.values[i].unknown_count()) *
                                   static_cast<double>(b - a);
                }
            }
        return total > 0 ? unknown / total : 0.0;
    }

    const trace::RunSet &runs_;
    const trace::ModuleNode &node_;
    const OracleContext &ctx_;
    const SvfOptions &opts_;
    Matrix block_;
    Eigen::Index filled_ = 0;
    std::vector<float> shuffle_max_;
};

} // namespace

SvfResult svf_module(const trace::RunSet &runs, const trace::ModuleNode &node,
                     const OracleTrace &oracle, const SvfOptions &opts) {
    if (runs.size() < 2)
        throw InputError("SVF needs at least 2 runs");
    const auto ctx = make_context(oracle, runs.size(), opts);
    return ModuleScorer(runs, node, ctx, opts).run();
}

std::vector<SvfResult> svf_all(const trace::RunSet &runs, const std::vector<OracleTrace> &oracles,
                               const SvfOptions &opts) {
    if (oracles.empty())
        throw InputError("svf_all needs at least one oracle");
    if (runs.size() < 2)
        throw InputError("SVF needs at least 2 runs");
    std::vector<OracleContext> ctxs;
    ctxs.reserve(oracles.size());
    for (const auto &o : oracles)
        ctxs.push_back(make_context(o, runs.size(), opts));

    std::vector<const trace::ModuleNode *> modules;
    for (const auto *m : runs.hierarchy.flatten())
        if (!m->signals.empty())
            modules.push_back(m);

    const std::size_t tasks = modules.size() * oracles.size();
    std::vector<SvfResult> per_task(tasks);
    parallel_for(tasks, opts.threads, [&](std::size_t t) {
        per_task[t] = ModuleScorer(runs, *modules[t / oracles.size()],
                                   ctxs[t % oracles.size()], opts)
                          .run();
    });

    std::vector<SvfResult> out;
    for (std::size_t m = 0; m < modules.size(); ++m) {
        std::size_t best = m * oracles.size();
        for (std::size_t o = 1; o < oracles.size(); ++o)
            if (per_task[m * oracles.size() + o].svf > per_task[best].svf)
                best = m * oracles.size() + o;
        out.push_back(std::move(per_task[best]));
    }
    std::stable_sort(out.begin(), out.end(), [](const SvfResult &a, const SvfResult &b) {
        if (a.svf != b.svf)
            return a.svf > b.svf;
        return a.module_path < b.module_path;
    });
    return out;
}

std::vector<OracleTrace> read_oracle_csv(const std::string &path, unsigned width) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open oracle file '" + path + "'");
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    struct Row {
        std::size_t run;
        std::string hex;
        std::size_t line;
    };
    std::vector<std::string> order;
    std::map<std::string, std::vector<Row>> rows;
    while (std::getline(in, line)) {
        ++lineno;
        const auto t = trim(line);
        if (t.empty())
            continue;
        const auto cols = split(t, ',');
        if (!header) {
            if (cols.size() != 3 || trim(cols[0]) != "run_index" ||
                trim(cols[1]) != "point_label" || trim(cols[2]) != "value_hex")
                throw ParseError(path + ": expected header 'run_index,point_label,value_hex'",
                                 lineno);
            header = true;
            continue;
        }
        if (cols.size() != 3)
            throw ParseError(path + ": expected 3 columns, got " + std::to_string(cols.size()),
                             lineno);
        Row r;
        try {
            r.run = static_cast<std::size_t>(std::stoull(std::string(trim(cols[0]))));
        } catch (const std::exception &) {
            throw ParseError(path + ": bad run_index '" + std::string(trim(cols[0])) + "'",
                             lineno);
        }
        r.hex = std::string(trim(cols[2]));
        if (r.hex.starts_with("0x") || r.hex.starts_with("0X"))
            r.hex = r.hex.substr(2);
        r.line = lineno;
        const std::string label(trim(cols[1]));
        if (!rows.count(label))
            order.push_back(label);
        rows[label].push_back(std::move(r));
    }
    if (!header)
        throw ParseError(path + ": empty oracle file");

    std::vector<OracleTrace> out;
    for (const auto &label : order) {
        auto &rs = rows[label];
        unsigned w = width;
        if (w == 0)
            for (const auto &r : rs)
                w = std::max<unsigned>(w, static_cast<unsigned>(r.hex.size() * 4));
        OracleTrace o;
        o.label = label;
        o.values.resize(rs.size());
        std::vector<bool> seen(rs.size(), false);
        for (const auto &r : rs) {
            if (r.run >= rs.size() || seen[r.run])
                throw ParseError(path + ": run_index " + std::to_string(r.run) +
                                     " out of range or repeated for label '" + label + "'",
                                 r.line);
            seen[r.run] = true;
            try {
                o.values[r.run] = BitVec::from_hex(r.hex, w);
            } catch (const Error &e) {
                throw ParseError(path + ": " + e.what(), r.line);
            }
        }
        out.push_back(std::move(o));
    }
    return out;
}

void write_oracle_csv(const std::string &path, const std::vector<OracleTrace> &oracles) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write oracle file '" + path + "'");
    out << "run_index,point_label,value_hex\n";
    for (const auto &o : oracles)
        for (std::size_t i = 0; i < o.values.size(); ++i)
            out << i << ',' << o.label << ',' << o.values[i].to_hex() << '\n';
}

} // namespace leakscope::metrics

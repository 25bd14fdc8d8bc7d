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

#include "leakscope/core/error.hpp"
#include "leakscope/metrics/primitives.hpp"
#include "leakscope/metrics/svf.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>

using namespace leakscope;
using namespace leakscope::metrics;
namespace ts = leakscope::testsupport;

namespace {

BitVec bv(unsigned w, std::uint64_t v) { return BitVec::from_uint(w, v); }

double textbook_pearson(const std::vector<double> &x, const std::vector<double> &y) {
    long double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= x.size();
    my /= y.size();
    long double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

/// One-module RunSet (signal "m/w" of `width` bits) from words[run][cycle].
trace::RunSet one_module(const std::vector<std::vector<std::uint64_t>> &words, unsigned width) {
    std::vector<std::vector<std::vector<std::uint64_t>>> v;
    for (const auto &run : words) {
        std::vector<std::vector<std::uint64_t>> cycles;
        for (auto w : run)
            cycles.push_back({w});
        v.push_back(cycles);
    }
    return ts::synth_runset({{"m", "w", width}}, v);
}

const trace::ModuleNode &node_m(const trace::RunSet &rs) { return *rs.hierarchy.find({"m"}); }

SvfOptions no_floor() {
    SvfOptions o;
    o.shuffles = 0;
    return o;
}

} // namespace

TEST(HammingWeight, Examples) {
    EXPECT_EQ(hamming_weight(bv(4, 0b0000)), 0u);
    EXPECT_EQ(hamming_weight(bv(4, 0b1011)), 3u);
    EXPECT_EQ(hamming_weight(bv(16, 0xFFFF)), 16u);
    EXPECT_EQ(hamming_weight(BitVec::from_string("1x1z")), 2u);
}

TEST(HammingDistance, Examples) {
    EXPECT_EQ(hamming_distance(bv(8, 0x5A), bv(8, 0x5A)), 0u);
    EXPECT_EQ(hamming_distance(bv(4, 0b1010), bv(4, 0b0110)), 2u);
    EXPECT_EQ(hamming_distance(bv(8, 0x00), bv(8, 0xFF)), 8u);
    EXPECT_THROW(hamming_distance(bv(8, 0), bv(4, 0)), InputError);
}

TEST(HammingDistance, MetricAxiomsAndBruteForce) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 5000; ++i) {
        const unsigned w = 1 + rng() % 200;
        std::vector<std::uint64_t> a(words_for(w)), b(a.size()), c(a.size());
        for (std::size_t k = 0; k < a.size(); ++k) {
            a[k] = rng();
            b[k] = rng();
            c[k] = rng();
        }
        const auto x = BitVec::from_words(w, a), y = BitVec::from_words(w, b),
                   z = BitVec::from_words(w, c);
        std::size_t brute_hw = 0, brute_hd = 0;
        for (unsigned bit = 0; bit < w; ++bit) {
            brute_hw += (a[bit / 64] >> (bit % 64)) & 1;
            brute_hd += ((a[bit / 64] ^ b[bit / 64]) >> (bit % 64)) & 1;
        }
        EXPECT_EQ(hamming_weight(x), brute_hw);
        EXPECT_EQ(hamming_distance(x, y), brute_hd);
        EXPECT_EQ(hamming_distance(x, x), 0u);
        EXPECT_EQ(hamming_distance(x, y), hamming_distance(y, x));
        EXPECT_LE(hamming_distance(x, z), hamming_distance(x, y) + hamming_distance(y, z));
    }
}

TEST(PairwiseDistances, CanonicalOrder) {
    const std::vector<BitVec> items{bv(2, 0b00), bv(2, 0b11), bv(2, 0b01)};
    // Pairs (1,0), (2,0), (2,1).
    EXPECT_EQ(pairwise_distances(items), (DistanceVector{2, 1, 1}));
    EXPECT_EQ(pair_index(3, 1, 0), 0u);
    EXPECT_EQ(pair_index(3, 2, 0), 1u);
    EXPECT_EQ(pair_index(3, 2, 1), 2u);
}

TEST(PairwiseDistances, IdenticalItemsAndErrors) {
    const std::vector<BitVec> same(6, bv(8, 0x3C));
    const auto d = pairwise_distances(same);
    EXPECT_EQ(d.size(), pair_count(6));
    EXPECT_TRUE(std::all_of(d.begin(), d.end(), [](auto v) { return v == 0; }));
    const std::vector<BitVec> one{bv(8, 1)};
    EXPECT_THROW(pairwise_distances(one), InputError);
}

TEST(PairwiseDistances, MatchesDoubleLoop) {
    std::mt19937_64 rng(5);
    std::vector<BitVec> items;
    std::vector<std::uint32_t> raw;
    for (int i = 0; i < 10; ++i) {
        raw.push_back(static_cast<std::uint32_t>(rng()));
        items.push_back(bv(32, raw.back()));
    }
    DistanceVector want;
    for (std::size_t j = 0; j < 10; ++j)
        for (std::size_t i = j + 1; i < 10; ++i)
            want.push_back(static_cast<std::uint32_t>(std::popcount(raw[i] ^ raw[j])));
    EXPECT_EQ(pairwise_distances(items), want);
}

TEST(Pearson, Examples) {
    const std::vector<double> x{1, 2, 3, 5, 8};
    std::vector<double> y;
    for (double v : x)
        y.push_back(-2 * v + 7);
    EXPECT_DOUBLE_EQ(*pearson(x, x), 1.0);
    EXPECT_DOUBLE_EQ(*pearson(x, y), -1.0);
}

TEST(Pearson, DegenerateAndErrors) {
    const std::vector<double> x{1, 2, 3}, c{4, 4, 4}, shorter{1, 2};
    EXPECT_FALSE(pearson(x, c).has_value());
    EXPECT_THROW(pearson(x, shorter), InputError);
    const std::vector<double> one{1};
    EXPECT_THROW(pearson(one, one), InputError);
}

TEST(Pearson, MatchesTwoPassOracleAndInvariants) {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> n01;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> x(1000), y(1000);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = n01(rng) * 5 + 100;
            y[i] = 0.3 * x[i] + n01(rng);
        }
        const double r = *pearson(x, y);
        EXPECT_NEAR(r, textbook_pearson(x, y), 1e-12);
        EXPECT_LE(std::fabs(r), 1.0);
        std::vector<double> xs(x.size());
        for (std::size_t i = 0; i < x.size(); ++i)
            xs[i] = 3.5 * x[i] - 1000;
        EXPECT_NEAR(*pearson(xs, y), r, 1e-9);
    }
}

TEST(Pearson, ExactIntegerFormulaAgreesWithDouble) {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::uint32_t> a(300), b(300);
        std::vector<double> da(300), db(300);
        for (std::size_t i = 0; i < a.size(); ++i) {
            a[i] = rng() % 64;
            b[i] = (a[i] + rng() % 32) % 64;
            da[i] = a[i];
            db[i] = b[i];
        }
        EXPECT_NEAR(*pearson_exact(a, b), textbook_pearson(da, db), 1e-12);
    }
    const std::vector<std::uint32_t> c(10, 7), d{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    EXPECT_FALSE(pearson_exact(c, d).has_value());
}

TEST(WelchT, Examples) {
    const std::vector<double> a{1, 2, 3, 4, 5};
    EXPECT_DOUBLE_EQ(*welch_t(a, a), 0.0);
    const std::vector<double> lo{1e-6, -1e-6, 1e-6, -1e-6}, hi{1 + 1e-6, 1 - 1e-6, 1 + 1e-6, 1 - 1e-6};
    EXPECT_GT(std::fabs(*welch_t(lo, hi)), 1e5);
    const std::vector<double> c0{0, 0}, c1{1, 1}, single{1};
    EXPECT_FALSE(welch_t(c0, c1).has_value());
    EXPECT_THROW(welch_t(single, a), InputError);
}

TEST(WelchT, HandComputed) {
    // means 2 and 6, variances 2.5 and 10, n = 5: t = -4 / sqrt(0.5 + 2) = -2.5298.
    const std::vector<double> a{0, 1, 2, 3, 4}, b{2, 4, 6, 8, 10};
    EXPECT_NEAR(*welch_t(a, b), -4.0 / std::sqrt(2.5), 1e-12);
}

TEST(WelchT, NullDistributionRarelyExceedsThreshold) {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> n01;
    int below = 0;
    const int trials = 200;
    for (int t = 0; t < trials; ++t) {
        std::vector<double> a(10000), b(10000);
        for (auto &v : a)
            v = n01(rng);
        for (auto &v : b)
            v = n01(rng);
        below += std::fabs(*welch_t(a, b)) < 4.5;
    }
    EXPECT_GE(below, trials * 99 / 100);
}

TEST(TtestMatrix, IdenticalClasses) {
    const std::vector<double> a{1, 2, 3};
    const auto m = pairwise_ttest_matrix({a, a});
    EXPECT_EQ(m, (std::vector<std::vector<double>>{{0, 0}, {0, 0}}));
}

TEST(TtestMatrix, MonotoneInMeanGap) {
    std::vector<std::vector<double>> classes;
    for (double mean : {0.0, 10.0, 20.0})
        classes.push_back({mean - 1e-3, mean + 1e-3, mean - 2e-3, mean + 2e-3});
    const auto m = pairwise_ttest_matrix(classes);
    EXPECT_EQ(m[0][1], m[1][0]);
    EXPECT_EQ(m[2][2], 0.0);
    EXPECT_LT(m[0][1], m[0][2]);
    EXPECT_NEAR(m[0][1], m[1][2], 1e-6 * m[0][1]);
}

TEST(TtestMatrix, DegeneratePairs) {
    const auto m = pairwise_ttest_matrix({{1, 1}, {1, 1}, {2, 2}});
    EXPECT_EQ(m[0][1], 0.0);
    EXPECT_TRUE(std::isinf(m[0][2]));
    EXPECT_THROW(pairwise_ttest_matrix({{1, 2}}), InputError);
    EXPECT_THROW(pairwise_ttest_matrix({{1, 2}, {1}}), InputError);
}

TEST(Svf, SideChannelEqualsOracle) {
    std::mt19937_64 rng(1);
    std::vector<std::uint64_t> oracle(20);
    for (auto &v : oracle)
        v = rng() & 0xFF;
    std::vector<std::vector<std::uint64_t>> words;
    for (auto v : oracle)
        words.push_back({rng() & 0xFF, v, rng() & 0xFF});
    const auto rs = one_module(words, 8);
    const auto r = svf_module(rs, node_m(rs), ts::make_oracle(oracle, 8), no_floor());
    EXPECT_NEAR(r.svf, 1.0, 1e-9);
    EXPECT_EQ(r.peak_cycle, 2u);
    ASSERT_EQ(r.per_cycle_scores.size(), 3u);
    EXPECT_EQ(r.svf, *std::max_element(r.per_cycle_scores.begin(), r.per_cycle_scores.end()));
}

TEST(Svf, ConstantSideChannelScoresZero) {
    std::vector<std::vector<std::uint64_t>> words(10, {0x42, 0x42});
    std::vector<std::uint64_t> oracle{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    const auto rs = one_module(words, 8);
    const auto r = svf_module(rs, node_m(rs), ts::make_oracle(oracle, 8));
    EXPECT_EQ(r.svf, 0.0);
    EXPECT_EQ(r.noise_floor, 0.0);
}

TEST(Svf, MatchesNaiveReferenceExactly) {
    std::mt19937_64 rng(21);
    for (int inst = 0; inst < 100; ++inst) {
        const std::size_t n = 2 + rng() % 11, d = 1 + rng() % 8;
        const unsigned width = 1 + rng() % 16;
        const std::uint64_t mask = (1ULL << width) - 1;
        std::vector<std::vector<std::uint64_t>> words(n, std::vector<std::uint64_t>(d));
        std::vector<std::uint64_t> oracle(n);
        for (std::size_t i = 0; i < n; ++i) {
            oracle[i] = rng() & 0xFF;
            for (auto &w : words[i])
                w = (rng() % 3 == 0 ? oracle[i] : rng()) & mask;
        }
        const auto rs = one_module(words, width);
        const auto r = svf_module(rs, node_m(rs), ts::make_oracle(oracle, 8), no_floor());
        EXPECT_EQ(r.svf, ts::naive_svf(words, oracle)) << "instance " << inst;
    }
}

TEST(Svf, InvariantUnderJointPermutation) {
    std::mt19937_64 rng(23);
    const std::size_t n = 12;
    std::vector<std::vector<std::uint64_t>> words(n, std::vector<std::uint64_t>(4));
    std::vector<std::uint64_t> oracle(n);
    for (std::size_t i = 0; i < n; ++i) {
        oracle[i] = rng() & 0xFF;
        for (auto &w : words[i])
            w = (oracle[i] ^ (rng() & 0x11)) & 0xFF;
    }
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    auto pw = words;
    auto po = oracle;
    for (std::size_t i = 0; i < n; ++i) {
        pw[i] = words[perm[i]];
        po[i] = oracle[perm[i]];
    }
    const auto a = one_module(words, 8), b = one_module(pw, 8);
    const auto ra = svf_module(a, node_m(a), ts::make_oracle(oracle, 8), no_floor());
    const auto rb = svf_module(b, node_m(b), ts::make_oracle(po, 8), no_floor());
    EXPECT_EQ(ra.svf, rb.svf);
    EXPECT_EQ(ra.per_cycle_scores, rb.per_cycle_scores);
}

TEST(Svf, InvariantUnderBitOrderPermutation) {
    std::mt19937_64 rng(29);
    const std::size_t n = 12;
    std::vector<std::vector<std::uint64_t>> words(n, std::vector<std::uint64_t>(3)), rev = words;
    std::vector<std::uint64_t> oracle(n);
    auto reverse8 = [](std::uint64_t v) {
        std::uint64_t r = 0;
        for (int b = 0; b < 8; ++b)
            r |= ((v >> b) & 1) << (7 - b);
        return r;
    };
    for (std::size_t i = 0; i < n; ++i) {
        oracle[i] = rng() & 0xFF;
        for (std::size_t c = 0; c < 3; ++c) {
            words[i][c] = (oracle[i] ^ (rng() & 0x81)) & 0xFF;
            rev[i][c] = reverse8(words[i][c]);
        }
    }
    const auto a = one_module(words, 8), b = one_module(rev, 8);
    EXPECT_EQ(svf_module(a, node_m(a), ts::make_oracle(oracle, 8), no_floor()).per_cycle_scores,
              svf_module(b, node_m(b), ts::make_oracle(oracle, 8), no_floor()).per_cycle_scores);
}

TEST(Svf, IndependentRunSetStaysBelowPermutationFloor) {
    std::mt19937_64 rng(31);
    const std::size_t n = 40;
    std::vector<std::vector<std::uint64_t>> words(n, std::vector<std::uint64_t>(1));
    std::vector<std::uint64_t> oracle(n);
    for (std::size_t i = 0; i < n; ++i) {
        oracle[i] = rng() & 0xFF;
        words[i][0] = rng() & 0xFFFF;
    }
    const auto rs = one_module(words, 16);
    SvfOptions o;
    o.shuffles = 1000;
    o.seed = 4;
    const auto r = svf_module(rs, node_m(rs), ts::make_oracle(oracle, 8), o);
    EXPECT_GT(r.noise_floor, 0.0);
    EXPECT_LT(r.svf, r.noise_floor);
}

TEST(Svf, WindowAndXzRatio) {
    std::vector<std::vector<std::uint64_t>> words;
    std::vector<std::uint64_t> oracle;
    for (std::uint64_t i = 0; i < 8; ++i) {
        words.push_back({0, i * 37 & 0xFF, 0});
        oracle.push_back(i * 37 & 0xFF);
    }
    const auto rs = one_module(words, 8);
    SvfOptions o = no_floor();
    o.window_start = 2;
    EXPECT_EQ(svf_module(rs, node_m(rs), ts::make_oracle(oracle, 8), o).svf, 0.0);
    o.window_start = 1;
    o.window_end = 2;
    const auto r = svf_module(rs, node_m(rs), ts::make_oracle(oracle, 8), o);
    EXPECT_NEAR(r.svf, 1.0, 1e-12);
    EXPECT_EQ(r.peak_cycle, 2u);
    EXPECT_EQ(r.xz_ratio, 0.0);
    o.window_start = 5;
    o.window_end = 4;
    EXPECT_THROW(svf_module(rs, node_m(rs), ts::make_oracle(oracle, 8), o), InputError);
}

TEST(Svf, OracleLengthMismatch) {
    const auto rs = one_module({{1}, {2}, {3}}, 8);
    EXPECT_THROW(svf_module(rs, node_m(rs), ts::make_oracle({1, 2}, 8)), InputError);
}

TEST(SvfAll, SingleModuleEqualsSvfModule) {
    std::vector<std::vector<std::uint64_t>> words;
    std::vector<std::uint64_t> oracle;
    std::mt19937_64 rng(37);
    for (int i = 0; i < 15; ++i) {
        oracle.push_back(rng() & 0xFF);
        words.push_back({rng() & 0xFF, (oracle.back() ^ (rng() & 3)) & 0xFF});
    }
    const auto rs = one_module(words, 8);
    // The synthetic design also holds the clock module "top".
    const auto all = svf_all(rs, {ts::make_oracle(oracle, 8)}, no_floor());
    const auto one = svf_module(rs, node_m(rs), ts::make_oracle(oracle, 8), no_floor());
    const auto it = std::find_if(all.begin(), all.end(),
                                 [](const SvfResult &r) { return r.module_path.back() == "m"; });
    ASSERT_NE(it, all.end());
    EXPECT_EQ(it->svf, one.svf);
    EXPECT_EQ(it->peak_cycle, one.peak_cycle);
}

TEST(SvfAll, CarrierRanksFirstAndMaxOverOracles) {
    std::mt19937_64 rng(41);
    std::vector<std::vector<std::vector<std::uint64_t>>> runs;
    std::vector<std::uint64_t> oracle, other;
    for (int i = 0; i < 20; ++i) {
        oracle.push_back(rng() & 0xFF);
        other.push_back(rng() & 0xFF);
        runs.push_back({{oracle.back(), 7}, {oracle.back(), 7}});
    }
    const auto rs = ts::synth_runset({{"carrier", "v", 8}, {"quiet", "v", 8}}, runs);
    const auto all = svf_all(rs, {ts::make_oracle(other, 8), ts::make_oracle(oracle, 8)}, no_floor());
    ASSERT_GE(all.size(), 2u);
    EXPECT_EQ(all[0].module_path.back(), "carrier");
    EXPECT_NEAR(all[0].svf, 1.0, 1e-12);
    EXPECT_EQ(all.back().svf, 0.0);
    for (std::size_t i = 1; i < all.size(); ++i)
        EXPECT_GE(all[i - 1].svf, all[i].svf);
    EXPECT_THROW(svf_all(rs, {}, no_floor()), InputError);
}

TEST(SvfAll, ThreadCountDoesNotChangeResults) {
    std::mt19937_64 rng(43);
    std::vector<std::vector<std::vector<std::uint64_t>>> runs;
    std::vector<std::uint64_t> oracle;
    for (int i = 0; i < 25; ++i) {
        oracle.push_back(rng() & 0xFF);
        std::vector<std::vector<std::uint64_t>> cyc;
        for (int c = 0; c < 6; ++c)
            cyc.push_back({(oracle.back() ^ rng()) & 0xFF, rng() & 0xFFF, oracle.back()});
        runs.push_back(cyc);
    }
    const auto rs = ts::synth_runset({{"a", "v", 8}, {"b", "v", 12}, {"b/c", "v", 8}}, runs);
    SvfOptions o;
    o.shuffles = 200;
    o.threads = 1;
    const auto r1 = svf_all(rs, {ts::make_oracle(oracle, 8)}, o);
    o.threads = 4;
    const auto r4 = svf_all(rs, {ts::make_oracle(oracle, 8)}, o);
    ASSERT_EQ(r1.size(), r4.size());
    for (std::size_t i = 0; i < r1.size(); ++i) {
        EXPECT_EQ(r1[i].module_path, r4[i].module_path);
        EXPECT_EQ(r1[i].svf, r4[i].svf);
        EXPECT_EQ(r1[i].noise_floor, r4[i].noise_floor);
    }
}

TEST(OracleCsv, RoundTripAndMultipleLabels) {
    ts::TempDir dir;
    OracleTrace a{"sbox_out_byte0", {bv(8, 0x63), bv(8, 0x7c)}};
    OracleTrace b{"wide", {bv(12, 0xabc), bv(12, 0x001)}};
    write_oracle_csv(dir.file("o.csv"), {a, b});
    const auto back = read_oracle_csv(dir.file("o.csv"));
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[0].label, a.label);
    EXPECT_EQ(back[0].values, a.values);
    EXPECT_EQ(back[1].values, b.values);
}

TEST(OracleCsv, UnsortedRowsAndErrors) {
    ts::TempDir dir;
    ts::write_file(dir.file("o.csv"), "run_index,point_label,value_hex\n1,p,0a\n0,p,05\n");
    const auto o = read_oracle_csv(dir.file("o.csv"));
    EXPECT_EQ(o[0].values[0].to_uint64(), 5u);
    ts::write_file(dir.file("bad.csv"), "run_index,point_label,value_hex\n0,p,05\n2,p,07\n");
    EXPECT_THROW(read_oracle_csv(dir.file("bad.csv")), ParseError);
    ts::write_file(dir.file("hdr.csv"), "run,label,value\n0,p,05\n");
    EXPECT_THROW(read_oracle_csv(dir.file("hdr.csv")), ParseError);
    ts::write_file(dir.file("cols.csv"), "run_index,point_label,value_hex\n0,p\n");
    try {
        read_oracle_csv(dir.file("cols.csv"));
        FAIL();
    } catch (const ParseError &e) {
        EXPECT_EQ(e.line(), 2u);
    }
}

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
#include "leakscope/trace/runset.hpp"
#include "leakscope/trace/vcd.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace leakscope;
namespace ts = leakscope::testsupport;
using namespace leakscope::trace;
using leakscope::testsupport::SynthSignal;

namespace {

const char *kMinimal = R"($timescale 1ns $end
$scope module top $end
$var wire 1 ! clk $end
$upscope $end
$enddefinitions $end
#0
0!
#10
1!
)";

} // namespace

TEST(ParseVcd, MinimalDump) {
    const auto d = parse_vcd(kMinimal);
    ASSERT_EQ(d.declarations.size(), 1u);
    EXPECT_EQ(d.changes.size(), 2u);
    EXPECT_EQ(d.changes[0].time, 0u);
    EXPECT_EQ(d.changes[1].time, 10u);
    EXPECT_EQ(d.timescale, "1ns");
    EXPECT_EQ(d.declarations[0].scope_path, std::vector<std::string>{"top"});
}

TEST(ParseVcd, NestedScopes) {
    const auto d = parse_vcd(R"($scope module a $end $scope module b $end $scope module c $end
$var reg 4 # v $end $upscope $end $upscope $end $upscope $end $enddefinitions $end
#0 b1010 #
)");
    EXPECT_EQ(d.root.depth(), 4u); // unnamed root + a/b/c
    const std::vector<std::string> path{"a", "b", "c"};
    EXPECT_EQ(d.declarations[0].scope_path, path);
    const auto *c = d.root.find(path);
    ASSERT_NE(c, nullptr);
    EXPECT_EQ(c->signals.size(), 1u);
    EXPECT_EQ(d.declarations[0].full_name(), "a/b/c/v");
    EXPECT_TRUE(d.declarations[0].is_reg);
}

TEST(ParseVcd, PreservesUnknownBitsAndPadsVectors) {
    const auto d = parse_vcd(R"($scope module m $end $var wire 8 % bus $end $upscope $end
$enddefinitions $end
#0 bx1 %
#5 bz %
#6 b101 %
)");
    ASSERT_EQ(d.changes.size(), 3u);
    EXPECT_EQ(d.changes[0].value.to_string(), "xxxxxxx1");
    EXPECT_EQ(d.changes[1].value.to_string(), "zzzzzzzz");
    EXPECT_EQ(d.changes[2].value.to_string(), "00000101");
}

TEST(ParseVcd, IgnoresRealAndEventVars) {
    const auto d = parse_vcd(R"($scope module m $end $var real 64 r temp $end
$var event 1 e ev $end $var wire 1 ! clk $end $upscope $end $enddefinitions $end
#0 r1.5 r 0!
)");
    EXPECT_EQ(d.declarations.size(), 1u);
    EXPECT_EQ(d.changes.size(), 1u);
}

TEST(ParseVcd, AliasedCodesShareValues) {
    const auto d = parse_vcd(R"($scope module a $end $var wire 1 ! x $end $upscope $end
$scope module b $end $var wire 1 ! y $end $upscope $end $enddefinitions $end
#0 1!
)");
    ASSERT_EQ(d.declarations.size(), 2u);
    EXPECT_EQ(d.declarations[0].code, d.declarations[1].code);
    EXPECT_EQ(d.codes.size(), 1u);
}

TEST(ParseVcd, MalformedHeaderReportsLine) {
    try {
        parse_vcd("$scope module a $end\n$var wire 1 ! $end\n");
        FAIL();
    } catch (const ParseError &e) {
        EXPECT_EQ(e.line(), 2u);
        EXPECT_NE(std::string(e.what()).find("$var"), std::string::npos);
    }
}

TEST(ParseVcd, UndeclaredCodeIsAnError) {
    try {
        parse_vcd(std::string(kMinimal) + "#20\n1?\n");
        FAIL();
    } catch (const ParseError &e) {
        EXPECT_NE(std::string(e.what()).find("undeclared id code '?'"), std::string::npos);
        EXPECT_EQ(e.line(), 11u);
    }
}

TEST(ParseVcd, TruncatedStreamNamesLastTimestamp) {
    try {
        parse_vcd(std::string(kMinimal) + "#20\n$dumpall\n1!\n");
        FAIL();
    } catch (const ParseError &e) {
        EXPECT_NE(std::string(e.what()).find("last good timestamp #20"), std::string::npos)
            << e.what();
    }
    EXPECT_THROW(parse_vcd("$scope module a $end\n$var wire 1 ! clk"), ParseError);
    EXPECT_THROW(parse_vcd("$scope module a $end\n"), ParseError);
}

TEST(ParseVcd, RejectsBackwardsTimeAndWideValues) {
    EXPECT_THROW(parse_vcd(std::string(kMinimal) + "#5\n0!\n"), ParseError);
    EXPECT_THROW(parse_vcd(std::string(kMinimal) + "#20\nb11 !\n"), ParseError);
    EXPECT_THROW(parse_vcd("$scope module a $end $var wire 1 ! c $end $enddefinitions $end"),
                 ParseError);
}

TEST(ParseVcd, Deterministic) {
    const auto a = parse_vcd(kMinimal), b = parse_vcd(kMinimal);
    ASSERT_EQ(a.changes.size(), b.changes.size());
    for (std::size_t i = 0; i < a.changes.size(); ++i) {
        EXPECT_EQ(a.changes[i].time, b.changes[i].time);
        EXPECT_EQ(a.changes[i].value, b.changes[i].value);
    }
}

TEST(Resample, ConstantHoldsOverEdges) {
    const std::vector<SynthSignal> sig{{"m", "v", 1}};
    const auto m = resample_per_cycle(
        parse_vcd(ts::synth_vcd(sig, {{1}, {1}, {1}, {1}, {1}})), "clk");
    ASSERT_EQ(m.cycles, 5u);
    for (std::size_t c = 0; c < 5; ++c)
        EXPECT_EQ(m.value(1, c).to_uint64(), 1u);
    EXPECT_EQ(m.cycle_period, 10u);
}

TEST(Resample, SampleAndHoldBetweenEdges) {
    // Edges at 5, 15, 25, 35, 45; the change at t=20 lands between edges 2 and 3.
    const auto m = resample_per_cycle(parse_vcd(R"($scope module t $end
$var wire 1 ! clk $end $var reg 4 " v $end $upscope $end $enddefinitions $end
#0 0! b0011 "
#5 1! #10 0! #15 1!
#20 0! b1100 "
#25 1! #30 0! #35 1! #40 0! #45 1!
)"),
                                       "clk");
    ASSERT_EQ(m.cycles, 5u);
    const std::vector<std::uint64_t> want{3, 3, 12, 12, 12};
    for (std::size_t c = 0; c < 5; ++c)
        EXPECT_EQ(m.value(1, c).to_uint64(), want[c]) << "cycle " << c;
}

TEST(Resample, ChangeAtEdgeTimeIsVisible) {
    const auto m = resample_per_cycle(parse_vcd(R"($scope module t $end
$var wire 1 ! clk $end $var reg 4 " v $end $upscope $end $enddefinitions $end
#0 0! b0001 "
#5 1! b0010 "
)"),
                                       "clk");
    EXPECT_EQ(m.value(1, 0).to_uint64(), 2u);
}

TEST(Resample, UnwrittenSignalReadsX) {
    const auto m = resample_per_cycle(parse_vcd(R"($scope module t $end
$var wire 1 ! clk $end $var reg 2 " v $end $upscope $end $enddefinitions $end
#5 1!
)"),
                                       "clk");
    EXPECT_EQ(m.value(1, 0).to_string(), "xx");
}

TEST(Resample, ClockErrors) {
    EXPECT_THROW(resample_per_cycle(parse_vcd(kMinimal), "nope"), InputError);
    const auto no_edges = parse_vcd(R"($scope module t $end $var wire 1 ! clk $end $upscope $end
$enddefinitions $end #0 0!
)");
    EXPECT_THROW(resample_per_cycle(no_edges, "clk"), InputError);
    const auto wide = parse_vcd(R"($scope module t $end $var wire 2 ! clk $end $upscope $end
$enddefinitions $end #0 b01 !
)");
    EXPECT_THROW(resample_per_cycle(wide, "clk"), InputError);
}

TEST(Resample, AmbiguousClockNeedsScopedPath) {
    const auto d = parse_vcd(R"($scope module a $end $var wire 1 ! clk $end $upscope $end
$scope module b $end $var wire 1 " clk $end $upscope $end $enddefinitions $end
#0 0! 0" #5 1! #10 0! 1"
)");
    EXPECT_THROW(resample_per_cycle(d, "clk"), InputError);
    EXPECT_EQ(resample_per_cycle(d, "a/clk").cycles, 1u);
    EXPECT_EQ(resample_per_cycle(d, "a.clk").cycles, 1u);
}

TEST(ModuleWords, TwoNibblesConcatenate) {
    const std::vector<SynthSignal> sig{{"m", "a", 4}, {"m", "b", 4}};
    const auto m = resample_per_cycle(parse_vcd(ts::synth_vcd(sig, {{0b1010, 0b0110}})), "clk");
    const auto *node = m.hierarchy.find({"m"});
    ASSERT_NE(node, nullptr);
    const auto words = module_word_series(m, *node);
    ASSERT_EQ(words.size(), 1u);
    EXPECT_EQ(words[0].width(), 8u);
    EXPECT_EQ(words[0].to_uint64(), 0b10100110u);
}

TEST(ModuleWords, SingleSignalIsIdentity) {
    const std::vector<SynthSignal> sig{{"m", "a", 12}};
    const auto m = resample_per_cycle(parse_vcd(ts::synth_vcd(sig, {{0xabc}, {0x123}})), "clk");
    const auto words = module_word_series(m, *m.hierarchy.find({"m"}));
    EXPECT_EQ(words[1].to_uint64(), 0x123u);
}

TEST(ModuleWords, WidthsAdd) {
    const std::vector<SynthSignal> sig{{"m", "a", 32}, {"m", "b", 32}, {"m", "c", 32}};
    const auto m = resample_per_cycle(parse_vcd(ts::synth_vcd(sig, {{1, 2, 3}})), "clk");
    const auto *node = m.hierarchy.find({"m"});
    EXPECT_EQ(module_word_series(m, *node)[0].width(), 96u);
    EXPECT_EQ(module_word_width(m.signals, *node), 96u);
}

TEST(ModuleWords, ExcludesSubmodulesAndRejectsEmptyNodes) {
    const std::vector<SynthSignal> sig{{"m", "a", 4}, {"m/sub", "b", 8}, {"e/leaf", "c", 2}};
    const auto m =
        resample_per_cycle(parse_vcd(ts::synth_vcd(sig, {{1, 2, 3}})), "clk");
    EXPECT_EQ(module_word_series(m, *m.hierarchy.find({"m"}))[0].width(), 4u);
    EXPECT_THROW(module_word_series(m, *m.hierarchy.find({"e"})), InputError);
}

TEST(ModuleWords, FuzzedHierarchyWidthAdditivity) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<SynthSignal> sig;
        const int n = 1 + static_cast<int>(rng() % 12);
        for (int i = 0; i < n; ++i) {
            std::string scope = "m" + std::to_string(rng() % 3);
            if (rng() % 2)
                scope += "/s" + std::to_string(rng() % 2);
            sig.push_back({scope, "v" + std::to_string(i), 1 + static_cast<unsigned>(rng() % 70)});
        }
        std::vector<std::uint64_t> row(sig.size(), 0);
        const auto m = resample_per_cycle(parse_vcd(ts::synth_vcd(sig, {row})), "clk");
        for (const auto *node : m.hierarchy.flatten()) {
            if (node->signals.empty() || node->name == "top")
                continue;
            unsigned want = 0;
            for (const auto &s : sig) {
                std::string p;
                for (std::size_t k = 0; k < node->path.size(); ++k)
                    p += (k ? "/" : "") + node->path[k];
                if (s.scope == p)
                    want += s.width;
            }
            EXPECT_EQ(module_word_series(m, *node)[0].width(), want);
        }
    }
}

TEST(RunSet, TwoIdenticalDumps) {
    const std::vector<SynthSignal> sig{{"m", "a", 8}};
    const auto rs = ts::synth_runset(sig, {{{1}, {2}}, {{1}, {2}}});
    EXPECT_EQ(rs.size(), 2u);
    EXPECT_EQ(rs.cycles, 2u);
    EXPECT_EQ(rs.module_words(0, *rs.hierarchy.find({"m"})),
              rs.module_words(1, *rs.hierarchy.find({"m"})));
}

TEST(RunSet, AlignmentPolicies) {
    const std::vector<SynthSignal> sig{{"m", "a", 8}};
    std::vector<std::vector<std::uint64_t>> a(100, {1}), b(98, {2});
    auto mats = [&] {
        std::vector<CycleMatrix> v;
        v.push_back(resample_per_cycle(parse_vcd(ts::synth_vcd(sig, a)), "clk"));
        v.push_back(resample_per_cycle(parse_vcd(ts::synth_vcd(sig, b)), "clk"));
        return v;
    };
    EXPECT_EQ(make_run_set(mats(), {}, Alignment::TruncateToMin).cycles, 98u);
    EXPECT_THROW(make_run_set(mats(), {}, Alignment::ErrorOnMismatch), InputError);
}

TEST(RunSet, HierarchyMismatchAndTooFewRuns) {
    std::vector<CycleMatrix> v;
    v.push_back(resample_per_cycle(parse_vcd(ts::synth_vcd({{"m", "a", 8}}, {{1}})), "clk"));
    EXPECT_THROW(make_run_set(v, {}, Alignment::TruncateToMin), InputError);
    v.push_back(resample_per_cycle(parse_vcd(ts::synth_vcd({{"m", "b", 8}}, {{1}})), "clk"));
    EXPECT_THROW(make_run_set(v, {}, Alignment::TruncateToMin), InputError);
}

TEST(RunSet, ManifestLoadsRelativePathsAndLabels) {
    ts::TempDir dir;
    const std::vector<SynthSignal> sig{{"m", "a", 8}};
    std::filesystem::create_directories(dir.path() / "v");
    ts::write_file(dir.file("v/r0.vcd"), ts::synth_vcd(sig, {{1}, {2}, {3}}));
    ts::write_file(dir.file("v/r1.vcd"), ts::synth_vcd(sig, {{4}, {5}, {6}}));
    ts::write_file(dir.file("runs.txt"), "# runs\nv/r0.vcd first\nv/r1.vcd\n");
    const auto rs = load_run_set_manifest(dir.file("runs.txt"), "clk", Alignment::ErrorOnMismatch, 2);
    ASSERT_EQ(rs.size(), 2u);
    EXPECT_EQ(rs.runs[0].label, "first");
    EXPECT_EQ(rs.value(1, 1, 2).to_uint64(), 6u);

    ts::write_file(dir.file("bad.txt"), "v/r0.vcd a b\n");
    EXPECT_THROW(read_run_manifest(dir.file("bad.txt")), ParseError);
    ts::write_file(dir.file("one.txt"), "v/r0.vcd\n");
    EXPECT_THROW(load_run_set_manifest(dir.file("one.txt"), "clk", Alignment::TruncateToMin),
                 InputError);
}

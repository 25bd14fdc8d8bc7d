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

#include "leakscope/cli/cli.hpp"
#include "leakscope/core/error.hpp"
#include "leakscope/core/util.hpp"
#include "leakscope/dpa/cpa.hpp"
#include "leakscope/metrics/svf.hpp"
#include "leakscope/report/report.hpp"
#include "leakscope/sim/power_io.hpp"
#include "leakscope/sim/workloads.hpp"
#include "leakscope/trace/runset.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace leakscope::cli {

namespace fs = std::filesystem;

namespace {

struct Globals {
    std::optional<std::uint64_t> seed;
    std::string config;
    std::string out = ".";
    unsigned threads = 0;
    std::vector<std::string> overrides;
};

class UsageError : public Error {
  public:
    using Error::Error;
};

void write_file(const fs::path &path, const std::string &text) {
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw Error("cannot write '" + path.string() + "'");
    f << text;
    if (!f)
        throw Error("error writing '" + path.string() + "'");
}

fs::path ensure_dir(const std::string &dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw Error("cannot create output directory '" + dir + "'");
    return fs::path(dir);
}

sim::SimConfig resolve_config(const Globals &g, const report::EnvLookup &env,
                              report::ConfigBuilder &b) {
    if (!g.config.empty())
        b.load_file(g.config);
    b.apply_env(env);
    for (const auto &kv : g.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw UsageError("--set: expected key=value, got '" + kv + "'");
        b.set(std::string(trim(kv.substr(0, eq))), kv.substr(eq + 1), "--set");
    }
    auto cfg = b.config();
    if (g.seed)
        cfg.seed = *g.seed;
    return cfg;
}

std::pair<std::size_t, std::size_t> parse_window(const std::string &w) {
    if (w.empty())
        return {0, 0};
    const auto colon = w.find(':');
    if (colon == std::string::npos)
        throw UsageError("--window: expected START:END, got '" + w + "'");
    try {
        const auto a = std::stoull(w.substr(0, colon));
        const auto b = std::stoull(w.substr(colon + 1));
        if (b <= a)
            throw UsageError("--window: END must exceed START");
        return {a, b};
    } catch (const std::logic_error &) {
        throw UsageError("--window: expected START:END, got '" + w + "'");
    }
}

Block parse_key(const std::string &hex, const std::string &flag) {
    try {
        return parse_block(hex);
    } catch (const ParseError &e) {
        throw UsageError(flag + ": " + e.what());
    }
}

// ---- simulate ------------------------------------------------------------

struct SimulateArgs {
    std::string workload = "aes";
    std::string plaintexts;
    std::string key;
    bool vcd = false;
    std::size_t stop_cycle = 0;
    unsigned oracle_byte = 0;
    std::size_t runs_per_class = 2000;
};

nlohmann::ordered_json epochs_json(const sim::SimConfig &cfg, std::size_t runs) {
    auto arr = nlohmann::ordered_json::array();
    if (cfg.mode != sim::Mode::Param || runs == 0)
        return arr;
    const std::size_t n_epochs = sim::run_epoch(cfg, runs - 1);
    const auto keys = sim::epoch_keys(cfg, n_epochs);
    for (std::size_t e = 1; e <= n_epochs; ++e) {
        const std::size_t first = cfg.rekey_interval_runs ? (e - 1) * cfg.rekey_interval_runs : 0;
        const std::size_t last =
            cfg.rekey_interval_runs ? std::min(runs, e * cfg.rekey_interval_runs) - 1 : runs - 1;
        nlohmann::ordered_json j;
        j["epoch"] = e;
        j["first_run"] = first;
        j["last_run"] = last;
        std::vector<std::string> k;
        for (auto v : keys[e - 1].keys)
            k.push_back(hex_u64(v, 4));
        j["round_keys"] = k;
        arr.push_back(std::move(j));
    }
    return arr;
}

int cmd_simulate(const Globals &g, const SimulateArgs &a, const report::EnvLookup &env,
                 std::ostream &out) {
    report::ConfigBuilder b;
    const auto cfg = resolve_config(g, env, b);
    cfg.validate();
    const auto threads = resolve_threads(g.threads);

    nlohmann::ordered_json m;
    m["tool"] = "leakscope";
    m["version"] = std::string(report::tool_version());
    m["command"] = "simulate";
    m["seed"] = cfg.seed;
    m["config"] = report::config_json(cfg);
    if (!b.affine_source().empty())
        m["config"]["affine_spec_source"] = b.affine_source();
    m["workload"] = a.workload;
    nlohmann::ordered_json outputs;

    if (a.workload == "aes") {
        if (a.plaintexts.empty())
            throw UsageError("simulate: --plaintexts is required for the aes workload");
        if (a.key.empty())
            throw UsageError("simulate: --key is required for the aes workload");
        const Block key = parse_key(a.key, "--key");
        const auto pts = read_block_file(a.plaintexts);
        if (pts.empty())
            throw InputError("plaintext file '" + a.plaintexts + "' contains no plaintexts");
        if (a.oracle_byte > 15)
            throw UsageError("--oracle-byte: must be in 0..15");
        const auto dir = ensure_dir(g.out);

        sim::BatchOptions bo;
        bo.stop_cycle = a.stop_cycle;
        bo.keep_logs = a.vcd;
        bo.threads = threads;
        auto runs = sim::run_aes_batch(cfg, key, pts, bo);

        std::vector<std::vector<double>> power;
        std::string cts;
        for (auto &r : runs) {
            power.push_back(std::move(r.power));
            cts += r.ciphertext ? block_to_hex(*r.ciphertext) + "\n" : std::string("-\n");
        }
        sim::write_power_csv((dir / "power.csv").string(), power);
        write_file(dir / "ciphertexts.txt", cts);
        outputs["power_csv"] = "power.csv";
        outputs["ciphertexts"] = "ciphertexts.txt";

        if (pts.size() >= 2) {
            std::vector<metrics::OracleTrace> orc;
            for (auto p : {aes::Point::XorKey, aes::Point::SboxOut, aes::Point::SboxOutTimes2})
                orc.push_back(aes::gen_oracle(pts, key, aes::InterestingPoint{p, a.oracle_byte}));
            metrics::write_oracle_csv((dir / "oracle.csv").string(), orc);
            outputs["oracle_csv"] = "oracle.csv";
        }
        if (a.vcd) {
            const auto vdir = ensure_dir((dir / "vcd").string());
            std::string listing;
            for (std::size_t i = 0; i < runs.size(); ++i) {
                char name[32];
                std::snprintf(name, sizeof name, "run_%05zu.vcd", i);
                write_file(vdir / name, sim::emit_vcd(runs[i].log));
                listing += std::string(name) + " run" + std::to_string(i) + "\n";
            }
            write_file(vdir / "runs.txt", listing);
            outputs["vcd_manifest"] = "vcd/runs.txt";
        }
        m["key_hex"] = block_to_hex(key);
        m["plaintext_file"] = a.plaintexts;
        std::vector<std::string> hex;
        for (const auto &p : pts)
            hex.push_back(block_to_hex(p));
        m["plaintexts"] = hex;
        m["runs"] = pts.size();
        m["stop_cycle"] = a.stop_cycle;
        m["oracle_byte"] = a.oracle_byte;
        m["rekey_epochs"] = epochs_json(cfg, pts.size());
        m["outputs"] = outputs;
        write_file(dir / "manifest.json", m.dump(2) + "\n");
        std::size_t ok = 0;
        for (std::size_t i = 0; i < runs.size(); ++i)
            ok += runs[i].ciphertext && *runs[i].ciphertext == aes::aes128_encrypt(pts[i], key);
        out << "simulated " << pts.size() << " run(s), " << runs.front().cycles
            << " cycles each (" << sim::mode_name(cfg.mode) << ", eda_fix "
            << (cfg.eda_fix_on() ? "on" : "off") << ")\n";
        if (a.stop_cycle == 0)
            out << "ciphertext check: " << ok << "/" << runs.size() << " correct\n";
        out << "wrote " << (dir / "manifest.json").string() << "\n";
        return 0;
    }
    if (a.workload == "cacheset") {
        if (!a.plaintexts.empty() || !a.key.empty())
            throw UsageError("simulate: --plaintexts/--key do not apply to the cacheset workload");
        if (a.runs_per_class < 2)
            throw UsageError("--runs-per-class: must be >= 2");
        const auto dir = ensure_dir(g.out);
        sim::CacheSetOptions co;
        co.runs_per_class = a.runs_per_class;
        co.threads = threads;
        const auto classes = sim::cache_set_experiment(cfg, co);
        // Flatten back to global run order k -> class k % sets.
        const std::size_t sets = classes.size();
        std::vector<std::vector<double>> power;
        std::string labels;
        for (std::size_t k = 0; k < sets * a.runs_per_class; ++k) {
            power.push_back({classes[k % sets][k / sets]});
            labels += "set" + std::to_string(k % sets) + "\n";
        }
        sim::write_power_csv((dir / "power.csv").string(), power);
        write_file(dir / "classes.txt", labels);
        outputs["power_csv"] = "power.csv";
        outputs["classes"] = "classes.txt";
        m["runs"] = power.size();
        m["runs_per_class"] = a.runs_per_class;
        m["sample"] = "power at the probe load's MEM cycle";
        m["rekey_epochs"] = epochs_json(cfg, power.size());
        m["outputs"] = outputs;
        write_file(dir / "manifest.json", m.dump(2) + "\n");
        out << "simulated " << power.size() << " cache-set probe run(s) over " << sets
            << " sets\nwrote " << (dir / "manifest.json").string() << "\n";
        return 0;
    }
    throw UsageError("--workload: expected 'aes' or 'cacheset', got '" + a.workload + "'");
}

// ---- analyze -------------------------------------------------------------

struct AnalyzeArgs {
    std::string runs;
    std::string oracle;
    std::vector<std::string> labels;
    std::string clock = "clk";
    std::string window;
    std::size_t shuffles = 1000;
    double quantile = 0.99;
    std::string alignment = "error";
    report::SeverityThresholds thresholds;
};

int cmd_analyze(const Globals &g, const AnalyzeArgs &a, std::ostream &out) {
    auto oracles = metrics::read_oracle_csv(a.oracle);
    if (!a.labels.empty()) {
        std::vector<metrics::OracleTrace> keep;
        for (const auto &l : a.labels) {
            auto it = std::find_if(oracles.begin(), oracles.end(),
                                   [&](const auto &o) { return o.label == l; });
            if (it == oracles.end())
                throw InputError("oracle label '" + l + "' not in '" + a.oracle + "'");
            keep.push_back(*it);
        }
        oracles = std::move(keep);
    }
    if (oracles.empty())
        throw InputError("oracle file '" + a.oracle + "' holds no oracle");
    trace::Alignment align;
    if (a.alignment == "error")
        align = trace::Alignment::ErrorOnMismatch;
    else if (a.alignment == "truncate")
        align = trace::Alignment::TruncateToMin;
    else
        throw UsageError("--alignment: expected 'error' or 'truncate'");
    const auto threads = resolve_threads(g.threads);
    const auto rs = trace::load_run_set_manifest(a.runs, a.clock, align, threads);
    for (const auto &o : oracles)
        if (o.size() != rs.size())
            throw InputError("oracle '" + o.label + "' has " + std::to_string(o.size()) +
                             " values but the run set has " + std::to_string(rs.size()) +
                             " runs");
    metrics::SvfOptions so;
    std::tie(so.window_start, so.window_end) = parse_window(a.window);
    so.shuffles = a.shuffles;
    so.floor_quantile = a.quantile;
    so.seed = g.seed.value_or(1);
    so.threads = threads;
    const auto results = metrics::svf_all(rs, oracles, so);
    std::vector<std::string> labels;
    for (const auto &o : oracles)
        labels.push_back(o.label);
    const auto rep = report::build_report(results, rs.size(), rs.cycles, labels, so, a.thresholds);
    const auto dir = ensure_dir(g.out);
    write_file(dir / "report.json", report::report_json(rep));
    write_file(dir / "report.csv", report::report_csv(rep));
    out << report::report_table(rep);
    out << "wrote " << (dir / "report.json").string() << "\n";
    return 0;
}

// ---- dpa -----------------------------------------------------------------

struct DpaArgs {
    std::string traces;
    std::string plaintexts;
    unsigned target_byte = 0;
    std::string point = "sbox_out";
    std::size_t checkpoint = 100;
    std::string key;
    std::string window;
    bool omit_correlations = false;
};

int cmd_dpa(const Globals &g, const DpaArgs &a, std::ostream &out) {
    if (a.target_byte > 15)
        throw UsageError("--target-byte: must be in 0..15");
    if (a.checkpoint == 0)
        throw UsageError("--checkpoint: must be >= 1");
    aes::Point point;
    try {
        point = aes::parse_point(a.point);
    } catch (const InputError &e) {
        throw UsageError(std::string("--point: ") + e.what());
    }
    auto traces = sim::read_power_csv(a.traces);
    const auto pts = read_block_file(a.plaintexts);
    if (traces.size() != pts.size())
        throw InputError("trace file '" + a.traces + "' has " + std::to_string(traces.size()) +
                         " runs but plaintext file '" + a.plaintexts + "' has " +
                         std::to_string(pts.size()));
    const auto [ws, we] = parse_window(a.window);
    if (we != 0)
        for (auto &t : traces) {
            if (t.size() < we)
                throw InputError("--window end " + std::to_string(we) + " exceeds trace length " +
                                 std::to_string(t.size()));
            t = std::vector<double>(t.begin() + static_cast<std::ptrdiff_t>(ws),
                                    t.begin() + static_cast<std::ptrdiff_t>(we));
        }
    std::optional<std::uint8_t> true_key;
    if (!a.key.empty())
        true_key = parse_key(a.key, "--key")[a.target_byte];
    const auto sweep = dpa::attack_sweep(traces, pts, a.target_byte, true_key.value_or(0),
                                         a.checkpoint, point);
    const auto dir = ensure_dir(g.out);
    std::optional<dpa::MtdCurve> curve;
    if (true_key)
        curve = sweep.curve;
    write_file(dir / "attack.json",
               dpa::attack_result_json(sweep.final, curve, true_key, !a.omit_correlations));
    dpa::write_evolution_csv((dir / "evolution.csv").string(), sweep.evolution);
    out << "best guess 0x" << hex_u64(sweep.final.best_guess, 2) << " at sample "
        << sweep.final.best_sample + ws << " (max |rho| "
        << sweep.final.max_abs[sweep.final.best_guess] << ")\n";
    if (true_key) {
        out << "true key byte 0x" << hex_u64(*true_key, 2) << " rank "
            << sweep.final.rank_of(*true_key) << "; mtd: "
            << (sweep.curve.mtd ? std::to_string(*sweep.curve.mtd) : "not disclosed") << "\n";
    }
    out << "wrote " << (dir / "attack.json").string() << "\n";
    return 0;
}

// ---- ttest ---------------------------------------------------------------

struct TtestArgs {
    std::string traces;
    std::string classes;
    std::string sample = "max";
};

int cmd_ttest(const Globals &g, const TtestArgs &a, std::ostream &out) {
    const auto traces = sim::read_power_csv(a.traces);
    const auto cls = report::read_class_file(a.classes);
    if (cls.run_class.size() != traces.size())
        throw InputError("class file '" + a.classes + "' labels " +
                         std::to_string(cls.run_class.size()) + " runs but trace file has " +
                         std::to_string(traces.size()));
    std::size_t d = traces.empty() ? 0 : traces.front().size();
    for (const auto &t : traces)
        d = std::min(d, t.size());
    if (d == 0)
        throw InputError("trace file '" + a.traces + "' holds no samples");
    std::vector<std::size_t> samples;
    if (a.sample == "max") {
        for (std::size_t c = 0; c < d; ++c)
            samples.push_back(c);
    } else {
        std::size_t c = 0;
        try {
            c = std::stoull(a.sample);
        } catch (const std::logic_error &) {
            throw UsageError("--sample: expected a cycle index or 'max'");
        }
        if (c >= d)
            throw InputError("--sample " + std::to_string(c) + " beyond trace length " +
                             std::to_string(d));
        samples.push_back(c);
    }
    std::vector<std::vector<double>> best;
    std::size_t best_c = samples.front();
    double best_t = -1;
    for (auto c : samples) {
        std::vector<std::vector<double>> groups(cls.labels.size());
        for (std::size_t r = 0; r < traces.size(); ++r)
            groups[cls.run_class[r]].push_back(traces[r][c]);
        auto m = metrics::pairwise_ttest_matrix(groups);
        double mx = 0;
        for (std::size_t i = 0; i < m.size(); ++i)
            for (std::size_t j = 0; j < m.size(); ++j)
                if (i != j)
                    mx = std::max(mx, m[i][j]);
        if (mx > best_t) {
            best_t = mx;
            best_c = c;
            best = std::move(m);
        }
    }
    const auto dir = ensure_dir(g.out);
    write_file(dir / "tmatrix.csv", report::tmatrix_csv(cls.labels, best));
    out << "classes: " << cls.labels.size() << ", sample: " << best_c
        << ", max off-diagonal |t|: " << best_t << "\n";
    out << "wrote " << (dir / "tmatrix.csv").string() << "\n";
    return 0;
}

// ---- obfuscate -----------------------------------------------------------

struct ObfuscateArgs {
    std::string value;
    std::string keys;
    std::string spec;
    bool inverse = false;
    bool address = false;
};

int cmd_obfuscate(const Globals &g, const ObfuscateArgs &a, const report::EnvLookup &env,
                  std::ostream &out) {
    report::ConfigBuilder b;
    const auto cfg = resolve_config(g, env, b);
    cfg.validate();
    obf::AffineSpec spec = cfg.affine;
    if (!a.spec.empty())
        spec = obf::load_affine_spec(a.spec);
    obf::RoundKeys keys;
    try {
        const auto k = parse_hex_u64(a.keys, 64);
        for (unsigned i = 0; i < 4; ++i)
            keys.keys[i] = static_cast<std::uint16_t>(k >> (48 - 16 * i));
    } catch (const ParseError &e) {
        throw UsageError(std::string("--keys: ") + e.what());
    }
    if (a.address) {
        obf::AddressGeometry geom{cfg.cache.address_width(), cfg.cache.offset_bits()};
        std::uint64_t v = 0;
        try {
            v = parse_hex_u64(a.value, geom.address_width);
        } catch (const ParseError &e) {
            throw UsageError(std::string("value: ") + e.what());
        }
        const auto r = a.inverse ? obf::deobfuscate_address(v, geom, keys, spec)
                                 : obf::obfuscate_address(v, geom, keys, spec);
        out << hex_u64(r, (geom.address_width + 3) / 4) << "\n";
        return 0;
    }
    std::uint32_t v = 0;
    try {
        v = static_cast<std::uint32_t>(parse_hex_u64(a.value, 32));
    } catch (const ParseError &e) {
        throw UsageError(std::string("value: ") + e.what());
    }
    const auto r = a.inverse ? obf::deobfuscate32(v, keys, spec) : obf::obfuscate32(v, keys, spec);
    out << hex_u64(r, 8) << "\n";
    return 0;
}

} // namespace

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err,
        const report::EnvLookup &env) {
    CLI::App app{"leakscope: side-channel leakage analysis toolchain", "leakscope"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(report::tool_version()));
    Globals g;
    app.add_option("--seed", g.seed, "Master seed (overrides the config file)");
    app.add_option("--config", g.config, "Key-value configuration file")->check(CLI::ExistingFile);
    app.add_option("--out", g.out, "Output directory")->capture_default_str();
    app.add_option("--threads", g.threads, "Worker threads (0 = all cores)")
        ->capture_default_str();
    app.add_option("--set", g.overrides, "Configuration override key=value (repeatable)");

    auto *sim_cmd = app.add_subcommand("simulate", "Run the core model and write power traces");
    SimulateArgs sa;
    sim_cmd->add_option("--workload", sa.workload, "aes | cacheset")->capture_default_str();
    sim_cmd->add_option("--plaintexts", sa.plaintexts, "Plaintext file, one 32-hex block per line");
    sim_cmd->add_option("--key", sa.key, "AES-128 key as 32 hex digits");
    sim_cmd->add_flag("--vcd", sa.vcd, "Also write one VCD per run");
    sim_cmd->add_option("--stop-cycle", sa.stop_cycle, "Stop each run after N cycles (0 = full)")
        ->capture_default_str();
    sim_cmd->add_option("--oracle-byte", sa.oracle_byte, "Key byte for the oracle CSV")
        ->capture_default_str();
    sim_cmd->add_option("--runs-per-class", sa.runs_per_class, "cacheset: runs per set")
        ->capture_default_str();

    auto *an_cmd = app.add_subcommand("analyze", "SVF leakage report over a VCD run set");
    AnalyzeArgs aa;
    an_cmd->add_option("--runs", aa.runs, "Run manifest (VCD path [label] per line)")->required();
    an_cmd->add_option("--oracle", aa.oracle, "Oracle CSV")->required();
    an_cmd->add_option("--label", aa.labels, "Restrict to these oracle labels");
    an_cmd->add_option("--clock", aa.clock, "Clock signal name or path")->capture_default_str();
    an_cmd->add_option("--window", aa.window, "Cycle window START:END (half-open)");
    an_cmd->add_option("--shuffles", aa.shuffles, "Noise-floor shuffles")->capture_default_str();
    an_cmd->add_option("--quantile", aa.quantile, "Noise-floor quantile")->capture_default_str();
    an_cmd->add_option("--alignment", aa.alignment, "error | truncate")->capture_default_str();
    an_cmd->add_option("--red-min", aa.thresholds.red_min)->capture_default_str();
    an_cmd->add_option("--red-factor", aa.thresholds.red_factor)->capture_default_str();
    an_cmd->add_option("--orange-factor", aa.thresholds.orange_factor)->capture_default_str();

    auto *dpa_cmd = app.add_subcommand("dpa", "Correlation power analysis on power traces");
    DpaArgs da;
    dpa_cmd->add_option("--traces", da.traces, "Power CSV")->required();
    dpa_cmd->add_option("--plaintexts", da.plaintexts, "Plaintext file")->required();
    dpa_cmd->add_option("--target-byte", da.target_byte)->capture_default_str();
    dpa_cmd->add_option("--point", da.point, "xor_key | sbox_out | sbox_out_times2")
        ->capture_default_str();
    dpa_cmd->add_option("--checkpoint", da.checkpoint, "Traces between checkpoints")
        ->capture_default_str();
    dpa_cmd->add_option("--key", da.key, "True key (enables rank and MTD reporting)");
    dpa_cmd->add_option("--window", da.window, "Sample window START:END (half-open)");
    dpa_cmd->add_flag("--omit-correlations", da.omit_correlations,
                      "Leave the 256 x d matrix out of attack.json");

    auto *tt_cmd = app.add_subcommand("ttest", "Pairwise Welch t-matrix across trace classes");
    TtestArgs ta;
    tt_cmd->add_option("--traces", ta.traces, "Power CSV")->required();
    tt_cmd->add_option("--classes", ta.classes, "Class label per run, one per line")->required();
    tt_cmd->add_option("--sample", ta.sample, "Sample index, or 'max' for the most separating")
        ->capture_default_str();

    auto *ob_cmd = app.add_subcommand("obfuscate", "Apply the Feistel obfuscation to one value");
    ObfuscateArgs oa;
    ob_cmd->add_option("value", oa.value, "Hex value")->required();
    ob_cmd->add_option("--keys", oa.keys, "Round keys k1..k4 as 16 hex digits")->required();
    ob_cmd->add_option("--spec", oa.spec, "Affine spec JSON override");
    ob_cmd->add_flag("--inverse", oa.inverse, "Deobfuscate instead");
    ob_cmd->add_flag("--address", oa.address, "Treat the value as a cache address");

    for (auto *sub : app.get_subcommands([](const CLI::App *) { return true; }))
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sim_cmd->parsed())
            return cmd_simulate(g, sa, env, out);
        if (an_cmd->parsed())
            return cmd_analyze(g, aa, out);
        if (dpa_cmd->parsed())
            return cmd_dpa(g, da, out);
        if (tt_cmd->parsed())
            return cmd_ttest(g, ta, out);
        if (ob_cmd->parsed())
            return cmd_obfuscate(g, oa, env, out);
    } catch (const UsageError &e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

} // namespace leakscope::cli

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

#include "leakscope/report/config.hpp"
#include "leakscope/core/error.hpp"
#include "leakscope/core/util.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>

namespace leakscope::report {

EnvLookup process_env() {
    return [](const std::string &name) -> std::optional<std::string> {
        if (const char *v = std::getenv(name.c_str()))
            return std::string(v);
        return std::nullopt;
    };
}

const std::vector<std::string> &config_keys() {
    static const std::vector<std::string> keys{
        "mode",       "eda_fix",          "noise_sigma",         "seed",       "cache.sets",
        "cache.ways", "cache.line_bytes", "rekey_interval_runs", "affine_spec"};
    return keys;
}

std::string env_name(const std::string &key) {
    std::string s = "LEAKSCOPE_";
    for (char c : key)
        s += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

ConfigBuilder::ConfigBuilder() = default;

namespace {

[[noreturn]] void bad(const std::string &origin, const std::string &key, const std::string &why) {
    throw InputError(origin + ": " + key + ": " + why);
}

std::uint64_t parse_uint(const std::string &origin, const std::string &key,
                         std::string_view v) {
    v = trim(v);
    try {
        if (v.starts_with("0x") || v.starts_with("0X"))
            return parse_hex_u64(v);
    } catch (const Error &) {
        bad(origin, key, "expected an unsigned integer, got '" + std::string(v) + "'");
    }
    std::uint64_t out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size() || v.empty())
        bad(origin, key, "expected an unsigned integer, got '" + std::string(v) + "'");
    return out;
}

unsigned parse_unsigned(const std::string &origin, const std::string &key, std::string_view v) {
    const auto x = parse_uint(origin, key, v);
    if (x > 0xFFFFFFFFu)
        bad(origin, key, "value too large");
    return static_cast<unsigned>(x);
}

} // namespace

void ConfigBuilder::set(const std::string &key, const std::string &raw, const std::string &origin,
                        const std::string &base_dir) {
    const std::string value(trim(raw));
    if (key == "mode") {
        try {
            cfg_.mode = sim::parse_mode(value);
        } catch (const InputError &) {
            bad(origin, key, "expected 'baseline' or 'param', got '" + value + "'");
        }
    } else if (key == "eda_fix") {
        if (value == "on" || value == "true" || value == "1")
            cfg_.eda_fix = true;
        else if (value == "off" || value == "false" || value == "0")
            cfg_.eda_fix = false;
        else if (value == "auto")
            cfg_.eda_fix.reset();
        else
            bad(origin, key, "expected on, off or auto, got '" + value + "'");
    } else if (key == "noise_sigma") {
        double s = 0;
        auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), s);
        if (ec != std::errc() || p != value.data() + value.size() || value.empty() ||
            !(s >= 0) || !std::isfinite(s))
            bad(origin, key, "expected a finite real >= 0, got '" + value + "'");
        cfg_.noise_sigma = s;
    } else if (key == "seed") {
        cfg_.seed = parse_uint(origin, key, value);
    } else if (key == "cache.sets") {
        cfg_.cache.sets = parse_unsigned(origin, key, value);
    } else if (key == "cache.ways") {
        cfg_.cache.ways = parse_unsigned(origin, key, value);
    } else if (key == "cache.line_bytes") {
        cfg_.cache.line_bytes = parse_unsigned(origin, key, value);
    } else if (key == "rekey_interval_runs") {
        if (value == "never") {
            cfg_.rekey_interval_runs = 0;
        } else {
            const auto n = parse_uint(origin, key, value);
            if (n == 0)
                bad(origin, key, "expected an integer >= 1 or 'never'");
            cfg_.rekey_interval_runs = n;
        }
    } else if (key == "affine_spec") {
        std::filesystem::path p(value);
        if (p.is_relative())
            p = std::filesystem::path(base_dir) / p;
        try {
            cfg_.affine = obf::load_affine_spec(p.string());
        } catch (const Error &e) {
            bad(origin, key, e.what());
        }
        affine_source_ = p.string();
    } else {
        throw InputError(origin + ": unknown configuration key '" + key + "'");
    }
    try {
        cfg_.cache.validate();
    } catch (const InputError &e) {
        throw InputError(origin + ": " + e.what());
    }
}

void ConfigBuilder::load_file(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open config file '" + path + "'");
    const auto dir = std::filesystem::path(path).parent_path().string();
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto t = trim(line);
        if (const auto hash = t.find('#'); hash != std::string_view::npos)
            t = trim(t.substr(0, hash));
        if (t.empty())
            continue;
        const auto eq = t.find('=');
        const std::string origin = path + ":" + std::to_string(lineno);
        if (eq == std::string_view::npos)
            throw InputError(origin + ": expected 'key = value'");
        set(std::string(trim(t.substr(0, eq))), std::string(t.substr(eq + 1)), origin,
            dir.empty() ? "." : dir);
    }
}

void ConfigBuilder::apply_env(const EnvLookup &env) {
    for (const auto &key : config_keys()) {
        const auto name = env_name(key);
        if (auto v = env(name))
            set(key, *v, "environment " + name);
    }
}

} // namespace leakscope::report

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

#include "leakscope/core/util.hpp"
#include "leakscope/core/error.hpp"

#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

namespace leakscope {

namespace {

int hex_value(char c) {
    if (c >= '0' && c <= '9')
        return c - '0';
    if (c >= 'a' && c <= 'f')
        return c - 'a' + 10;
    if (c >= 'A' && c <= 'F')
        return c - 'A' + 10;
    return -1;
}

} // namespace

std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

Block parse_block(std::string_view hex) {
    hex = trim(hex);
    if (hex.size() != 32)
        throw ParseError("expected 32 hex digits, got '" + std::string(hex) + "'");
    Block b{};
    for (std::size_t i = 0; i < 16; ++i) {
        const int hi = hex_value(hex[2 * i]);
        const int lo = hex_value(hex[2 * i + 1]);
        if (hi < 0 || lo < 0)
            throw ParseError("bad hex digit in '" + std::string(hex) + "'");
        b[i] = static_cast<std::uint8_t>(hi << 4 | lo);
    }
    return b;
}

std::string block_to_hex(const Block &b) {
    std::string s;
    s.reserve(32);
    for (auto byte : b)
        s += hex_u64(byte, 2);
    return s;
}

std::uint64_t parse_hex_u64(std::string_view hex, unsigned bits) {
    hex = trim(hex);
    if (hex.starts_with("0x") || hex.starts_with("0X"))
        hex.remove_prefix(2);
    if (hex.empty())
        throw ParseError("empty hex value");
    std::uint64_t v = 0;
    for (char c : hex) {
        if (c == '_')
            continue;
        const int d = hex_value(c);
        if (d < 0)
            throw ParseError("bad hex digit '" + std::string(1, c) + "' in '" +
                             std::string(hex) + "'");
        if (v >> 60)
            throw ParseError("hex value '" + std::string(hex) + "' exceeds 64 bits");
        v = v << 4 | static_cast<std::uint64_t>(d);
    }
    if (bits < 64 && (v >> bits) != 0)
        throw ParseError("hex value '" + std::string(hex) + "' exceeds " +
                         std::to_string(bits) + " bits");
    return v;
}

std::string hex_u64(std::uint64_t v, unsigned digits) {
    static constexpr char d[] = "0123456789abcdef";
    std::string s(digits, '0');
    for (unsigned i = 0; i < digits; ++i) {
        s[digits - 1 - i] = d[v & 0xF];
        v >>= 4;
    }
    return s;
}

std::vector<Block> read_block_file(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open '" + path + "'");
    std::vector<Block> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto t = trim(line);
        if (t.empty() || t.front() == '#')
            continue;
        try {
            out.push_back(parse_block(t));
        } catch (const ParseError &e) {
            throw ParseError(path + ": " + e.what(), lineno);
        }
    }
    return out;
}

void write_block_file(const std::string &path, const std::vector<Block> &blocks) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write '" + path + "'");
    for (const auto &b : blocks)
        out << block_to_hex(b) << '\n';
}

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view label,
                          std::uint64_t index) {
    // FNV-1a over the label, then mixed with the master seed and index.
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return mix64(mix64(master ^ h) ^ mix64(index + 0x632BE59BD9B4E019ULL));
}

unsigned resolve_threads(unsigned requested) {
    if (requested > 0)
        return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)> &fn) {
    threads = resolve_threads(threads);
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_lock;
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> g(failure_lock);
                if (!failure)
                    failure = std::current_exception();
            }
        }
    };
    std::vector<std::jthread> pool;
    const std::size_t count = std::min<std::size_t>(threads, n);
    for (std::size_t t = 0; t < count; ++t)
        pool.emplace_back(worker);
    pool.clear();
    if (failure)
        std::rethrow_exception(failure);
}

} // namespace leakscope

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

#include "leakscope/trace/vcd.hpp"
#include "leakscope/core/error.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace leakscope::trace {

std::string SignalDecl::full_name() const {
    std::string s;
    for (const auto &p : scope_path) {
        s += p;
        s += '/';
    }
    return s + name;
}

std::string ModuleNode::path_string() const {
    std::string s;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i)
            s += '/';
        s += path[i];
    }
    return s;
}

const ModuleNode *ModuleNode::find(const std::vector<std::string> &p) const {
    const ModuleNode *node = this;
    for (const auto &part : p) {
        const ModuleNode *next = nullptr;
        for (const auto &c : node->children)
            if (c.name == part) {
                next = &c;
                break;
            }
        if (!next)
            return nullptr;
        node = next;
    }
    return node;
}

std::vector<const ModuleNode *> ModuleNode::flatten() const {
    std::vector<const ModuleNode *> out;
    std::vector<const ModuleNode *> stack{this};
    while (!stack.empty()) {
        const ModuleNode *n = stack.back();
        stack.pop_back();
        out.push_back(n);
        for (auto it = n->children.rbegin(); it != n->children.rend(); ++it)
            stack.push_back(&*it);
    }
    return out;
}

std::size_t ModuleNode::depth() const {
    std::size_t d = 0;
    for (const auto &c : children)
        d = std::max(d, c.depth());
    return d + 1;
}

std::size_t WaveDump::find_signal(std::string_view name) const {
    std::string norm(name);
    for (auto &c : norm)
        if (c == '.')
            c = '/';
    const bool qualified = norm.find('/') != std::string::npos;
    std::size_t found = declarations.size();
    for (std::size_t i = 0; i < declarations.size(); ++i) {
        const auto &d = declarations[i];
        const bool match = qualified ? d.full_name() == norm : d.name == norm;
        if (!match)
            continue;
        if (found != declarations.size())
            throw InputError("signal name '" + std::string(name) +
                             "' is ambiguous; use a scoped path");
        found = i;
    }
    if (found == declarations.size())
        throw InputError("signal '" + std::string(name) + "' not declared");
    return found;
}

namespace {

class Lexer {
  public:
    explicit Lexer(std::string_view text) : text_(text) {}

    /// Next whitespace-delimited token; empty at end of input.
    std::string_view next() {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == '\n')
                ++line_;
            else if (c != ' ' && c != '\t' && c != '\r')
                break;
            ++pos_;
        }
        token_line_ = line_;
        const std::size_t start = pos_;
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n')
                break;
            ++pos_;
        }
        return text_.substr(start, pos_ - start);
    }

    std::size_t line() const { return token_line_; }

  private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t token_line_ = 1;
};

class Parser {
  public:
    explicit Parser(std::string_view text) : lex_(text) {}

    WaveDump run() {
        parse_header();
        parse_body();
        return std::move(dump_);
    }

  private:
    [[noreturn]] void fail(const std::string &msg) {
        throw ParseError(msg, lex_.line());
    }

    [[noreturn]] void truncated(const std::string &where) {
        std::string msg = "truncated stream inside " + where;
        if (have_time_)
            msg += "; last good timestamp #" + std::to_string(last_time_);
        else
            msg += "; no timestamp seen";
        throw ParseError(msg, lex_.line());
    }

    /// Collects tokens up to the closing $end.
    std::vector<std::string_view> until_end(const std::string &section) {
        std::vector<std::string_view> toks;
        while (true) {
            auto t = lex_.next();
            if (t.empty())
                truncated(section);
            if (t == "$end")
                return toks;
            toks.push_back(t);
        }
    }

    void parse_header() {
        std::vector<ModuleNode *> stack{&dump_.root};
        while (true) {
            auto t = lex_.next();
            if (t.empty())
                truncated("header (missing $enddefinitions)");
            if (t == "$enddefinitions") {
                until_end("$enddefinitions");
                if (stack.size() != 1)
                    fail("$enddefinitions with " + std::to_string(stack.size() - 1) +
                         " unclosed $scope");
                return;
            }
            if (t == "$date" || t == "$version" || t == "$comment") {
                until_end(std::string(t));
            } else if (t == "$timescale") {
                auto toks = until_end("$timescale");
                std::string ts;
                for (auto x : toks)
                    ts += x;
                dump_.timescale = ts;
            } else if (t == "$scope") {
                auto toks = until_end("$scope");
                if (toks.size() != 2)
                    fail("malformed $scope declaration");
                // A scope opened again under the same parent merges into
                // the existing node.
                auto &siblings = stack.back()->children;
                auto it = std::find_if(siblings.begin(), siblings.end(),
                                       [&](const ModuleNode &n) { return n.name == toks[1]; });
                if (it == siblings.end()) {
                    ModuleNode child;
                    child.name = std::string(toks[1]);
                    child.path = stack.back()->path;
                    child.path.push_back(child.name);
                    siblings.push_back(std::move(child));
                    it = siblings.end() - 1;
                }
                stack.push_back(&*it);
            } else if (t == "$upscope") {
                until_end("$upscope");
                if (stack.size() == 1)
                    fail("$upscope without matching $scope");
                stack.pop_back();
            } else if (t == "$var") {
                auto toks = until_end("$var");
                declare(toks, *stack.back());
            } else {
                fail("unexpected token '" + std::string(t) + "' in header");
            }
        }
    }

    void declare(const std::vector<std::string_view> &toks, ModuleNode &owner) {
        if (toks.size() < 4 || toks.size() > 5)
            fail("malformed $var declaration");
        const auto type = toks[0];
        unsigned width = 0;
        const auto w = toks[1];
        auto [p, ec] = std::from_chars(w.data(), w.data() + w.size(), width);
        if (ec != std::errc() || p != w.data() + w.size() || width == 0)
            fail("bad $var width '" + std::string(w) + "'");
        const std::string code(toks[2]);
        if (type == "real" || type == "realtime" || type == "event") {
            ignored_.insert(code);
            return;
        }
        if (owner.path.empty())
            fail("$var '" + std::string(toks[3]) + "' declared outside any $scope");
        SignalDecl d;
        d.id_code = code;
        d.name = std::string(toks[3]);
        d.width = width;
        d.scope_path = owner.path;
        d.is_reg = type != "wire" && type != "tri" && type != "wand" &&
                   type != "wor" && type != "supply0" && type != "supply1";
        auto it = code_index_.find(code);
        if (it == code_index_.end()) {
            it = code_index_.emplace(code, static_cast<std::uint32_t>(dump_.codes.size()))
                     .first;
            dump_.codes.push_back(code);
            code_width_.push_back(width);
        } else if (code_width_[it->second] != width) {
            fail("id code '" + code + "' redeclared with a different width");
        }
        d.code = it->second;
        owner.signals.push_back(dump_.declarations.size());
        dump_.declarations.push_back(std::move(d));
    }

    void change(std::string_view code, const std::string &bits) {
        auto it = code_index_.find(std::string(code));
        if (it == code_index_.end()) {
            if (ignored_.count(std::string(code)))
                return;
            fail("value change for undeclared id code '" + std::string(code) + "'");
        }
        const unsigned width = code_width_[it->second];
        if (bits.size() > width)
            fail("value '" + bits + "' wider than declared " + std::to_string(width) +
                 " bits for id code '" + std::string(code) + "'");
        ValueChange vc;
        vc.time = have_time_ ? last_time_ : 0;
        vc.code = it->second;
        try {
            vc.value = BitVec::from_string(bits, width);
        } catch (const InputError &e) {
            fail(e.what());
        }
        dump_.changes.push_back(std::move(vc));
    }

    void parse_body() {
        while (true) {
            auto t = lex_.next();
            if (t.empty())
                break;
            const char c = t.front();
            if (c == '#') {
                std::uint64_t time = 0;
                auto [p, ec] = std::from_chars(t.data() + 1, t.data() + t.size(), time);
                if (ec != std::errc() || p != t.data() + t.size() || t.size() == 1)
                    fail("bad timestamp '" + std::string(t) + "'");
                if (have_time_ && time < last_time_)
                    fail("timestamp #" + std::to_string(time) + " goes backwards from #" +
                         std::to_string(last_time_));
                last_time_ = time;
                have_time_ = true;
            } else if (c == '$') {
                if (t == "$dumpvars" || t == "$dumpall" || t == "$dumpon" ||
                    t == "$dumpoff") {
                    // Value changes follow until $end.
                    in_block_ = std::string(t);
                } else if (t == "$end") {
                    if (in_block_.empty())
                        fail("stray $end");
                    in_block_.clear();
                } else if (t == "$comment") {
                    until_end("$comment");
                } else {
                    fail("unexpected command '" + std::string(t) + "' after header");
                }
            } else if (c == 'b' || c == 'B') {
                auto code = lex_.next();
                if (code.empty())
                    truncated("vector value change");
                change(code, std::string(t.substr(1)));
            } else if (c == 'r' || c == 'R') {
                auto code = lex_.next();
                if (code.empty())
                    truncated("real value change");
                if (code_index_.count(std::string(code)))
                    fail("real value for bit-vector id code '" + std::string(code) + "'");
                if (!ignored_.count(std::string(code)))
                    fail("value change for undeclared id code '" + std::string(code) + "'");
            } else if (c == '0' || c == '1' || c == 'x' || c == 'X' || c == 'z' ||
                       c == 'Z') {
                if (t.size() < 2)
                    truncated("scalar value change");
                change(t.substr(1), std::string(1, c));
            } else {
                fail("unrecognised token '" + std::string(t) + "'");
            }
        }
        if (!in_block_.empty())
            truncated(in_block_ + " block");
    }

    Lexer lex_;
    WaveDump dump_;
    std::unordered_map<std::string, std::uint32_t> code_index_;
    std::vector<unsigned> code_width_;
    std::unordered_set<std::string> ignored_;
    std::uint64_t last_time_ = 0;
    bool have_time_ = false;
    std::string in_block_;
};

} // namespace

WaveDump parse_vcd(std::string_view text) { return Parser(text).run(); }

WaveDump parse_vcd_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_vcd(ss.str());
    } catch (const ParseError &e) {
        throw ParseError(path + ": " + e.what());
    }
}

} // namespace leakscope::trace

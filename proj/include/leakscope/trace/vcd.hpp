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
#include <string>
#include <string_view>
#include <vector>

namespace leakscope::trace {

struct SignalDecl {
    std::string id_code;
    std::string name;
    unsigned width = 1;
    std::vector<std::string> scope_path;
    /// true for `reg`-like storage, false for `wire`-like nets.
    bool is_reg = false;
    /// Index of `id_code` in WaveDump::codes. Aliased declarations share it.
    std::uint32_t code = 0;

    /// scope_path joined with '/', followed by the signal name.
    std::string full_name() const;
};

/// A scope of the design hierarchy. `signals` indexes the owning dump's
/// declaration list; only signals declared directly in this scope appear.
struct ModuleNode {
    std::string name;
    std::vector<std::string> path;
    std::vector<ModuleNode> children;
    std::vector<std::size_t> signals;

    std::string path_string() const;
    const ModuleNode *find(const std::vector<std::string> &path) const;
    /// Pre-order walk over this node and every descendant.
    std::vector<const ModuleNode *> flatten() const;
    std::size_t depth() const;
};

struct ValueChange {
    std::uint64_t time = 0;
    std::uint32_t code = 0;
    BitVec value;
};

/// Parsed waveform. The root node is an unnamed container whose children
/// are the top-level scopes.
struct WaveDump {
    std::string timescale;
    std::vector<SignalDecl> declarations;
    std::vector<std::string> codes;
    ModuleNode root;
    std::vector<ValueChange> changes;

    /// Declaration index for a plain name or a '/' or '.' separated path.
    /// Throws InputError when absent or ambiguous.
    std::size_t find_signal(std::string_view name) const;
};

/// Parses the VCD subset emitted by RTL behavioural simulators: header
/// sections, scalar and vector changes, $dumpvars/$dumpall/$dumpon/$dumpoff
/// blocks. Real and event variables are accepted and ignored.
WaveDump parse_vcd(std::string_view text);
WaveDump parse_vcd_file(const std::string &path);

} // namespace leakscope::trace

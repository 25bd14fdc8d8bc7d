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

#include <cstdint>
#include <map>
#include <string_view>
#include <vector>

namespace leakscope::sim {

enum class Op : std::uint8_t {
    Nop,
    Add,
    Sub,
    Xor,
    And,
    Or,
    Sll,
    Srl,
    AddI,
    XorI,
    AndI,
    OrI,
    SllI,
    SrlI,
    Lbu, // rd = zext(mem8[rs1 + imm])
    Ld,  // rd = mem64[rs1 + imm]
    Sb,  // mem8[rs1 + imm] = rs2
    Sd,  // mem64[rs1 + imm] = rs2
};

std::string_view op_name(Op op);

struct MicroOp {
    Op op = Op::Nop;
    std::uint8_t rd = 0;
    std::uint8_t rs1 = 0;
    std::uint8_t rs2 = 0;
    std::int64_t imm = 0;
};

inline bool is_load(Op op) { return op == Op::Lbu || op == Op::Ld; }
inline bool is_store(Op op) { return op == Op::Sb || op == Op::Sd; }
inline bool is_imm(Op op) { return op >= Op::AddI && op <= Op::SrlI; }
/// Register-register or register-immediate arithmetic/logic operation.
inline bool is_alu(Op op) { return op >= Op::Add && op <= Op::SrlI; }
inline bool writes_rd(Op op) { return (is_alu(op) || is_load(op)); }
inline bool reads_rs2(Op op) { return (op >= Op::Add && op <= Op::Srl) || is_store(op); }

/// Straight-line micro-op schedule plus its initial memory image.
struct Program {
    std::vector<MicroOp> ops;
    /// Byte address -> byte value.
    std::map<std::uint64_t, std::uint8_t> memory;

    void poke(std::uint64_t addr, std::uint8_t value) { memory[addr] = value; }
    void poke(std::uint64_t addr, const std::uint8_t *bytes, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i)
            memory[addr + i] = bytes[i];
    }
};

/// Plain architectural interpreter: no pipeline, no cache, no obfuscation.
/// Returns the final register file; `memory` is updated in place.
std::vector<std::uint64_t> interpret(const Program &program,
                                     std::map<std::uint64_t, std::uint8_t> &memory);

/// ALU semantics shared by the interpreter and the pipeline.
std::uint64_t alu_compute(Op op, std::uint64_t a, std::uint64_t b);

} // namespace leakscope::sim

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

#include "leakscope/sim/isa.hpp"

namespace leakscope::sim {

std::string_view op_name(Op op) {
    static constexpr std::string_view names[] = {"nop",  "add",  "sub",  "xor",  "and", "or",
                                                  "sll",  "srl",  "addi", "xori", "andi",
                                                  "ori",  "slli", "srli", "lbu",  "ld",
                                                  "sb",   "sd"};
    return names[static_cast<std::size_t>(op)];
}

std::uint64_t alu_compute(Op op, std::uint64_t a, std::uint64_t b) {
    switch (op) {
    case Op::Add:
    case Op::AddI:
    case Op::Lbu:
    case Op::Ld:
    case Op::Sb:
    case Op::Sd:
        return a + b;
    case Op::Sub:
        return a - b;
    case Op::Xor:
    case Op::XorI:
        return a ^ b;
    case Op::And:
    case Op::AndI:
        return a & b;
    case Op::Or:
    case Op::OrI:
        return a | b;
    case Op::Sll:
    case Op::SllI:
        return a << (b & 63);
    case Op::Srl:
    case Op::SrlI:
        return a >> (b & 63);
    case Op::Nop:
        break;
    }
    return 0;
}

std::vector<std::uint64_t> interpret(const Program &program,
                                     std::map<std::uint64_t, std::uint8_t> &memory) {
    std::vector<std::uint64_t> x(32, 0);
    auto read = [&](std::uint64_t a) {
        auto it = memory.find(a);
        return it == memory.end() ? std::uint8_t{0} : it->second;
    };
    for (const auto &u : program.ops) {
        if (u.op == Op::Nop)
            continue;
        const std::uint64_t a = x[u.rs1];
        const std::uint64_t b = is_imm(u.op) ? static_cast<std::uint64_t>(u.imm) : x[u.rs2];
        std::uint64_t result = 0;
        if (is_load(u.op) || is_store(u.op)) {
            const std::uint64_t addr = a + static_cast<std::uint64_t>(u.imm);
            if (u.op == Op::Lbu) {
                result = read(addr);
            } else if (u.op == Op::Ld) {
                for (int i = 7; i >= 0; --i)
                    result = (result << 8) | read(addr + static_cast<unsigned>(i));
            } else if (u.op == Op::Sb) {
                memory[addr] = static_cast<std::uint8_t>(x[u.rs2]);
            } else {
                for (unsigned i = 0; i < 8; ++i)
                    memory[addr + i] = static_cast<std::uint8_t>(x[u.rs2] >> (8 * i));
            }
        } else {
            result = alu_compute(u.op, a, b);
        }
        if (writes_rd(u.op) && u.rd != 0)
            x[u.rd] = result;
    }
    return x;
}

} // namespace leakscope::sim

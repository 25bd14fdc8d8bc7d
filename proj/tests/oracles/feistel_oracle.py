#!/usr/bin/env python3
# SPDX-FileCopyrightText: Copyright 2026 The leakscope authors
# SPDX-License-Identifier: Apache-2.0
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Independent bit-level oracle for the obfuscation stack.

Generates or checks the golden files in data/:
  affine_default_v1.json   default affine spec (rows, constant)
  feistel_golden_v1.csv    x,k1,k2,k3,k4,expected
  obf_golden_v1.csv        name,input,expected for affine_f, address and LFSR vectors

Everything here works one bit at a time on Python integers; nothing is
shared with the C++ implementation.
"""
import argparse
import csv
import json
import random
import sys

MASK64 = (1 << 64) - 1
DEFAULT_SEED = 0x1EA5C09EAFF10001
LFSR_TAPS = (63, 62, 60, 59)


def splitmix64_stream(seed):
    s = seed
    while True:
        s = (s + 0x9E3779B97F4A7C15) & MASK64
        z = s
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        yield z ^ (z >> 31)


def generate_spec(seed):
    draws = splitmix64_stream(seed)
    rows = []
    while len(rows) < 16:
        v = next(draws) & 0xFFFFFFFF
        if v:
            rows.append(v)
    while True:
        c = next(draws) & 0xFFFF
        if c:
            return rows, c


def bit(v, i):
    return (v >> i) & 1


def affine_f(r, k, rows, c):
    """Y = A (R || K) + C; input bit b of R||K is bit b of (R << 16) | K."""
    x = [bit(k, i) for i in range(16)] + [bit(r, i) for i in range(16)]
    y = 0
    for i in range(16):
        acc = 0
        for b in range(32):
            acc ^= bit(rows[i], b) & x[b]
        y |= (acc ^ bit(c, i)) << i
    return y


def obfuscate32(x, keys, rows, c):
    left, right = x >> 16, x & 0xFFFF
    for rnd in range(4):
        f = affine_f(right, keys[rnd], rows, c)
        if rnd < 3:
            left, right = right, left ^ f
        else:
            left = left ^ f  # no swap after the last round
    return (left << 16) | right


def deobfuscate32(x, keys, rows, c):
    return obfuscate32(x, list(reversed(keys)), rows, c)


def obfuscate_address(a, width, offset_bits, keys, rows, c):
    assert a < (1 << width) and width - offset_bits == 32
    tagset = a >> offset_bits
    return (obfuscate32(tagset, keys, rows, c) << offset_bits) | (a & ((1 << offset_bits) - 1))


def lfsr_round_keys(seed, draws):
    """Fibonacci LFSR shifting left; feedback = xor of the tap bits, output = outgoing MSB."""
    state = seed
    out = []
    for _ in range(draws):
        bits = 0
        for _ in range(64):
            msb = bit(state, 63)
            fb = 0
            for t in LFSR_TAPS:
                fb ^= bit(state, t)
            state = ((state << 1) | fb) & MASK64
            bits = (bits << 1) | msb
        out.append([(bits >> s) & 0xFFFF for s in (48, 32, 16, 0)])
    return out


def gf2_mulmod(a, b, p, deg):
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if (a >> deg) & 1:
            a ^= p
    return r


def gf2_powmod(e, p, deg):
    result, base = 1, 2  # the polynomial x
    while e:
        if e & 1:
            result = gf2_mulmod(result, base, p, deg)
        base = gf2_mulmod(base, base, p, deg)
        e >>= 1
    return result


def is_primitive_64(p):
    """p has degree 64; primitive iff ord(x) = 2^64 - 1."""
    order = (1 << 64) - 1
    factors = (3, 5, 17, 257, 641, 65537, 6700417)
    prod = 1
    for f in factors:
        prod *= f
    assert prod == order
    if gf2_powmod(order, p, 64) != 1:
        return False
    return all(gf2_powmod(order // f, p, 64) != 1 for f in factors)


def lfsr_characteristic_polynomial():
    # s[t] = xor of s[t - 1 - tap]; characteristic x^64 + sum x^(63 - tap).
    p = 1 << 64
    for t in LFSR_TAPS:
        p |= 1 << (63 - t)
    return p


def feistel_rows(rows, c):
    rng = random.Random(20240601)
    out = [(0xDEADBEEF, [0x1111, 0x2222, 0x3333, 0x4444])]
    out.append((0x00000000, [0, 0, 0, 0]))
    out.append((0xFFFFFFFF, [0xFFFF] * 4))
    for _ in range(61):
        out.append((rng.getrandbits(32), [rng.getrandbits(16) for _ in range(4)]))
    return [(x, k, obfuscate32(x, k, rows, c)) for x, k in out]


def extra_rows(rows, c):
    keys = [0x1111, 0x2222, 0x3333, 0x4444]
    addr = 0x3FFFFFFFC0
    out = [
        ("affine_f", "1234:abcd", "%04x" % affine_f(0x1234, 0xABCD, rows, c)),
        ("obfuscate_address_38_6", "%010x" % addr,
         "%010x" % obfuscate_address(addr, 38, 6, keys, rows, c)),
    ]
    for i, k in enumerate(lfsr_round_keys(1, 3)):
        out.append(("lfsr_seed1_draw%d" % (i + 1), "0000000000000001", ":".join("%04x" % v for v in k)))
    return out


def spec_json(rows, c):
    return {
        "version": "v1",
        "input_layout": "bits 31..16 = R, bits 15..0 = K",
        "rows": ["%08x" % r for r in rows],
        "constant": "%04x" % c,
    }


def write_outputs(data_dir):
    rows, c = generate_spec(DEFAULT_SEED)
    with open(f"{data_dir}/affine_default_v1.json", "w") as fh:
        json.dump(spec_json(rows, c), fh, indent=2)
        fh.write("\n")
    with open(f"{data_dir}/feistel_golden_v1.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "k1", "k2", "k3", "k4", "expected"])
        for x, k, y in feistel_rows(rows, c):
            w.writerow(["%08x" % x] + ["%04x" % v for v in k] + ["%08x" % y])
    with open(f"{data_dir}/obf_golden_v1.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["name", "input", "expected"])
        w.writerows(extra_rows(rows, c))


def check(golden, spec_path):
    failures = 0
    with open(spec_path) as fh:
        spec = json.load(fh)
    rows = [int(r, 16) for r in spec["rows"]]
    c = int(spec["constant"], 16)
    if (rows, c) != generate_spec(DEFAULT_SEED):
        print("FAIL: shipped spec differs from the seeded construction")
        failures += 1
    with open(golden) as fh:
        for n, row in enumerate(csv.DictReader(fh), start=2):
            x = int(row["x"], 16)
            keys = [int(row["k%d" % i], 16) for i in range(1, 5)]
            want = int(row["expected"], 16)
            got = obfuscate32(x, keys, rows, c)
            if got != want or deobfuscate32(want, keys, rows, c) != x:
                print(f"FAIL: {golden} line {n}: got {got:08x}, want {want:08x}")
                failures += 1
    extra = golden.replace("feistel_golden_v1.csv", "obf_golden_v1.csv")
    with open(extra) as fh:
        want = {r["name"]: r["expected"] for r in csv.DictReader(fh)}
    for name, _, exp in extra_rows(rows, c):
        if want.get(name) != exp:
            print(f"FAIL: {name}: oracle {exp}, file {want.get(name)}")
            failures += 1
    if not is_primitive_64(lfsr_characteristic_polynomial()):
        print("FAIL: LFSR polynomial is not primitive")
        failures += 1
    print("feistel oracle:", "FAIL" if failures else "PASS")
    return 1 if failures else 0


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--generate", metavar="DATA_DIR")
    ap.add_argument("--check", metavar="GOLDEN_CSV")
    ap.add_argument("--spec", metavar="SPEC_JSON")
    args = ap.parse_args()
    if args.generate:
        write_outputs(args.generate)
        return 0
    if args.check and args.spec:
        return check(args.check, args.spec)
    ap.error("use --generate DATA_DIR or --check GOLDEN_CSV --spec SPEC_JSON")


if __name__ == "__main__":
    sys.exit(main())

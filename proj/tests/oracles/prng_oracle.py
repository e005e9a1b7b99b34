#!/usr/bin/env python3
# Copyright 2026 The Calum Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Independent oracle for seeded sampling and the stub backends.

Reimplements FNV-1a-64, splitmix64, xoshiro256**, partial Fisher-Yates
sampling and the two stub hash rules from their definitions, then prints
the values frozen into the C++ tests as JSON.

Usage: prng_oracle.py TESTS_DATA_DIR
"""

import json
import sys
from pathlib import Path

MASK = (1 << 64) - 1
FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3


def fnv1a64(data: bytes, h: int = FNV_OFFSET) -> int:
    for b in data:
        h ^= b
        h = (h * FNV_PRIME) & MASK
    return h


def splitmix64(state: int):
    state = (state + 0x9E3779B97F4A7C15) & MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return state, z ^ (z >> 31)


def derive_seed(seed: int, tag: str) -> int:
    _, out = splitmix64(seed ^ fnv1a64(tag.encode()))
    return out


def rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK


class Xoshiro:
    def __init__(self, seed: int):
        self.s = []
        state = seed
        for _ in range(4):
            state, out = splitmix64(state)
            self.s.append(out)

    def next(self) -> int:
        s = self.s
        result = (rotl((s[1] * 5) & MASK, 7) * 9) & MASK
        t = (s[1] << 17) & MASK
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = rotl(s[3], 45)
        return result

    def below(self, bound: int) -> int:
        threshold = ((1 << 64) - bound) % bound
        while True:
            r = self.next()
            if r >= threshold:
                return r % bound


def sample_indices(size: int, n: int, seed: int):
    rng = Xoshiro(seed)
    idx = list(range(size))
    for i in range(n):
        j = i + rng.below(size - i)
        idx[i], idx[j] = idx[j], idx[i]
    return sorted(idx[:n])


def pick(labels, h: int) -> str:
    _, mixed = splitmix64(h)
    return labels[mixed % len(labels)]


def symmetric_label(labels, a: str, b: str, seed: int) -> str:
    lo, hi = sorted([a.encode(), b.encode()])
    return pick(labels, fnv1a64(lo + b"\n" + hi + b"\n" + str(seed).encode()))


def order_sensitive_label(labels, joined: str, seed: int) -> str:
    return pick(labels, fnv1a64(joined.encode() + b"\n" + str(seed).encode()))


MNLI = ("Premise", "Hypothesis", ["entailment", "neutral", "contradiction"])


def read_tsv(path: Path):
    lines = path.read_text(encoding="utf-8").split("\n")
    header = lines[0].split("\t")
    rows = []
    for line in lines[1:]:
        if line:
            rows.append(dict(zip(header, line.split("\t"))))
    return rows


def joined(ind_a, ind_b, a, b, perturbation):
    if perturbation == "signal":
        first, second = f"[{ind_a}] {a}", f"[{ind_b}] {b}"
    else:
        first, second = f"{ind_a}: {a}", f"{ind_b}: {b}"
    if perturbation == "reverse":
        first, second = second, first
    return f"{first} {second}"


def stub_fixture_metrics(data_dir: Path, seeds):
    ind_a, ind_b, labels = MNLI
    test = read_tsv(data_dir / "mnli_fixture_test.tsv")
    val = read_tsv(data_dir / "mnli_fixture_val.tsv")
    runs = []
    for seed in seeds:
        def pred(row, p):
            return order_sensitive_label(
                labels, joined(ind_a, ind_b, row["sentence1"], row["sentence2"], p),
                seed)
        orig = [pred(r, "original") for r in test]
        rev = [pred(r, "reverse") for r in test]
        sig = [pred(r, "signal") for r in test]
        acc = sum(pred(r, "original") == r["label"] for r in val)
        runs.append({
            "seed": seed,
            "acc_val_count": acc,
            "n_val": len(val),
            "c_reverse_count": sum(x == y for x, y in zip(orig, rev)),
            "c_signal_count": sum(x == y for x, y in zip(orig, sig)),
            "n_test": len(test),
        })
    return runs


def main():
    data_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("tests/data")
    out = {
        "derive_seed_0_encoder": derive_seed(0, "encoder"),
        "sample_split_10_n5_seed7": sample_indices(10, 5, 7),
        "symmetric_rte_a_b_seed0": symmetric_label(
            ["entailment", "not_entailment"], "a", "b", 0),
        "order_sensitive_rte_a_b_seed0": order_sensitive_label(
            ["entailment", "not_entailment"], "Sentence1: a Sentence2: b", 0),
        "order_sensitive_rte_b_a_seed0": order_sensitive_label(
            ["entailment", "not_entailment"], "Sentence2: b Sentence1: a", 0),
        "fnv1a64_a": fnv1a64(b"a"),
        "stub_fixture_runs": stub_fixture_metrics(data_dir, range(5)),
        "symmetric_mnli_rain_seeds0to5": [
            symmetric_label(MNLI[2], "it rains", "it is wet", s)
            for s in range(6)],
        "order_sensitive_mnli_rain_seeds0to5": [
            order_sensitive_label(
                MNLI[2], "Premise: it rains Hypothesis: it is wet", s)
            for s in range(6)],
        "order_sensitive_mnli_hangul_seed9": order_sensitive_label(
            MNLI[2], "Premise: 비가 온다 Hypothesis: 땅이 젖었다", 9),
    }
    rng = Xoshiro(0)
    out["xoshiro_seed_0_first3"] = [rng.next() for _ in range(3)]
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()

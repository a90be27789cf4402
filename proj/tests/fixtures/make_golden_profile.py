#!/usr/bin/env python3
"""Independent generator for golden_profile_seed7.json.

Reimplements the 64-bit Mersenne Twister and the weak-cell sampling procedure
in plain Python, so the C++ profile builder can be checked against a second
implementation. Run from this directory to regenerate the fixture.
"""
import json
import math

MASK64 = (1 << 64) - 1


class MT19937_64:
    def __init__(self, seed):
        self.mt = [0] * 312
        self.mt[0] = seed & MASK64
        for i in range(1, 312):
            prev = self.mt[i - 1]
            self.mt[i] = (6364136223846793005 * (prev ^ (prev >> 62)) + i) & MASK64
        self.index = 312

    def _twist(self):
        upper, lower = 0xFFFFFFFF80000000, 0x7FFFFFFF
        for i in range(312):
            x = (self.mt[i] & upper) | (self.mt[(i + 1) % 312] & lower)
            xa = x >> 1
            if x & 1:
                xa ^= 0xB5026F5AA96619E9
            self.mt[i] = self.mt[(i + 156) % 312] ^ xa
        self.index = 0

    def next(self):
        if self.index >= 312:
            self._twist()
        y = self.mt[self.index]
        self.index += 1
        y ^= (y >> 29) & 0x5555555555555555
        y ^= (y << 17) & 0x71D67FFFEDA60000
        y ^= (y << 37) & 0xFFF7EEE000000000
        y ^= y >> 43
        return y & MASK64


class Stream:
    def __init__(self, seed):
        self.engine = MT19937_64(seed)
        self.spare = None

    def uniform(self):
        return (self.engine.next() >> 11) * 2.0**-53

    def normal(self, mean, sd):
        if self.spare is not None:
            z, self.spare = self.spare, None
            return mean + sd * z
        u1 = self.uniform()
        while u1 <= 0.0:
            u1 = self.uniform()
        u2 = self.uniform()
        mag = math.sqrt(-2.0 * math.log(u1))
        self.spare = mag * math.sin(2.0 * math.pi * u2)
        return mean + sd * mag * math.cos(2.0 * math.pi * u2)


def round_half_away(x):
    return math.copysign(math.floor(abs(x) + 0.5), x)


def generate(seed, banks, rows, columns, density, mean, spread):
    rng = Stream(seed)
    bits = columns * 8
    lo, hi, sd = max(1.0, mean - spread), mean + spread, spread / 2.0
    log_miss = math.log1p(-density)
    cells = []
    for bank in range(banks):
        for row in range(rows):
            bit = 0
            while True:
                u = rng.uniform()
                while u <= 0.0:
                    u = rng.uniform()
                bit += math.floor(math.log(u) / log_miss)
                if bit >= bits:
                    break
                t = min(max(round_half_away(rng.normal(mean, sd)), lo), hi)
                orientation = "0to1" if rng.engine.next() >> 63 else "1to0"
                cells.append({"bank": bank, "row": row, "bit": bit, "threshold": int(t), "orientation": orientation})
                bit += 1
    return cells


if __name__ == "__main__":
    params = {"seed": 7, "banks": 2, "rows": 64, "columns": 256, "density": 0.001, "mean": 50000.0, "spread": 10000.0}
    cells = generate(**params)
    with open("golden_profile_seed7.json", "w") as f:
        json.dump({"params": params, "cells": cells}, f, indent=1)
        f.write("\n")
    print(len(cells), "cells")

#!/usr/bin/env python3
"""Reference outputs for the Philox4x64-10 generator, taken from numpy.

numpy.random.Philox implements the standard Philox-4x64 with 10 rounds;
random_raw() returns the raw 64-bit outputs in block order. The C++
implementation must match these words bit for bit.

Run:  python3 tests/oracles/philox_reference.py
"""

import numpy as np


def raw(counter, key, n):
    bg = np.random.Philox(counter=counter, key=key)
    return bg.random_raw(n)


def show(label, counter, key, n=8):
    words = raw(counter, key, n)
    print(label)
    for w in words:
        print(f"  0x{w:016x}")


show("counter=0 key=0", [0, 0, 0, 0], [0, 0])
show("counter=(1,2,3,4) key=(5,6)", [1, 2, 3, 4], [5, 6])
show("counter=max key=max", [2**64 - 1] * 4, [2**64 - 1] * 2, n=4)
show("counter=0 key=(42,7)", [0, 0, 0, 0], [42, 7], n=8)
show("counter=0 key=(0xdeadbeef, 0)", [0, 0, 0, 0], [0xDEADBEEF, 0], n=4)

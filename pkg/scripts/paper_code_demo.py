#!/usr/bin/env python3
"""Decode noisy observations of the 3x4 example code and compare with ML decoding."""
import itertools

import numpy as np

from bpsat.ldpc import ParityInstance, decode, syndrome

H = np.array([[1, 1, 1, 0], [1, 1, 0, 1], [0, 1, 1, 1]])
WORDS = [np.array(c) for c in itertools.product((0, 1), repeat=4) if not syndrome(H, c).any()]

rng = np.random.default_rng(0)
for flip in (0.05, 0.15, 0.3):
    agree = fails = 0
    for _ in range(500):
        sent = WORDS[rng.integers(len(WORDS))]
        conf = rng.uniform(1 - flip, 1.0 - 1e-3, size=4)
        noisy = np.where(rng.random(4) < flip, 1 - sent, sent)
        p1 = np.where(noisy == 1, conf, 1 - conf)
        ml = max(WORDS, key=lambda c: np.prod(np.where(c == 1, p1, 1 - p1)))
        res = decode(ParityInstance.from_matrix(H, p1))
        if not res.ok:
            fails += 1
        elif np.array_equal(res.bits, ml):
            agree += 1
    print(f"flip={flip:.2f}: BP == ML in {agree}/500, decode failures {fails}")

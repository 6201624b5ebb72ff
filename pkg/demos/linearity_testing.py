"""
Testing linearity on the slice
==============================

Plant a parity L_S, corrupt a fraction of the slice, and watch the quadruple
test's pass rate and the Fourier decoder's agreement degrade together.
"""
import math

import numpy as np

from slicelab import decode_linear, gowers_test_pass_rate, linearity_pass_rate, planted_linear, slice_spec

S = 0b000100101101
for eta in (0.0, 0.05, 0.1, 0.2, 0.3):
    f = planted_linear(12, S, flip=eta, seed=7)
    rate = linearity_pass_rate(f).pass_rate
    dec = decode_linear(f)
    eps = rate - 0.5
    bar = 0.5 + math.sqrt(max(eps, 0)) / 200
    print(f"flip {eta:.2f}  pass {rate:.4f}  decoded {dec.subset:#06x} agreement {dec.agreement:.4f}  bar {bar:.4f}")

# sampled version for a cube too large to enumerate
f = planted_linear(20, S, flip=0.1, seed=7)
print(linearity_pass_rate(f, mode="mc", trials=20000, seed=1))

# the 2-Gowers test rejects the quadratic x_0 x_1 now and then, a parity never
x = np.arange(64)
quad = np.where(slice_spec(6).members(), (x & 0b11) == 0b11, 0).astype(float)
print(gowers_test_pass_rate(quad, 2))
print(gowers_test_pass_rate(planted_linear(6, 0b101), 2))

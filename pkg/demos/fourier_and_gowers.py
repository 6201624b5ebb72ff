"""
Fourier spectra and Gowers norms of small cube functions
========================================================

Indices are little-endian: bit i of x is the coordinate x_i.
"""
import numpy as np

from slicelab import character_table, gowers_norm_bruteforce, gowers_norm_exact, level_weight, wht

# a character is a single spike in the spectrum
chi = character_table(0b0101, 4)
print([(s, float(c)) for s, c in wht(chi).top(2)])

# the indicator of the zero vector spreads evenly: every coefficient is 1/16
delta = np.zeros(16)
delta[0] = 1
spec = wht(delta)
print(spec.coeffs)
print("weight up to level 1:", level_weight(spec, 1))

# U_2 through the spectrum agrees with direct enumeration of additive quadruples
rng = np.random.default_rng(0)
f = rng.uniform(-1, 1, 64)
print(gowers_norm_exact(f, 2).value_pow, gowers_norm_bruteforce(f, 2))

# the norms grow with the order
for s in (1, 2, 3, 4):
    print(s, gowers_norm_exact(f, s).value)

"""Slow, independent reference computations used to freeze expected values.

Nothing here imports the code paths it checks: Fourier coefficients come from
direct inner products, symmetric spectra from Krawtchouk polynomials, and the
testers' counts from plain loops.
"""
from fractions import Fraction
from itertools import product
from math import comb


def popcount(x):
    return bin(x).count("1")


def fourier_direct(values):
    n = len(values)
    return [sum(values[x] * (-1) ** popcount(s & x) for x in range(n)) / n for s in range(n)]


def krawtchouk(m, size, t):
    """sum_{x : |x| = t} chi_S(x) for any |S| = size."""
    return sum((-1) ** i * comb(size, i) * comb(m - size, t - i) for i in range(0, min(size, t) + 1))


def symmetric_u2_pow(m, by_weight):
    """Exact ||f||_{U_2}^4 for f(x) = by_weight[|x|] (Fractions in, Fraction out)."""
    total = Fraction(0)
    for size in range(m + 1):
        coeff = sum(Fraction(by_weight[t]) * krawtchouk(m, size, t) for t in range(m + 1)) / 2**m
        total += comb(m, size) * coeff**4
    return total


def dense_model_by_weight(m, k):
    n = m // 2
    mod = 2 ** (k - 1)
    slice_count = comb(m, n)
    res_weights = [t for t in range(m + 1) if t % mod == n % mod]
    res_count = sum(comb(m, t) for t in res_weights)
    return [
        (Fraction(2**m, slice_count) if t == n else 0) - (Fraction(2**m, res_count) if t in res_weights else 0)
        for t in range(m + 1)
    ]


def slice_points(m):
    return [x for x in range(2**m) if popcount(x) == m // 2]


def linearity_counts_naive(f, m):
    U = slice_points(m)
    inU = set(U)
    passes = total = 0
    for x, y, z in product(U, U, U):
        w = x ^ y ^ z
        if w in inU:
            total += 1
            passes += (int(f[x]) ^ int(f[y]) ^ int(f[z]) ^ int(f[w])) == 0
    return passes, total


def parallelepiped_count_naive(m, d):
    inU = set(slice_points(m))
    count = 0
    for x in inU:
        for hs in product(range(2**m), repeat=d):
            pts = [x]
            for h in hs:
                pts = pts + [p ^ h for p in pts]
            count += all(p in inU for p in pts)
    return count


def gowers_test_counts_naive(f, m, d):
    inU = set(slice_points(m))
    passes = total = 0
    for x in inU:
        for hs in product(range(2**m), repeat=d):
            pts = [x]
            for h in hs:
                pts = pts + [p ^ h for p in pts]
            if all(p in inU for p in pts):
                total += 1
                par = 0
                for p in pts:
                    par ^= int(f[p])
                passes += par == 0
    return passes, total


def orbit_by_permutations(subset, atoms, m):
    """Apply every atom-preserving permutation explicitly."""
    from itertools import permutations

    blocks = [[i for i in range(m) if a >> i & 1] for a in atoms if a]
    out = set()
    for images in product(*[permutations(b) for b in blocks]):
        perm = list(range(m))
        for b, img in zip(blocks, images):
            for src, dst in zip(b, img):
                perm[src] = dst
        out.add(sum(1 << perm[i] for i in range(m) if subset >> i & 1))
    return out

"""Exhaustive invariant checks at small dimension, used by ``slicelab selftest``."""
from __future__ import annotations

import itertools
import math

import numpy as np

from .bitcore import BitVector, and_, popcounts, weight, xor
from .fourier import level_weight, parseval_gap, wht, wht_unnormalized
from .gowers import derivative, gowers_norm_bruteforce, gowers_norm_exact
from .nonclassical import residue_decomposition_check, verify_degree, weight_polynomial
from .slicemodel import (
    AtomAlgebra,
    atom_weight_determinism_check,
    residue_identity_violations,
    orbit_enumerate,
    orbit_size,
    residue_spec,
    slice_spec,
)
from .testers import linearity_counts, linearity_counts_fourier, parallelepiped_probability_check, planted_linear


def _xor_group(dim):
    pts = [BitVector(b, dim) for b in range(1 << dim)]
    zero = BitVector(0, dim)
    for u, v in itertools.product(pts, pts):
        if xor(u, v) != xor(v, u) or xor(u, u) != zero:
            return False
        for w in pts:
            if xor(xor(u, v), w) != xor(u, xor(v, w)):
                return False
    return True


def _weight_identity(dim):
    return all(
        weight(xor(u, v)) == weight(u) + weight(v) - 2 * weight(and_(u, v))
        for u, v in itertools.product((BitVector(b, dim) for b in range(1 << dim)), repeat=2)
    )


def _random_tables(rng, count, dim):
    return [rng.uniform(-1, 1, 1 << dim) for _ in range(count)]


def _fourier_checks(rng, dim):
    tables = _random_tables(rng, 20, dim)
    parseval = max(parseval_gap(f) for f in tables)
    invol = max(
        float(np.max(np.abs(wht_unnormalized(wht_unnormalized(f)) - (1 << dim) * f))) for f in tables
    )
    bound = all(np.max(np.abs(wht(f).coeffs)) <= math.fsum(np.abs(f)) / len(f) * (1 + 1e-12) for f in tables)
    mono = all(
        all(level_weight(wht(f), d) <= level_weight(wht(f), d + 1) for d in range(dim)) for f in tables[:5]
    )
    return parseval, invol, bound and mono


def _orbits_ok(dim, rng):
    gens = [()]
    for t in (1, 2):
        gens += [tuple(int(g) for g in rng.integers(0, 1 << dim, t)) for _ in range(3)]
    for g in gens:
        alg = AtomAlgebra(dim, g)
        for s in range(1 << dim):
            if orbit_size(s, alg) != len(orbit_enumerate(s, alg)):
                return False
            if alg.contains(s) and orbit_size(s, alg) != 1:
                return False
    return True


def run_selftest(max_dim: int = 8, seed: int = 20240101):
    """Return ``(rows, ok)`` where rows are ``(check, PASS|FAIL, detail)``."""
    rng = np.random.Generator(np.random.PCG64(seed))
    dim = min(max_dim, 8)
    rows = []

    def record(name, ok, detail=""):
        rows.append((name, "PASS" if ok else "FAIL", detail))

    record("xor_group_dim4", _xor_group(min(dim, 4)))
    record(f"weight_identity_dim{dim}", _weight_identity(dim))

    parseval, invol, bounds = _fourier_checks(rng, dim)
    record("parseval", parseval <= 1e-12, f"max_rel_gap={parseval:.3e}")
    record("wht_involution", invol <= 1e-9, f"max_abs_err={invol:.3e}")
    record("coefficient_bounds_and_level_monotone", bounds)

    small = min(dim, 6)
    gap = 0.0
    for f in _random_tables(rng, 5, small):
        a = gowers_norm_exact(f, 2).value_pow
        b = gowers_norm_bruteforce(f, 2)
        gap = max(gap, abs(a - b) / max(abs(b), 1e-300))
    record("u2_fourier_vs_direct", gap <= 1e-10, f"max_rel_gap={gap:.3e}")

    mono = True
    for f in _random_tables(rng, 5, dim):
        u = [gowers_norm_exact(f, s).value for s in (1, 2, 3)]
        mono &= u[0] <= u[1] + 1e-9 and u[1] <= u[2] + 1e-9
    record("gowers_monotone_u1_u2_u3", mono)

    # integer entries keep the four-fold products exact
    f = rng.integers(-3, 4, 1 << dim).astype(float)
    record("derivative_commutes", np.array_equal(derivative(derivative(f, 3), 5), derivative(derivative(f, 5), 3)))

    record(f"intersection_residue_dim{dim}", residue_identity_violations(dim) == 0)
    record("orbit_closed_form", _orbits_ok(dim, rng))
    half = (1 << dim // 2) - 1
    record("atom_weight_determinism", atom_weight_determinism_check(AtomAlgebra(dim, (half, half << dim // 4))))

    dens_ok = True
    for m in range(2, dim + 1, 2):
        w = popcounts(m)
        for k in (1, 2, 3):
            spec = residue_spec(m, k)
            dens_ok &= bool(np.array_equal(spec.members(), np.isin(w, spec.weights())))
            dens_ok &= 1 / 2**k <= spec.density() <= 1
            dens_ok &= bool(np.all(spec.members()[slice_spec(m).members()]))
    record("residue_class_union_and_density", dens_ok)

    pp_ok = True
    for m, d in itertools.product((4, 6, 8), (1, 2)):
        if m > dim:
            continue
        chk = parallelepiped_probability_check(m, d)
        pp_ok &= chk.holds and (chk.equality or d != 1)
    record("parallelepiped_probability_bound", pp_ok)

    lin = planted_linear(min(dim, 6), 0b101)
    p1, t1 = linearity_counts(lin)
    noisy = planted_linear(min(dim, 6), 0b101, flip=0.2, seed=1)
    record("linearity_counts", p1 == t1 and linearity_counts(noisy) == linearity_counts_fourier(noisy))

    deg_ok = all(
        verify_degree(weight_polynomial(min(dim, 6), j, d), d) and not verify_degree(weight_polynomial(min(dim, 6), j, d), d - 1)
        for d in (1, 2, 3)
        for j in range(1, 1 << d, 2)
    )
    record("weight_polynomial_degrees", deg_ok)
    record("residue_decomposition", all(residue_decomposition_check(dim, d) for d in (1, 2, 3)))

    return rows, all(r[1] == "PASS" for r in rows)

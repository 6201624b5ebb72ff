"""Multiplicative derivatives and Gowers uniformity norms.

``||f||_{U_s}^{2^s} = E_{x,h_1..h_s} prod_{T subset [s]} C^{|T|} f(x + h_T)``.

Exact evaluation for ``s >= 3`` averages ``||d_{h_1..h_{s-2}} f||_{U_2}^4``
over every outer direction tuple, with the inner ``U_2`` power taken from the
spectrum (``sum_S |fhat(S)|^4``).  The Monte Carlo estimator samples the outer
directions only and keeps the inner step exact.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .bitcore import DimensionError, as_table, dim_of, popcounts
from .fourier import MAX_WHT_DIM, wht_unnormalized

# log2 of the number of table entries touched by the exact recursion
EXACT_WORK_BITS = 30
Z95 = 1.959963984540054


class BudgetExceeded(DimensionError):
    pass


@dataclass(frozen=True)
class GowersEstimate:
    s: int
    value_pow: float
    value: float
    mode: str
    samples: int = 0
    seed: int | None = None
    ci_radius: float = 0.0
    std_error: float = 0.0
    clipped: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


def _estimate(s, value_pow, mode, samples=0, seed=None, std_error=0.0):
    clipped = value_pow < 0
    value = 0.0 if clipped else value_pow ** (1.0 / (1 << s))
    return GowersEstimate(s, value_pow, value, mode, samples, seed, Z95 * std_error, std_error, clipped)


def derivative(f, h: int) -> np.ndarray:
    """``x -> conj(f(x ^ h)) * f(x)``."""
    f = as_table(f)
    m = dim_of(f)
    h = int(h)
    if h < 0 or h >> m:
        raise DimensionError(f"direction {h:#x} does not fit dimension {m}")
    idx = np.arange(len(f)) ^ h
    return as_table(np.conj(f[idx]) * f)


def _derivative_rows(f: np.ndarray, directions: np.ndarray) -> np.ndarray:
    """Row ``r`` holds ``d_{h_1..h_j} f`` for the direction tuple ``directions[r]``."""
    idx = np.arange(len(f))
    rows = np.broadcast_to(f, (len(directions), len(f)))
    for col in range(directions.shape[1]):
        shifted = np.take_along_axis(rows, idx[None, :] ^ directions[:, col : col + 1], axis=1)
        rows = np.conj(shifted) * rows
    return rows


def _u2_pow_rows(rows: np.ndarray) -> np.ndarray:
    """``sum_S |fhat(S)|^4`` for each row, correctly rounded."""
    n = rows.shape[1]
    spec = np.abs(wht_unnormalized(rows, axis=1) / n) ** 4
    return np.array([math.fsum(r) for r in spec])


def _outer_values(f, s, directions, threads, batch=None):
    """Inner ``U_2`` powers for each outer direction tuple, in input order."""
    if batch is None:
        batch = max(1, (1 << 20) // len(f))
    chunks = [directions[i : i + batch] for i in range(0, len(directions), batch)]
    work = lambda d: _u2_pow_rows(_derivative_rows(f, d))
    if threads and threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(work, chunks))
    else:
        parts = [work(c) for c in chunks]
    return np.concatenate(parts) if parts else np.zeros(0)


def gowers_norm_exact(f, s: int, threads: int = 1, symmetric: bool = False) -> GowersEstimate:
    """Exact ``U_s`` norm.

    ``symmetric=True`` declares ``f`` invariant under coordinate permutations;
    for ``s = 3`` the outer average then runs over one direction per weight.
    """
    f = as_table(f)
    m = dim_of(f)
    if s < 1:
        raise ValueError("order s must be >= 1")
    if s == 1:
        mu = abs(complex(math.fsum(f.real), math.fsum(np.imag(f)))) / len(f)
        return _estimate(1, mu * mu, "exact")
    if m > MAX_WHT_DIM:
        raise BudgetExceeded(f"dimension {m} too large for the exact U_2 step")
    if s == 2:
        return _estimate(2, float(_u2_pow_rows(f[None, :])[0]), "exact")
    if symmetric and s == 3:
        reps = np.array([[(1 << w) - 1] for w in range(m + 1)], dtype=np.int64)
        vals = _outer_values(f, s, reps, threads)
        weights = [math.comb(m, w) for w in range(m + 1)]
        return _estimate(3, math.fsum(c * v for c, v in zip(weights, vals)) / (1 << m), "exact")
    if m * (s - 1) > EXACT_WORK_BITS:
        raise BudgetExceeded(
            f"exact U_{s} at dimension {m} needs 2^{m * (s - 1)} work; use gowers_norm_mc"
        )
    grids = np.meshgrid(*[np.arange(1 << m, dtype=np.int64)] * (s - 2), indexing="ij")
    directions = np.stack([g.ravel() for g in grids], axis=1)
    vals = _outer_values(f, s, directions, threads)
    return _estimate(s, math.fsum(vals) / len(vals), "exact")


def gowers_norm_mc(f, s: int, samples: int, seed: int = 0, threads: int = 1) -> GowersEstimate:
    """Monte Carlo ``U_s`` for ``s >= 3``: random outer directions, exact inner ``U_2``.

    All directions are drawn up front from one PCG64 stream, so the result
    depends only on ``seed``, never on ``threads``.
    """
    f = as_table(f)
    m = dim_of(f)
    if s < 3:
        raise ValueError("Monte Carlo is for s >= 3; use gowers_norm_exact")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    directions = rng.integers(0, 1 << m, size=(samples, s - 2), dtype=np.int64)
    vals = _outer_values(f, s, directions, threads)
    est = math.fsum(vals) / samples
    if samples > 1:
        var = math.fsum((vals - est) ** 2) / (samples - 1)
        se = math.sqrt(var / samples)
    else:
        se = 0.0
    return _estimate(s, est, "monte-carlo", samples, seed, se)


def gowers_norm_bruteforce(f, s: int) -> float:
    """``||f||_{U_s}^{2^s}`` straight from the parallelepiped average.

    Costs ``2^{m(s+1)}``; meant as an independent check at tiny dimension.
    """
    f = as_table(f)
    m = dim_of(f)
    n = 1 << m
    if m * (s + 1) > 26:
        raise BudgetExceeded("brute-force Gowers norm is for tiny dimensions")
    x = np.arange(n)[:, None]
    last = np.arange(n)[None, :]
    total = []
    for hs in itertools.product(range(n), repeat=s - 1):
        hs = hs + (None,)
        prod = np.ones((n, n), dtype=f.dtype)
        for t in range(1 << s):
            pt = np.broadcast_to(x, (n, n)).copy()
            for i in range(s - 1):
                if t >> i & 1:
                    pt ^= hs[i]
            if t >> (s - 1) & 1:
                pt = pt ^ last
            val = f[pt]
            prod = prod * (np.conj(val) if (t.bit_count() & 1) else val)
        total.append(prod.sum())
    out = complex(sum(total)) / float(n) ** (s + 1)
    return out.real if abs(out.imag) < 1e-12 else out


def weight_symmetric(f) -> bool:
    """True iff the table depends on the Hamming weight only."""
    f = as_table(f)
    w = popcounts(dim_of(f))
    first = np.zeros(w.max() + 1, dtype=f.dtype)
    first[w[::-1]] = f[::-1]
    return bool(np.array_equal(first[w], f))

"""Walsh-Hadamard transform, Fourier coefficients and level weights.

Coefficients are expectations, ``fhat(S) = E_x f(x) chi_S(x)``, with
``chi_S(x) = (-1)^{|S & x|}`` and subsets encoded as bit masks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bitcore import DimensionError, as_table, dim_of, popcounts

MAX_WHT_DIM = 28


@dataclass(frozen=True)
class FourierSpectrum:
    dim: int
    coeffs: np.ndarray

    def __getitem__(self, subset: int):
        return self.coeffs[subset]

    def top(self, k: int) -> list[tuple[int, float]]:
        """The ``k`` largest coefficients by magnitude, ties to the smaller mask."""
        order = np.lexsort((np.arange(len(self.coeffs)), -np.abs(self.coeffs)))
        return [(int(s), self.coeffs[s]) for s in order[:k]]


def character_eval(subset: int, x: int) -> int:
    return -1 if (int(subset) & int(x)).bit_count() & 1 else 1


def wht_unnormalized(values, axis: int = -1) -> np.ndarray:
    """Butterfly ``F(S) = sum_x f(x) chi_S(x)`` along ``axis``.

    Works on stacked tables (2-d input) and on integer dtypes, where it is
    exact.  Only elementwise adds are used, so each row is bit-identical no
    matter how many rows are stacked.
    """
    a = np.moveaxis(np.array(values, copy=True), axis, -1)
    lead = a.shape[:-1]
    n = a.shape[-1]
    m = dim_of(a[(0,) * len(lead)] if lead else a)
    if m > MAX_WHT_DIM:
        raise DimensionError(f"WHT dimension {m} exceeds {MAX_WHT_DIM}")
    h = 1
    while h < n:
        a = a.reshape(*lead, n // (2 * h), 2, h)
        lo = a[..., 0, :]
        hi = a[..., 1, :]
        a = np.stack((lo + hi, lo - hi), axis=-2)
        h *= 2
    return np.moveaxis(a.reshape(*lead, n), -1, axis)


def wht(f) -> FourierSpectrum:
    f = as_table(f)
    m = dim_of(f)
    if m > MAX_WHT_DIM:
        raise DimensionError(f"WHT dimension {m} exceeds {MAX_WHT_DIM}")
    coeffs = wht_unnormalized(f) / float(1 << m)
    coeffs.flags.writeable = False
    return FourierSpectrum(m, coeffs)


def inverse_wht(spec: FourierSpectrum) -> np.ndarray:
    return as_table(wht_unnormalized(spec.coeffs))


def subset_sizes(dim: int) -> np.ndarray:
    return popcounts(dim)


def level_weight(spec: FourierSpectrum, d: int) -> float:
    """``W_{<=d} = sum over |S| <= d of |fhat(S)|^2``."""
    if not 0 <= d <= spec.dim:
        raise ValueError(f"level {d} outside [0, {spec.dim}]")
    sel = spec.coeffs[subset_sizes(spec.dim) <= d]
    return math.fsum(np.abs(sel) ** 2)


def level_weights(spec: FourierSpectrum) -> np.ndarray:
    """Weight on each exact level ``|S| = 0..dim``."""
    sizes = subset_sizes(spec.dim)
    sq = np.abs(spec.coeffs) ** 2
    return np.array([math.fsum(sq[sizes == d]) for d in range(spec.dim + 1)])


@dataclass(frozen=True)
class LevelReport:
    alpha: float
    weight: float
    ratio: float
    count_bound: float  # alpha^2 * #{S : |S| <= d}


def level_inequality_report(f, d: int) -> LevelReport:
    """Level-d weight of a {-1,0,1}-valued table relative to ``alpha = E|f|``.

    Only the constant-free bound ``W <= alpha^2 * #{|S| <= d}`` is asserted;
    the polylogarithmic form has no explicit constant, so ``ratio = W/alpha^2``
    is returned for monitoring.
    """
    f = as_table(f)
    if not np.all(np.isin(f, (-1.0, 0.0, 1.0))):
        raise ValueError("level inequality needs a {-1, 0, 1}-valued table")
    alpha = math.fsum(np.abs(f)) / len(f)
    if alpha == 0:
        raise ValueError("alpha = E|f| is zero")
    spec = wht(f)
    w = level_weight(spec, d)
    n_sets = sum(math.comb(spec.dim, i) for i in range(d + 1))
    bound = alpha**2 * n_sets
    assert w <= bound * (1 + 1e-12), f"level weight {w} exceeds {bound}"
    return LevelReport(alpha, w, w / alpha**2, bound)


def parseval_gap(f) -> float:
    """Relative difference between ``sum fhat^2`` and ``E f^2``."""
    f = as_table(f)
    lhs = math.fsum(np.abs(wht(f).coeffs) ** 2)
    rhs = math.fsum(np.abs(f) ** 2) / len(f)
    return abs(lhs - rhs) / max(abs(rhs), 1e-300)

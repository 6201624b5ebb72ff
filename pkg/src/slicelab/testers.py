"""Linearity and d-Gowers tests on the slice, and Fourier-based linear decoding.

A slice function is a 0/1 table on the whole cube ``{0,1}^{2n}``; entries off
the slice are ignored.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from .bitcore import DimensionError, as_table, dim_of
from .fourier import wht, wht_unnormalized
from .slicemodel import residue_spec, sample_conditioned_batch, slice_spec
from .gowers import Z95

EXACT_LINEARITY_DIM = 12
EXACT_GOWERS_BITS = 26


@dataclass(frozen=True)
class TestOutcome:
    __test__ = False  # keep pytest from collecting this class

    pass_rate: float
    mode: str
    trials: int
    seed: int | None
    ci_radius: float
    passes: int

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class LinearDecoding:
    subset: int
    sign_bit: int
    coefficient: float
    agreement: float
    residue_density: float

    def predicted_agreement(self) -> float:
        """``1/2 + |fhat'(S)| / (2 mu(D))``; equals ``agreement`` up to rounding."""
        return 0.5 + abs(self.coefficient) / (2 * self.residue_density)

    def to_dict(self) -> dict:
        return asdict(self)


def _slice_bits(f):
    f = np.asarray(f)
    m = dim_of(f)
    if m % 2:
        raise DimensionError("slice functions live on an even dimension 2n")
    mem = slice_spec(m).members()
    vals = f[mem]
    if not np.all((vals == 0) | (vals == 1)):
        raise ValueError("slice function must be 0/1-valued on the slice")
    bits = np.where(mem, f, 0).astype(np.int64)
    return m, mem, bits


def _outcome(passes, trials, mode, seed):
    rate = passes / trials
    ci = 0.0 if mode == "exact" else Z95 * math.sqrt(rate * (1 - rate) / trials)
    return TestOutcome(rate, mode, trials, seed, ci, passes)


def linearity_counts(f) -> tuple[int, int]:
    """``(passes, total)`` over all slice quadruples ``x, y, z, x^y^z``.

    Exact integer enumeration: the number of valid ``z`` for a pair ``(x, y)``
    only depends on ``v = x ^ y``, so the counts are assembled from the
    slice autocorrelations of ``1_U`` and ``(-1)^f 1_U``.
    """
    m, mem, bits = _slice_bits(f)
    members = np.flatnonzero(mem)
    sign = np.where(mem, 1 - 2 * bits, 0).astype(np.int64)
    idx = np.arange(1 << m)
    plain = np.zeros(1 << m, dtype=np.int64)
    signed = np.zeros(1 << m, dtype=np.int64)
    for z in members:
        plain += mem[idx ^ z]
        signed += sign[z] * sign[idx ^ z]
    total = 0
    agree = 0
    for x in members:
        v = x ^ members
        total += int(plain[v].sum())
        agree += int((sign[x] * sign[members] * signed[v]).sum())
    # agree = sum over valid quadruples of (-1)^{f(x)+f(y)+f(z)+f(w)}
    return (total + agree) // 2, total


def linearity_counts_fourier(f) -> tuple[int, int]:
    """The same counts through the identity ``E F(x)F(y)F(z)F(x^y^z) = sum Fhat^4``."""
    m, mem, bits = _slice_bits(f)
    sign = np.where(mem, 1 - 2 * bits, 0).astype(object)
    plain = mem.astype(object)
    n = 1 << m
    # unnormalized spectra are integers; sum W^4 / 2^m counts the quadruples
    total = sum(int(w) ** 4 for w in wht_unnormalized(plain)) // n
    agree = sum(int(w) ** 4 for w in wht_unnormalized(sign)) // n
    return (total + agree) // 2, total


def linearity_pass_rate(f, mode: str = "exact", trials: int = 100_000, seed: int = 0) -> TestOutcome:
    if mode == "exact":
        m = dim_of(f)
        if m > EXACT_LINEARITY_DIM:
            raise DimensionError(f"exact linearity test needs 2n <= {EXACT_LINEARITY_DIM}; use mode='mc'")
        passes, total = linearity_counts(f)
        return _outcome(passes, total, "exact", None)
    if mode in ("mc", "monte-carlo"):
        m, _, bits = _slice_bits(f)
        rng = np.random.Generator(np.random.PCG64(seed))
        batch = sample_conditioned_batch(m, "quadruple", trials, rng)
        x, y, z = (batch.points[:, i].astype(np.int64) for i in range(3))
        parity = bits[x] ^ bits[y] ^ bits[z] ^ bits[x ^ y ^ z]
        return _outcome(int((parity == 0).sum()), trials, "monte-carlo", seed)
    raise ValueError(f"unknown mode {mode!r}")


def _parallelepipeds(m: int, d: int) -> np.ndarray:
    """All ``(count, 2^d)`` vertex arrays of parallelepipeds inside the slice.

    Vertex ``T`` is ``x ^ h_T``.  Built one direction at a time, pruning every
    partial configuration that already leaves the slice.
    """
    mem = slice_spec(m).members()
    verts = np.flatnonzero(mem)[:, None]
    cube = np.arange(1 << m)
    for _ in range(d):
        moved = verts[:, None, :] ^ cube[None, :, None]
        ok = mem[moved].all(axis=2)
        rows, hs = np.nonzero(ok)
        verts = np.concatenate([verts[rows], verts[rows] ^ cube[hs][:, None]], axis=1)
    return verts


def _check_gowers_budget(m, d):
    if m * (d + 1) > EXACT_GOWERS_BITS:
        raise DimensionError(
            f"exact d-Gowers enumeration needs 2n*(d+1) <= {EXACT_GOWERS_BITS}; use mode='mc'"
        )


def gowers_test_pass_rate(f, d: int, mode: str = "exact", trials: int = 100_000, seed: int = 0) -> TestOutcome:
    """Pass rate of ``sum_T f(x ^ h_T) = 0 (mod 2)`` over slice parallelepipeds."""
    if d < 1:
        raise ValueError("d must be >= 1")
    m, _, bits = _slice_bits(f)
    if mode == "exact":
        _check_gowers_budget(m, d)
        verts = _parallelepipeds(m, d)
        parity = np.bitwise_xor.reduce(bits[verts], axis=1)
        return _outcome(int((parity == 0).sum()), len(verts), "exact", None)
    if mode in ("mc", "monte-carlo"):
        rng = np.random.Generator(np.random.PCG64(seed))
        batch = sample_conditioned_batch(m, ("parallelepiped", d), trials, rng)
        x = batch.points[:, 0]
        parity = bits[x.astype(np.int64)].copy()
        pts = [x]
        for i in range(1, d + 1):
            pts = pts + [p ^ batch.points[:, i] for p in pts]
        for p in pts[1:]:
            parity ^= bits[p.astype(np.int64)]
        return _outcome(int((parity == 0).sum()), trials, "monte-carlo", seed)
    raise ValueError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class ParallelepipedCheck:
    probability: Fraction
    bound: Fraction

    @property
    def holds(self) -> bool:
        return self.probability >= self.bound

    @property
    def equality(self) -> bool:
        return self.probability == self.bound


def parallelepiped_probability_check(dim: int, d: int) -> ParallelepipedCheck:
    """``Pr_{x,h}[x ^ h_T in U for all T]`` against ``density^{2^d}``."""
    _check_gowers_budget(dim, d)
    count = len(_parallelepipeds(dim, d))
    prob = Fraction(count, 1 << (dim * (d + 1)))
    bound = slice_spec(dim).density() ** (1 << d)
    out = ParallelepipedCheck(prob, bound)
    assert out.holds, f"parallelepiped probability {prob} below {bound}"
    return out


def decode_linear(f, k_residue: int = 4) -> LinearDecoding:
    """Best affine parity for ``f`` on the slice via one Walsh-Hadamard transform.

    ``f'(x) = (-1)^{f(x)} 1_U(x) mu(D)/mu(U)`` with ``D = D_{2n,k_residue}``.
    The decoded subset maximises ``|f'hat(S)|`` (smallest mask on ties); a
    negative coefficient means the constant bit is 1.
    """
    m, mem, bits = _slice_bits(f)
    mu_d = residue_spec(m, k_residue).density()
    mu_u = slice_spec(m).density()
    fprime = np.where(mem, (1 - 2 * bits) * float(mu_d / mu_u), 0.0)
    coeffs = wht(fprime).coeffs
    mags = np.abs(coeffs)
    best = int(np.flatnonzero(mags == mags.max())[0])
    b = int(coeffs[best] < 0)
    return LinearDecoding(best, b, float(coeffs[best]), float(agreement(f, best, b)), float(mu_d))


def agreement(f, subset: int, b: int = 0) -> Fraction:
    """``Pr_{x in U}[f(x) = b + L_S(x)]`` exactly."""
    m, mem, bits = _slice_bits(f)
    members = np.flatnonzero(mem)
    lin = np.bitwise_count(members & subset) & 1
    return Fraction(int((bits[members] == (lin ^ b)).sum()), len(members))


@dataclass(frozen=True)
class FourierBoundCheck:
    eps: float
    max_coeff: float


def max_fourier_lower_bound_check(F) -> FourierBoundCheck:
    """``max_S |Fhat(S)| >= sqrt(eps)`` where ``eps = E F(x)F(y)F(z)F(x^y^z)``."""
    F = as_table(F)
    if np.max(np.abs(F)) > 1:
        raise ValueError("table must be bounded by 1 in absolute value")
    coeffs = np.abs(wht(F).coeffs)
    eps = math.fsum(coeffs**4)
    top = float(coeffs.max())
    assert top >= math.sqrt(max(eps, 0.0)) * (1 - 1e-12), f"max |Fhat| = {top} < sqrt({eps})"
    return FourierBoundCheck(eps, top)


def planted_linear(dim: int, subset: int, flip: float = 0.0, seed: int = 0, constant: int = 0) -> np.ndarray:
    """``L_S + constant`` with ``round(flip * |U|)`` slice points flipped at random."""
    mem = slice_spec(dim).members()
    x = np.arange(1 << dim)
    f = ((np.bitwise_count(x & subset) & 1) ^ constant).astype(np.int64)
    members = np.flatnonzero(mem)
    k = int(round(flip * len(members)))
    if k:
        rng = np.random.Generator(np.random.PCG64(seed))
        f[rng.choice(members, size=k, replace=False)] ^= 1
    return np.where(mem, f, 0).astype(np.float64)


def random_slice_function(dim: int, seed: int = 0) -> np.ndarray:
    mem = slice_spec(dim).members()
    rng = np.random.Generator(np.random.PCG64(seed))
    return np.where(mem, rng.integers(0, 2, 1 << dim), 0).astype(np.float64)


def quadruple_signed_mean(f) -> float:
    """``E[(-1)^{f(x)+f(y)+f(z)+f(x^y^z)} | all four in U]`` by direct summation."""
    passes, total = linearity_counts_fourier(f)
    return (2 * passes - total) / total


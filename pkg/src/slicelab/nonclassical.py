"""Torus-valued (non-classical) polynomials on the cube.

A :class:`TorusPolynomial` stores integer numerators modulo ``2^q``; the value
at ``x`` is ``num[x] / 2^q`` in ``[0, 1)``.  Everything stays exact: phases
``e^{2 pi i r/2^q}`` are summed as elements of the cyclotomic ring
``Z[w]/(w^{2^{q-1}} + 1)`` and only turned into floats for reporting.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .bitcore import DimensionError, dim_of, popcounts
from .slicemodel import DomainSpec, residue_spec

MAX_Q = 60
EXHAUSTIVE_DEGREE_BITS = 24


class RegimeError(ArithmeticError):
    """A biased-rank witness search found no admissible ``j``.

    This is the expected outcome when the instance is too small for the
    asymptotic chain of inequalities; ``profile`` holds the bias for every
    ``j``.
    """

    def __init__(self, message, profile=None, threshold=None):
        super().__init__(message)
        self.profile = profile
        self.threshold = threshold


@dataclass(frozen=True, eq=False)
class TorusPolynomial:
    dim: int
    numerators: np.ndarray
    q: int
    claimed_degree: int | None = None

    def __post_init__(self):
        if not 0 <= self.q <= MAX_Q:
            raise ValueError(f"denominator exponent q={self.q} outside [0, {MAX_Q}]")
        num = np.asarray(self.numerators, dtype=np.int64) % (1 << self.q)
        if len(num) != 1 << self.dim:
            raise DimensionError(f"need {1 << self.dim} values, got {len(num)}")
        num.flags.writeable = False
        object.__setattr__(self, "numerators", num)

    @classmethod
    def from_fractions(cls, values, claimed_degree=None) -> "TorusPolynomial":
        """Build from dyadic rationals (taken modulo 1)."""
        vals = [Fraction(v) for v in values]
        dim = dim_of(vals)
        q = 0
        for v in vals:
            den = v.denominator
            if den & (den - 1):
                raise ValueError(f"{v} is not a dyadic rational")
            q = max(q, den.bit_length() - 1)
        nums = [int(v * (1 << q)) % (1 << q) for v in vals]
        return cls(dim, np.array(nums, dtype=np.int64), q, claimed_degree)

    @classmethod
    def zero(cls, dim: int) -> "TorusPolynomial":
        return cls(dim, np.zeros(1 << dim, dtype=np.int64), 0, 0)

    def with_q(self, q: int) -> "TorusPolynomial":
        if q < self.q:
            raise ValueError("can only refine the denominator")
        return TorusPolynomial(self.dim, self.numerators << (q - self.q), q, self.claimed_degree)

    def reduced(self) -> "TorusPolynomial":
        """Same function with the smallest possible denominator."""
        num, q = self.numerators, self.q
        while q > 0 and not np.any(num & 1):
            num, q = num >> 1, q - 1
        return TorusPolynomial(self.dim, num, q, self.claimed_degree)

    def fractions(self) -> list[Fraction]:
        return [Fraction(int(v), 1 << self.q) for v in self.numerators]

    def values(self) -> np.ndarray:
        return self.numerators / float(1 << self.q)

    def _align(self, other):
        if self.dim != other.dim:
            raise DimensionError("dimension mismatch")
        q = max(self.q, other.q)
        return self.with_q(q), other.with_q(q), q

    def __add__(self, other):
        a, b, q = self._align(other)
        return TorusPolynomial(self.dim, a.numerators + b.numerators, q).reduced()

    def __sub__(self, other):
        a, b, q = self._align(other)
        return TorusPolynomial(self.dim, a.numerators - b.numerators, q).reduced()

    def __neg__(self):
        return TorusPolynomial(self.dim, -self.numerators, self.q, self.claimed_degree)

    def __rmul__(self, k: int):
        return TorusPolynomial(self.dim, int(k) * self.numerators, self.q).reduced()

    def __eq__(self, other):
        if not isinstance(other, TorusPolynomial):
            return NotImplemented
        a, b, _ = self._align(other)
        return bool(np.array_equal(a.numerators, b.numerators))

    __hash__ = None


def additive_derivative(p: TorusPolynomial, h: int) -> TorusPolynomial:
    """``x -> p(x ^ h) - p(x)`` modulo 1."""
    h = int(h)
    if h < 0 or h >> p.dim:
        raise DimensionError(f"direction {h:#x} does not fit dimension {p.dim}")
    idx = np.arange(1 << p.dim) ^ h
    return TorusPolynomial(p.dim, p.numerators[idx] - p.numerators, p.q)


def _vanishes(num, mod, dim, order, directions) -> bool:
    """DFS over nondecreasing direction tuples of the given order."""
    idx = np.arange(1 << dim)
    dirs = list(directions)

    def walk(table, start, left):
        if not np.any(table):
            return True
        if left == 0:
            return False
        for pos in range(start, len(dirs)):
            nxt = (table[idx ^ dirs[pos]] - table) % mod
            if not walk(nxt, pos, left - 1):
                return False
        return True

    return walk(num % mod, 0, order)


def verify_degree(p: TorusPolynomial, d: int, exhaustive: bool = False) -> bool:
    """True iff every derivative of order ``d + 1`` vanishes identically.

    Basis directions suffice because ``D_{h+k} p = (D_h p)(. + k) + D_k p``;
    ``exhaustive=True`` ranges over all directions instead.
    """
    if d < 0:
        return not np.any(p.numerators)
    mod = 1 << p.q
    if exhaustive:
        if p.dim * (d + 1) > EXHAUSTIVE_DEGREE_BITS:
            raise DimensionError("exhaustive degree check needs dim*(d+1) <= 24")
        directions = range(1, 1 << p.dim)
    else:
        directions = [1 << i for i in range(p.dim)]
    return _vanishes(p.numerators, mod, p.dim, d + 1, directions)


def degree(p: TorusPolynomial, max_degree: int | None = None) -> int:
    """Smallest ``d`` with :func:`verify_degree` true."""
    cap = max_degree if max_degree is not None else p.dim * max(p.q, 1) + 1
    for d in range(cap + 1):
        if verify_degree(p, d):
            return d
    raise ValueError(f"degree exceeds {cap}")


def weight_polynomial(dim: int, j: int, d: int, a: int = 0) -> TorusPolynomial:
    """``x -> j(|x| - a) / 2^d`` modulo 1."""
    if not 0 <= j < 1 << d:
        raise ValueError(f"j={j} outside [0, 2^{d})")
    num = j * (popcounts(dim) - a)
    out = TorusPolynomial(dim, num, d).reduced()
    return TorusPolynomial(dim, out.numerators, out.q, claimed_degree=out.q)


# --- cyclotomic sums --------------------------------------------------------


def cyclotomic_sum(counts, q: int) -> tuple[int, ...]:
    """``sum_r counts[r] w^r`` for a primitive ``2^q``-th root ``w``.

    Returned as integer coordinates on ``1, w, .., w^{2^{q-1}-1}``; the
    representation is unique, so equality of sums is exact.
    """
    counts = [int(c) for c in counts]
    if q == 0:
        return (sum(counts),)
    half = 1 << (q - 1)
    coef = [0] * half
    for r, c in enumerate(counts):
        r %= 1 << q
        coef[r % half] += -c if r >= half else c
    return tuple(coef)


def cyclotomic_to_complex(coef, q: int) -> complex:
    if q == 0:
        return complex(coef[0])
    n = 1 << q
    re = math.fsum(c * math.cos(2 * math.pi * i / n) for i, c in enumerate(coef) if c)
    im = math.fsum(c * math.sin(2 * math.pi * i / n) for i, c in enumerate(coef) if c)
    return complex(re, im)


def residue_decomposition_check(dim: int, d: int) -> bool:
    """``1_{|x| = 0 mod 2^d} = 2^{-d} sum_{j<2^d} e^{2 pi i j|x|/2^d}`` for every x.

    Checked exactly in the cyclotomic ring and again in floating point.
    """
    if dim > 20:
        raise DimensionError("residue decomposition check needs dim <= 20")
    weights = popcounts(dim)
    size = 1 << d
    exact_ok = np.zeros(dim + 1, dtype=bool)
    float_ok = np.zeros(dim + 1, dtype=bool)
    for t in range(dim + 1):
        counts = np.bincount([(j * t) % size for j in range(size)], minlength=size)
        lhs = size if t % size == 0 else 0
        coef = cyclotomic_sum(counts, d)
        exact_ok[t] = coef == cyclotomic_sum([lhs], d)
        approx = sum(np.exp(2j * np.pi * j * t / size) for j in range(size)) / size
        float_ok[t] = abs(approx - (t % size == 0)) <= 1e-12
    # the identity only sees |x|, so the pointwise check is a lookup
    return bool(exact_ok[weights].all() and float_ok[weights].all())


# --- correlations -----------------------------------------------------------


@dataclass(frozen=True)
class CorrelationReport:
    value: complex
    magnitude: float
    domain: DomainSpec
    size: int
    exact: tuple = field(default=(), repr=False)  # cyclotomic coordinates of the sum
    q: int = 0


def correlation(f=None, p: TorusPolynomial | None = None, domain: DomainSpec | None = None) -> CorrelationReport:
    """``E_{x in domain} (-1)^{f(x)} e^{2 pi i p(x)}``.

    ``f`` is a 0/1 table (or None for 0), ``p`` a torus polynomial (or None).
    """
    if f is None and p is None:
        raise ValueError("need f, p or both")
    dim = p.dim if p is not None else dim_of(f)
    if domain is None:
        domain = DomainSpec("cube", dim)
    if domain.dim != dim:
        raise DimensionError("domain and table dimensions differ")
    q = p.q if p is not None else 0
    if f is not None:
        q = max(q, 1)
    num = p.with_q(q).numerators.copy() if p is not None else np.zeros(1 << dim, dtype=np.int64)
    if f is not None:
        fb = np.asarray(f)
        if len(fb) != 1 << dim:
            raise DimensionError("f and p dimensions differ")
        num = num + (fb.astype(np.int64) & 1) * (1 << (q - 1))
    mem = domain.members()
    size = int(mem.sum())
    if size == 0:
        raise ValueError("empty domain")
    counts = np.bincount(num[mem] % (1 << q), minlength=1 << q)
    coef = cyclotomic_sum(counts, q)
    value = cyclotomic_to_complex(coef, q) / size
    return CorrelationReport(value, abs(value), domain, size, coef, q)


def bias(p: TorusPolynomial, domain: DomainSpec | None = None) -> float:
    return correlation(None, p, domain).magnitude


@dataclass(frozen=True)
class BiasedRankWitness:
    j: int
    residue_bias: float  # |E_x e^{2 pi i (P + j(|x|-a)/2^d)}| over the whole cube
    threshold: float
    slice_bias: float
    class_bias: float  # |E_{x in D} e^{2 pi i P}|
    profile: tuple[float, ...]


def biased_rank_witness(P: TorusPolynomial, dim: int, d: int, delta: float) -> BiasedRankWitness:
    """Find ``j`` making ``P + j(|x| - a)/2^d`` biased on the whole cube.

    With ``D = D_{2n,d+1}`` and ``1_D = 2^{-d} sum_j e^{2 pi i j(|x|-a)/2^d}``,
    a bias ``beta`` of ``P`` on ``D`` forces some ``j`` with cube bias at least
    ``beta * mu(D)``; the target here is ``delta * mu(D) / 2``.  Returns the
    maximizing ``j`` and raises :class:`RegimeError` when even that misses.
    """
    if P.dim != dim:
        raise DimensionError("polynomial dimension differs from dim")
    if not verify_degree(P, d):
        raise ValueError(f"P does not have degree <= {d}")
    n = dim // 2
    a = n % (1 << d)
    dom = residue_spec(dim, d + 1)
    slice_b = bias(P, DomainSpec("slice", dim))
    class_b = bias(P, dom)
    profile = tuple(bias(P + weight_polynomial(dim, j, d, a)) for j in range(1 << d))
    threshold = delta * float(dom.density()) / 2
    if slice_b < delta:
        raise RegimeError(f"slice bias {slice_b:.6g} is below delta={delta}", profile, threshold)
    best = max(range(1 << d), key=lambda j: (profile[j], -j))
    if profile[best] < threshold:
        raise RegimeError(
            f"no j reaches {threshold:.6g}; best j={best} with bias {profile[best]:.6g}", profile, threshold
        )
    shifted = P + weight_polynomial(dim, best, d, a)
    assert verify_degree(shifted, d), "shifted polynomial lost degree <= d"
    return BiasedRankWitness(best, profile[best], threshold, slice_b, class_b, profile)


def classical_polynomial(dim: int, monomials) -> TorusPolynomial:
    """``(sum of monomials over F_2) / 2``; each monomial is a coordinate mask."""
    x = np.arange(1 << dim)
    val = np.zeros(1 << dim, dtype=np.int64)
    for mono in monomials:
        val ^= ((x & mono) == mono).astype(np.int64)
    return TorusPolynomial(dim, val, 1, claimed_degree=max((int(m).bit_count() for m in monomials), default=0))


def check_claimed_degree(p: TorusPolynomial) -> bool:
    return p.claimed_degree is None or verify_degree(p, p.claimed_degree)


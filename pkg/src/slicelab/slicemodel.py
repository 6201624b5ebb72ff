"""The middle slice, residue-class unions and the dense-model distance.

``U_{2n}`` is the set of weight-``n`` points of ``{0,1}^{2n}``; ``D_{2n,k}``
collects the points whose weight is congruent to ``a = n mod 2^{k-1}`` modulo
``2^{k-1}``.  Densities and counting probabilities are exact
:class:`~fractions.Fraction` values.
"""
from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

from .bitcore import MAX_TABLE_DIM, BitVector, DimensionError, as_table, popcounts
from .gowers import GowersEstimate, gowers_norm_bruteforce, gowers_norm_exact, gowers_norm_mc

MAX_SAMPLER_DIM = 64
MAX_PROPOSALS = 10**7


@dataclass(frozen=True)
class DomainSpec:
    """``kind`` is ``"cube"``, ``"slice"`` or ``"residue"``; ``dim`` is ``2n``."""

    kind: str
    dim: int
    k: int | None = None

    def __post_init__(self):
        if self.kind not in ("cube", "slice", "residue"):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if not 0 <= self.dim <= MAX_SAMPLER_DIM:
            raise DimensionError(f"dimension {self.dim} outside [0, {MAX_SAMPLER_DIM}]")
        if self.kind != "cube" and self.dim % 2:
            raise ValueError("slice and residue domains need an even dimension 2n")
        if self.kind == "residue" and (self.k is None or self.k < 1):
            raise ValueError("residue domain needs k >= 1")

    @classmethod
    def parse(cls, text: str, dim: int) -> "DomainSpec":
        """``"cube"``, ``"slice"`` or ``"residue:<k>"``."""
        kind, _, k = text.partition(":")
        return cls(kind, dim, int(k) if k else None)

    @property
    def n(self) -> int:
        return self.dim // 2

    @property
    def modulus(self) -> int:
        return 1 << (self.k - 1)

    @property
    def residue(self) -> int:
        return self.n % self.modulus

    def contains_weight(self, t):
        if self.kind == "cube":
            return np.ones_like(t, dtype=bool) if isinstance(t, np.ndarray) else True
        if self.kind == "slice":
            return t == self.n
        return t % self.modulus == self.residue

    def weights(self) -> list[int]:
        return [t for t in range(self.dim + 1) if self.contains_weight(t)]

    def count(self) -> int:
        return sum(math.comb(self.dim, t) for t in self.weights())

    def density(self) -> Fraction:
        return Fraction(self.count(), 1 << self.dim)

    def members(self) -> np.ndarray:
        """Boolean membership table (``dim <= 28``)."""
        if self.dim > MAX_TABLE_DIM:
            raise DimensionError(f"dimension {self.dim} exceeds table cap {MAX_TABLE_DIM}")
        return np.asarray(self.contains_weight(popcounts(self.dim)))


def slice_spec(dim: int) -> DomainSpec:
    return DomainSpec("slice", dim)


def residue_spec(dim: int, k: int) -> DomainSpec:
    return DomainSpec("residue", dim, k)


def indicator(spec: DomainSpec, normalized: bool = False) -> np.ndarray:
    mem = spec.members()
    count = int(mem.sum())
    if count == 0:
        raise ValueError(f"empty domain {spec}")
    if not normalized:
        return as_table(mem.astype(np.float64))
    return as_table(np.where(mem, (1 << spec.dim) / count, 0.0))


def dense_model_difference(dim: int, k: int) -> np.ndarray:
    """``1_U / E[1_U] - 1_D / E[1_D]`` for the slice and ``D_{dim,k}``."""
    return as_table(indicator(slice_spec(dim), True) - indicator(residue_spec(dim, k), True))


def dense_model_distance(
    dim: int,
    k: int,
    s: int,
    mode: str = "exact",
    samples: int = 4096,
    seed: int = 0,
    threads: int = 1,
) -> GowersEstimate:
    """``||1_U/E1_U - 1_D/E1_D||_{U_s}`` with ``D = D_{dim,k}``.

    ``s = 1`` is exactly zero since both indicators are normalized to mean 1.
    """
    if s < 1:
        raise ValueError("order s must be >= 1")
    if s > k:
        raise ValueError(f"order s={s} exceeds k={k}")
    if s == 1:
        return GowersEstimate(1, 0.0, 0.0, "exact")
    diff = dense_model_difference(dim, k)
    if mode == "exact":
        return gowers_norm_exact(diff, s, threads=threads, symmetric=True)
    if mode in ("mc", "monte-carlo"):
        if s < 3:
            return gowers_norm_exact(diff, s)
        return gowers_norm_mc(diff, s, samples, seed, threads=threads)
    raise ValueError(f"unknown mode {mode!r}")


def dense_model_distance_direct(dim: int, k: int, s: int = 2) -> float:
    """The ``2^s``-th power by explicit parallelepiped enumeration (tiny dim)."""
    return gowers_norm_bruteforce(dense_model_difference(dim, k), s)


# --- weight identities ------------------------------------------------------


def weight_intersection_residue(x: BitVector, z: BitVector, j: int) -> int:
    """``|x & z| mod 2^{j-1}`` recovered from ``|x^z|, |x|, |z|`` modulo ``2^j``."""
    if j < 1:
        raise ValueError("j must be >= 1")
    if x.dim != z.dim:
        raise DimensionError("dimension mismatch")
    mod = 1 << j
    b = (x.bits ^ z.bits).bit_count() % mod
    c = x.bits.bit_count() % mod
    d = z.bits.bit_count() % mod
    assert (c + d - b) % 2 == 0, "c + d - b must be even"
    out = ((c + d - b) // 2) % (1 << (j - 1))
    assert out == (x.bits & z.bits).bit_count() % (1 << (j - 1))
    return out


def residue_identity_violations(dim: int, js: Iterable[int] = (1, 2, 3)) -> int:
    """Exhaustive count of ``(x, z, j)`` where the intersection identity fails."""
    pts = np.arange(1 << dim, dtype=np.int64)
    x, z = pts[:, None], pts[None, :]
    wx, wz = np.bitwise_count(x), np.bitwise_count(z)
    wxor = np.bitwise_count(x ^ z)
    wand = np.bitwise_count(x & z).astype(np.int64)
    bad = 0
    for j in js:
        mod = 1 << j
        s = (wx % mod) + (wz % mod) - (wxor % mod)
        odd = s % 2 != 0
        bad += int(odd.sum())
        bad += int(((s // 2) % (mod // 2) != wand % (mod // 2))[~odd].sum())
    return bad


# --- atom algebras ----------------------------------------------------------


@dataclass(frozen=True)
class AtomAlgebra:
    """The Boolean algebra generated by the supports of ``generators``.

    The atom with sign pattern ``b`` (bit ``i`` set means "inside supp x_i")
    is the intersection of the chosen supports and complements.
    """

    dim: int
    generators: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(int(g) for g in self.generators))
        for g in self.generators:
            if g < 0 or g >> self.dim:
                raise DimensionError(f"generator {g:#x} does not fit dimension {self.dim}")

    @classmethod
    def from_strings(cls, *gens: str) -> "AtomAlgebra":
        vs = [BitVector.from_string(g) for g in gens]
        if len({v.dim for v in vs}) != 1:
            raise DimensionError("generators have different dimensions")
        return cls(vs[0].dim, tuple(v.bits for v in vs))

    @property
    def t(self) -> int:
        return len(self.generators)

    @cached_property
    def atoms(self) -> tuple[tuple[int, int], ...]:
        """``(pattern, support mask)`` for all ``2^t`` patterns, empty ones included."""
        full = (1 << self.dim) - 1
        out = []
        for b in range(1 << self.t):
            mask = full
            for i, g in enumerate(self.generators):
                mask &= g if b >> i & 1 else full ^ g
            out.append((b, mask))
        return tuple(out)

    def nonempty_atoms(self) -> list[int]:
        return [mask for _, mask in self.atoms if mask]

    def span(self) -> list[int]:
        """Distinct XOR combinations of the generators, sorted."""
        out = {0}
        for g in self.generators:
            out |= {z ^ g for z in out}
        return sorted(out)

    def contains(self, subset: int) -> bool:
        return all(subset & a in (0, a) for a in self.nonempty_atoms())

    def distance(self, subset: int) -> int:
        """``min_B |S symdiff B|`` over members ``B`` of the algebra."""
        return sum(min((subset & a).bit_count(), (a & ~subset).bit_count()) for a in self.nonempty_atoms())


def joint_slice_probability(algebra: AtomAlgebra, targets: Mapping[int, int]) -> Fraction:
    """``Pr_x[|x ^ z| = targets[z] for all z]`` by exhaustive count.

    Keys of ``targets`` must lie in the span of the generators.
    """
    if algebra.dim > 20:
        raise DimensionError("exhaustive joint probability needs dim <= 20")
    span = set(algebra.span())
    for z in targets:
        if z not in span:
            raise ValueError(f"{z:#x} is not in the span of the generators")
    x = np.arange(1 << algebra.dim, dtype=np.int64)
    ok = np.ones(len(x), dtype=bool)
    for z, w in targets.items():
        ok &= np.bitwise_count(x ^ z) == w
    return Fraction(int(ok.sum()), 1 << algebra.dim)


@dataclass(frozen=True)
class SliceEventReport:
    probability: Fraction
    constrained: int
    ratio: float  # probability / n^{-2^{t-1}}; the hidden constant is not asserted


def all_in_slice_probability(algebra: AtomAlgebra, subset: Iterable[int] | None = None) -> SliceEventReport:
    """Probability that ``x ^ z`` lies in the slice for every ``z`` in ``subset``
    (default: the whole span)."""
    n = algebra.dim // 2
    zs = algebra.span() if subset is None else sorted(set(subset))
    p = joint_slice_probability(algebra, {z: n for z in zs})
    scale = float(n) ** (-(2.0 ** (algebra.t - 1))) if n else 1.0
    return SliceEventReport(p, len(zs), float(p) / scale)


def atom_weight_determinism_check(algebra: AtomAlgebra) -> bool:
    """Do the weights ``|x ^ z|`` over the span pin down every ``|x & x_b|``?"""
    if algebra.dim > 16 or algebra.t > 3:
        raise DimensionError("determinism check needs dim <= 16 and t <= 3")
    if algebra.t == 0:
        return True
    x = np.arange(1 << algebra.dim, dtype=np.int64)
    sig = np.stack([np.bitwise_count(x ^ z) for z in algebra.span()], axis=1)
    atoms = np.stack([np.bitwise_count(x & mask) for _, mask in algebra.atoms], axis=1)
    _, inv = np.unique(sig, axis=0, return_inverse=True)
    inv = inv.ravel()
    groups = inv.max() + 1
    for col in atoms.T:
        lo = np.full(groups, np.iinfo(np.int64).max)
        hi = np.full(groups, -1)
        np.minimum.at(lo, inv, col)
        np.maximum.at(hi, inv, col)
        if np.any(lo != hi):
            return False
    return True


def orbit_size(subset: int, algebra: AtomAlgebra) -> int:
    """``prod_B C(|B|, |S & B|)`` over the atoms."""
    out = 1
    for a in algebra.nonempty_atoms():
        out *= math.comb(a.bit_count(), (subset & a).bit_count())
    return out


def orbit_enumerate(subset: int, algebra: AtomAlgebra) -> set[int]:
    """The orbit of ``subset`` under atom-preserving permutations, by search.

    The group is generated by transpositions inside single atoms; the orbit is
    the closure of ``{subset}`` under them.
    """
    swaps = []
    for a in algebra.nonempty_atoms():
        idx = [i for i in range(algebra.dim) if a >> i & 1]
        swaps += [(i, j) for i, j in itertools.combinations(idx, 2)]
    seen = {subset}
    todo = deque([subset])
    while todo:
        s = todo.popleft()
        for i, j in swaps:
            if (s >> i ^ s >> j) & 1:
                t = s ^ (1 << i) ^ (1 << j)
                if t not in seen:
                    seen.add(t)
                    todo.append(t)
    return seen


def atom_permutations(algebra: AtomAlgebra):
    """Every permutation of ``range(dim)`` mapping each atom onto itself."""
    blocks = [[i for i in range(algebra.dim) if a >> i & 1] for a in algebra.nonempty_atoms()]
    for images in itertools.product(*[itertools.permutations(b) for b in blocks]):
        perm = list(range(algebra.dim))
        for b, img in zip(blocks, images):
            for src, dst in zip(b, img):
                perm[src] = dst
        yield perm


def apply_permutation(subset: int, perm) -> int:
    return sum(1 << perm[i] for i in range(len(perm)) if subset >> i & 1)


# --- conditioned sampling ---------------------------------------------------


class SamplerStall(RuntimeError):
    pass


def _random_cube(rng: np.random.Generator, dim: int, size) -> np.ndarray:
    raw = rng.bit_generator.random_raw(size).astype(np.uint64)
    if dim < 64:
        raw &= np.uint64((1 << dim) - 1)
    return raw


def _random_slice(rng: np.random.Generator, dim: int, size: int) -> np.ndarray:
    """Uniform weight-``dim/2`` words: a random subset of ``dim/2`` positions."""
    keys = rng.random((size, dim))
    pos = np.argsort(keys, axis=1, kind="stable")[:, : dim // 2].astype(np.uint64)
    return np.bitwise_or.reduce(np.left_shift(np.uint64(1), pos), axis=1) if dim else np.zeros(size, np.uint64)


def _shape_arity(shape) -> int:
    if shape == "quadruple":
        return 2
    kind, d = shape
    if kind != "parallelepiped" or d < 0:
        raise ValueError(f"unknown sampling shape {shape!r}")
    return d


def _vertices(x: np.ndarray, hs: list[np.ndarray], shape) -> list[np.ndarray]:
    if shape == "quadruple":
        y, z = hs
        return [x, y, z, x ^ y ^ z]
    out = [x]
    for h in hs:
        out = out + [v ^ h for v in out]
    return out


@dataclass
class SampleBatch:
    points: np.ndarray  # (count, arity + 1): x then y, z or h_1..h_d
    proposals: int
    accepted: int

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.proposals if self.proposals else 0.0


def sample_conditioned_batch(
    dim: int,
    shape,
    count: int,
    rng: np.random.Generator,
    max_proposals: int = MAX_PROPOSALS,
    chunk: int = 1 << 14,
) -> SampleBatch:
    """Rejection sampler for slice-conditioned quadruples or parallelepipeds.

    ``x`` is proposed uniformly on the slice, the other points uniformly on the
    cube; a proposal is kept iff every vertex has weight ``dim/2``.  Proposals
    are uniform on a superset of the constrained set, so the kept tuples are
    uniform on it.  ``shape`` is ``"quadruple"`` (returns ``x, y, z``) or
    ``("parallelepiped", d)`` (returns ``x, h_1..h_d``).
    """
    if dim % 2 or not 0 < dim <= MAX_SAMPLER_DIM:
        raise DimensionError(f"sampler needs an even dimension in (0, {MAX_SAMPLER_DIM}]")
    arity = _shape_arity(shape)
    n = dim // 2
    kept: list[np.ndarray] = []
    got = proposals = 0
    while got < count:
        if proposals >= max_proposals:
            if got == 0:
                raise SamplerStall(
                    f"no acceptance in {proposals} proposals (dim={dim}, shape={shape!r})"
                )
            raise SamplerStall(
                f"only {got}/{count} tuples after {proposals} proposals "
                f"(dim={dim}, shape={shape!r}, rate={got / proposals:.3g})"
            )
        size = min(chunk, max_proposals - proposals)
        x = _random_slice(rng, dim, size)
        hs = [_random_cube(rng, dim, size) for _ in range(arity)]
        ok = np.ones(size, dtype=bool)
        for v in _vertices(x, hs, shape)[1:]:
            ok &= np.bitwise_count(v) == n
        proposals += size
        if ok.any():
            kept.append(np.stack([x] + hs, axis=1)[ok])
            got += int(ok.sum())
    pts = np.concatenate(kept)[:count]
    return SampleBatch(pts, proposals, got)


def sample_conditioned(dim: int, shape, seed: int = 0) -> tuple[BitVector, ...]:
    rng = np.random.Generator(np.random.PCG64(seed))
    row = sample_conditioned_batch(dim, shape, 1, rng).points[0]
    return tuple(BitVector(int(v), dim) for v in row)


def vertices_of(row, shape) -> list[int]:
    """The vertex list of one sampled tuple (x, y, z, x^y^z or the 2^d corners)."""
    arity = _shape_arity(shape)
    cols = [np.asarray([int(v)], dtype=np.uint64) for v in row]
    return [int(v[0]) for v in _vertices(cols[0], cols[1 : arity + 1], shape)]

"""Bit vectors, dense function tables and the shared indexing convention.

Every table in the package is a dense numpy array of length ``2**m``.  Entry
``i`` holds the value at the point whose coordinate ``x_j`` is bit ``j`` of
``i`` (little-endian).  Bit strings such as ``"1100"`` list coordinates in
order, so ``"1000"`` is the integer 1.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

MAX_DIM = 32
MAX_TABLE_DIM = 28


class DimensionError(ValueError):
    """Raised when operands live in different dimensions or a cap is exceeded."""


class TableFormatError(ValueError):
    pass


@dataclass(frozen=True)
class BitVector:
    bits: int
    dim: int

    def __post_init__(self):
        if not 0 <= self.dim <= 64:
            raise DimensionError(f"dimension {self.dim} outside [0, 64]")
        if self.bits < 0 or self.bits >> self.dim:
            raise ValueError(f"bits {self.bits:#x} do not fit in dimension {self.dim}")

    @classmethod
    def from_string(cls, s: str) -> "BitVector":
        """Parse ``"1100"``; the first character is coordinate 0."""
        s = s.strip()
        if not s or set(s) - {"0", "1"}:
            raise ValueError(f"not a bit string: {s!r}")
        return cls(sum(1 << i for i, c in enumerate(s) if c == "1"), len(s))

    @classmethod
    def from_indices(cls, indices: Iterable[int], dim: int) -> "BitVector":
        return cls(mask_from_indices(indices), dim)

    def indices(self) -> list[int]:
        return [i for i in range(self.dim) if self.bits >> i & 1]

    def __str__(self):
        return "".join("1" if self.bits >> i & 1 else "0" for i in range(self.dim))

    def __int__(self):
        return self.bits

    def __index__(self):
        return self.bits

    def __xor__(self, other: "BitVector") -> "BitVector":
        return xor(self, other)

    def __and__(self, other: "BitVector") -> "BitVector":
        return and_(self, other)


def mask_from_indices(indices: Iterable[int]) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


def weight(v: BitVector | int) -> int:
    return int(v).bit_count()


def _check_same_dim(u: BitVector, v: BitVector):
    if u.dim != v.dim:
        raise DimensionError(f"dimension mismatch: {u.dim} != {v.dim}")


def xor(u: BitVector, v: BitVector) -> BitVector:
    _check_same_dim(u, v)
    return BitVector(u.bits ^ v.bits, u.dim)


def and_(u: BitVector, v: BitVector) -> BitVector:
    _check_same_dim(u, v)
    return BitVector(u.bits & v.bits, u.dim)


def popcounts(dim: int) -> np.ndarray:
    """Hamming weight of every index ``0 .. 2**dim - 1``."""
    if dim > MAX_TABLE_DIM:
        raise DimensionError(f"dimension {dim} exceeds table cap {MAX_TABLE_DIM}")
    return np.bitwise_count(np.arange(1 << dim, dtype=np.int64)).astype(np.int64)


def dim_of(values) -> int:
    n = len(values)
    m = n.bit_length() - 1
    if n == 0 or n != 1 << m:
        raise DimensionError(f"table length {n} is not a power of two")
    if m > MAX_TABLE_DIM:
        raise DimensionError(f"table dimension {m} exceeds cap {MAX_TABLE_DIM}")
    return m


def as_table(values, dtype=None) -> np.ndarray:
    """Validate a function table and return it as a read-only array.

    Real input becomes float64 and complex input complex128 unless ``dtype``
    says otherwise.  The input is never modified.
    """
    arr = np.asarray(values)
    if arr.ndim != 1:
        raise DimensionError("function tables are one-dimensional")
    dim_of(arr)
    if dtype is None:
        dtype = np.complex128 if np.iscomplexobj(arr) else np.float64
    arr = np.array(arr, dtype=dtype, copy=True)
    if not np.all(np.isfinite(arr)):
        raise ValueError("function table contains non-finite entries")
    arr.flags.writeable = False
    return arr


def table_from_function(func: Callable[[int], float], dim: int) -> np.ndarray:
    return as_table([func(x) for x in range(1 << dim)])


def pointwise_combine(tables: Sequence, combiner: Callable) -> np.ndarray:
    """Apply ``combiner`` entrywise, e.g. ``pointwise_combine([f, g], np.subtract)``."""
    if not tables:
        raise ValueError("need at least one table")
    arrays = [as_table(t) for t in tables]
    dims = {len(a) for a in arrays}
    if len(dims) != 1:
        raise DimensionError("tables have different dimensions")
    return as_table(combiner(*arrays))


def character_table(subset: int, dim: int) -> np.ndarray:
    """The +-1 table of the parity character indexed by the mask ``subset``."""
    w = np.bitwise_count(np.arange(1 << dim, dtype=np.int64) & subset)
    return as_table(1.0 - 2.0 * (w & 1))


def mean(values) -> float:
    """Correctly rounded average; the summation order never matters."""
    arr = np.asarray(values)
    if np.iscomplexobj(arr):
        return complex(math.fsum(arr.real), math.fsum(arr.imag)) / len(arr)
    return math.fsum(arr) / len(arr)


# --- table files -----------------------------------------------------------

_HEADER = re.compile(r"^\s*(dim|bits)\s*=\s*(\d+)\s*$")


def parse_table(text: str, exact: bool = False):
    """Parse the table file format.

    ``dim=<m>`` is followed by ``2**m`` whitespace separated numbers in index
    order; ``bits=<m>`` by a ``2**m`` character 0/1 string.  With ``exact``
    the values come back as a list of :class:`Fraction`.
    """
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise TableFormatError("empty table file")
    match = _HEADER.match(lines[0])
    if not match:
        raise TableFormatError(f"expected 'dim=<m>' or 'bits=<m>' header, got {lines[0]!r}")
    kind, m = match.group(1), int(match.group(2))
    if m > MAX_TABLE_DIM:
        raise TableFormatError(f"dimension {m} exceeds cap {MAX_TABLE_DIM}")
    body = "".join(lines[1:]) if kind == "bits" else " ".join(lines[1:])
    if kind == "bits":
        body = re.sub(r"\s+", "", body)
        if len(body) != 1 << m or set(body) - {"0", "1"}:
            raise TableFormatError(f"bits={m} needs a 0/1 string of length {1 << m}")
        vals = [int(c) for c in body]
        return [Fraction(v) for v in vals] if exact else as_table(vals)
    tokens = body.split()
    if len(tokens) != 1 << m:
        raise TableFormatError(f"dim={m} needs {1 << m} values, found {len(tokens)}")
    try:
        if exact:
            return [Fraction(t) for t in tokens]
        return as_table([float(Fraction(t)) if "/" in t else float(t) for t in tokens])
    except (ValueError, ZeroDivisionError) as exc:
        raise TableFormatError(f"malformed value in table: {exc}") from None


def read_table(path, exact: bool = False):
    return parse_table(Path(path).read_text(), exact=exact)


def format_table(values, boolean: bool | None = None) -> str:
    arr = np.asarray(values)
    m = dim_of(arr)
    if boolean is None:
        boolean = bool(np.all((arr == 0) | (arr == 1)))
    if boolean:
        return f"bits={m}\n" + "".join(str(int(v)) for v in arr) + "\n"
    return f"dim={m}\n" + "\n".join(repr(float(v)) for v in arr) + "\n"


def write_table(path, values, boolean: bool | None = None):
    Path(path).write_text(format_table(values, boolean))

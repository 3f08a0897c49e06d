"""Exact-rational constraints on Boolean variables and their elementary operators.

A constraint of arity k is a function {0,1}^k -> Q stored as a row vector of
2^k exact rationals in lexicographic input order, with x_1 as the most
significant bit.  Symmetric constraints (value depends only on the Hamming
weight of the input) admit a compact form [f_0, ..., f_k].

Variable indices in the public operators are 1-based, matching the row-vector
convention: ``pin(f, 1, 0)`` fixes the most significant input bit to 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import PreconditionError

RationalLike = Union[Fraction, int, str]


def sgn(v: RationalLike) -> int:
    """Sign of a rational: +1, 0, or -1."""
    v = Fraction(v)
    if v > 0:
        return 1
    if v < 0:
        return -1
    return 0


def _coerce(values: Iterable[RationalLike]) -> tuple[Fraction, ...]:
    return tuple(Fraction(v) for v in values)


@dataclass(frozen=True)
class Constraint:
    """Immutable table of 2^arity exact rational values."""

    arity: int
    values: tuple[Fraction, ...]

    def __post_init__(self):
        if self.arity < 0:
            raise PreconditionError("arity_nonnegative", f"arity={self.arity}")
        if len(self.values) != 1 << self.arity:
            raise PreconditionError(
                "table_length",
                f"arity {self.arity} needs {1 << self.arity} values, got {len(self.values)}",
            )

    @classmethod
    def from_table(cls, values: Sequence[RationalLike]) -> "Constraint":
        vals = _coerce(values)
        n = len(vals)
        if n == 0 or n & (n - 1):
            raise PreconditionError("table_length", f"{n} is not a power of two")
        return cls(n.bit_length() - 1, vals)

    @classmethod
    def symmetric(cls, entries: Sequence[RationalLike]) -> "Constraint":
        """Build from the compact form [f_0, ..., f_k] indexed by Hamming weight."""
        ent = _coerce(entries)
        k = len(ent) - 1
        if k < 0:
            raise PreconditionError("table_length", "empty compact form")
        table = tuple(ent[idx.bit_count()] for idx in range(1 << k))
        return cls(k, table)

    def value(self, bits: Sequence[int]) -> Fraction:
        if len(bits) != self.arity:
            raise PreconditionError("scope_arity", f"expected {self.arity} bits")
        idx = 0
        for b in bits:
            idx = (idx << 1) | (b & 1)
        return self.values[idx]

    def __getitem__(self, idx: int) -> Fraction:
        return self.values[idx]

    def is_symmetric(self) -> bool:
        return self.symmetric_values() is not None

    def symmetric_values(self) -> tuple[Fraction, ...] | None:
        """Compact form [f_0..f_k] if the table is weight-symmetric, else None."""
        ent: list[Fraction | None] = [None] * (self.arity + 1)
        for idx, v in enumerate(self.values):
            w = idx.bit_count()
            if ent[w] is None:
                ent[w] = v
            elif ent[w] != v:
                return None
        return tuple(ent)  # type: ignore[arg-type]

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.values)

    def max_abs(self) -> Fraction:
        return max(abs(v) for v in self.values)

    def scaled(self, c: RationalLike) -> "Constraint":
        c = Fraction(c)
        return Constraint(self.arity, tuple(v * c for v in self.values))

    def mirrored(self) -> "Constraint":
        """The constraint with every input bit complemented (compact form reversed)."""
        mask = (1 << self.arity) - 1
        return Constraint(self.arity, tuple(self.values[mask ^ i] for i in range(mask + 1)))

    def __repr__(self) -> str:
        sym = self.symmetric_values()
        if sym is not None:
            return "[" + ", ".join(str(v) for v in sym) + "]"
        return "(" + ", ".join(str(v) for v in self.values) + ")"


DELTA_0 = Constraint.symmetric([1, 0])
DELTA_1 = Constraint.symmetric([0, 1])
XOR = Constraint.symmetric([0, 1, 0])

DELTAS = {0: DELTA_0, 1: DELTA_1}


class ComplementClass(Enum):
    """Behaviour under the global bit flip x -> x XOR 1...1."""

    INVARIANT = "invariant"
    ANTI_INVARIANT = "anti_invariant"
    UNSTABLE = "unstable"


def complement_class(f: Constraint) -> ComplementClass:
    """Classify f against f(x) = +-f(x XOR 1...1); all-zero counts as invariant."""
    mask = (1 << f.arity) - 1
    if all(f.values[i] == f.values[mask ^ i] for i in range(mask + 1)):
        return ComplementClass.INVARIANT
    if all(f.values[i] == -f.values[mask ^ i] for i in range(mask + 1)):
        return ComplementClass.ANTI_INVARIANT
    return ComplementClass.UNSTABLE


def is_complement_stable(f: Constraint) -> bool:
    return complement_class(f) is not ComplementClass.UNSTABLE


def _check_index(f: Constraint, i: int) -> None:
    if not 1 <= i <= f.arity:
        raise PreconditionError("index_in_range", f"i={i}, arity={f.arity}")


def pin(f: Constraint, i: int, c: int) -> Constraint:
    """Fix variable x_i to the bit c, dropping it from the argument list."""
    if f.arity < 1:
        raise PreconditionError("arity_at_least_one", "cannot pin a scalar")
    _check_index(f, i)
    if c not in (0, 1):
        raise PreconditionError("bit_value", f"c={c}")
    k = f.arity
    low_width = k - i
    low_mask = (1 << low_width) - 1
    out = []
    for ridx in range(1 << (k - 1)):
        high = ridx >> low_width
        low = ridx & low_mask
        out.append(f.values[(high << (low_width + 1)) | (c << low_width) | low])
    return Constraint(k - 1, tuple(out))


def merge(f: Constraint, i: int, j: int) -> Constraint:
    """Identify variable x_i with x_j: the result takes f's arguments minus x_i."""
    if f.arity < 2:
        raise PreconditionError("arity_at_least_two", "cannot merge below arity 2")
    _check_index(f, i)
    _check_index(f, j)
    if i == j:
        raise PreconditionError("distinct_indices", f"i=j={i}")
    k = f.arity
    jr = j - 1 if j > i else j  # 1-based position of x_j in the reduced list
    low_width = k - i
    low_mask = (1 << low_width) - 1
    out = []
    for ridx in range(1 << (k - 1)):
        bit = (ridx >> (k - 1 - jr)) & 1
        high = ridx >> low_width
        low = ridx & low_mask
        out.append(f.values[(high << (low_width + 1)) | (bit << low_width) | low])
    return Constraint(k - 1, tuple(out))


def marginalize(f: Constraint, i: int) -> Constraint:
    """Sum variable x_i out of f: pin to 0 plus pin to 1, entrywise."""
    if f.arity < 1:
        raise PreconditionError("arity_at_least_one", "cannot marginalize a scalar")
    _check_index(f, i)
    p0, p1 = pin(f, i, 0), pin(f, i, 1)
    return Constraint(f.arity - 1, tuple(a + b for a, b in zip(p0.values, p1.values)))


def pointwise_power(f: Constraint, n: int) -> Constraint:
    """Raise every table entry to the n-th power (n >= 1)."""
    if n < 1:
        raise PreconditionError("positive_exponent", f"n={n}")
    return Constraint(f.arity, tuple(v**n for v in f.values))


def permute(f: Constraint, perm: Sequence[int]) -> Constraint:
    """Reorder arguments: result(x_1..x_k) = f(x_{perm[1]}, ..., x_{perm[k]}), 1-based."""
    k = f.arity
    if sorted(perm) != list(range(1, k + 1)):
        raise PreconditionError("permutation", f"perm={perm}")
    out = []
    for idx in range(1 << k):
        bits = [(idx >> (k - p)) & 1 for p in range(1, k + 1)]
        src = 0
        for p in perm:
            src = (src << 1) | bits[p - 1]
        out.append(f.values[src])
    return Constraint(k, tuple(out))

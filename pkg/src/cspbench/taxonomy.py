"""Shape classes of symmetric constraints and the tractable/hard set split.

Ten closed-form shape tests over the compact form [f_0, ..., f_k]:

* DEGENERATE          products of unary factors: [x,0,...,0], [0,...,0,x],
                      or y*[1,z,z^2,...,z^k] with y,z nonzero
* DEGENERATE_SIGNED   the subfamily with unit ratio: [x,0,...,0], [0,...,0,x],
                      y*[1,1,...,1], y*[1,-1,1,...] with y nonzero
* EQUALITY_STRICT     [x,+-x]; [x,0,...,0,+-x] of arity >= 2; [0,x,0]; x nonzero
* EQUALITY_WIDE       [x,y]; [x,0,...,0,y] of arity >= 2; [0,x,0]; x,y nonzero
* ALTERNATING_ZERO    arity >= 3, entries alternate 0 and a fixed nonzero x
* ALTERNATING_SIGNED  arity >= 3, entries alternate 0 and +-x with flipping sign
* PAIRED_SIGNS        arity >= 2, f_0 != 0, adjacent pairs carrying signs
                      (-1)^(i+1) f_0 (offset pairing) or (-1)^i f_0 (aligned)
* OR                  [0,x,y] with x,y > 0
* NAND                [x,y,0] with x,y > 0
* POSITIVE_NONDEGENERATE  [x,y,z] with x,y,z > 0 and xz != y^2

The first seven are the tractable-side classes; the last three seed hardness
reductions.  A set of symmetric constraints is polynomial-time solvable iff it
fits inside one of two unions ("first": DEGENERATE + EQUALITY_WIDE; "second":
DEGENERATE_SIGNED + EQUALITY_STRICT + the alternating classes + PAIRED_SIGNS);
otherwise one or two members witness hardness.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Sequence

from .constraints import Constraint
from .errors import PreconditionError


class ClassLabel(Enum):
    DEGENERATE = "DEGENERATE"
    DEGENERATE_SIGNED = "DEGENERATE_SIGNED"
    EQUALITY_STRICT = "EQUALITY_STRICT"
    EQUALITY_WIDE = "EQUALITY_WIDE"
    ALTERNATING_ZERO = "ALTERNATING_ZERO"
    ALTERNATING_SIGNED = "ALTERNATING_SIGNED"
    PAIRED_SIGNS = "PAIRED_SIGNS"
    OR = "OR"
    NAND = "NAND"
    POSITIVE_NONDEGENERATE = "POSITIVE_NONDEGENERATE"


TRACTABLE_SIDE = frozenset(
    {
        ClassLabel.DEGENERATE,
        ClassLabel.EQUALITY_WIDE,
        ClassLabel.ALTERNATING_ZERO,
        ClassLabel.ALTERNATING_SIGNED,
        ClassLabel.PAIRED_SIGNS,
    }
)

HARD_SEED = frozenset({ClassLabel.OR, ClassLabel.NAND, ClassLabel.POSITIVE_NONDEGENERATE})

FIRST_FAMILY = frozenset({ClassLabel.DEGENERATE, ClassLabel.EQUALITY_WIDE})
SECOND_FAMILY = frozenset(
    {
        ClassLabel.DEGENERATE_SIGNED,
        ClassLabel.EQUALITY_STRICT,
        ClassLabel.ALTERNATING_ZERO,
        ClassLabel.ALTERNATING_SIGNED,
        ClassLabel.PAIRED_SIGNS,
    }
)


def _compact(f: Constraint) -> tuple[Fraction, ...]:
    sym = f.symmetric_values()
    if sym is None:
        raise PreconditionError("symmetric_constraint", f"asymmetric table {f!r}")
    return sym


def _is_degenerate(v: Sequence[Fraction]) -> bool:
    k = len(v) - 1
    if all(x == 0 for x in v[1:]):
        return True
    if all(x == 0 for x in v[:-1]):
        return True
    if any(x == 0 for x in v):
        return False
    # geometric: constant ratio, nonzero everywhere
    if k == 0:
        return True
    z = v[1] / v[0]
    return z != 0 and all(v[w + 1] == v[w] * z for w in range(k))


def _is_degenerate_signed(v: Sequence[Fraction]) -> bool:
    if all(x == 0 for x in v[1:]) or all(x == 0 for x in v[:-1]):
        return True
    if v[0] == 0:
        return False
    return all(x == v[0] for x in v) or all(v[w] == v[0] * (-1) ** w for w in range(len(v)))


def _is_equality_strict(v: Sequence[Fraction]) -> bool:
    k = len(v) - 1
    if k == 1:
        return v[0] != 0 and abs(v[1]) == abs(v[0])
    if k >= 2 and v[0] != 0 and abs(v[k]) == abs(v[0]) and all(x == 0 for x in v[1:k]):
        return True
    return k == 2 and v[0] == 0 and v[2] == 0 and v[1] != 0


def _is_equality_wide(v: Sequence[Fraction]) -> bool:
    k = len(v) - 1
    if k == 1:
        return v[0] != 0 and v[1] != 0
    if k >= 2 and v[0] != 0 and v[k] != 0 and all(x == 0 for x in v[1:k]):
        return True
    return k == 2 and v[0] == 0 and v[2] == 0 and v[1] != 0


def _is_alternating_zero(v: Sequence[Fraction]) -> bool:
    k = len(v) - 1
    if k < 3:
        return False
    for start in (0, 1):  # parity carrying the zeros
        nz = [v[w] for w in range(k + 1) if w % 2 != start]
        if all(v[w] == 0 for w in range(k + 1) if w % 2 == start) and nz and nz[0] != 0:
            if all(x == nz[0] for x in nz):
                return True
    return False


def _is_alternating_signed(v: Sequence[Fraction]) -> bool:
    k = len(v) - 1
    if k < 3:
        return False
    for start in (0, 1):
        if any(v[w] != 0 for w in range(k + 1) if w % 2 == start):
            continue
        nz_idx = [w for w in range(k + 1) if w % 2 != start]
        x = v[nz_idx[0]]
        if x == 0:
            continue
        if all(v[w] == x * (-1) ** (pos) for pos, w in enumerate(nz_idx)):
            return True
    return False


def _is_paired_signs(v: Sequence[Fraction]) -> bool:
    k = len(v) - 1
    if k < 2 or v[0] == 0:
        return False
    z0 = v[0]

    def offset_clause() -> bool:
        # pairs (2i+1, 2i+2) must equal (-1)^(i+1) f_0; boundary indices beyond k skipped
        i = 0
        while 2 * i + 1 <= k:
            want = z0 * (-1) ** (i + 1)
            for idx in (2 * i + 1, 2 * i + 2):
                if idx <= k and v[idx] != want:
                    return False
            i += 1
        return True

    def aligned_clause() -> bool:
        # pairs (2i, 2i+1) must equal (-1)^i f_0
        i = 0
        while 2 * i <= k:
            want = z0 * (-1) ** i
            for idx in (2 * i, 2 * i + 1):
                if idx <= k and v[idx] != want:
                    return False
            i += 1
        return True

    return offset_clause() or aligned_clause()


def classify_constraint(f: Constraint) -> frozenset[ClassLabel]:
    """Every shape label that f matches; empty set if none."""
    v = _compact(f)
    k = len(v) - 1
    labels = set()
    if _is_degenerate(v):
        labels.add(ClassLabel.DEGENERATE)
    if _is_degenerate_signed(v):
        labels.add(ClassLabel.DEGENERATE_SIGNED)
    if _is_equality_strict(v):
        labels.add(ClassLabel.EQUALITY_STRICT)
    if _is_equality_wide(v):
        labels.add(ClassLabel.EQUALITY_WIDE)
    if _is_alternating_zero(v):
        labels.add(ClassLabel.ALTERNATING_ZERO)
    if _is_alternating_signed(v):
        labels.add(ClassLabel.ALTERNATING_SIGNED)
    if _is_paired_signs(v):
        labels.add(ClassLabel.PAIRED_SIGNS)
    if k == 2:
        if v[0] == 0 and v[1] > 0 and v[2] > 0:
            labels.add(ClassLabel.OR)
        if v[2] == 0 and v[0] > 0 and v[1] > 0:
            labels.add(ClassLabel.NAND)
        if all(x > 0 for x in v) and v[0] * v[2] != v[1] ** 2:
            labels.add(ClassLabel.POSITIVE_NONDEGENERATE)
    return frozenset(labels)


def is_tractable_side(f: Constraint) -> bool:
    """True iff f lies in the union of the five tractable-side classes."""
    return bool(classify_constraint(f) & TRACTABLE_SIDE)


@dataclass(frozen=True)
class SetClassification:
    """Verdict for a constraint set: which tractable families contain it, or hardness witnesses."""

    verdict: str  # "polytime" | "hard"
    families: tuple[str, ...]  # subset of ("first", "second"); empty when hard
    witnesses: tuple[Constraint, ...]  # 1 or 2 constraints when hard, else empty


def classify_set(constraints: Sequence[Constraint]) -> SetClassification:
    if not constraints:
        raise PreconditionError("nonempty_set")
    labelled = [(f, classify_constraint(f)) for f in constraints]
    in_first = all(labels & FIRST_FAMILY for _, labels in labelled)
    in_second = all(labels & SECOND_FAMILY for _, labels in labelled)
    if in_first or in_second:
        families = tuple(
            name for name, ok in (("first", in_first), ("second", in_second)) if ok
        )
        return SetClassification("polytime", families, ())
    for f, labels in labelled:
        if not labels & TRACTABLE_SIDE:
            return SetClassification("hard", (), (f,))
    f1 = next(f for f, labels in labelled if not labels & SECOND_FAMILY)
    f2 = next(f for f, labels in labelled if not labels & FIRST_FAMILY)
    return SetClassification("hard", (), (f1, f2))

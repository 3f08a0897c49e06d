"""Constraint frames, exact partition-function evaluation, and gadget plumbing.

A frame is a finite set of constraint applications over named Boolean
variables; its value is the sum over all assignments of the product of
application values.  Everything here is exact rational arithmetic by brute
force over the assignment space, guarded by a configurable variable cap.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .constraints import (
    ComplementClass,
    Constraint,
    DELTAS,
    complement_class,
)
from .errors import EnumerationCapError, PreconditionError

DEFAULT_VARIABLE_CAP = 24

Application = tuple[str, tuple[str, ...]]


@dataclass(frozen=True)
class ConstraintFrame:
    """Variables, applications (constraint name + scope), and the name table."""

    variables: tuple[str, ...]
    applications: tuple[Application, ...]
    constraints: Mapping[str, Constraint]

    def __post_init__(self):
        if len(set(self.variables)) != len(self.variables):
            raise PreconditionError("distinct_variables")
        known = set(self.variables)
        for name, scope in self.applications:
            if name not in self.constraints:
                raise PreconditionError("known_constraint", f"no table entry for '{name}'")
            if len(scope) != self.constraints[name].arity:
                raise PreconditionError(
                    "scope_arity",
                    f"'{name}' has arity {self.constraints[name].arity}, scope {scope}",
                )
            for v in scope:
                if v not in known:
                    raise PreconditionError("dangling_scope_name", f"variable '{v}'")


def frame(
    variables: Sequence[str],
    applications: Sequence[tuple[str, Sequence[str]]],
    constraints: Mapping[str, Constraint],
) -> ConstraintFrame:
    """Convenience constructor normalizing to tuples."""
    apps = tuple((name, tuple(scope)) for name, scope in applications)
    return ConstraintFrame(tuple(variables), apps, dict(constraints))


def _compiled(frame_: ConstraintFrame) -> list[tuple[tuple[Fraction, ...], tuple[int, ...]]]:
    pos = {v: i for i, v in enumerate(frame_.variables)}
    return [
        (frame_.constraints[name].values, tuple(pos[v] for v in scope))
        for name, scope in frame_.applications
    ]


def _assignment_sum(
    n_vars: int,
    apps: list[tuple[tuple[Fraction, ...], tuple[int, ...]]],
    cap: int,
) -> Fraction:
    if n_vars > cap:
        raise EnumerationCapError(n_vars, cap)
    total = Fraction(0)
    for assign in range(1 << n_vars):
        prod = Fraction(1)
        for table, positions in apps:
            idx = 0
            for p in positions:
                idx = (idx << 1) | ((assign >> (n_vars - 1 - p)) & 1)
            v = table[idx]
            if v == 0:
                prod = Fraction(0)
                break
            prod *= v
        total += prod
    return total


def evaluate(frame_: ConstraintFrame, *, cap: int = DEFAULT_VARIABLE_CAP) -> Fraction:
    """Exact value of the frame: sum over assignments of the application product."""
    return _assignment_sum(len(frame_.variables), _compiled(frame_), cap)


def evaluate_factorized(frame_: ConstraintFrame) -> Fraction:
    """Per-variable product evaluation for frames of unary-factorable applications.

    Cross-check plumbing only: every application must be unary or a symmetric
    degenerate constraint (all mass on weight 0, on weight k, or geometric),
    which factors into unary pieces times a scalar.
    """
    unary: dict[int, list[tuple[Fraction, Fraction]]] = {
        i: [] for i in range(len(frame_.variables))
    }
    pos = {v: i for i, v in enumerate(frame_.variables)}
    scalar = Fraction(1)
    for name, scope in frame_.applications:
        c = frame_.constraints[name]
        if c.arity == 1:
            unary[pos[scope[0]]].append((c.values[0], c.values[1]))
            continue
        sym = c.symmetric_values()
        if sym is None:
            raise PreconditionError("unary_factorable", f"'{name}' is not symmetric")
        if all(x == 0 for x in sym[1:]):
            factors = (Fraction(1), Fraction(0))
            scalar *= sym[0]
        elif all(x == 0 for x in sym[:-1]):
            factors = (Fraction(0), Fraction(1))
            scalar *= sym[-1]
        elif all(x != 0 for x in sym) and all(
            sym[w + 1] * sym[0] == sym[w] * sym[1] for w in range(len(sym) - 1)
        ):
            factors = (Fraction(1), sym[1] / sym[0])
            scalar *= sym[0]
        else:
            raise PreconditionError("unary_factorable", f"'{name}' is not degenerate")
        for v in scope:
            unary[pos[v]].append(factors)
    total = Fraction(1)
    for i in range(len(frame_.variables)):
        s = Fraction(0)
        for b in (0, 1):
            prod = Fraction(1)
            for f0, f1 in unary[i]:
                prod *= f1 if b else f0
            s += prod
        total *= s
    return scalar * total


@dataclass(frozen=True)
class RealizationGraph:
    """A gadget: external ports, summed internal variables, applications, and a scalar.

    Contracting the internal variables and multiplying by the scalar yields a
    constraint on the ports.
    """

    ports: tuple[str, ...]
    internals: tuple[str, ...]
    applications: tuple[Application, ...]
    constraints: Mapping[str, Constraint]
    scalar: Fraction = Fraction(1)

    def __post_init__(self):
        if Fraction(self.scalar) == 0:
            raise PreconditionError("nonzero_scalar")
        names = set(self.ports) | set(self.internals)
        if len(names) != len(self.ports) + len(self.internals):
            raise PreconditionError("distinct_variables", "port/internal overlap")
        for name, scope in self.applications:
            if name not in self.constraints:
                raise PreconditionError("known_constraint", f"'{name}'")
            if len(scope) != self.constraints[name].arity:
                raise PreconditionError("scope_arity", f"'{name}' scope {scope}")
            for v in scope:
                if v not in names:
                    raise PreconditionError("dangling_scope_name", f"variable '{v}'")


def contract(g: RealizationGraph, *, cap: int = DEFAULT_VARIABLE_CAP) -> Constraint:
    """Sum the internal variables out of the gadget, scaled by its scalar."""
    if len(g.internals) > cap:
        raise EnumerationCapError(len(g.internals), cap)
    kp, ki = len(g.ports), len(g.internals)
    pos = {v: i for i, v in enumerate(g.ports + g.internals)}
    apps = [
        (g.constraints[name].values, tuple(pos[v] for v in scope))
        for name, scope in g.applications
    ]
    n = kp + ki
    out = []
    for ext in range(1 << kp):
        total = Fraction(0)
        base = ext << ki
        for internal in range(1 << ki):
            assign = base | internal
            prod = Fraction(1)
            for table, positions in apps:
                idx = 0
                for p in positions:
                    idx = (idx << 1) | ((assign >> (n - 1 - p)) & 1)
                v = table[idx]
                if v == 0:
                    prod = Fraction(0)
                    break
                prod *= v
            total += prod
        out.append(Fraction(g.scalar) * total)
    return Constraint(kp, tuple(out))


def substitute(
    frame_: ConstraintFrame, target_name: str, gadget: RealizationGraph
) -> tuple[ConstraintFrame, Fraction]:
    """Replace every application of `target_name` by the gadget's applications.

    Ports bind to the application scope; internal variables are freshened per
    occurrence.  Returns (new frame, gamma) with
    evaluate(new) == gamma * evaluate(old), gamma = scalar^(-t) for t
    occurrences replaced.
    """
    if target_name not in frame_.constraints:
        raise PreconditionError("known_constraint", f"'{target_name}'")
    target = frame_.constraints[target_name]
    if len(gadget.ports) != target.arity:
        raise PreconditionError(
            "port_arity", f"gadget has {len(gadget.ports)} ports, target arity {target.arity}"
        )
    variables = list(frame_.variables)
    new_apps: list[Application] = []
    new_constraints: dict[str, Constraint] = {}

    def intern(name: str, c: Constraint) -> str:
        final = name
        while final in new_constraints and new_constraints[final] != c:
            final = "_" + final
        new_constraints[final] = c
        return final

    occurrence = 0
    for name, scope in frame_.applications:
        if name != target_name:
            new_apps.append((intern(name, frame_.constraints[name]), scope))
            continue
        binding = dict(zip(gadget.ports, scope))
        for y in gadget.internals:
            fresh = f"__{target_name}{occurrence}_{y}"
            while fresh in variables:
                fresh = "_" + fresh
            variables.append(fresh)
            binding[y] = fresh
        for gname, gscope in gadget.applications:
            mapped = intern(f"{gname}", gadget.constraints[gname])
            new_apps.append((mapped, tuple(binding[v] for v in gscope)))
        occurrence += 1
    gamma = Fraction(gadget.scalar) ** (-occurrence)
    return (
        ConstraintFrame(tuple(variables), tuple(new_apps), new_constraints),
        gamma,
    )


@dataclass(frozen=True)
class PatternDecomposition:
    """Coefficients of the frame value grouped by input-pattern multiplicities.

    For a designated constraint name occurring `occurrences` times, every
    global assignment feeds each occurrence one input pattern; grouping
    assignments by the multiset of patterns (a vector of counts over the
    2^arity patterns) and summing the products of all *other* application
    values gives `coefficients`.  Then

        value(frame) = sum_key coefficients[key] * prod_x f(x)^key[x]

    with 0^0 = 1.  `support` holds the pattern indices where f is nonzero;
    keys whose counts live entirely inside the support form the dominant part
    of the sum (every other key's monomial vanishes on f itself).
    """

    constraint_name: str
    arity: int
    occurrences: int
    support: frozenset[int]
    coefficients: dict[tuple[int, ...], Fraction] = field(compare=False)

    def supported_keys(self) -> list[tuple[int, ...]]:
        return [
            key
            for key in self.coefficients
            if all(c == 0 for i, c in enumerate(key) if i not in self.support)
        ]

    def unsupported_keys(self) -> list[tuple[int, ...]]:
        sup = set(self.supported_keys())
        return [key for key in self.coefficients if key not in sup]

    def combined(self, g: Constraint) -> Fraction:
        """Evaluate the decomposition against any same-arity table g."""
        total = Fraction(0)
        for key, alpha in self.coefficients.items():
            prod = Fraction(1)
            for i, count in enumerate(key):
                if count:
                    prod *= g.values[i] ** count
            total += alpha * prod
        return total


def pattern_decomposition(
    frame_: ConstraintFrame, name: str, *, cap: int = DEFAULT_VARIABLE_CAP
) -> PatternDecomposition:
    if name not in frame_.constraints:
        raise PreconditionError("known_constraint", f"'{name}'")
    f = frame_.constraints[name]
    occurrences = sum(1 for n, _ in frame_.applications if n == name)
    if occurrences < 1:
        raise PreconditionError("constraint_applied", f"'{name}' has no applications")
    n_vars = len(frame_.variables)
    if n_vars > cap:
        raise EnumerationCapError(n_vars, cap)
    pos = {v: i for i, v in enumerate(frame_.variables)}
    f_scopes = []
    other = []
    for n, scope in frame_.applications:
        positions = tuple(pos[v] for v in scope)
        if n == name:
            f_scopes.append(positions)
        else:
            other.append((frame_.constraints[n].values, positions))
    width = 1 << f.arity
    coeffs: dict[tuple[int, ...], Fraction] = {}
    for assign in range(1 << n_vars):
        counts = [0] * width
        for positions in f_scopes:
            idx = 0
            for p in positions:
                idx = (idx << 1) | ((assign >> (n_vars - 1 - p)) & 1)
            counts[idx] += 1
        prod = Fraction(1)
        for table, positions in other:
            idx = 0
            for p in positions:
                idx = (idx << 1) | ((assign >> (n_vars - 1 - p)) & 1)
            prod *= table[idx]
            if prod == 0:
                break
        key = tuple(counts)
        coeffs[key] = coeffs.get(key, Fraction(0)) + prod
    support = frozenset(i for i in range(width) if f.values[i] != 0)
    return PatternDecomposition(name, f.arity, occurrences, support, coeffs)


def _delta_application_vars(frame_: ConstraintFrame, index: int) -> tuple[list[int], set[str]]:
    delta = DELTAS[index]
    app_ids = []
    vars_touched = set()
    for i, (name, scope) in enumerate(frame_.applications):
        if frame_.constraints[name] == delta:
            app_ids.append(i)
            vars_touched.add(scope[0])
    return app_ids, vars_touched


def eliminate_constant_unary(
    frame_: ConstraintFrame,
    index: int,
    pool: Sequence[Constraint] | None = None,
) -> tuple[ConstraintFrame, Fraction]:
    """Remove all pin-to-`index` applications from a complement-stable frame.

    Normalizes first (all pinned variables merged into one, duplicate pin
    applications dropped), then deletes the pin node.  When the number of
    anti-invariant applications is odd the plain deletion collapses to zero,
    so one all-equal application of an anti-invariant anchor g is attached to
    the formerly pinned variable instead.  Returns (frame', s) with
    evaluate(original) == s * evaluate(frame').
    """
    if index not in (0, 1):
        raise PreconditionError("bit_value", f"index={index}")
    app_ids, pinned_vars = _delta_application_vars(frame_, index)
    if not app_ids:
        raise PreconditionError("pin_application_present", f"no pin-to-{index} application")
    # complement stability of everything else
    rest = [
        (name, scope)
        for i, (name, scope) in enumerate(frame_.applications)
        if i not in set(app_ids)
    ]
    for name, _ in rest:
        if complement_class(frame_.constraints[name]) is ComplementClass.UNSTABLE:
            raise PreconditionError("complement_stable_set", f"'{name}' is unstable")
    # merge pinned variables into one
    ordered_pinned = [v for v in frame_.variables if v in pinned_vars]
    x0 = ordered_pinned[0]
    remap = {v: (x0 if v in pinned_vars else v) for v in frame_.variables}
    variables = tuple(v for v in frame_.variables if v == x0 or v not in pinned_vars)
    merged_apps = [(name, tuple(remap[v] for v in scope)) for name, scope in rest]
    anti_count = sum(
        1
        for name, _ in merged_apps
        if complement_class(frame_.constraints[name]) is ComplementClass.ANTI_INVARIANT
    )
    used = {name for name, _ in merged_apps}
    table = {name: c for name, c in frame_.constraints.items() if name in used}
    if anti_count % 2 == 0:
        stripped = ConstraintFrame(variables, tuple(merged_apps), table)
        return stripped, Fraction(1, 2)
    # odd anti-invariant count: attach an all-equal anchor on the pinned variable
    candidates = list(pool) if pool is not None else [
        frame_.constraints[name] for name in sorted(used)
    ]
    anchor = None
    for g in candidates:
        if complement_class(g) is ComplementClass.ANTI_INVARIANT and g.values[0] != 0:
            anchor = g
            break
    if anchor is None:
        raise PreconditionError(
            "anti_invariant_anchor_nonzero",
            "every anti-invariant candidate vanishes on the all-equal inputs",
        )
    anchor_name = "__anchor"
    while anchor_name in table and table[anchor_name] != anchor:
        anchor_name = "_" + anchor_name
    table[anchor_name] = anchor
    apps = tuple(merged_apps) + ((anchor_name, (x0,) * anchor.arity),)
    # e = anchor on the all-pinned-value inputs: matches the pinned side of the sum
    e = anchor.values[0] if index == 0 else anchor.values[(1 << anchor.arity) - 1]
    out = ConstraintFrame(variables, apps, table)
    return out, Fraction(1, 2) / e

"""Gadget chains: replayable witnesses for constraint constructions.

A chain starts from source constraints (slots 0..s-1) and applies steps, each
producing a new slot.  Exact steps (pin/merge/marginalize/power/contract)
record their result and replay to it with exact equality.  A series step
stands for a decay-bounded approximating sequence: its generator produces, for
every m >= 1, a constraint g_m whose entries track the target within a
(1 +- decay^m) multiplicative window on the target's support, agree with it in
sign there, and are bounded by decay^m in absolute value off the support.
Downstream exact steps operate on the series' target.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

from .constraints import Constraint, marginalize, merge, pin, pointwise_power, sgn
from .errors import PreconditionError, VerificationError
from .frames import RealizationGraph, contract

DEFAULT_M_RANGE = (1, 50)


@dataclass(frozen=True)
class SeriesGenerator:
    """Closed-form compact entries: entry_j(m) = coeff_j * base_j ** (exponent_j * m)."""

    coeffs: tuple[Fraction, ...]
    bases: tuple[Fraction, ...]
    exponents: tuple[int, ...]

    def __post_init__(self):
        if not (len(self.coeffs) == len(self.bases) == len(self.exponents)):
            raise PreconditionError("generator_shape")

    def at(self, m: int) -> tuple[Fraction, ...]:
        if m < 1:
            raise PreconditionError("positive_m", f"m={m}")
        return tuple(
            c * b ** (e * m) for c, b, e in zip(self.coeffs, self.bases, self.exponents)
        )

    def mirrored(self) -> "SeriesGenerator":
        return SeriesGenerator(
            self.coeffs[::-1], self.bases[::-1], self.exponents[::-1]
        )


@dataclass(frozen=True)
class ConvergenceSeries:
    """Sequence m -> g_m approximating a symmetric target at rate decay^m."""

    target: Constraint
    decay: Fraction
    generator: SeriesGenerator

    def __post_init__(self):
        if not 0 < self.decay < 1:
            raise PreconditionError("decay_in_unit_interval", f"decay={self.decay}")
        sym = self.target.symmetric_values()
        if sym is None:
            raise PreconditionError("symmetric_constraint", "series target must be symmetric")
        if len(sym) != len(self.generator.coeffs):
            raise PreconditionError("generator_shape", "entry count != target compact length")

    def at(self, m: int) -> Constraint:
        return Constraint.symmetric(self.generator.at(m))

    def check_at(self, m: int) -> Fraction:
        """Verify the sandwich/sign/off-support conditions at m.

        Returns the worst off-support slack ratio |g_m(x)| / decay^m (zero when
        the target has full support).  Raises VerificationError on failure.
        """
        bound = self.decay**m
        targ = self.target.symmetric_values()
        gen = self.generator.at(m)
        worst = Fraction(0)
        for w, (r, z) in enumerate(zip(targ, gen)):
            if r != 0:
                if sgn(z) != sgn(r):
                    raise VerificationError(
                        None, "sign_mismatch", f"m={m}, weight {w}: target {r}, entry {z}"
                    )
                lo, hi = sorted(((1 + bound) * z, (1 - bound) * z))
                if not lo <= r <= hi:
                    raise VerificationError(
                        None,
                        "sandwich_violation",
                        f"m={m}, weight {w}: {r} outside [{lo}, {hi}]",
                    )
            else:
                if abs(z) > bound:
                    raise VerificationError(
                        None,
                        "off_support_decay",
                        f"m={m}, weight {w}: |{z}| > {bound}",
                    )
                worst = max(worst, abs(z) / bound)
        return worst

    def mirrored(self) -> "ConvergenceSeries":
        return ConvergenceSeries(
            self.target.mirrored(), self.decay, self.generator.mirrored()
        )


@dataclass(frozen=True)
class PinStep:
    operand: int
    index: int
    bit: int
    result: Constraint
    scalar: Fraction = Fraction(1)


@dataclass(frozen=True)
class MergeStep:
    operand: int
    i: int
    j: int
    result: Constraint
    scalar: Fraction = Fraction(1)


@dataclass(frozen=True)
class MarginalizeStep:
    operand: int
    index: int
    result: Constraint
    scalar: Fraction = Fraction(1)


@dataclass(frozen=True)
class PowerStep:
    operand: int
    exponent: int
    result: Constraint
    scalar: Fraction = Fraction(1)


@dataclass(frozen=True)
class ContractStep:
    """Contraction gadget over earlier slots; scalar is the realization factor."""

    ports: tuple[str, ...]
    internals: tuple[str, ...]
    applications: tuple[tuple[int, tuple[str, ...]], ...]  # (slot, scope)
    scalar: Fraction
    result: Constraint

    @property
    def operands(self) -> tuple[int, ...]:
        return tuple(sorted({slot for slot, _ in self.applications}))


@dataclass(frozen=True)
class SeriesStep:
    operand: int
    series: ConvergenceSeries

    @property
    def result(self) -> Constraint:
        return self.series.target

    @property
    def scalar(self) -> Fraction:
        return self.series.decay


Step = Union[PinStep, MergeStep, MarginalizeStep, PowerStep, ContractStep, SeriesStep]


@dataclass(frozen=True)
class GadgetChain:
    sources: tuple[Constraint, ...]
    steps: tuple[Step, ...]
    target: Constraint

    def slot_count(self) -> int:
        return len(self.sources) + len(self.steps)

    def is_exact(self) -> bool:
        return not any(isinstance(s, SeriesStep) for s in self.steps)


def _contract_parts(
    ports: tuple[str, ...],
    internals: tuple[str, ...],
    applications: tuple[tuple[int, tuple[str, ...]], ...],
    scalar: Fraction,
    values: Sequence[Constraint],
) -> Constraint:
    slots = sorted({slot for slot, _ in applications})
    names = {slot: f"s{slot}" for slot in slots}
    graph = RealizationGraph(
        ports=ports,
        internals=internals,
        applications=tuple((names[slot], scope) for slot, scope in applications),
        constraints={names[slot]: values[slot] for slot in slots},
        scalar=scalar,
    )
    return contract(graph)


def _contract_slots(step: ContractStep, values: Sequence[Constraint]) -> Constraint:
    return _contract_parts(
        step.ports, step.internals, step.applications, step.scalar, values
    )


def _step_value(step: Step, values: Sequence[Constraint]) -> Constraint:
    if isinstance(step, PinStep):
        return pin(values[step.operand], step.index, step.bit)
    if isinstance(step, MergeStep):
        return merge(values[step.operand], step.i, step.j)
    if isinstance(step, MarginalizeStep):
        return marginalize(values[step.operand], step.index)
    if isinstance(step, PowerStep):
        return pointwise_power(values[step.operand], step.exponent)
    if isinstance(step, ContractStep):
        return _contract_slots(step, values)
    if isinstance(step, SeriesStep):
        return step.series.target
    raise PreconditionError("known_step_kind", repr(step))


def replay(chain: GadgetChain) -> list[Constraint]:
    """Recompute every slot value from the sources (series slots take their targets)."""
    values = list(chain.sources)
    for step in chain.steps:
        values.append(_step_value(step, values))
    return values


@dataclass
class SeriesCheck:
    step: int
    m_range: tuple[int, int]
    worst_slack_ratio: Fraction


@dataclass
class VerificationReport:
    ok: bool
    failures: list[str] = field(default_factory=list)
    series_checks: list[SeriesCheck] = field(default_factory=list)


def verify_chain(
    chain: GadgetChain, m_range: tuple[int, int] = DEFAULT_M_RANGE
) -> VerificationReport:
    """Replay exact steps against their recorded results; check every series per m."""
    report = VerificationReport(ok=True)
    values = list(chain.sources)
    for idx, step in enumerate(chain.steps):
        if isinstance(step, SeriesStep):
            worst = Fraction(0)
            try:
                for m in range(m_range[0], m_range[1] + 1):
                    worst = max(worst, step.series.check_at(m))
                report.series_checks.append(SeriesCheck(idx, m_range, worst))
            except VerificationError as err:
                report.ok = False
                report.failures.append(f"step {idx}: {err.reason}: {err.detail}")
            values.append(step.series.target)
            continue
        try:
            computed = _step_value(step, values)
        except Exception as err:  # malformed step
            report.ok = False
            report.failures.append(f"step {idx}: replay error: {err}")
            values.append(step.result)
            continue
        if computed != step.result:
            report.ok = False
            report.failures.append(
                f"step {idx}: exact replay mismatch: computed {computed!r}, recorded {step.result!r}"
            )
        values.append(step.result)
    if values and values[-1] != chain.target:
        report.ok = False
        report.failures.append(
            f"final slot {values[-1]!r} differs from chain target {chain.target!r}"
        )
    return report


class ChainBuilder:
    """Incremental, eagerly-evaluated chain construction."""

    def __init__(self, sources: Sequence[Constraint]):
        self.sources = tuple(sources)
        self.values: list[Constraint] = list(sources)
        self.steps: list[Step] = []

    def _push(self, step: Step, value: Constraint) -> int:
        self.steps.append(step)
        self.values.append(value)
        return len(self.values) - 1

    def pin(self, slot: int, i: int, c: int) -> int:
        value = pin(self.values[slot], i, c)
        return self._push(PinStep(slot, i, c, value), value)

    def merge(self, slot: int, i: int, j: int) -> int:
        value = merge(self.values[slot], i, j)
        return self._push(MergeStep(slot, i, j, value), value)

    def marginalize(self, slot: int, i: int) -> int:
        value = marginalize(self.values[slot], i)
        return self._push(MarginalizeStep(slot, i, value), value)

    def power(self, slot: int, n: int) -> int:
        value = pointwise_power(self.values[slot], n)
        return self._push(PowerStep(slot, n, value), value)

    def contract(
        self,
        ports: Sequence[str],
        internals: Sequence[str],
        applications: Sequence[tuple[int, Sequence[str]]],
        scalar: Fraction | int = 1,
    ) -> int:
        apps = tuple((slot, tuple(scope)) for slot, scope in applications)
        value = _contract_parts(
            tuple(ports), tuple(internals), apps, Fraction(scalar), self.values
        )
        step = ContractStep(tuple(ports), tuple(internals), apps, Fraction(scalar), value)
        return self._push(step, value)

    def scale(self, slot: int, c: Fraction | int) -> int:
        """Identity contraction with a scalar: value * c."""
        k = self.values[slot].arity
        ports = tuple(f"p{i}" for i in range(1, k + 1))
        return self.contract(ports, (), [(slot, ports)], Fraction(c))

    def series(self, slot: int, series: ConvergenceSeries) -> int:
        return self._push(SeriesStep(slot, series), series.target)

    def splice(self, chain: GadgetChain, source_slots: Sequence[int]) -> int:
        """Append another chain's steps, binding its sources to existing slots."""
        if len(source_slots) != len(chain.sources):
            raise PreconditionError("source_slots", "length mismatch")
        for slot, src in zip(source_slots, chain.sources):
            if self.values[slot] != src:
                raise PreconditionError(
                    "source_slots", f"slot {slot} holds {self.values[slot]!r}, chain expects {src!r}"
                )
        offset = len(self.values)
        n_src = len(chain.sources)

        def remap(s: int) -> int:
            return source_slots[s] if s < n_src else offset + (s - n_src)

        for step in chain.steps:
            if isinstance(step, PinStep):
                self.pin(remap(step.operand), step.index, step.bit)
            elif isinstance(step, MergeStep):
                self.merge(remap(step.operand), step.i, step.j)
            elif isinstance(step, MarginalizeStep):
                self.marginalize(remap(step.operand), step.index)
            elif isinstance(step, PowerStep):
                self.power(remap(step.operand), step.exponent)
            elif isinstance(step, ContractStep):
                self.contract(
                    step.ports,
                    step.internals,
                    [(remap(slot), scope) for slot, scope in step.applications],
                    step.scalar,
                )
            elif isinstance(step, SeriesStep):
                self.series(remap(step.operand), step.series)
            else:
                raise PreconditionError("known_step_kind", repr(step))
        return len(self.values) - 1

    def finish(self, slot: int) -> GadgetChain:
        if slot != len(self.values) - 1:
            raise PreconditionError("final_slot", "chain must end at its last step")
        return GadgetChain(self.sources, tuple(self.steps), self.values[slot])


def mirror_step(step: Step) -> Step:
    """The step solving the bit-complemented problem: pins flip, series reverse."""
    if isinstance(step, PinStep):
        return PinStep(step.operand, step.index, 1 - step.bit, step.result.mirrored())
    if isinstance(step, MergeStep):
        return MergeStep(step.operand, step.i, step.j, step.result.mirrored())
    if isinstance(step, MarginalizeStep):
        return MarginalizeStep(step.operand, step.index, step.result.mirrored())
    if isinstance(step, PowerStep):
        return PowerStep(step.operand, step.exponent, step.result.mirrored())
    if isinstance(step, ContractStep):
        return ContractStep(
            step.ports,
            step.internals,
            step.applications,
            step.scalar,
            step.result.mirrored(),
        )
    if isinstance(step, SeriesStep):
        return SeriesStep(step.operand, step.series.mirrored())
    raise PreconditionError("known_step_kind", repr(step))


def mirror_chain(chain: GadgetChain) -> GadgetChain:
    """Bit-complement an entire chain: sources, every step, and the target."""
    return GadgetChain(
        tuple(c.mirrored() for c in chain.sources),
        tuple(mirror_step(s) for s in chain.steps),
        chain.target.mirrored(),
    )

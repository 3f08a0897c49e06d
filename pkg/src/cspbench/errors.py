"""Exception types shared across the workbench."""

from __future__ import annotations


class WorkbenchError(Exception):
    """Base class for all workbench errors."""


class PreconditionError(WorkbenchError):
    """An operation was called with inputs violating a named precondition."""

    def __init__(self, predicate: str, detail: str = ""):
        self.predicate = predicate
        self.detail = detail
        msg = f"precondition violated: {predicate}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class EnumerationCapError(WorkbenchError):
    """A brute-force enumeration would exceed the configured variable cap."""

    def __init__(self, needed: int, cap: int):
        self.needed = needed
        self.cap = cap
        super().__init__(f"enumeration over {needed} variables exceeds cap {cap}")


class VerificationError(WorkbenchError):
    """A chain or series failed an exactness check; pinpoints where."""

    def __init__(self, step: int | None, reason: str, detail: str = ""):
        self.step = step
        self.reason = reason
        self.detail = detail
        where = "chain" if step is None else f"step {step}"
        msg = f"verification failed at {where}: {reason}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class ProofDeviationError(WorkbenchError):
    """A case that the underlying case analysis rules out actually occurred.

    Raised instead of silently patching around it; carries the witness so the
    instance can be reported and studied.
    """

    def __init__(self, branch: str, witness: object = None):
        self.branch = branch
        self.witness = witness
        msg = f"case analysis deviation in branch '{branch}'"
        if witness is not None:
            msg += f"; witness: {witness!r}"
        super().__init__(msg)

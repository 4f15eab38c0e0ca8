"""Exception types shared across the package."""

from __future__ import annotations


class CantorlabError(Exception):
    """Base class; every failure raised by this package derives from it."""


class InvalidWitness(CantorlabError):
    """A supplied ordering witness does not actually separate the reals."""


class DomainExceeded(CantorlabError):
    """A stencil or query point left the domain of the function handle."""


class NoModulus(CantorlabError):
    """The operation needs a modulus of continuity the handle does not carry."""


class ToleranceNotMet(CantorlabError):
    """Refinement hit its cap before the requested width was reached."""


class NonConvergence(CantorlabError):
    """A limit schedule failed to settle."""


class BadAmbient(CantorlabError):
    """Ambient interval is empty or reversed."""


class AmbientMismatch(CantorlabError):
    """Two open sets live in different ambient intervals."""


class EmptyIntervalInvariantBroken(CantorlabError):
    """A located search met a node with no point of the target set."""


class PreconditionError(CantorlabError):
    """An input violates a stated precondition."""


class MalformedFamily(CantorlabError):
    """An interleaved enumeration touched a family that was not supplied."""


class DepthCapExceeded(CantorlabError):
    """Tree search reached its depth cap; ``path`` is the offending node."""

    def __init__(self, path: tuple[int, ...], message: str | None = None):
        self.path = tuple(path)
        super().__init__(message or f"depth cap exceeded at path {''.join(map(str, path)) or '<root>'}")


class ComparisonStuck(CantorlabError):
    """A comparison needed by a construction stayed undecided."""

    def __init__(self, step: int, message: str | None = None):
        self.step = step
        super().__init__(message or f"comparison undecided at step {step}")


class GapTooSmall(CantorlabError):
    """The separation certificate at a descent step was not positive."""

    def __init__(self, step: int):
        self.step = step
        super().__init__(f"gap not certified positive at step {step}")


class HypothesisFailed(CantorlabError):
    """The finite data violate the decay hypothesis at the selected index."""

    def __init__(self, index: int, witness=None):
        self.index = index
        self.witness = witness
        super().__init__(f"decay hypothesis fails at index {index}")

"""Exception types shared across the simulator."""

from __future__ import annotations


class SchemaError(ValueError):
    """A scene, plan, or config file does not match its expected schema."""


class PlacementExhausted(RuntimeError):
    """Scene generation gave up placing an object (workspace too crowded)."""


class NotAllowable(ValueError):
    """A pull was planned between stacks that fail the pull feasibility rules."""


class InfeasibleAction(RuntimeError):
    """An action was applied whose feasibility predicate is false.

    Carries the name of the violated predicate so harness output can point
    at the policy bug.
    """

    def __init__(self, predicate: str, detail: str = ""):
        self.predicate = predicate
        message = predicate if not detail else f"{predicate}: {detail}"
        super().__init__(message)


class EmptyTrace(ValueError):
    """Objects-per-trip is undefined for a trace with zero trips."""


class MissingBaseline(ValueError):
    """Aggregation requires a baseline trial for every scene group."""

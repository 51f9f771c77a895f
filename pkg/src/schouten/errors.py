"""Exception hierarchy.

Every failure raised by the package derives from :class:`SchoutenError`.
Numerical failures carry enough state for a post-mortem (the last iterate,
the offending node, the failing elementary symmetric function).
"""


class SchoutenError(Exception):
    """Base class for all package errors."""


class UsageError(SchoutenError, ValueError):
    """Invalid parameters or configuration."""


class DomainError(SchoutenError, ValueError):
    """A vector lies outside the cone where f is defined.

    Attributes
    ----------
    failing_sigma : int
        Smallest index j with sigma_j(lambda^tau) <= 0.
    """

    def __init__(self, message, failing_sigma=None):
        super().__init__(message)
        self.failing_sigma = failing_sigma


class PreconditionError(SchoutenError, ValueError):
    """A barrier family's parameter window is violated."""


class ConditioningWarning(UserWarning):
    """Evaluation point is close enough to the cone boundary to lose digits."""


class SolverError(SchoutenError, RuntimeError):
    """Base for numerical failures; ``state`` holds the last iterate (may be None)."""

    def __init__(self, message, state=None, **info):
        super().__init__(message)
        self.state = state
        self.info = info

    def to_dict(self):
        out = {"error": type(self).__name__, "message": str(self)}
        out.update(self.info)
        return out


class ConeExit(SolverError):
    """An interior jet left the admissible cone."""

    def __init__(self, node, eigenvalues, failing_sigma, state=None):
        super().__init__(
            f"cone exit at node {node}: eigenvalues {tuple(eigenvalues)}, "
            f"sigma_{failing_sigma} <= 0",
            state=state,
            node=int(node),
            eigenvalues=[float(e) for e in eigenvalues],
            failing_sigma=int(failing_sigma),
        )
        self.node = int(node)
        self.eigenvalues = tuple(float(e) for e in eigenvalues)
        self.failing_sigma = int(failing_sigma)


class MaxIter(SolverError):
    pass


class LineSearchStall(SolverError):
    pass


class SingularJacobian(SolverError):
    pass


class StepUnderflow(SolverError):
    """Continuation step fell below the minimum; ``last_good`` is the last parameter reached."""

    def __init__(self, message, last_good, state=None):
        super().__init__(message, state=state, last_good=float(last_good))
        self.last_good = float(last_good)


class MonotonicityViolation(SolverError):
    def __init__(self, node, values, state=None):
        super().__init__(
            f"monotonicity in m violated at node {node}: {values}",
            state=state, node=int(node), values=[float(v) for v in values],
        )
        self.node = int(node)


class ScheduleExhausted(SolverError):
    pass


class OrderingViolation(SolverError):
    def __init__(self, node, lower, upper, slack):
        super().__init__(
            f"ordering violated at node {node}: {lower} > {upper} + {slack}",
            node=int(node), lower=float(lower), upper=float(upper), slack=float(slack),
        )
        self.node = int(node)


class StructureViolation(SchoutenError):
    """A structural inequality failed beyond slack; ``report`` holds the witnesses."""

    def __init__(self, message, report):
        super().__init__(message)
        self.report = report

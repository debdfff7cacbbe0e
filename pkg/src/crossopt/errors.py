"""Exception hierarchy shared across the solvers.

The distinction matters for the CLI exit codes: bad input is an
InstanceError (exit 2), a failed guarantee check is reported in-band
(exit 1), and an InternalCheckError means a structural assertion that
is supposed to be impossible fired (exit 3) -- e.g. no iterative step
applies, a vertex certificate fails, or the LP turns infeasible mid-run.
"""


class InstanceError(ValueError):
    """Malformed or infeasible problem input."""


class SizeGuardError(InstanceError):
    """An exhaustive-enumeration size guard was exceeded."""


class InternalCheckError(RuntimeError):
    """An internal invariant failed; never expected on valid runs."""


class NoStepApplies(InternalCheckError):
    """No iterative step was applicable at a solver iteration."""

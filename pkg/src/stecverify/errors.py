"""Exception hierarchy shared by all modules."""


class StecVerifyError(Exception):
    """Base class for every error raised by this package."""


# tensor_core
class DegenerateInput(StecVerifyError, ValueError):
    pass


class NonRestFrame(StecVerifyError, ValueError):
    pass


class SuperluminalBoost(StecVerifyError, ValueError):
    pass


class InvalidObserver(StecVerifyError, ValueError):
    pass


# energy_conditions
class ImplicationViolation(StecVerifyError, RuntimeError):
    """An energy-condition implication failed; indicates a bug, not physics."""


# casimir
class UnsupportedGeometry(StecVerifyError, ValueError):
    pass


class InsufficientDecay(StecVerifyError, ValueError):
    pass


class FitIllConditioned(StecVerifyError, ArithmeticError):
    pass


class ContinuationNonConvergent(StecVerifyError, ArithmeticError):
    pass


class EmptySpectrum(StecVerifyError, ValueError):
    pass


# wall_mechanics
class EmptyMesh(StecVerifyError, ValueError):
    pass


class NonNegativeVacuumEnergy(StecVerifyError, ValueError):
    pass


class InvalidShell(StecVerifyError, ValueError):
    pass


# trace_method
class SupportTooLarge(StecVerifyError, ValueError):
    pass


class IntegratorToleranceExceeded(StecVerifyError, ArithmeticError):
    pass


class ChainStepFailed(StecVerifyError):
    """One inequality of the trace-method chain broke.

    ``step`` is one of ``"exchange"``, ``"trace_sign"``, ``"stec"``.
    """

    def __init__(self, step, message, report=None):
        super().__init__(f"chain step {step!r} failed: {message}")
        self.step = step
        self.report = report


# cli
class ConfigInvalid(StecVerifyError, ValueError):
    pass


class TaskFailed(StecVerifyError):
    pass


class IoFailure(StecVerifyError, OSError):
    pass

"""Exception hierarchy shared by the engine and the CLI."""


class SensorPhononError(Exception):
    """Base class for all engine errors."""


class NonHermitianInput(SensorPhononError, ValueError):
    pass


class DimensionMismatch(SensorPhononError, ValueError):
    pass


class NegativeFrequency(SensorPhononError, ValueError):
    pass


class NonPositiveFrequency(SensorPhononError, ValueError):
    pass


class QuadratureNonConvergence(SensorPhononError, ArithmeticError):
    def __init__(self, message, error_estimate=None):
        super().__init__(message)
        self.error_estimate = error_estimate


class TruncationWarning(UserWarning):
    """The bath correlation function has not decayed by ``tau_max``."""


class TooManySensors(SensorPhononError, ValueError):
    pass


class WeakSensorWarning(UserWarning):
    """Sensor coupling is not small compared with the emitter and sensor widths."""


class NegativeRate(SensorPhononError, ValueError):
    pass


class NonHermitianCoupling(SensorPhononError, ValueError):
    pass


class DegenerateKernel(SensorPhononError, ArithmeticError):
    pass


class SingularSolve(SensorPhononError, ArithmeticError):
    pass


class PositivityWarning(UserWarning):
    """Steady state has a negative eigenvalue beyond tolerance (non-secular dissipator)."""


class StepSizeTooLarge(SensorPhononError, ValueError):
    pass


class DuplicateSensorIndex(SensorPhononError, ValueError):
    pass


class AxisMismatch(SensorPhononError, ValueError):
    pass


class PeaksNotFound(SensorPhononError, ArithmeticError):
    pass


class ConfigError(SensorPhononError):
    pass


class ParseError(ConfigError):
    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column


class ValidationError(ConfigError):
    def __init__(self, field, constraint):
        super().__init__(f"{field}: {constraint}")
        self.field = field
        self.constraint = constraint

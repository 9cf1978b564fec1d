"""Exception hierarchy.

Two families matter to the command line: `ValidationError` (bad input,
exit code 2) and `NumericalError` (a computation failed, exit code 3).
Each class carries a short module prefix used in CLI messages.
"""


class BopshoxError(Exception):
    module = "bopshox"

    def code(self) -> str:
        return f"{self.module}.{type(self).__name__}"


class ValidationError(BopshoxError, ValueError):
    pass


class NumericalError(BopshoxError, ArithmeticError):
    pass


# params
class InvalidParameter(ValidationError):
    module = "params"


class NonPositiveParameter(InvalidParameter):
    pass


class CouplingOutOfRange(InvalidParameter):
    pass


class FrequencyOrderViolation(InvalidParameter):
    pass


class ConfigError(ValidationError):
    module = "params"


# pcf
class OrderTooLarge(ValidationError):
    module = "pcf"


class ConvergenceFailure(NumericalError):
    module = "pcf"


# phasespace
class StepUnderflow(NumericalError):
    module = "phasespace"


class BracketFailure(NumericalError):
    module = "phasespace"


class NonConvergence(NumericalError):
    module = "phasespace"


# analysis
class QuadratureNotConverged(NumericalError):
    module = "analysis"


class DegenerateLine(NumericalError):
    module = "analysis"


# cli
class SchemaMismatch(BopshoxError):
    module = "cli"

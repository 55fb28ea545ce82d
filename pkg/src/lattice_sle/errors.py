"""Exception hierarchy. Every error carries a short machine-readable code."""


class LatticeSLEError(Exception):
    code = "error"

    def to_dict(self):
        return {"error": self.code, "message": str(self)}


class ParameterError(LatticeSLEError, ValueError):
    code = "parameter"


class DegenerateDomainError(LatticeSLEError, ValueError):
    code = "degenerate-domain"


class UnsupportedLatticeError(LatticeSLEError, TypeError):
    code = "unsupported-lattice"


class SingularEvaluationError(LatticeSLEError, ValueError):
    code = "singular-evaluation"


class InvalidConfigurationError(LatticeSLEError, ValueError):
    code = "invalid-configuration"


class InvalidSlitError(LatticeSLEError, ValueError):
    code = "invalid-slit"


class RefinementRequiredError(LatticeSLEError, ArithmeticError):
    code = "refinement-required"


class DegenerateStepError(LatticeSLEError, ArithmeticError):
    code = "degenerate-step"

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step

    def to_dict(self):
        d = super().to_dict()
        d["step"] = self.step
        return d


class SolverError(LatticeSLEError, ArithmeticError):
    code = "solver"

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class EnumerationLimitError(LatticeSLEError, ValueError):
    code = "enumeration-limit"


class NotIntegrableError(LatticeSLEError, ArithmeticError):
    code = "not-integrable"

    def __init__(self, message, discrepancy=None):
        super().__init__(message)
        self.discrepancy = discrepancy


class InconclusiveNoiseError(LatticeSLEError, ArithmeticError):
    code = "inconclusive-noise"


class RangeError(LatticeSLEError, ValueError):
    code = "range"


class AttritionError(LatticeSLEError, ArithmeticError):
    code = "attrition"


class ScaleRangeError(LatticeSLEError, ValueError):
    code = "scale-range"


class InfeasibleConditioningError(LatticeSLEError, ArithmeticError):
    code = "infeasible-conditioning"


class ConfigError(LatticeSLEError, ValueError):
    """Bad configuration text or values; ``field`` names the offending key."""

    code = "config"

    def __init__(self, message, field=None, line=None, column=None):
        super().__init__(message)
        self.field = field
        self.line = line
        self.column = column

    def to_dict(self):
        d = super().to_dict()
        for key in ("field", "line", "column"):
            if getattr(self, key) is not None:
                d[key] = getattr(self, key)
        return d

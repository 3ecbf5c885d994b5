class QuantizationError(Exception):
    pass


class ZeroMass(QuantizationError):
    """Conditional expectation requested over a set of (numerically) zero probability."""


class DuplicateGenerators(QuantizationError):
    """Two generators closer than the distinctness threshold."""


class NoRoot(QuantizationError):
    """A canonical system has no solution in the admissible box."""


class SingularJacobian(QuantizationError):
    pass


class NonConvergence(QuantizationError):
    """An iteration hit its budget before meeting its stopping rule."""

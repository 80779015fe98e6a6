"""Exception hierarchy shared by the solver modules."""


class TridiagError(Exception):
    """Base class for all solver errors."""


class DegeneracyError(TridiagError):
    """Parameters sit on a degenerate configuration the solver will not guess through."""


class DimensionTooSmall(TridiagError):
    pass


class PoleAtZ(DegeneracyError):
    pass


class DegenerateCircleRoot(DegeneracyError):
    pass


class CountMismatch(DegeneracyError):
    pass


class BracketCountMismatch(CountMismatch):
    def __init__(self, found, expected, diagnostics=None):
        self.found = found
        self.expected = expected
        self.diagnostics = diagnostics or {}
        super().__init__(f"retained {found} brackets, expected {expected}")


class ZeroVector(TridiagError):
    pass


class LengthMismatch(TridiagError):
    pass


class SizeCap(TridiagError):
    pass


class OracleNonConvergence(TridiagError):
    def __init__(self, msg, partial=None):
        super().__init__(msg)
        self.partial = partial


class HypothesisViolation(TridiagError):
    pass


class NoRootInInterval(TridiagError):
    pass


class SpectrumBoundViolation(TridiagError):
    pass

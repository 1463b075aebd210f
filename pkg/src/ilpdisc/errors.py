"""Exception hierarchy shared by all solver stages."""


class IlpError(Exception):
    pass


class SingularMatrix(IlpError):
    pass


class NotPositiveDefinite(IlpError):
    pass


class RankDeficient(IlpError):
    pass


class InvalidShape(IlpError):
    pass


class DegeneratePoints(IlpError):
    pass


class NonPositiveInput(IlpError):
    pass


class DimMismatch(IlpError):
    pass


class OutOfRange(IlpError):
    pass


class LpInfeasible(IlpError):
    pass


class LpUnbounded(IlpError):
    pass


class BudgetExceeded(IlpError):
    pass


class EscalationMismatch(IlpError):
    """Raised when re-running the DP with a doubled eta changes the answer."""

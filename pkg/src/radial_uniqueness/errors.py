"""Exception types raised across the prover."""


class ProverError(Exception):
    pass


class DivisionByZeroInterval(ProverError, ZeroDivisionError):
    pass


class DomainError(ProverError, ValueError):
    pass


class TStarViolation(ProverError, ValueError):
    pass


class BetaRangeError(ProverError, ValueError):
    pass


class SingularTime(ProverError, ValueError):
    pass


class StepFailure(ProverError):
    pass


class MaxStepsExceeded(ProverError):
    pass


class AmbiguousSign(ProverError):
    pass


class DepthExceeded(ProverError):
    pass


class ConditionsNotMet(ProverError):
    pass


class OracleAmbiguous(ProverError):
    pass


class PlanningFailure(ProverError):
    pass


class CoverGap(ProverError):
    def __init__(self, position, message=None):
        self.position = position
        super().__init__(message or f"cover gap at b = {position!r}")

"""Exception hierarchy shared by all subres modules.

Exit-code mapping used by the CLI:
  DomainError   -> 2 (bad parameter regime, invalid inputs)
  NumericError  -> 3 (horizon/truncation violations, quadrature failure,
                      non-finite states)
"""


class SubresError(Exception):
    """Base class for all package errors."""


class DomainError(SubresError):
    """Parameters outside the valid regime (e.g. alpha not in (0, 1))."""


class NumericError(SubresError):
    """Numerical failure: horizon exceeded, quadrature non-convergence, overflow."""


class PolicyError(NumericError):
    """Truncation policy cannot be satisfied within its term budget."""


class HorizonError(NumericError):
    """Requested integration horizon exceeds the truncation validity of q."""


class QuadratureError(NumericError):
    """Adaptive quadrature failed to reach the requested tolerance."""

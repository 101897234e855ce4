"""Typed failure modes shared across the package.

Every error that user code may want to branch on derives from
:class:`SingscatError`.  The command-line front end reports errors by
class name, so the names below are part of the public contract.
"""

from __future__ import annotations


class SingscatError(Exception):
    """Base class for all errors raised by this package."""


# ---------------------------------------------------------------- validation

class NonSingular(SingscatError):
    """Coupling strength is not positive: no singular core to scatter off."""


class SubcriticalCoupling(SingscatError):
    """p = 2 with coupling at or below 1/4: oscillatory regime absent."""


class BadGrid(SingscatError):
    """Matching radii are not ordered as 0 < r_min < r_max, or tol <= 0."""


# --------------------------------------------------------------------- bases

class AsymptoticRegionTooClose(SingscatError):
    """Far-field basis truncation error exceeds the requested tolerance."""


class SingularRegionTooFar(SingscatError):
    """Near-origin basis truncation error exceeds the requested tolerance."""


class TurningPoint(SingscatError):
    """The invariant J(r) changes sign inside a WKB quadrature interval."""


# ------------------------------------------------------------------ currents

class RadiusMismatch(SingscatError):
    """Wronskian/current requested for states at different radii."""


class BalanceViolation(SingscatError):
    """The two coefficient balances of one solution disagree beyond tol."""


# ----------------------------------------------------------------- integrate

class StepUnderflow(SingscatError):
    """Adaptive step size collapsed below the resolvable scale."""


class DriftExceeded(SingscatError):
    """Wronskian conservation failed; the propagated result is untrusted."""


# ------------------------------------------------------------------- connect

class NoStabilization(SingscatError):
    """Transfer matrix did not stabilize under far-radius doubling."""


class DegenerateColumns(SingscatError):
    """Propagated fundamental pair lost numerical independence."""


class DegenerateTransmission(SingscatError):
    """|a| beyond 1/tol: transmission numerically indistinguishable from 0."""


class PoleProximity(SingscatError):
    """Evaluation point too close to a pole for a trustworthy value."""


# ---------------------------------------------------------------------- disk

class RankDeficient(SingscatError):
    """Moebius fit is underdetermined (e.g. samples of a constant map).

    Carries the best constant value in :attr:`constant_value` when the
    samples are consistent with an Omega-independent map.
    """

    def __init__(self, message: str, constant_value: complex | None = None):
        super().__init__(message)
        self.constant_value = constant_value


class OutsideDisk(SingscatError):
    """Cauchy reconstruction requested outside the open unit disk."""


# -------------------------------------------------------------------- oracle

class PoleOfGamma(SingscatError):
    """Gamma function evaluated at a nonpositive integer."""

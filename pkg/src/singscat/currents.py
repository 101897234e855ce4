"""Wronskian and conserved-current algebra.

For two states f, g sampled at the same radius,

    W[f, g] = f g' - f' g          (Wronskian)
    J[u, v] = W[u*, v] / i         (conjugate-symmetric sesquilinear current)

J[u] := J[u, u] is real and indefinite: conjugation flips its sign,
J[u*] = -J[u], so the solution space carries a hyperbolic (SU(1,1)-type)
quadratic form.  Numerically these are exact algebraic operations; along
an integrated solution of u'' + J(r) u = 0 the Wronskian of two solutions
is a conserved quantity and serves as the primary accuracy monitor.
"""

from __future__ import annotations

from .errors import BalanceViolation, RadiusMismatch
from .integrate import StateVector

__all__ = ["wronskian", "current", "coefficient_balance"]


def _check_same_radius(f: StateVector, g: StateVector) -> None:
    if abs(f.r - g.r) > 1e-12 * max(1.0, abs(f.r), abs(g.r)):
        raise RadiusMismatch(f"states at r={f.r} and r={g.r}")


def wronskian(f: StateVector, g: StateVector) -> complex:
    """W[f, g] = f g' - f' g, antisymmetric and bilinear."""
    _check_same_radius(f, g)
    return f.u * g.du - f.du * g.u


def current(u: StateVector, v: StateVector | None = None) -> complex:
    """J[u, v] = W[u*, v] / i; J[u] = J[u, u] with v omitted.

    J[u] is real for any state; J[u1, u2]* = J[u2, u1].
    """
    if v is None:
        v = u
    _check_same_radius(u, v)
    return (u.u.conjugate() * v.du - u.du.conjugate() * v.u) / 1j


def coefficient_balance(
    c1: complex, c2: complex, cp: complex, cm: complex, tol: float = 1e-8
) -> float:
    """Common value of |c1|^2 - |c2|^2 and |cp|^2 - |cm|^2.

    Both expressions equal half the conserved current of one solution
    resolved in the far-field and near-origin bases respectively; their
    disagreement beyond ``tol`` signals an integration or matching error.
    """
    d_far = abs(c1) ** 2 - abs(c2) ** 2
    d_near = abs(cp) ** 2 - abs(cm) ** 2
    scale = max(1.0, abs(d_far), abs(d_near))
    if abs(d_far - d_near) > tol * scale:
        raise BalanceViolation(
            f"coefficient balance mismatch: {d_far!r} (far) vs {d_near!r} (near)"
        )
    return 0.5 * (d_far + d_near)

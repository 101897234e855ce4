"""Connection between the near-origin and far-field bases.

The two-channel problem is solved by propagating the near-origin pair
(u+, u-) outward and resolving each solution in the far-field basis by
Wronskian projection:

    C1 = W[u2, w] / W[u2, u1],      C2 = W[u1, w] / W[u1, u2].

Wronskians of solutions are r-independent, so the projections can be
evaluated at any radius in the far-field region; averaging them over
several radii a quarter-wavelength apart suppresses the residual
oscillatory truncation error of the basis.  Conservation plus time
reversal force the resulting map (C+, C-) -> (C1, C2) into the form

    M = [[a, b], [b*, a*]],        |a|^2 - |b|^2 = 1,

whose deviations from that structure are recorded as diagnostics rather
than silently repaired.  The extraction is repeated under doubling of
the far matching radius until successive matrices agree to tolerance,
with a final Richardson extrapolation at the empirically measured decay
rate.

From M follow the reflection/transmission amplitudes, and the reduced
S-matrix as a function of the boundary-condition parameter Omega (the
ratio of outgoing to ingoing amplitude at the origin):

    S(Omega) = (a Omega + b) / (b* Omega + a*)
             = Delta (Omega - R*) / (R Omega - 1),

a single Blaschke factor: a disk automorphism with its only zero at
Omega1 = R* inside the unit disk, its only pole at Omega2 = 1/R outside,
and global phase Delta = -a/a* = -T/T* = R'/R*.  For |R| -> 1 the zero
and pole collide on the boundary and the map degenerates to a constant
of modulus one.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from . import bases
from .currents import wronskian
from .errors import (
    DegenerateColumns,
    DegenerateTransmission,
    NoStabilization,
    PoleProximity,
)
from .integrate import StateVector, propagate
from .model import ValidatedConfig

__all__ = [
    "OMEGA_INFINITY",
    "TransferResiduals",
    "TransferMatrix",
    "ScatteringCoefficients",
    "SMatrixMap",
    "transfer_matrix",
    "scattering_coefficients",
    "s_matrix",
    "s_matrix_inverse",
    "full_s_matrix",
    "blaschke_params",
]

#: Projective point Omega = infinity (pure-outgoing boundary condition).
OMEGA_INFINITY = complex(math.inf, 0.0)

_MAX_LEVELS = 9
_N_PROJECTION_RADII = 4


def _is_inf(z: complex) -> bool:
    return math.isinf(z.real) or math.isinf(z.imag)


@dataclass(frozen=True)
class TransferResiduals:
    """Measured defects and bookkeeping of one extraction."""

    su11_defect: float           # | |a|^2 - |b|^2 - 1 |
    structure_defect: float      # deviation of the raw 2x2 from [[a,b],[b*,a*]]
    stabilization_diff: float    # matrix change over the last radius doubling
    wronskian_drift: float       # conservation drift over the whole run
    basis_trunc: float           # far-field basis truncation at the final radius
    r_min_used: float
    r_max_used: float
    richardson_rate: float | None


@dataclass(frozen=True)
class TransferMatrix:
    """Map (C+, C-) -> (C1, C2) in the form [[a, b], [b*, a*]]."""

    a: complex
    b: complex
    residuals: TransferResiduals

    @property
    def su11_defect_normalized(self) -> float:
        scale = abs(self.a) ** 2 + abs(self.b) ** 2
        return self.residuals.su11_defect / max(1.0, scale)


@dataclass(frozen=True)
class ScatteringCoefficients:
    """Right-moving (R, T) and left-moving (R', T') amplitudes."""

    R: complex
    T: complex
    Rp: complex
    Tp: complex


@dataclass(frozen=True)
class SMatrixMap:
    """Blaschke-factor form of the reduced S-matrix.

    ``zero`` and ``pole`` are withheld (None) on the degenerate branch
    |R| -> 1, where the map collapses to the constant ``constant`` of
    modulus one.
    """

    delta: complex
    zero: complex | None
    pole: complex | None
    a: complex
    b: complex
    degenerate: bool
    constant: complex | None


def _basis_states(pair) -> tuple[StateVector, StateVector]:
    f, s = pair.first, pair.second
    return (
        StateVector(f.r, f.u, f.du),
        StateVector(s.r, s.u, s.du),
    )


def _project(config: ValidatedConfig, state: StateVector, *, strict: bool) -> tuple[complex, complex]:
    """Resolve a state in the far-field basis at its own radius."""
    pair = bases.eval_asymptotic(config, state.r, raise_on_error=strict)
    one, two = _basis_states(pair)
    w21 = wronskian(two, one)
    c1 = wronskian(two, state) / w21
    c2 = wronskian(one, state) / (-w21)
    return c1, c2


def _averaged_projection(
    config: ValidatedConfig,
    plus: StateVector,
    minus: StateVector,
    *,
    local_tol: float,
    strict: bool,
) -> tuple[complex, complex, complex, complex, StateVector, StateVector, float]:
    """Project both solutions, averaged over radii pi/(2k) apart.

    Returns (C1+, C2+, C1-, C2-, last_plus, last_minus, drift_max).
    """
    step = math.pi / (2.0 * config.k)
    acc = [0j, 0j, 0j, 0j]
    drift = 0.0
    for m in range(_N_PROJECTION_RADII):
        if m > 0:
            leg = propagate(
                config,
                plus,
                plus.r + step,
                companion=minus,
                local_tol=local_tol,
                drift_budget=config.tol,
                keep_samples=False,
            )
            plus = leg.final
            minus = leg.companion_final
            drift = max(drift, leg.wronskian_drift)
        c1p, c2p = _project(config, plus, strict=strict)
        c1m, c2m = _project(config, minus, strict=strict)
        acc[0] += c1p
        acc[1] += c2p
        acc[2] += c1m
        acc[3] += c2m
    n = float(_N_PROJECTION_RADII)
    return acc[0] / n, acc[1] / n, acc[2] / n, acc[3] / n, plus, minus, drift


class _NoisePlateau(Exception):
    """Internal: level diffs stopped shrinking above tol while the basis
    truncation is already far below it; integration noise dominates."""


def _extract_levels(
    config: ValidatedConfig,
    *,
    stabilize: bool,
    max_levels: int,
    local_tol: float,
):
    """One stabilization sweep; returns (levels, diffs, raw_defect,
    drift, r_min)."""
    tol = config.tol
    r_min = bases.choose_r_min(config)
    sing = bases.eval_singularity(config, r_min)
    plus, minus = _basis_states(sing)
    w_pair_ref = wronskian(plus, minus)  # -2i up to truncation

    strict = stabilize
    r_level = bases.choose_r_max_start(config) if stabilize else config.r_max

    levels: list[tuple[float, complex, complex]] = []
    raw_defect = 0.0
    drift_total = 0.0
    diff = math.inf
    diffs: list[float] = []
    state_p, state_m = plus, minus

    for _level in range(max_levels):
        leg = propagate(
            config,
            state_p,
            r_level,
            companion=state_m,
            local_tol=local_tol,
            drift_budget=tol,
            keep_samples=False,
        )
        state_p = leg.final
        state_m = leg.companion_final
        drift_total = max(drift_total, leg.wronskian_drift)
        w_now = wronskian(state_p, state_m)
        if abs(w_now - w_pair_ref) > 0.5 * abs(w_pair_ref):
            raise DegenerateColumns(
                f"pair Wronskian moved from {w_pair_ref:.6g} to {w_now:.6g}"
            )

        c1p, c2p, c1m, c2m, state_p, state_m, dr = _averaged_projection(
            config, state_p, state_m, local_tol=local_tol, strict=strict
        )
        drift_total = max(drift_total, dr)

        a_lvl = 0.5 * (c1p + c2m.conjugate())
        b_lvl = 0.5 * (c1m + c2p.conjugate())
        scale = max(1.0, abs(a_lvl))
        raw_defect = max(
            abs(c1p - c2m.conjugate()), abs(c1m - c2p.conjugate())
        ) / scale
        levels.append((r_level, a_lvl, b_lvl))

        if len(levels) > 1:
            _, a_prev, b_prev = levels[-2]
            diff = max(abs(a_lvl - a_prev), abs(b_lvl - b_prev)) / scale
            diffs.append(diff)
            if diff < tol or not stabilize:
                break
            trunc = bases.eval_asymptotic(config, r_level, raise_on_error=False).trunc_error
            plateaued = len(diffs) >= 2 and diff > 0.3 * diffs[-2]
            if plateaued and trunc < 0.1 * tol:
                raise _NoisePlateau
        r_level = max(2.0 * r_level, state_p.r + math.pi / config.k)
    else:
        raise NoStabilization(
            f"transfer matrix not stable after {max_levels} doublings "
            f"(last change {diff:.3e} > tol {tol:.1e})"
        )
    return levels, diffs, raw_defect, drift_total, r_min


def transfer_matrix(
    config: ValidatedConfig,
    *,
    stabilize: bool = True,
    max_levels: int = _MAX_LEVELS,
) -> TransferMatrix:
    """Extract the transfer matrix of a validated configuration.

    Initializes the outgoing/ingoing pair from the near-origin basis at
    an automatically refined inner radius, co-propagates both solutions
    outward, and projects onto the far-field basis.  With
    ``stabilize=True`` (default) the far matching radius is doubled
    until successive matrices differ by less than ``tol``, and the last
    two are Richardson-extrapolated; with ``stabilize=False`` a single
    extraction at exactly ``config.r_max`` is returned (intended for
    negative-control testing).  If the level differences plateau at the
    integration noise floor, the sweep restarts once with a tighter
    local tolerance.

    Raises
    ------
    NoStabilization
        Doubling budget exhausted before successive agreement.
    DegenerateColumns
        The propagated pair lost numerical independence.
    """
    tol = config.tol
    local_tol = tol / 2000.0
    for attempt in range(2):
        try:
            levels, diffs, raw_defect, drift_total, r_min = _extract_levels(
                config,
                stabilize=stabilize,
                max_levels=max_levels,
                local_tol=local_tol,
            )
            break
        except _NoisePlateau:
            if attempt == 1:
                raise NoStabilization(
                    "level differences limited by integration noise even at "
                    f"local tolerance {local_tol:.1e}"
                )
            local_tol /= 30.0

    if stabilize:
        _, a_fin, b_fin = levels[-1]
    else:
        # sabotage/testing mode: report the matrix at config.r_max itself,
        # with the probe doubling only feeding the stabilization diagnostic
        _, a_fin, b_fin = levels[0]
    diff = diffs[-1] if diffs else math.nan
    rate = None
    if stabilize and len(diffs) >= 2 and diffs[-1] > 0.0 and diffs[-2] > diffs[-1]:
        rate = math.log2(diffs[-2] / diffs[-1])
        rate = min(max(rate, 0.5), 12.0)
        fac = 2.0 ** rate - 1.0
        _, a_prev, b_prev = levels[-2]
        a_fin = a_fin + (a_fin - a_prev) / fac
        b_fin = b_fin + (b_fin - b_prev) / fac

    r_report = levels[-1][0] if stabilize else levels[0][0]
    far = bases.eval_asymptotic(config, r_report, raise_on_error=False)
    residuals = TransferResiduals(
        su11_defect=abs(abs(a_fin) ** 2 - abs(b_fin) ** 2 - 1.0),
        structure_defect=raw_defect,
        stabilization_diff=diff,
        wronskian_drift=drift_total,
        basis_trunc=far.trunc_error,
        r_min_used=r_min,
        r_max_used=r_report,
        richardson_rate=rate,
    )
    return TransferMatrix(a=a_fin, b=b_fin, residuals=residuals)


def scattering_coefficients(
    m: TransferMatrix, *, tol: float | None = None
) -> ScatteringCoefficients:
    """Amplitudes (R, T, R', T') of the standard 1D scattering problem.

    These follow from requiring (u+ + R u-) -> T u1 and
    T' u- <- (u2 + R' u1):

        R = -b*/a*,  T = T' = 1/a*,  R' = b/a*.

    Raises :class:`DegenerateTransmission` when |a| exceeds 1/tol and the
    transmission is numerically indistinguishable from zero.
    """
    astar = m.a.conjugate()
    if tol is not None and abs(m.a) > 1.0 / tol:
        raise DegenerateTransmission(f"|a|={abs(m.a):.3e} exceeds 1/tol")
    return ScatteringCoefficients(
        R=-m.b.conjugate() / astar,
        T=1.0 / astar,
        Rp=m.b / astar,
        Tp=1.0 / astar,
    )


def s_matrix(m: TransferMatrix, omega: complex, *, tol: float = 1e-13) -> complex:
    """Reduced S-matrix at boundary-condition parameter Omega.

    Accepts the projective point :data:`OMEGA_INFINITY` (returns a/b*).
    Raises :class:`PoleProximity` within ``tol * |pole|`` of the pole.
    """
    if _is_inf(omega):
        if m.b == 0:
            raise PoleProximity("map evaluates to infinity at Omega=infinity (b=0)")
        return m.a / m.b.conjugate()
    denom = m.b.conjugate() * omega + m.a.conjugate()
    if m.b != 0:
        pole = m.a.conjugate() / (-m.b.conjugate())
        if abs(omega - pole) < tol * max(abs(pole), 1.0):
            raise PoleProximity(f"Omega={omega} within {tol:.1e} of pole {pole}")
    elif denom == 0:
        raise PoleProximity("vanishing denominator")
    return (m.a * omega + m.b) / denom


def s_matrix_inverse(m: TransferMatrix, value: complex) -> complex:
    """Preimage Omega of a reduced S-matrix value (inverse Moebius map)."""
    num = m.a.conjugate() * value - m.b
    den = -m.b.conjugate() * value + m.a
    if den == 0:
        return OMEGA_INFINITY
    return num / den


def full_s_matrix(
    config: ValidatedConfig, m: TransferMatrix, omega: complex, *, tol: float = 1e-13
) -> complex:
    """Full S-matrix: the reduced map times exp(i pi (l + nu))."""
    phase = cmath.exp(1j * math.pi * config.l_plus_nu)
    return phase * s_matrix(m, omega, tol=tol)


def blaschke_params(m: TransferMatrix, *, tol: float = 1e-10) -> SMatrixMap:
    """Zero, pole and global phase of the single-Blaschke-factor map.

    The degenerate branch is taken when |R| > 1 - sqrt(tol): the pole
    1/R loses numerical meaning before |R| reaches 1, the map is then
    reported as the Omega-independent constant S(0) = R' of modulus one,
    and zero/pole are withheld.
    """
    coeffs = scattering_coefficients(m)
    delta = -m.a / m.a.conjugate()
    r_mod = abs(coeffs.R)
    if r_mod > 1.0 - math.sqrt(tol):
        return SMatrixMap(
            delta=delta,
            zero=None,
            pole=None,
            a=m.a,
            b=m.b,
            degenerate=True,
            constant=coeffs.Rp,
        )
    zero = coeffs.R.conjugate()
    pole = OMEGA_INFINITY if coeffs.R == 0 else 1.0 / coeffs.R
    return SMatrixMap(
        delta=delta,
        zero=zero,
        pole=pole,
        a=m.a,
        b=m.b,
        degenerate=False,
        constant=None,
    )

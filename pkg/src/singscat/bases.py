"""Fundamental wave bases at the two singular endpoints.

Far field (r -> infinity), WKB-normalized so each member carries
conserved current +/-2:

    u1(r) ~ k^(-1/2) e^(-i pi/4) e^(+i k r) * f(r)       (outgoing)
    u2(r) = conj(u1(r))                                   (ingoing)

where f(r) = 1 + s1/r + s2/r^2 + ... corrects for the integer-exponent
tail of J - k^2; the recursion for the s_m follows from substituting the
ansatz into the governing equation.  The first omitted term plus the
non-representable tail gives the reported truncation estimate.

Near the origin (r -> 0):

    p = 2:  u+(r) = sqrt(r/theta) (mu r)^(+i theta),  u- = conj(u+),
            exact for the pure conformal problem; contamination from k^2
            and W enters the truncation estimate.
    p > 2:  u+(r) = sqrt(pi/n) e^(-i(eta pi/2 + pi/4)) sqrt(r) H2_eta(z),
            z = (2 sqrt(lambda)/n) r^(-n/2), n = p - 2, with the order
            eta = 2|l+nu|/n chosen so the Hankel solution solves the
            core *and* centrifugal parts of the equation exactly; the
            r -> 0 behavior is the order-independent leading form
            (r^(p/4)/lambda^(1/4)) exp(-2i sqrt(lambda) r^(-n/2)/n), and
            only k^2 and W contaminate the initialization.

Powers (mu r)^(i theta) are evaluated as exp(i theta ln(mu r)) with the
real logarithm, which fixes the branch for all r > 0.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple

from scipy.integrate import quad
from scipy.special import hankel2

from .errors import AsymptoticRegionTooClose, SingularRegionTooFar, TurningPoint
from .model import (
    ValidatedConfig,
    asymptotic_tail_residual,
    asymptotic_tail_terms,
    normal_invariant,
    singularity_phase_error,
)

__all__ = [
    "BasisValue",
    "BasisPair",
    "eval_asymptotic",
    "eval_singularity",
    "wkb_reference",
    "choose_r_min",
    "choose_r_max_start",
]

_MAX_SERIES_ORDER = 8
_EXP_M_I_PI_4 = cmath.exp(-0.25j * math.pi)


@dataclass(frozen=True)
class BasisValue:
    """Value and radial derivative of one basis member at radius r."""

    which: str  # 'plus' | 'minus' | 'one' | 'two'
    r: float
    u: complex
    du: complex


class BasisPair(NamedTuple):
    first: BasisValue
    second: BasisValue
    trunc_error: float


def _series_coefficients(config: ValidatedConfig) -> list[complex]:
    """Coefficients s_0 .. s_(M+1) of the far-field correction series;
    the extra coefficient feeds the truncation estimate."""
    terms = asymptotic_tail_terms(config)
    if not terms:
        return [1.0 + 0j]
    k = config.k
    s: list[complex] = [1.0 + 0j]
    for m in range(_MAX_SERIES_ORDER + 1):
        acc = m * (m + 1) * s[m]
        for mj, g in terms:
            idx = m + 2 - mj
            if 0 <= idx <= m:
                acc += g * s[idx]
        s.append(acc / (2j * k * (m + 1)))
    return s


def eval_asymptotic(
    config: ValidatedConfig, r: float, *, raise_on_error: bool = True
) -> BasisPair:
    """Outgoing/ingoing far-field pair (u1, u2) with derivatives at r.

    The correction series is summed while its terms decrease; the first
    omitted term plus any non-representable tail forms the truncation
    estimate.  Raises :class:`AsymptoticRegionTooClose` when that
    estimate exceeds ``config.tol`` (unless ``raise_on_error=False``).
    """
    if r <= 0.0:
        raise ValueError("radius must be positive")
    k = config.k
    s = _series_coefficients(config)

    f = 1.0 + 0j
    df = 0j
    omitted = 0.0
    used = 0
    prev_mag = math.inf
    for m in range(1, len(s)):
        if s[m] == 0:
            continue
        term = s[m] * r ** (-m)
        mag = abs(term)
        if mag >= prev_mag or m > _MAX_SERIES_ORDER:
            omitted = mag
            break
        f += term
        df += -m * s[m] * r ** (-m - 1)
        used = m
        prev_mag = mag

    est = omitted / max(abs(f), 1e-12) + asymptotic_tail_residual(config, r)
    if raise_on_error and est > config.tol:
        raise AsymptoticRegionTooClose(
            f"far-field truncation estimate {est:.3e} > tol {config.tol:.1e} "
            f"at r={r} (series order {used})"
        )

    pref = _EXP_M_I_PI_4 / math.sqrt(k)
    phase = cmath.exp(1j * k * r)
    u1 = pref * phase * f
    du1 = pref * phase * (1j * k * f + df)
    one = BasisValue("one", r, u1, du1)
    two = BasisValue("two", r, u1.conjugate(), du1.conjugate())
    return BasisPair(one, two, est)


def eval_singularity(
    config: ValidatedConfig, r: float, *, raise_on_error: bool = True
) -> BasisPair:
    """Outgoing/ingoing near-origin pair (u+, u-) with derivatives at r.

    Raises :class:`SingularRegionTooFar` when the contamination estimate
    at r exceeds ``config.tol``.
    """
    if r <= 0.0:
        raise ValueError("radius must be positive")
    est = singularity_phase_error(config, r)
    if raise_on_error and est > config.tol:
        raise SingularRegionTooFar(
            f"near-origin truncation estimate {est:.3e} > tol {config.tol:.1e} at r={r}"
        )

    if config.theta is not None:
        th = config.theta
        amp = math.sqrt(r / th)
        phase = cmath.exp(1j * th * math.log(config.mu * r))
        u = amp * phase
        du = u * (0.5 / r + 1j * th / r)
    else:
        n = config.n_exponent
        lam = config.lam
        order = 2.0 * abs(config.l_plus_nu) / n  # absorbs the centrifugal term
        z = (2.0 * math.sqrt(lam) / n) * r ** (-n / 2.0)
        dz = -math.sqrt(lam) * r ** (-config.p / 2.0)
        h = complex(hankel2(order, z))
        hm1 = complex(hankel2(order - 1.0, z))
        dh = hm1 - (order / z) * h
        pref = math.sqrt(math.pi / n) * cmath.exp(-1j * (order * math.pi / 2.0 + math.pi / 4.0))
        sqr = math.sqrt(r)
        u = pref * sqr * h
        du = pref * (h / (2.0 * sqr) + sqr * dh * dz)
        if config.extra_potential is not None:
            corr = config.extra_potential.origin_correction(r, lam, config.p)
            if corr is not None:
                delta, ddelta = corr
                factor = cmath.exp(-1j * delta)
                du = (du - 1j * ddelta * u) * factor
                u = u * factor

    plus = BasisValue("plus", r, u, du)
    minus = BasisValue("minus", r, u.conjugate(), du.conjugate())
    return BasisPair(plus, minus, est)


def wkb_reference(
    config: ValidatedConfig, r: float, r_ref: float
) -> tuple[float, float]:
    """First-order WKB data: amplitude J(r)^(-1/4) and phase
    integral of sqrt(J) from r_ref to r (adaptive quadrature).

    Raises :class:`TurningPoint` if J is not strictly positive on the
    interval; connection through turning points is out of scope.
    """
    if r <= 0.0 or r_ref <= 0.0:
        raise ValueError("radii must be positive")
    lo, hi = min(r, r_ref), max(r, r_ref)
    # geometric probe grid catches sign changes of J before quadrature
    nprobe = 64
    ratio = (hi / lo) ** (1.0 / (nprobe - 1))
    x = lo
    for _ in range(nprobe):
        if normal_invariant(config, x) <= 0.0:
            raise TurningPoint(f"J(r) <= 0 at r={x}")
        x *= ratio

    def integrand(t: float) -> float:
        j = normal_invariant(config, t)
        if j <= 0.0:
            raise TurningPoint(f"J(r) <= 0 at r={t}")
        return math.sqrt(j)

    phase, _ = quad(integrand, r_ref, r, epsabs=0.0, epsrel=min(1e-11, config.tol), limit=500)
    amplitude = normal_invariant(config, r) ** (-0.25)
    return amplitude, phase


def choose_r_min(config: ValidatedConfig, *, safety: float = 0.1) -> float:
    """Largest radius <= config.r_min where the near-origin basis meets
    ``safety * tol``; bracketed by halving, then bisected.

    Keeping the radius as large as the estimate allows matters for
    p > 2, where the integration cost grows with the accumulated phase
    ~ r_min^(1 - p/2).
    """
    target = safety * config.tol
    hi = config.r_min
    if singularity_phase_error(config, hi) <= target:
        return hi
    lo = hi
    for _ in range(400):
        lo *= 0.5
        if singularity_phase_error(config, lo) <= target:
            break
    else:
        raise SingularRegionTooFar(
            f"could not reach truncation {target:.1e} by shrinking r_min "
            f"(reached r={lo:.3e})"
        )
    for _ in range(8):
        mid = math.sqrt(lo * hi)
        if singularity_phase_error(config, mid) <= target:
            lo = mid
        else:
            hi = mid
    return lo


def choose_r_max_start(config: ValidatedConfig, *, safety: float = 0.1) -> float:
    """Smallest doubling of config.r_max where the far-field series meets
    ``safety * tol`` and any barrier term has decayed away."""
    target = safety * config.tol
    r = config.r_max
    ep = config.extra_potential
    for _ in range(16):
        clear = True
        if ep is not None and ep.name == "gaussian_barrier":
            clear = ep.tail_integral(r) / (2.0 * config.k) <= target
        pair = eval_asymptotic(config, r, raise_on_error=False)
        if clear and pair.trunc_error <= target:
            return r
        r *= 2.0
    raise AsymptoticRegionTooClose(
        f"far-field truncation still above {target:.1e} at r={r:.3e}"
    )

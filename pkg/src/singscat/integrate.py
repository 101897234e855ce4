"""Adaptive propagation of complex solutions of u'' + J(r) u = 0.

The stepper is an explicit embedded Runge-Kutta pair (Verner's "most
robust" 6(5), nine stages, FSAL-style error stage) applied to the
first-order system (u, u').  Complex components are advanced directly;
the arithmetic is componentwise linear so conjugation and superposition
commute with the integration to rounding accuracy.

A companion solution can be co-propagated on the shared step sequence.
The Wronskian of the pair is then a conserved quantity and its relative
drift is recorded; if the drift exceeds the configured budget the
propagation retries with a tighter local tolerance before giving up.

Step sizes are additionally capped at a fraction of the local
oscillation wavelength 2*pi/sqrt(J), which keeps the stepper honest in
the stiffly oscillatory region near a strong singularity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DriftExceeded, StepUnderflow
from .model import ValidatedConfig, invariant_callable

__all__ = ["StateVector", "StepStats", "Trajectory", "propagate"]


@dataclass(frozen=True)
class StateVector:
    """Solution sample (r, u, du/dr)."""

    r: float
    u: complex
    du: complex


@dataclass(frozen=True)
class StepStats:
    n_steps: int
    n_rejected: int
    h_min: float
    h_max: float


@dataclass(frozen=True)
class Trajectory:
    """Result of one propagation.

    ``samples`` holds the main solution at accepted steps (always
    including the initial and final states, strictly monotone in r);
    ``companion_samples`` mirrors it when a companion was co-propagated.
    ``wronskian_drift`` is the maximum relative drift of the pair
    Wronskian over the run (None without a companion).
    """

    samples: tuple[StateVector, ...]
    companion_samples: tuple[StateVector, ...] | None
    wronskian_drift: float | None
    step_stats: StepStats
    local_tol: float

    @property
    def final(self) -> StateVector:
        return self.samples[-1]

    @property
    def companion_final(self) -> StateVector | None:
        if self.companion_samples is None:
            return None
        return self.companion_samples[-1]

    def to_csv(self, path: str) -> None:
        """Dump (r, Re u, Im u, Re du, Im du) rows for debugging."""
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("r,re_u,im_u,re_du,im_du\n")
            for s in self.samples:
                fh.write(
                    f"{s.r:.17g},{s.u.real:.17g},{s.u.imag:.17g},"
                    f"{s.du.real:.17g},{s.du.imag:.17g}\n"
                )


# Verner 6(5) tableau: 6th-order propagating solution with an embedded
# 5th-order error estimate; stage 9 is f at the accepted point (FSAL).
_C = (0.0, 9 / 50, 1 / 6, 1 / 4, 53 / 100, 3 / 5, 4 / 5, 1.0, 1.0)
_A = (
    (),
    (9 / 50,),
    (29 / 324, 25 / 324),
    (1 / 16, 0.0, 3 / 16),
    (79129 / 250000, 0.0, -261237 / 250000, 19663 / 15625),
    (1336883 / 4909125, 0.0, -25476 / 30875, 194159 / 185250, 8225 / 78546),
    (
        -2459386 / 14727375,
        0.0,
        19504 / 30875,
        2377474 / 13615875,
        -6157250 / 5773131,
        902 / 735,
    ),
    (2699 / 7410, 0.0, -252 / 1235, -1393253 / 3993990, 236875 / 72618, -135 / 49, 15 / 22),
    (11 / 144, 0.0, 0.0, 256 / 693, 0.0, 125 / 504, 125 / 528, 5 / 72),
)
_B6 = (11 / 144, 0.0, 0.0, 256 / 693, 0.0, 125 / 504, 125 / 528, 5 / 72, 0.0)
_B5 = (
    28 / 477,
    0.0,
    0.0,
    212 / 441,
    -312500 / 366177,
    2125 / 1764,
    0.0,
    -2105 / 35532,
    2995 / 17766,
)
_E = tuple(b6 - b5 for b6, b5 in zip(_B6, _B5))

_ORDER_EXP = 1.0 / 6.0
_MAX_STEPS = 2_000_000
_MAX_CONSECUTIVE_REJECTS = 64
_WAVELENGTH_FRACTION = 0.4


def _error_norm(err, y_old, y_new, rtol: float) -> float:
    acc = 0.0
    n = 0
    for e, a, b in zip(err, y_old, y_new):
        sc = rtol * max(abs(a), abs(b))
        if sc == 0.0:
            continue
        q = abs(e) / sc
        acc += q * q
        n += 1
    if n == 0:
        return 0.0
    return math.sqrt(acc / n)


def _run(jfun, y0, r0, r1, rtol, keep_samples):
    """Advance state tuple y0 from r0 to r1; returns (samples, stats, wmax).

    y has 2 components (u, du) or 4 (u, du, v, dv).  wmax is the maximum
    absolute deviation of the pair Wronskian from its initial value (0.0
    for the 2-component case).
    """
    ncomp = len(y0)
    track_w = ncomp == 4
    direction = 1.0 if r1 >= r0 else -1.0
    span = abs(r1 - r0)
    if span == 0.0:
        return [(r0, y0)], StepStats(0, 0, 0.0, 0.0), 0.0

    def f(r, y):
        j = jfun(r)
        if track_w:
            return (y[1], -j * y[0], y[3], -j * y[2]), j
        return (y[1], -j * y[0]), j

    w0 = (y0[0] * y0[3] - y0[1] * y0[2]) if track_w else 0.0
    w_scale = max(abs(w0), 1e-300)
    wmax = 0.0

    j0 = jfun(r0)
    wavelen = 2.0 * math.pi / math.sqrt(abs(j0)) if j0 != 0.0 else span
    h = direction * min(span, _WAVELENGTH_FRACTION * wavelen, span * 0.1 + 1e-12 * span)
    if h == 0.0:
        h = direction * span * 1e-3

    r = r0
    y = y0
    k1, jr = f(r, y)
    samples = [(r0, y0)]
    n_steps = 0
    n_rejected = 0
    rejects_in_row = 0
    h_min = math.inf
    h_max = 0.0

    while (r1 - r) * direction > 0.0:
        if n_steps + n_rejected > _MAX_STEPS:
            raise StepUnderflow(f"step budget exhausted at r={r}")
        remaining = r1 - r
        if abs(h) > abs(remaining):
            h = remaining
        if abs(h) < 5e-16 * max(abs(r), 1.0):
            raise StepUnderflow(f"step size underflow at r={r}: h={h}")

        ks = [k1]
        for i in range(1, 8):
            row = _A[i]
            yi = list(y)
            for j, aij in enumerate(row):
                if aij == 0.0:
                    continue
                kj = ks[j]
                for c in range(ncomp):
                    yi[c] += h * aij * kj[c]
            ki, _ = f(r + _C[i] * h, tuple(yi))
            ks.append(ki)

        y_new = list(y)
        for j, bj in enumerate(_B6[:8]):
            if bj == 0.0:
                continue
            kj = ks[j]
            for c in range(ncomp):
                y_new[c] += h * bj * kj[c]
        y_new = tuple(y_new)
        k9, j_new = f(r + h, y_new)
        ks.append(k9)

        err = [0j] * ncomp
        for j, ej in enumerate(_E):
            if ej == 0.0:
                continue
            kj = ks[j]
            for c in range(ncomp):
                err[c] += h * ej * kj[c]

        norm = _error_norm(err, y, y_new, rtol)
        if norm <= 1.0:
            r = r + h
            y = y_new
            k1 = k9
            n_steps += 1
            rejects_in_row = 0
            ah = abs(h)
            h_min = min(h_min, ah)
            h_max = max(h_max, ah)
            if keep_samples:
                samples.append((r, y))
            if track_w:
                w = y[0] * y[3] - y[1] * y[2]
                dev = abs(w - w0)
                if dev > wmax:
                    wmax = dev
            factor = 0.9 * norm ** (-_ORDER_EXP) if norm > 0.0 else 6.0
            factor = min(6.0, max(0.25, factor))
            h = h * factor
            if j_new > 0.0:
                cap = _WAVELENGTH_FRACTION * 2.0 * math.pi / math.sqrt(j_new)
                if abs(h) > cap:
                    h = direction * cap
        else:
            n_rejected += 1
            rejects_in_row += 1
            if rejects_in_row > _MAX_CONSECUTIVE_REJECTS:
                raise StepUnderflow(f"persistent step rejection at r={r}")
            factor = max(0.1, 0.9 * norm ** (-_ORDER_EXP))
            h = h * factor

    if not keep_samples or samples[-1][0] != r:
        samples.append((r, y))
    if h_min is math.inf:
        h_min = 0.0
    return samples, StepStats(n_steps, n_rejected, h_min, h_max), wmax / w_scale


def propagate(
    config: ValidatedConfig,
    init: StateVector,
    r_target: float,
    companion: StateVector | None = None,
    *,
    local_tol: float | None = None,
    drift_budget: float | None = None,
    keep_samples: bool = True,
) -> Trajectory:
    """Propagate ``init`` from its radius to ``r_target``.

    Parameters
    ----------
    config : ValidatedConfig
        Supplies J(r) and the tolerance ``tol``.
    init : StateVector
        Starting state; must be finite with r > 0.
    r_target : float
        Final radius (either direction).
    companion : StateVector, optional
        Second solution co-propagated on the shared step sequence; the
        pair Wronskian drift is then monitored against ``drift_budget``
        (default 10 * tol) and the run retried at tighter local
        tolerance if violated.
    local_tol : float, optional
        Per-step relative error target.  Defaults to tol / 100.
    keep_samples : bool
        Store every accepted step (default) or only the endpoints.

    Raises
    ------
    StepUnderflow
        Step control collapsed (stiffness budget exceeded).
    DriftExceeded
        Conservation failure persisting through retries.
    """
    for z in (init.u, init.du):
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            raise ValueError("initial state has non-finite components")
    if init.r <= 0.0 or r_target <= 0.0:
        raise ValueError("radii must be positive")

    jfun = invariant_callable(config)
    rtol = local_tol if local_tol is not None else config.tol / 100.0
    rtol = max(rtol, 4e-15)
    budget = drift_budget if drift_budget is not None else 10.0 * config.tol

    if companion is not None:
        if abs(companion.r - init.r) > 1e-12 * max(1.0, init.r):
            raise ValueError("companion must start at the same radius")
        y0 = (init.u, init.du, companion.u, companion.du)
    else:
        y0 = (init.u, init.du)

    attempts = 3
    samples = stats = drift = None
    for attempt in range(attempts):
        samples, stats, drift = _run(jfun, y0, init.r, r_target, rtol, keep_samples)
        if companion is None or drift <= 0.5 * budget or rtol <= 4e-15:
            break
        rtol = max(rtol / 30.0, 4e-15)
    if companion is not None and drift > budget:
        raise DriftExceeded(
            f"Wronskian drift {drift:.3e} exceeds budget {budget:.3e} "
            f"(local_tol={rtol:.1e})"
        )

    main = tuple(StateVector(r, y[0], y[1]) for r, y in samples)
    comp = None
    if companion is not None:
        comp = tuple(StateVector(r, y[2], y[3]) for r, y in samples)
    return Trajectory(
        samples=main,
        companion_samples=comp,
        wronskian_drift=drift if companion is not None else None,
        step_stats=stats,
        local_tol=rtol,
    )

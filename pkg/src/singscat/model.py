"""Problem definition and the invariant coefficient of the governing equation.

A scattering problem is the linear second-order equation in normal form

    u''(r) + J(r) u(r) = 0,        0 < r < infinity,

with

    J(r) = k^2 + lambda * r^(-p) - [(l+nu)^2 - 1/4] / r^2 - W(r),

where the power-law core ``lambda * r^(-p)`` (lambda > 0, p >= 2) dominates
near the origin and ``W(r)`` is an optional smooth short-range term that
decays faster than 1/r^2 at infinity and is subdominant to the core at the
origin.

Conventions
-----------
* ``p > 2``: the centrifugal-type term is kept separate; ``l_plus_nu``
  enters both J(r) and the global phase of the full S-matrix.
* ``p = 2``: the 1/r^2 pieces are merged, so ``lam`` is the *effective*
  coupling with the centrifugal term already absorbed.  The oscillation
  index is ``theta = sqrt(lam - 1/4)`` and the pure problem reads
  J = k^2 + (theta^2 + 1/4)/r^2.  ``l_plus_nu`` then only contributes the
  phase factor exp(i*pi*(l+nu)) of the full S-matrix.
* ``mu`` is a floating inverse length fixing the phase convention of the
  near-origin basis for p = 2; moduli of all observables are independent
  of it.  It is ignored for p > 2.

All operations here are pure; configs are frozen values safe to share
between threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Callable

from .errors import BadGrid, NonSingular, SubcriticalCoupling

__all__ = [
    "ExtraPotential",
    "ProblemConfig",
    "ValidatedConfig",
    "validate",
    "normal_invariant",
    "invariant_callable",
    "asymptotic_tail_terms",
    "asymptotic_tail_residual",
    "singularity_phase_error",
]

_SQRT_PI = math.sqrt(math.pi)


def _is_integerish(x: float, eps: float = 1e-9) -> bool:
    return abs(x - round(x)) < eps


@dataclass(frozen=True)
class ExtraPotential:
    """Smooth additional potential term W(r).

    Supported built-ins:

    ``gaussian_barrier``
        W(r) = height * exp(-((r - center)/width)^2).  Used e.g. to
        construct near-total-reflection configurations.
    ``inverse_power``
        W(r) = coefficient * r^(-exponent) with 2 < exponent < p/2 + 1,
        so the term stays short-range at infinity and leaves a convergent
        phase imprint at the origin.

    Parameters live in :attr:`params`; descriptors round-trip through the
    JSON config as ``{"name": ..., <param>: <value>, ...}``.
    """

    name: str
    params: tuple[tuple[str, float], ...]

    @classmethod
    def from_descriptor(cls, desc: dict) -> "ExtraPotential":
        if not isinstance(desc, dict) or "name" not in desc:
            raise BadGrid("extra_potential descriptor must be a dict with a 'name'")
        name = desc["name"]
        params = {k: float(v) for k, v in desc.items() if k != "name"}
        if name == "gaussian_barrier":
            missing = {"height", "center", "width"} - set(params)
            if missing:
                raise BadGrid(f"gaussian_barrier needs {sorted(missing)}")
            if params["width"] <= 0:
                raise BadGrid("gaussian_barrier width must be positive")
        elif name == "inverse_power":
            missing = {"coefficient", "exponent"} - set(params)
            if missing:
                raise BadGrid(f"inverse_power needs {sorted(missing)}")
            if params["exponent"] <= 2:
                raise BadGrid("inverse_power exponent must exceed 2 (short range)")
        else:
            raise BadGrid(f"unknown extra_potential '{name}'")
        return cls(name=name, params=tuple(sorted(params.items())))

    def to_descriptor(self) -> dict:
        out: dict = {"name": self.name}
        out.update(dict(self.params))
        return out

    def _p(self, key: str) -> float:
        return dict(self.params)[key]

    def value(self, r: float) -> float:
        if self.name == "gaussian_barrier":
            h, c, w = self._p("height"), self._p("center"), self._p("width")
            return h * math.exp(-(((r - c) / w) ** 2))
        coef, q = self._p("coefficient"), self._p("exponent")
        return coef * r ** (-q)

    def tail_integral(self, r: float) -> float:
        """Upper bound on integral of |W| over (r, infinity)."""
        if self.name == "gaussian_barrier":
            h, c, w = abs(self._p("height")), self._p("center"), self._p("width")
            return h * w * _SQRT_PI / 2.0 * math.erfc((r - c) / w)
        coef, q = abs(self._p("coefficient")), self._p("exponent")
        return coef * r ** (1.0 - q) / (q - 1.0)

    def origin_phase(self, r: float, lam: float, p: float) -> float:
        """Bound on the WKB phase integral of |W| / (2 sqrt(J)) over (0, r)."""
        sl = math.sqrt(lam)
        if self.name == "gaussian_barrier":
            h = abs(self._p("height"))
            return h * r ** (p / 2.0 + 1.0) / (2.0 * sl * (p / 2.0 + 1.0))
        coef, q = abs(self._p("coefficient")), self._p("exponent")
        e = p / 2.0 - q + 1.0
        if e <= 0:  # not subdominant; validation rejects this earlier
            return math.inf
        return coef * r ** e / (2.0 * sl * e)

    def integer_tail_term(self) -> tuple[int, float] | None:
        """(exponent, coefficient) contribution of -W to the far expansion
        of J - k^2, when the exponent is an integer; None otherwise."""
        if self.name != "inverse_power":
            return None
        coef, q = self._p("coefficient"), self._p("exponent")
        if _is_integerish(q):
            return (int(round(q)), -coef)
        return None

    def origin_correction(self, r: float, lam: float, p: float) -> tuple[float, float] | None:
        """First-order phase imprint of W on the near-origin basis.

        For power-law W the phase integral over (0, r) of W / (2 sqrt(J_core))
        is elementary; returns (delta, d delta/dr) so the basis can carry
        the factor exp(-i delta) exactly.  None when no correction is
        available (the Gaussian barrier's imprint is already negligible
        at matching radii).
        """
        if self.name != "inverse_power":
            return None
        coef, q = self._p("coefficient"), self._p("exponent")
        sl = math.sqrt(lam)
        e = p / 2.0 - q + 1.0
        delta = coef * r ** e / (2.0 * sl * e)
        ddelta = coef * r ** (e - 1.0) / (2.0 * sl)
        return delta, ddelta


@dataclass(frozen=True)
class ProblemConfig:
    """One scattering problem.

    Attributes
    ----------
    p : float
        Power of the singular core, p >= 2.
    lam : float
        Coupling of the core (JSON key ``"lambda"``).  For p = 2 this is
        the effective coupling with the centrifugal term absorbed.
    k : float
        Asymptotic wavenumber, k > 0.
    l_plus_nu : float
        Combined angular parameter; phases the full S-matrix, and for
        p > 2 also contributes the [(l+nu)^2 - 1/4]/r^2 term of J.
    mu : float
        Floating inverse length fixing the p = 2 phase convention.
    extra_potential : ExtraPotential or None
        Optional smooth short-range term W(r).
    r_min, r_max : float
        Initial matching radii.  The connection machinery may shrink
        r_min and extend r_max to meet ``tol``.
    tol : float
        Relative tolerance driving every numerical stage.
    """

    p: float
    lam: float
    k: float
    l_plus_nu: float = 0.0
    mu: float = 1.0
    extra_potential: ExtraPotential | None = None
    r_min: float = 1e-3
    r_max: float = 60.0
    tol: float = 1e-10

    @classmethod
    def from_dict(cls, d: dict) -> "ProblemConfig":
        d = dict(d)
        if "lambda" in d:
            d["lam"] = d.pop("lambda")
        ep = d.get("extra_potential")
        if ep is not None:
            d["extra_potential"] = ExtraPotential.from_descriptor(ep)
        known = {
            "p", "lam", "k", "l_plus_nu", "mu", "extra_potential",
            "r_min", "r_max", "tol",
        }
        unknown = set(d) - known
        if unknown:
            raise BadGrid(f"unknown config fields: {sorted(unknown)}")
        for req in ("p", "lam", "k"):
            if req not in d:
                name = "lambda" if req == "lam" else req
                raise BadGrid(f"missing required config field '{name}'")
        return cls(**d)

    @classmethod
    def from_json(cls, path: str) -> "ProblemConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        ep = self.extra_potential.to_descriptor() if self.extra_potential else None
        return {
            "p": self.p,
            "lambda": self.lam,
            "k": self.k,
            "l_plus_nu": self.l_plus_nu,
            "mu": self.mu,
            "extra_potential": ep,
            "r_min": self.r_min,
            "r_max": self.r_max,
            "tol": self.tol,
        }


@dataclass(frozen=True)
class ValidatedConfig:
    """A :class:`ProblemConfig` with derived fields populated.

    ``theta`` is set for p = 2 (theta^2 = lam - 1/4) and ``n_exponent``
    for p > 2 (n = p - 2).
    """

    base: ProblemConfig
    theta: float | None
    n_exponent: float | None

    # convenience pass-throughs used throughout the package
    @property
    def p(self) -> float:
        return self.base.p

    @property
    def lam(self) -> float:
        return self.base.lam

    @property
    def k(self) -> float:
        return self.base.k

    @property
    def l_plus_nu(self) -> float:
        return self.base.l_plus_nu

    @property
    def mu(self) -> float:
        return self.base.mu

    @property
    def extra_potential(self) -> ExtraPotential | None:
        return self.base.extra_potential

    @property
    def r_min(self) -> float:
        return self.base.r_min

    @property
    def r_max(self) -> float:
        return self.base.r_max

    @property
    def tol(self) -> float:
        return self.base.tol

    @property
    def is_conformal(self) -> bool:
        return self.theta is not None

    def j(self, r: float) -> float:
        return normal_invariant(self, r)

    def with_mu(self, mu: float) -> "ValidatedConfig":
        return validate(replace(self.base, mu=mu))


def validate(config: ProblemConfig) -> ValidatedConfig:
    """Check a configuration and populate derived fields.

    Raises
    ------
    NonSingular
        lam <= 0 (no singular core).
    SubcriticalCoupling
        p = 2 with lam <= 1/4: the near-origin solutions stop
        oscillating, a regime outside this package's scope.
    BadGrid
        Inconsistent radii, tolerances or parameters.
    """
    if not (config.p >= 2.0):
        raise BadGrid(f"p must satisfy p >= 2, got {config.p}")
    if config.lam <= 0.0:
        raise NonSingular(f"lambda must be positive, got {config.lam}")
    if config.k <= 0.0:
        raise BadGrid(f"k must be positive, got {config.k}")
    if config.tol <= 0.0:
        raise BadGrid(f"tol must be positive, got {config.tol}")
    if not (0.0 < config.r_min < config.r_max):
        raise BadGrid(
            f"need 0 < r_min < r_max, got r_min={config.r_min}, r_max={config.r_max}"
        )

    theta = None
    n_exponent = None
    if config.p == 2.0:
        if config.lam <= 0.25:
            raise SubcriticalCoupling(
                f"p=2 requires lambda > 1/4 (oscillatory regime), got {config.lam}"
            )
        if config.mu <= 0.0:
            raise BadGrid(f"p=2 requires mu > 0, got {config.mu}")
        theta = math.sqrt(config.lam - 0.25)
        if config.extra_potential is not None and config.extra_potential.name == "inverse_power":
            raise BadGrid("inverse_power extra potential needs exponent < p, impossible at p=2")
    else:
        n_exponent = config.p - 2.0
        ep = config.extra_potential
        if ep is not None and ep.name == "inverse_power":
            # beyond p/2 + 1 the near-origin phase integral of W diverges
            # and the matching basis loses its meaning, even though W is
            # still subdominant in J itself
            if dict(ep.params)["exponent"] >= config.p / 2.0 + 1.0:
                raise BadGrid(
                    "inverse_power exponent must stay below p/2 + 1 "
                    "(convergent near-origin phase)"
                )

    return ValidatedConfig(base=config, theta=theta, n_exponent=n_exponent)


def normal_invariant(config: ValidatedConfig, r: float) -> float:
    """Evaluate J(r) for a validated configuration.

    J(r) -> k^2 as r -> infinity and J(r) * r^p -> lambda as r -> 0.
    """
    if r <= 0.0:
        raise ValueError(f"radius must be positive, got {r}")
    base = config.base
    j = base.k ** 2 + base.lam * r ** (-base.p)
    if config.theta is None:
        cf = base.l_plus_nu ** 2 - 0.25
        if cf != 0.0:
            j -= cf / (r * r)
    if base.extra_potential is not None:
        j -= base.extra_potential.value(r)
    return j


def invariant_callable(config: ValidatedConfig) -> Callable[[float], float]:
    """Return a fast closure r -> J(r), for use in integration hot loops."""
    base = config.base
    k2 = base.k ** 2
    lam = base.lam
    p = base.p
    ep = base.extra_potential
    if config.theta is not None:
        if ep is None:
            def j(r: float) -> float:
                return k2 + lam / (r * r)
        else:
            w = ep.value

            def j(r: float) -> float:
                return k2 + lam / (r * r) - w(r)
    else:
        cf = base.l_plus_nu ** 2 - 0.25
        if ep is None:
            def j(r: float) -> float:
                return k2 + lam * r ** (-p) - cf / (r * r)
        else:
            w = ep.value

            def j(r: float) -> float:
                return k2 + lam * r ** (-p) - cf / (r * r) - w(r)
    return j


def asymptotic_tail_terms(config: ValidatedConfig) -> tuple[tuple[int, float], ...]:
    """Integer-exponent terms (m, g) of the far expansion J - k^2 ~ sum g/r^m.

    Only integer exponents feed the correction series of the far-field
    basis; everything else is accounted for by
    :func:`asymptotic_tail_residual`.
    """
    terms: dict[int, float] = {}
    base = config.base
    if config.theta is not None:
        terms[2] = base.lam  # theta^2 + 1/4
    else:
        cf = base.l_plus_nu ** 2 - 0.25
        if cf != 0.0:
            terms[2] = -cf
        if _is_integerish(base.p):
            terms[int(round(base.p))] = terms.get(int(round(base.p)), 0.0) + base.lam
    if base.extra_potential is not None:
        it = base.extra_potential.integer_tail_term()
        if it is not None:
            m, g = it
            terms[m] = terms.get(m, 0.0) + g
    return tuple(sorted((m, g) for m, g in terms.items() if g != 0.0))


def asymptotic_tail_residual(config: ValidatedConfig, r: float) -> float:
    """Phase-error bound at radius r from parts of J - k^2 that the
    integer-exponent correction series cannot represent."""
    base = config.base
    est = 0.0
    if config.theta is None and not _is_integerish(base.p):
        est += base.lam * r ** (1.0 - base.p) / (2.0 * base.k * (base.p - 1.0))
    ep = base.extra_potential
    if ep is not None and ep.integer_tail_term() is None:
        est += ep.tail_integral(r) / (2.0 * base.k)
    return est


def singularity_phase_error(config: ValidatedConfig, r: float) -> float:
    """Phase-error bound for initializing with the near-origin basis at r.

    Collects the WKB phase contributions over (0, r) of the terms of J
    that the basis functions do not resolve: k^2 and W.  (The
    centrifugal term is absorbed exactly -- into the effective coupling
    for p = 2 and into the Hankel order for p > 2.)
    """
    base = config.base
    root = math.sqrt(base.lam)
    if config.theta is not None:
        est = base.k ** 2 * r * r / (4.0 * root)
    else:
        half = base.p / 2.0
        est = base.k ** 2 * r ** (half + 1.0) / (2.0 * root * (half + 1.0))
    ep = base.extra_potential
    if ep is not None:
        if config.theta is None and ep.origin_correction(r, base.lam, base.p) is not None:
            # first-order W phase carried by the basis itself; what remains
            # is the amplitude-order term and the second-order phase
            coef = abs(dict(ep.params)["coefficient"])
            q = dict(ep.params)["exponent"]
            est += coef / (4.0 * base.lam) * r ** (base.p - q)
            e2 = 1.5 * base.p - 2.0 * q + 1.0
            est += coef ** 2 / (8.0 * base.lam ** 1.5) * r ** e2 / e2
        else:
            est += ep.origin_phase(r, base.lam, base.p)
    return est

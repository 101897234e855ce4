"""Shared fixtures: validated configs and cached pipeline solutions.

Transfer-matrix extraction for the quartic core takes a few seconds, so
solutions are computed once per session and shared across test modules.
"""

from __future__ import annotations

from dataclasses import dataclass

import pytest

from singscat import (
    ExtraPotential,
    ProblemConfig,
    ScatteringCoefficients,
    SMatrixMap,
    TransferMatrix,
    ValidatedConfig,
    blaschke_params,
    scattering_coefficients,
    transfer_matrix,
    validate,
)


def isp_config(theta: float, *, k: float = 1.0, mu: float = 1.0, tol: float = 1e-10) -> ValidatedConfig:
    return validate(
        ProblemConfig(p=2.0, lam=theta * theta + 0.25, k=k, mu=mu, tol=tol)
    )


def quartic_config(*, tol: float = 1e-10) -> ValidatedConfig:
    return validate(ProblemConfig(p=4.0, lam=1.0, k=1.0, l_plus_nu=0.5, tol=tol))


def barrier_config() -> ValidatedConfig:
    return validate(
        ProblemConfig(
            p=4.0,
            lam=1.0,
            k=1.0,
            l_plus_nu=0.5,
            tol=1e-5,
            extra_potential=ExtraPotential.from_descriptor(
                {"name": "gaussian_barrier", "height": 14.0, "center": 3.0, "width": 1.1}
            ),
        )
    )


@dataclass(frozen=True)
class Solution:
    config: ValidatedConfig
    matrix: TransferMatrix
    coeffs: ScatteringCoefficients
    smap: SMatrixMap


def _solve(config: ValidatedConfig) -> Solution:
    m = transfer_matrix(config)
    return Solution(
        config=config,
        matrix=m,
        coeffs=scattering_coefficients(m, tol=config.tol),
        smap=blaschke_params(m, tol=config.tol),
    )


_BUILDERS = {
    "isp05": lambda: _solve(isp_config(0.5)),
    "isp1": lambda: _solve(isp_config(1.0)),
    "isp2": lambda: _solve(isp_config(2.0)),
    "isp05_mu2": lambda: _solve(isp_config(0.5, mu=2.0)),
    "isp1_mu2": lambda: _solve(isp_config(1.0, mu=2.0)),
    "isp2_mu2": lambda: _solve(isp_config(2.0, mu=2.0)),
    "quartic": lambda: _solve(quartic_config()),
    "barrier": lambda: _solve(barrier_config()),
}


@pytest.fixture(scope="session")
def solved():
    cache: dict[str, Solution] = {}

    def get(name: str) -> Solution:
        if name not in cache:
            cache[name] = _BUILDERS[name]()
        return cache[name]

    return get

import cmath
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from singscat import (
    StateVector,
    coefficient_balance,
    current,
    eval_asymptotic,
    wronskian,
)
from singscat.errors import BalanceViolation, RadiusMismatch
from tests.conftest import isp_config

finite = st.floats(min_value=-5.0, max_value=5.0, allow_nan=False)
cplx = st.builds(complex, finite, finite)


def plane_wave(k: float, r: float, sign: int) -> StateVector:
    u = cmath.exp(sign * 1j * k * r)
    return StateVector(r, u, sign * 1j * k * u)


def test_wronskian_antisymmetry_and_self():
    s = StateVector(2.0, 1.3 - 0.2j, 0.4 + 1.1j)
    t = StateVector(2.0, -0.7j, 2.0 + 0.1j)
    assert wronskian(s, s) == 0
    assert wronskian(s, t) == -wronskian(t, s)


@pytest.mark.parametrize("r", [0.5, 1.0, 7.3])
def test_wronskian_of_plane_waves(r):
    k = 1.7
    w = wronskian(plane_wave(k, r, +1), plane_wave(k, r, -1))
    assert w == pytest.approx(-2j * k, rel=1e-14)


def test_radius_mismatch_rejected():
    s = StateVector(1.0, 1.0, 1.0)
    t = StateVector(2.0, 1.0, 1.0)
    with pytest.raises(RadiusMismatch):
        wronskian(s, t)
    with pytest.raises(RadiusMismatch):
        current(s, t)


def test_currents_of_far_basis():
    cfg = isp_config(1.0)
    pair = eval_asymptotic(cfg, 1e6)
    one = StateVector(pair.first.r, pair.first.u, pair.first.du)
    two = StateVector(pair.second.r, pair.second.u, pair.second.du)
    assert current(one).real == pytest.approx(2.0, abs=1e-10)
    assert current(two).real == pytest.approx(-2.0, abs=1e-10)
    assert abs(current(one).imag) < 1e-12


@settings(deadline=None, max_examples=60)
@given(u=cplx, du=cplx, v1=cplx, dv1=cplx, v2=cplx, dv2=cplx, l1=cplx, l2=cplx)
def test_sesquilinearity_in_second_argument(u, du, v1, dv1, v2, dv2, l1, l2):
    a = StateVector(1.0, u, du)
    b1 = StateVector(1.0, v1, dv1)
    b2 = StateVector(1.0, v2, dv2)
    combo = StateVector(1.0, l1 * v1 + l2 * v2, l1 * dv1 + l2 * dv2)
    lhs = current(a, combo)
    rhs = l1 * current(a, b1) + l2 * current(a, b2)
    assert lhs == pytest.approx(rhs, abs=1e-9)


@settings(deadline=None, max_examples=60)
@given(u=cplx, du=cplx, v=cplx, dv=cplx)
def test_conjugate_symmetry(u, du, v, dv):
    a = StateVector(1.0, u, du)
    b = StateVector(1.0, v, dv)
    astar = StateVector(1.0, u.conjugate(), du.conjugate())
    bstar = StateVector(1.0, v.conjugate(), dv.conjugate())
    assert current(a, b).conjugate() == pytest.approx(current(b, a), abs=1e-12)
    assert current(a, b).conjugate() == pytest.approx(-current(astar, bstar), abs=1e-12)
    # self-current is real and flips sign under conjugation
    assert abs(current(a).imag) < 1e-12
    assert current(astar).real == pytest.approx(-current(a).real, abs=1e-12)


@settings(deadline=None, max_examples=60)
@given(u=cplx, du=cplx, l1=cplx, l2=cplx)
def test_hyperbolic_combination_rule(u, du, l1, l2):
    a = StateVector(1.0, u, du)
    combo = StateVector(
        1.0,
        l1 * u + l2 * u.conjugate(),
        l1 * du + l2 * du.conjugate(),
    )
    expected = (abs(l1) ** 2 - abs(l2) ** 2) * current(a)
    assert current(combo) == pytest.approx(expected, abs=1e-9)


class TestCoefficientBalance:
    def test_pure_outgoing(self):
        assert coefficient_balance(1.0, 0.0, 1.2, math.sqrt(1.2 ** 2 - 1.0)) == pytest.approx(1.0)

    def test_unitary_case_balances_to_zero(self):
        # |Omega| = 1 solution: equal in/out weight on both sides
        assert coefficient_balance(0.7, 0.7, 1.1, 1.1) == pytest.approx(0.0, abs=1e-15)

    def test_violation_detected(self):
        with pytest.raises(BalanceViolation):
            coefficient_balance(1.0, 0.0, 0.0, 0.0, tol=1e-8)

    def test_perfect_absorption_ordering(self, solved):
        # Omega = 0 solution resolves as (C1, C2) = (b, a*): net current -2,
        # consistent with |S(0)| = |R'| < 1
        sol = solved("isp1")
        a, b = sol.matrix.a, sol.matrix.b
        bal = coefficient_balance(b, a.conjugate(), 0.0, 1.0, tol=1e-8)
        assert bal == pytest.approx(-1.0, abs=1e-10)
        assert abs(sol.coeffs.Rp) < 1.0

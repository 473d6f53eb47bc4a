import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from contour_odes.errors import UnknownName
from contour_odes.psi import (
    PsiParams,
    h_prime_zero,
    h_prime_zero_terms,
    identity_residual,
    ode_residual_psi,
    psi_eval,
    psi_existence_check,
    special_eval,
)
from contour_odes.quadrature import QuadratureSpec

SPEC = QuadratureSpec()
U = PsiParams(4, 3)


def _a0_partial_sum():
    total, m = 0.0, 0
    while True:
        t = 1.0 / (4 ** m * math.factorial(m) * math.factorial(m + 1))
        total += t
        if t < 1e-18:
            return -0.5 * total
        m += 1


def test_params():
    p = PsiParams(5, 3)
    assert p.sigma == pytest.approx(1 / 3) and p.eta == pytest.approx(1 / 2)
    for bad in ((3, 1), (3, 3), (4, 5)):
        with pytest.raises(ValueError):
            PsiParams(*bad)


def test_U_zero():
    v = psi_eval(U, 0, 0, SPEC).value
    assert round(v.real, 4) == -0.5652
    assert abs(v - _a0_partial_sum()) < 1e-12
    assert special_eval("U", 0, 0, SPEC).value == v


def test_U_even_and_real():
    for z in (0.7 + 0.2j, -1.3j, 2.0, 1.5 - 1.5j):
        assert abs(psi_eval(U, 0, z, SPEC).value - psi_eval(U, 0, -z, SPEC).value) < 1e-11
    for x in np.linspace(-3, 3, 7):
        assert abs(psi_eval(U, 0, x, SPEC).value.imag) < 1e-11
        assert abs(psi_eval(U, 0, 1j * x, SPEC).value.imag) < 1e-11


def test_G_relation_and_radius():
    for z in (0, 1, -1.5 + 0.5j):
        g1 = special_eval("G", 0, z, SPEC, R=1.0).value
        g2 = special_eval("G", 0, z, SPEC, R=2.0).value
        assert abs(g1 - g2) < 1e-9
        assert abs(2j * math.pi * psi_eval(PsiParams(3, 2), 0, z, SPEC).value - g1) < 1e-8


@settings(max_examples=15, deadline=None)
@given(st.sampled_from([(3, 2), (4, 3), (5, 3), (6, 2)]), st.complex_numbers(max_magnitude=5))
def test_radius_invariance(nk, z):
    p = PsiParams(*nk)
    base = max(1.0, abs(z) ** (1 / p.k))
    vals = [psi_eval(p, 0, z, SPEC, radius=r).value for r in (1.0, base, 2 * base)]
    scale = 1 + abs(vals[0])
    assert max(abs(v - vals[0]) for v in vals) < 1e-10 * scale


def test_h_prime_zero():
    first, second = h_prime_zero_terms(SPEC)
    # the arc term has the closed form -e sqrt(pi/2) erf(sqrt 2)
    assert first == pytest.approx(-math.e * math.sqrt(math.pi / 2) * math.erf(math.sqrt(2)), abs=1e-12)
    assert second < 0 and h_prime_zero(SPEC) < 0
    assert abs(special_eval("H", 1, 0, SPEC).value - h_prime_zero(SPEC)) < 1e-8
    from scipy import integrate

    companion, _ = integrate.quad(lambda t: math.cos(t) * math.exp(-math.cos(2 * t)), 0, math.pi)
    assert abs(companion) < 1e-13


def test_identity():
    h0 = special_eval("H", 0, 0, SPEC).value
    assert identity_residual(0, SPEC) < 1e-8 * (1 + abs(h0))
    z = 1.3 - 0.7j
    assert identity_residual(z, SPEC) < 1e-7 * (1 + abs(special_eval("H", 0, z, SPEC).value))
    # U real on the real line, so H(x) + H(-x) is purely imaginary
    x = 1.1
    s = special_eval("H", 0, x, SPEC).value + special_eval("H_neg", 0, x, SPEC).value
    assert abs(s.real) < 1e-10


def test_H_neg_is_reflection():
    for z in (0.5, -1 + 0.4j):
        assert abs(special_eval("H_neg", 0, z, SPEC).value
                   - special_eval("H", 0, -z, SPEC).value) < 1e-11


def test_unknown_name():
    with pytest.raises(UnknownName):
        special_eval("K", 0, 0, SPEC)


def test_existence_certificates():
    c = psi_existence_check(U, SPEC)
    assert c.q_bound <= 1.0 + 1e-12
    assert c.re_value == pytest.approx(1.266065877752008, abs=1e-10)
    c = psi_existence_check(PsiParams(3, 2), SPEC)
    assert c.q_bound <= 1.5 + 1e-12 and c.re_value > 0
    for n in range(3, 10):
        for k in range(2, n):
            c = psi_existence_check(PsiParams(n, k), SPEC)
            assert c.q_bound < math.pi / 2 and c.re_value > 0
            direct = psi_eval(PsiParams(n, k), k - 1, 0, SPEC).value.real
            assert c.re_value == pytest.approx(direct, abs=1e-10)


def test_residual_examples():
    assert ode_residual_psi(U, 0, SPEC) < 1e-9
    assert ode_residual_psi(PsiParams(3, 2), 2 + 1j, SPEC) < 1e-8
    assert ode_residual_psi(PsiParams(5, 3), -1.5, SPEC) < 1e-8


def test_wronskian_UH():
    u0 = special_eval("U", 0, 0, SPEC).value
    assert abs(special_eval("U", 1, 0, SPEC).value) < 1e-14
    assert abs(u0 * h_prime_zero(SPEC)) > 1


def test_U_imaginary_axis_negative():
    for r in np.arange(0, 10.01, 0.5):
        assert special_eval("U", 0, 1j * r, SPEC).value.real < 0

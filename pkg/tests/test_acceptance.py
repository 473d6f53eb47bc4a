"""One test per acceptance criterion; each also enforces its runtime budget."""

import io
import json
import math
import time
from contextlib import contextmanager
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from scipy import special

from contour_odes.cli import main
from contour_odes.phi import PhiParams, ode_residual_phi, phi_eval, phi_wronskian_zero, u_family_eval
from contour_odes.psi import (
    PsiParams,
    h_prime_zero,
    identity_residual,
    ode_residual_psi,
    psi_eval,
    special_eval,
)
from contour_odes.quadrature import QuadratureSpec
from contour_odes.series import (
    U_coeff,
    U_coefficients,
    log_abs,
    order_type_estimate,
    psi_deriv_zero_sum,
    recurrence_extend,
)
from contour_odes.verify import GridSpec, decay_fit, estimate_order_max_modulus, max_modulus, named_evaluator

SPEC = QuadratureSpec()
U = PsiParams(4, 3)


@contextmanager
def budget(seconds):
    t0 = time.perf_counter()
    yield
    elapsed = time.perf_counter() - t0
    assert elapsed < seconds, f"took {elapsed:.2f} s, budget {seconds} s"


def _a0_partial_sums():
    total, m = Fraction(0), 0
    while True:
        t = Fraction(1, 4 ** m * math.factorial(m) * math.factorial(m + 1))
        total += t
        if t < Fraction(1, 10 ** 25):
            return -float(total) / 2
        m += 1


def test_criterion_01_U_at_zero():
    with budget(1.0):
        out = io.StringIO()
        assert main(["eval", "--family", "U", "--z", "0"], out=out) == 0
        v = json.loads(out.getvalue())["value_re"]
    assert abs(v - (-0.5652)) < 5e-4
    assert abs(v - _a0_partial_sums()) < 1e-9


def test_criterion_02_identity():
    with budget(30.0):
        worst = 0.0
        for z in GridSpec.disk(20, 2.0).samples():
            h = special_eval("H", 0, z, SPEC).value
            worst = max(worst, identity_residual(z, SPEC) / (1 + abs(h)))
    assert worst < 1e-7


def test_criterion_03_order_type_from_coefficients():
    with budget(5.0):
        est = order_type_estimate(U_coefficients(200), even_only=True)
    assert 0.647 <= est.rho_hat <= 0.687
    assert 1.45 <= est.tau_hat <= 1.55


def test_criterion_04_ode_residuals():
    pts = GridSpec.disk(10, 2.0).samples()
    with budget(120.0):
        for n, k, b in ((2, 1, 0), (3, 1, 1), (4, 2, 1 + 1j)):
            p = PhiParams(n, k, b)
            for z in pts:
                assert ode_residual_phi(p, z, SPEC) < 1e-6 * (1 + abs(z)), (n, k, b, z)
        for n, k in ((3, 2), (4, 3), (5, 3)):
            p = PsiParams(n, k)
            for z in pts:
                assert ode_residual_psi(p, z, SPEC) < 1e-6 * (1 + abs(z)), (n, k, z)


def test_criterion_05_airy():
    with budget(1.0):
        p = PhiParams(2, 1, 0)
        v0 = phi_eval(p, 0, 0, SPEC).value
        v1 = phi_eval(p, 1, 0, SPEC).value
    ai0 = 1 / (3 ** (2 / 3) * math.gamma(2 / 3))
    ai1 = -1 / (3 ** (1 / 3) * math.gamma(1 / 3))
    assert abs(v0 - ai0) < 1e-9 and abs(v0 - 0.3550280539) < 1e-9
    assert abs(v1 - ai1) < 1e-9 and abs(v1 - (-0.2588194038)) < 1e-9
    # and away from the origin, against scipy's Airy
    for x in (-2.0, 1.5):
        assert abs(phi_eval(p, 0, x, SPEC).value - special.airy(x)[0]) < 1e-9


def test_criterion_06_G_consistency():
    with budget(10.0):
        for z in (0, 1, -1.5 + 0.5j, 2j, 0.7 - 1.2j):
            g1 = special_eval("G", 0, z, SPEC, R=1.0).value
            g2 = special_eval("G", 0, z, SPEC, R=2.0).value
            direct = 2j * math.pi * psi_eval(PsiParams(3, 2), 0, z, SPEC).value
            assert abs(direct - g1) < 1e-8
            assert abs(g1 - g2) < 1e-9


def test_criterion_07_growth_orders():
    with budget(180.0):
        du = estimate_order_max_modulus(named_evaluator("u", SPEC), [4, 6, 8])
        dU = estimate_order_max_modulus(named_evaluator("U", SPEC), [10, 20, 40, 80])
        dpsi = estimate_order_max_modulus(named_evaluator("psi", SPEC, n=3, k=2), [10, 20, 40, 80])
    assert abs(du - 1.5) <= 0.05
    assert abs(dU - 2 / 3) <= 0.05
    assert abs(dpsi - 0.5) <= 0.05


def test_criterion_08_decay_sector():
    p = PhiParams(2, 1, 0)
    with budget(60.0):
        fits = {t: decay_fit(p, t, range(2, 9), SPEC) for t in (0.0, 0.3, -0.3, 0.9, -0.9)}
    for t, (sign, k) in fits.items():
        assert sign == -1 and k > 0.1, (t, sign, k)
    assert abs(fits[0.0][1] - 2 / 3) <= 0.05


def test_criterion_09_independence():
    with budget(30.0):
        for n in (2, 3, 4):
            for js in combinations(range(1, n + 2), n):
                w = phi_wronskian_zero(n, js, SPEC)
                assert abs(w) > 1e-6
                # independent check: determinant of quadrature derivatives of f_j at 0
                mat = np.array([[u_family_eval(n, "f", p, 0, SPEC, j).value for j in js]
                                for p in range(n)])
                assert abs(np.linalg.det(mat) - w) < 1e-9 * (1 + abs(w))
        u0 = special_eval("U", 0, 0, SPEC).value
        hp = special_eval("H", 1, 0, SPEC).value
    assert abs(u0 - _a0_partial_sums()) < 1e-8
    assert abs(hp - h_prime_zero(SPEC)) < 1e-8
    assert abs(u0 * hp) > 1e-6


def test_criterion_10_parity_reality_imaginary_axis():
    with budget(120.0):
        for z in GridSpec.disk(20, 2.0).samples():
            assert abs(psi_eval(U, 0, z, SPEC).value - psi_eval(U, 0, -z, SPEC).value) < 1e-9
        for x in np.linspace(-3, 3, 13):
            assert abs(psi_eval(U, 0, x, SPEC).value.imag) < 1e-9
            assert abs(psi_eval(U, 0, 1j * x, SPEC).value.imag) < 1e-9
        for r in np.arange(0, 10.0001, 0.1):
            assert special_eval("U", 0, 1j * r, SPEC).value.real < 0, r
        ev = named_evaluator("U", SPEC)
        for r in (4, 6, 8):
            _, arg = max_modulus(ev, r, 128)
            assert min(abs(arg - math.pi / 2), abs(arg + math.pi / 2)) <= 2 * math.pi / 128


def test_criterion_11_coefficients():
    with budget(10.0):
        seed = [psi_deriv_zero_sum(U, s) for s in range(4)]
        rec = recurrence_extend(U, seed, 60)
        for nu in range(31):
            a = U_coeff(nu)
            b = psi_deriv_zero_sum(U, 2 * nu) / math.factorial(2 * nu)
            assert abs(a - b) < 1e-10 and abs(a - rec[2 * nu]) < 1e-10
        for nu in range(20, 201):
            upper = 3 * nu * (1 - math.log(2 * nu))
            assert upper - math.log(5) <= log_abs(U_coeff(nu)) <= upper

import json
import math

import pytest

from contour_odes.errors import NonPositiveModulus, OutOfSector, UnknownProperty
from contour_odes.phi import PhiParams
from contour_odes.psi import PsiParams
from contour_odes.quadrature import QuadratureSpec
from contour_odes.verify import (
    PROPERTIES,
    GridSpec,
    PropertyReport,
    decay_fit,
    estimate_order_max_modulus,
    max_modulus,
    named_evaluator,
    run_property,
)

SPEC = QuadratureSpec()


def test_grids_deterministic():
    d = GridSpec.disk(20, 2.0).samples()
    assert len(d) == 20 and max(abs(z) for z in d) <= 2.0
    assert d == GridSpec.disk(20, 2.0).samples()
    assert len(GridSpec.rect(-2, 2, -2, 2, 0.25).samples()) == 289
    assert len(GridSpec.circle(3, 16).samples()) == 16
    assert GridSpec.ray(0.0, [1, 2]).samples() == [1, 2]


def test_report_json_roundtrip():
    rep = run_property("psi_even")
    d = json.loads(rep.to_json())
    assert set(d) == {"property_id", "family", "params", "grid", "residuals",
                      "max_violation", "threshold", "passed"}
    assert d["passed"] is True and d["max_violation"] <= d["threshold"]
    assert len(d["residuals"]) == len(d["grid"])


def test_report_pass_flag():
    assert not PropertyReport("x", "phi", {}, [0], [2.0], 2.0, 1.0).passed
    assert PropertyReport("x", "phi", {}, [0], [1.0], 1.0, 1.0).passed


@pytest.mark.parametrize("pid", sorted(PROPERTIES))
def test_every_property_passes(pid):
    rep = run_property(pid)
    assert rep.passed, (pid, rep.max_violation, rep.threshold)


def test_property_examples():
    rep = run_property("identity_UH", grid=GridSpec.disk(20, 2.0))
    assert rep.passed and rep.max_violation < 1e-7
    assert run_property("psi_even", PsiParams(4, 3), GridSpec.disk(10, 1.5)).passed
    assert run_property("phi_real", PhiParams(2, 1, 0), GridSpec.segment(-3, 3, 25)).passed
    rep = run_property("wronskian_nonzero", PhiParams(4, 1, 0))
    assert rep.passed and len(rep.grid) == 5


def test_property_detects_failure():
    # psi(3, 2) is not even, so the evenness property must fail for it
    assert not run_property("psi_even", PsiParams(3, 2), GridSpec.disk(5, 1.5)).passed


def test_unknown_property():
    with pytest.raises(UnknownProperty):
        run_property("nope")


def test_max_modulus_direction_U():
    ev = named_evaluator("U", SPEC)
    for r in (4, 6, 8):
        m, arg = max_modulus(ev, r, 128)
        assert min(abs(arg - math.pi / 2), abs(arg + math.pi / 2)) <= 2 * math.pi / 128
        assert m == pytest.approx(abs(ev(1j * r)), rel=1e-9)


def test_order_estimates():
    assert estimate_order_max_modulus(named_evaluator("u", SPEC), [4, 6, 8]) == pytest.approx(1.5, abs=0.05)
    assert estimate_order_max_modulus(named_evaluator("U", SPEC), [10, 20, 40, 80]) == pytest.approx(2 / 3, abs=0.05)
    assert estimate_order_max_modulus(named_evaluator("psi", SPEC, n=3, k=2),
                                      [10, 20, 40, 80]) == pytest.approx(0.5, abs=0.05)
    for k in (4, 5):
        ev = named_evaluator("psi", SPEC, n=k + 1, k=k)
        assert estimate_order_max_modulus(ev, [10, 20, 40, 80]) == pytest.approx(1 - 1 / k, abs=0.05)


def test_order_insensitive_to_theta_samples():
    for ev, radii in ((named_evaluator("u", SPEC), [4, 6, 8]),
                      (named_evaluator("U", SPEC), [10, 20, 40, 80])):
        a = estimate_order_max_modulus(ev, radii, 128)
        b = estimate_order_max_modulus(ev, radii, 256)
        assert abs(a - b) < 0.01


@pytest.mark.xfail(strict=True, reason="radii 6-14 are too small for the prefactor-free fit to "
                                       "reach 1/2 within 0.05 for psi(3,2); measured 0.586")
def test_order_psi32_small_radii():
    ev = named_evaluator("psi", SPEC, n=3, k=2)
    assert estimate_order_max_modulus(ev, [6, 10, 14]) == pytest.approx(0.5, abs=0.05)


def test_loglog_method_available():
    d = estimate_order_max_modulus(named_evaluator("u", SPEC), [4, 6, 8], method="loglog")
    assert d > 1.0


def test_order_argument_checks():
    ev = named_evaluator("u", SPEC)
    with pytest.raises(ValueError):
        estimate_order_max_modulus(ev, [4, 6])
    with pytest.raises(ValueError):
        estimate_order_max_modulus(ev, [4, 6, 8], theta_samples=32)
    with pytest.raises(NonPositiveModulus):
        estimate_order_max_modulus(lambda z: 0.0, [1, 2, 3])


def test_decay_fit():
    sign, k = decay_fit(PhiParams(2, 1, 0), 0.0, range(2, 9), SPEC)
    assert sign == -1 and k == pytest.approx(2 / 3, abs=0.05)
    assert decay_fit(PhiParams(2, 1, 0), 0.3, range(2, 9), SPEC)[0] == -1
    assert decay_fit(PhiParams(3, 2, 0), 0.0, range(2, 9), SPEC)[0] == -1
    with pytest.raises(OutOfSector):
        decay_fit(PhiParams(2, 1, 0), 1.1, range(2, 9), SPEC)

import math

import pytest
from hypothesis import given, strategies as st

from contour_odes.contours import (
    JContourSpec,
    contour_a,
    contour_c,
    contour_cj,
    contour_j,
    contour_p,
    decay_sector_bounds,
    standard_contour,
)
from contour_odes.errors import BadIndex, OutOfSector, UnknownName
from contour_odes.quadrature import Arc, Ray


def test_sector_bounds():
    assert decay_sector_bounds(2) == pytest.approx((-math.pi / 3, math.pi / 3))
    assert decay_sector_bounds(3) == pytest.approx((-3 * math.pi / 8, 3 * math.pi / 8))
    lo, hi = decay_sector_bounds(10_000)
    assert hi == pytest.approx(math.pi / 2, abs=1e-3) and lo == -hi


def test_contour_c_shape():
    c = contour_c(2, 10.0)
    a, b = c.segments
    assert isinstance(a, Ray) and a.angle == pytest.approx(-math.pi / 3) and a.direction == "inward"
    assert isinstance(b, Ray) and b.angle == pytest.approx(math.pi / 3) and b.direction == "outward"
    assert a.r_end == b.r_end == 10.0
    assert c.start == a.start and abs(c.segments[0].end) == 0


def test_contour_a_and_p():
    a = contour_a(8.0)
    r1, arc, r2 = a.segments
    assert (r1.angle, r1.r_start, r1.r_end, r1.direction) == (0.0, 1.0, 8.0, "inward")
    assert isinstance(arc, Arc) and (arc.theta_start, arc.theta_end) == (0.0, math.pi)
    assert r2.angle == math.pi and r2.direction == "outward"
    p = contour_p(8.0)
    for s, t in zip(a.segments, p.segments):
        assert abs(s.start + t.start) < 1e-12 and abs(s.end + t.end) < 1e-12


def test_cj_rotation_and_index():
    c = contour_cj(3, 2, 5.0)
    assert c.segments[0].angle == pytest.approx(-math.pi / 4 + math.pi / 2)
    with pytest.raises(BadIndex):
        contour_cj(3, 5, 5.0)
    with pytest.raises(BadIndex):
        contour_cj(3, 0, 5.0)


def test_j_at_zero_matches_c():
    g = JContourSpec(0.0, 4, 3.0)
    assert g.mu == pytest.approx(-math.pi / 5) and g.tau == pytest.approx(math.pi / 5)


def test_j_out_of_sector():
    with pytest.raises(OutOfSector):
        JContourSpec(math.pi / 3, 2, 1.0)
    with pytest.raises(OutOfSector):
        contour_j(-1.2, 2, 1.0, 10.0)


def test_standard_contour_dispatch():
    assert len(standard_contour("C", 5.0, n=2).segments) == 2
    assert len(standard_contour("J", 9.0, n=2, theta=0.2, z_abs=4.0).segments) == 3
    assert len(standard_contour("A", 5.0).segments) == 3
    with pytest.raises(UnknownName):
        standard_contour("Q", 5.0)


@given(st.integers(2, 12), st.floats(-0.999, 0.999), st.floats(0.1, 50))
def test_j_inequalities(n, frac, z_abs):
    theta = frac * n * math.pi / (2 * n + 2)
    g = JContourSpec(theta, n, z_abs)
    assert -1.5 * math.pi < (n + 1) * g.mu < -0.5 * math.pi
    assert 0.5 * math.pi < (n + 1) * g.tau < 1.5 * math.pi
    assert g.A > 0
    assert 0 < g.B < ((n + 1) * g.A) ** (1 / n)
    assert g.R == pytest.approx(g.B * z_abs ** (1 / n))
    c = contour_j(theta, n, z_abs, 2 * g.R + 1)
    assert c.segments[0].end == c.segments[1].start
    assert c.segments[1].end == c.segments[2].start

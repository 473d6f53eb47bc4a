"""Complex path integration over piecewise contours.

Open segments (rays, arcs, lines) are integrated with an adaptive
Gauss-Kronrod (7, 15) pair; full circles use the equally spaced trapezoidal
rule with point doubling, which converges geometrically for integrands
analytic in an annulus around the circle.

Integrands are called with a 1-D ``numpy`` array of complex points and must
return either an array of the same shape or an array of shape ``(N, m)``
(``m`` simultaneous integrands, e.g. several derivative orders at once).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .errors import DegenerateExponent, InvalidContour, NonConvergence

__all__ = [
    "Ray",
    "Arc",
    "Line",
    "Circle",
    "PathSegment",
    "Contour",
    "QuadratureSpec",
    "EvalResult",
    "integrate_path",
    "integrate_circle_spectral",
    "trapezoid_circle_sum",
    "choose_truncation_radius",
]

Integrand = Callable[[np.ndarray], np.ndarray]

_EPS = np.finfo(float).eps
# rounding floor: results cannot be more accurate than this many ulps of the L1 mass
_NOISE_ULPS = 50.0

# Kronrod abscissae/weights (15 points) with the embedded 7-point Gauss weights.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

GK_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
GK_KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GK_GAUSS_WEIGHTS = np.zeros(15)
GK_GAUSS_WEIGHTS[[1, 3, 5]] = _WG[:3]
GK_GAUSS_WEIGHTS[7] = _WG[3]
GK_GAUSS_WEIGHTS[[9, 11, 13]] = _WG[2::-1]


# endpoint angles are reduced mod 2 pi and rounded to this many decimals, so
# angles one full turn apart (e.g. a closing arc) name the same point
_ANGLE_DECIMALS = 13


def _polar(center: complex, radius: float, angle: float) -> complex:
    # single formula for every endpoint so adjacent pieces match bit-for-bit;
    # only used for endpoints, the integration paths use the exact angles
    a = round(math.remainder(angle, 2 * math.pi), _ANGLE_DECIMALS)
    if a == -round(math.pi, _ANGLE_DECIMALS):
        a = -a
    return center + radius * cmath.exp(1j * a)


@dataclass(frozen=True)
class Ray:
    """Radial segment ``w = r e^{i angle}``, ``r_start <= r <= r_end``.

    ``direction="inward"`` traverses it from ``r_end`` down to ``r_start``.
    """

    angle: float
    r_start: float
    r_end: float
    direction: str = "outward"

    def __post_init__(self):
        if self.direction not in ("outward", "inward"):
            raise InvalidContour(f"bad ray direction {self.direction!r}")
        if not (0.0 <= self.r_start < self.r_end):
            raise InvalidContour(
                f"ray needs 0 <= r_start < r_end, got {self.r_start}, {self.r_end}"
            )

    @property
    def start(self) -> complex:
        r = self.r_start if self.direction == "outward" else self.r_end
        return _polar(0.0, r, self.angle) if math.isfinite(r) else complex(math.inf)

    @property
    def end(self) -> complex:
        r = self.r_end if self.direction == "outward" else self.r_start
        return _polar(0.0, r, self.angle) if math.isfinite(r) else complex(math.inf)

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.r_end)

    def reversed(self) -> "Ray":
        flip = "inward" if self.direction == "outward" else "outward"
        return Ray(self.angle, self.r_start, self.r_end, flip)

    def truncated(self, radius: float) -> "Ray":
        if self.is_finite:
            return self
        if radius <= self.r_start:
            raise InvalidContour("truncation radius must exceed r_start")
        return Ray(self.angle, self.r_start, radius, self.direction)

    def _param(self):
        e = cmath.exp(1j * self.angle)

        def path(t):
            return t * e, np.full_like(t, e, dtype=complex)

        if self.direction == "outward":
            return path, self.r_start, self.r_end
        return path, self.r_end, self.r_start


@dataclass(frozen=True)
class Arc:
    """Circular arc ``center + radius e^{i t}`` for t from theta_start to theta_end."""

    center: complex
    radius: float
    theta_start: float
    theta_end: float

    def __post_init__(self):
        if not self.radius > 0:
            raise InvalidContour("arc radius must be positive")

    @property
    def start(self) -> complex:
        return _polar(self.center, self.radius, self.theta_start)

    @property
    def end(self) -> complex:
        return _polar(self.center, self.radius, self.theta_end)

    is_finite = True

    def reversed(self) -> "Arc":
        return Arc(self.center, self.radius, self.theta_end, self.theta_start)

    def _param(self):
        c, rad = self.center, self.radius

        def path(t):
            e = rad * np.exp(1j * t)
            return c + e, 1j * e

        return path, self.theta_start, self.theta_end


@dataclass(frozen=True)
class Line:
    start: complex
    end: complex

    is_finite = True

    def reversed(self) -> "Line":
        return Line(self.end, self.start)

    def _param(self):
        a, d = complex(self.start), complex(self.end) - complex(self.start)

        def path(t):
            return a + t * d, np.full_like(t, d, dtype=complex)

        return path, 0.0, 1.0


@dataclass(frozen=True)
class Circle:
    center: complex
    radius: float
    orientation: str = "ccw"

    def __post_init__(self):
        if not self.radius > 0:
            raise InvalidContour("circle radius must be positive")
        if self.orientation not in ("ccw", "cw"):
            raise InvalidContour(f"bad orientation {self.orientation!r}")

    @property
    def start(self) -> complex:
        return _polar(self.center, self.radius, 0.0)

    end = start
    is_finite = True

    def reversed(self) -> "Circle":
        return Circle(self.center, self.radius, "cw" if self.orientation == "ccw" else "ccw")


PathSegment = Union[Ray, Arc, Line, Circle]


@dataclass(frozen=True)
class Contour:
    """Ordered, connected sequence of path segments.

    ``truncation`` records the radius at which infinite rays were cut, if any;
    integrating such a contour adds ``tail_tol`` per cut end to the error
    estimate.
    """

    segments: tuple
    closed: bool = False
    truncation: float | None = None

    def __post_init__(self):
        segs = tuple(self.segments)
        object.__setattr__(self, "segments", segs)
        if not segs:
            raise InvalidContour("contour needs at least one segment")
        for a, b in zip(segs, segs[1:]):
            if a.end != b.start:
                raise InvalidContour(f"segments do not join: {a.end} != {b.start}")
        n_inf = sum(1 for s in segs if not s.is_finite)
        if n_inf > 2:
            raise InvalidContour("at most two infinite endpoints allowed")
        for i, s in enumerate(segs):
            if not s.is_finite:
                inward_first = i == 0 and s.direction == "inward"
                outward_last = i == len(segs) - 1 and s.direction == "outward"
                if not (inward_first or outward_last):
                    raise InvalidContour("infinite endpoints only at the contour's ends")
        if self.closed and segs[-1].end != segs[0].start:
            raise InvalidContour("closed contour must end where it starts")

    @property
    def start(self) -> complex:
        return self.segments[0].start

    @property
    def end(self) -> complex:
        return self.segments[-1].end

    @property
    def is_finite(self) -> bool:
        return all(s.is_finite for s in self.segments)

    def reversed(self) -> "Contour":
        return Contour(tuple(s.reversed() for s in reversed(self.segments)),
                       self.closed, self.truncation)

    def truncated(self, radius: float) -> "Contour":
        if self.is_finite:
            return self
        segs = tuple(s.truncated(radius) if isinstance(s, Ray) else s for s in self.segments)
        return Contour(segs, self.closed, radius)

    @property
    def n_cut_ends(self) -> int:
        if self.truncation is None:
            return 0
        return sum(
            1 for s in self.segments
            if isinstance(s, Ray) and s.r_end == self.truncation
        )


@dataclass(frozen=True)
class QuadratureSpec:
    """Accuracy contract for every integral in the package."""

    abs_tol: float = 1e-12
    rel_tol: float = 1e-12
    max_subdivisions: int = 4000
    tail_tol: float = 1e-15
    max_circle_points: int = 1 << 16

    def __post_init__(self):
        for name in ("abs_tol", "rel_tol", "tail_tol"):
            v = getattr(self, name)
            if not (0.0 < v < 1.0):
                raise ValueError(f"{name} must lie in (0, 1), got {v}")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")
        if self.max_circle_points < 1:
            raise ValueError("max_circle_points must be >= 1")


@dataclass(frozen=True)
class EvalResult:
    value: complex | np.ndarray
    error_estimate: float
    truncation_radius_used: float | None = None
    points_used: int = 1

    def __post_init__(self):
        if not self.error_estimate >= 0:
            raise ValueError("error_estimate must be nonnegative")
        if self.points_used < 1:
            raise ValueError("points_used must be >= 1")


def _as_2d(values, w: np.ndarray) -> np.ndarray:
    v = np.asarray(values, dtype=complex)
    if v.ndim == 0:
        v = np.broadcast_to(v, w.shape)
    if v.shape == w.shape:
        return v.reshape(-1, 1)
    return v.reshape(w.size, -1)


def _squeeze(v: np.ndarray):
    return complex(v[0]) if v.shape == (1,) else v


def _gk_batch(integrand, path, lo, hi):
    center = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    t = center[:, None] + half[:, None] * GK_NODES[None, :]
    w, dw = path(t.ravel())
    f = _as_2d(integrand(w), w)
    g = (f * np.asarray(dw).reshape(-1, 1)).reshape(len(lo), 15, -1)
    kron = np.einsum("ijk,j->ik", g, GK_KRONROD_WEIGHTS) * half[:, None]
    gauss = np.einsum("ijk,j->ik", g, GK_GAUSS_WEIGHTS) * half[:, None]
    err = np.abs(kron - gauss).max(axis=1)
    l1 = np.einsum("ijk,j->ik", np.abs(g), GK_KRONROD_WEIGHTS).max(axis=1) * np.abs(half)
    return kron, err, l1


def _adaptive_gk(integrand, path, a, b, abs_tol, rel_tol, max_subdivisions, initial=4):
    """Globally adaptive GK(7,15) on [a, b]; returns (value, err, npts, subdivisions)."""
    edges = np.linspace(a, b, initial + 1)
    lo, hi = edges[:-1], edges[1:]
    val, err, l1 = _gk_batch(integrand, path, lo, hi)
    npts, nsub = 15 * len(lo), 0
    while True:
        total = val.sum(axis=0)
        total_err = err.sum()
        target = max(abs_tol, rel_tol * np.abs(total).max(), _NOISE_ULPS * _EPS * l1.sum())
        if total_err <= target:
            return total, float(total_err), npts, nsub
        bad = err > target / len(err)
        nsub += int(bad.sum())
        if nsub > max_subdivisions:
            raise NonConvergence(
                f"adaptive quadrature exceeded {max_subdivisions} subdivisions "
                f"(error {total_err:.3g} > target {target:.3g})"
            )
        mid = 0.5 * (lo[bad] + hi[bad])
        new_lo = np.concatenate([lo[bad], mid])
        new_hi = np.concatenate([mid, hi[bad]])
        v2, e2, l2 = _gk_batch(integrand, path, new_lo, new_hi)
        npts += 15 * len(new_lo)
        keep = ~bad
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        val = np.concatenate([val[keep], v2])
        err = np.concatenate([err[keep], e2])
        l1 = np.concatenate([l1[keep], l2])


def trapezoid_circle_sum(integrand: Integrand, center: complex, radius: float, m: int,
                         orientation: str = "ccw"):
    """m-point trapezoidal approximation of a circle integral (no adaptivity)."""
    theta = 2.0 * np.pi * np.arange(m) / m
    e = radius * np.exp(1j * theta)
    w = center + e
    f = _as_2d(integrand(w), w)
    total = (f * (1j * e)[:, None]).sum(axis=0) * (2.0 * np.pi / m)
    if orientation == "cw":
        total = -total
    return _squeeze(total)


def integrate_circle_spectral(integrand: Integrand, center: complex, radius: float,
                              spec: QuadratureSpec = QuadratureSpec(),
                              orientation: str = "ccw") -> EvalResult:
    """Trapezoidal rule on a full circle with point doubling from 32 points.

    Stops once successive estimates differ by less than
    ``max(abs_tol, rel_tol*|value|)`` (or the rounding floor of the sum).
    Odd-indexed points are the only new evaluations at each doubling.
    """
    if not radius > 0:
        raise InvalidContour("circle radius must be positive")
    m = 32
    if m > spec.max_circle_points:
        raise NonConvergence("max_circle_points below the 32-point starting rule")
    sign = 1.0 if orientation == "ccw" else -1.0

    def partial(offset, step, count):
        theta = 2.0 * np.pi * (offset + step * np.arange(count)) / (step * count)
        e = radius * np.exp(1j * theta)
        w = center + e
        g = _as_2d(integrand(w), w) * (1j * e)[:, None]
        return g.sum(axis=0), np.abs(g).sum(axis=0)

    s, l1 = partial(0, 1, m)
    current = s * (2.0 * np.pi / m)
    npts = m
    while True:
        if 2 * m > spec.max_circle_points:
            raise NonConvergence(
                f"circle rule exceeded {spec.max_circle_points} points at radius {radius}"
            )
        # new nodes sit halfway between the old ones
        theta = 2.0 * np.pi * (np.arange(m) + 0.5) / m
        e = radius * np.exp(1j * theta)
        w = center + e
        g = _as_2d(integrand(w), w) * (1j * e)[:, None]
        s = s + g.sum(axis=0)
        l1 = l1 + np.abs(g).sum(axis=0)
        m *= 2
        npts += m // 2
        new = s * (2.0 * np.pi / m)
        diff = float(np.abs(new - current).max())
        floor = _NOISE_ULPS * _EPS * float(l1.max()) * (2.0 * np.pi / m)
        target = max(spec.abs_tol, spec.rel_tol * float(np.abs(new).max()), floor)
        current = new
        if diff <= target:
            return EvalResult(_squeeze(sign * current), diff, None, npts)


def integrate_path(integrand: Integrand, contour: Contour,
                   spec: QuadratureSpec = QuadratureSpec()) -> EvalResult:
    """Integrate ``integrand`` along ``contour``; segment results summed in order."""
    if not contour.is_finite:
        raise InvalidContour("contour has an infinite endpoint; truncate it first")
    nseg = len(contour.segments)
    seg_abs_tol = spec.abs_tol / nseg
    total = None
    err = 0.0
    npts = 0
    for seg in contour.segments:
        if isinstance(seg, Circle):
            sub = QuadratureSpec(seg_abs_tol, spec.rel_tol, spec.max_subdivisions,
                                 spec.tail_tol, spec.max_circle_points)
            r = integrate_circle_spectral(integrand, seg.center, seg.radius, sub, seg.orientation)
            v = np.atleast_1d(np.asarray(r.value, dtype=complex))
            e, n = r.error_estimate, r.points_used
        else:
            path, a, b = seg._param()
            v, e, n, _ = _adaptive_gk(integrand, path, a, b, seg_abs_tol, spec.rel_tol,
                                      spec.max_subdivisions)
        total = v if total is None else total + v
        err += e
        npts += n
    err += spec.tail_tol * contour.n_cut_ends
    return EvalResult(_squeeze(total), err, contour.truncation, npts)


def choose_truncation_radius(decay_degree: int, decay_coeff: float,
                             growth_terms: Sequence[tuple[int, float]],
                             tail_tol: float, prefactor_degree: int = 0) -> float:
    """Radius beyond which an ``exp(-c r^m + growth)`` tail is negligible.

    Returns R such that, for every r >= R,
    ``c r^m - sum(coeff * r^deg) >= (c/2) r^m`` and
    ``exp(-(c/2) R^m) (1 + R)^(1 + prefactor_degree) < tail_tol``.
    ``prefactor_degree`` accounts for a polynomial factor (e.g. ``w^p``) in
    the integrand. Doubling search followed by bisection.
    """
    m, c = decay_degree, decay_coeff
    if not c > 0:
        raise ValueError("decay coefficient must be positive")
    if not 0 < tail_tol < 1:
        raise ValueError("tail_tol must lie in (0, 1)")
    terms = [(int(d), float(a)) for d, a in growth_terms if a != 0.0]
    if any(d >= m for d, _ in terms):
        raise DegenerateExponent(
            f"growth degree {max(d for d, _ in terms)} >= decay degree {m}"
        )
    log_tol = math.log(tail_tol)

    def ok(r: float) -> bool:
        # each growth ratio a r^(d-m) is decreasing in r, so checking at r suffices
        if sum(a * r ** (d - m) for d, a in terms) > 0.5 * c:
            return False
        return -0.5 * c * r ** m + (1 + prefactor_degree) * math.log1p(r) < log_tol

    hi = 1.0
    while not ok(hi):
        hi *= 2.0
    lo = hi / 2.0
    if ok(lo):
        return lo
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-9 * hi:
            break
    return hi

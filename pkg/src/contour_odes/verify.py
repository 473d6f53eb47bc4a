"""Property harness: each registered property evaluates a residual over a
sample grid and reports the worst violation against a threshold.

Also hosts the growth estimators (maximum modulus order, decay-rate fit).
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import least_squares, minimize_scalar

from .contours import contour_c, decay_sector_bounds
from .errors import CertFailure, NonPositiveModulus, OutOfSector, UnknownName, UnknownProperty
from .phi import (
    PhiParams,
    ode_residual_phi,
    phi_deriv_zero_re,
    phi_eval,
    phi_wronskian_zero,
    roots_of_unity,
    u_family_eval,
)
from .psi import (
    PsiParams,
    h_prime_zero,
    identity_residual,
    ode_residual_psi,
    psi_eval,
    psi_existence_check,
    psi_radius,
    special_eval,
)
from .quadrature import QuadratureSpec, choose_truncation_radius
from .series import (
    U_coeff,
    U_coefficients,
    log_abs,
    psi_deriv_zero_sum,
    recurrence_extend,
)

__all__ = [
    "GridSpec",
    "PropertyReport",
    "PROPERTIES",
    "run_property",
    "run_all",
    "max_modulus",
    "estimate_order_max_modulus",
    "decay_fit",
    "named_evaluator",
]

Evaluator = Callable[[complex], complex]
# step in log r for the central-difference logarithmic derivative
LOG_STEP = 0.02
# nonzero-ness floor shared by the "is nonzero" properties
NONZERO_FLOOR = 1e-6


@dataclass(frozen=True)
class GridSpec:
    """Deterministic sample grid.

    ``kind`` selects the layout: ``disk`` (Vogel spiral of ``count`` points
    in ``|z| <= radius``), ``segment`` (``count`` points from ``start`` to
    ``end``), ``ray`` (``radii`` along ``theta``), ``circle`` (``count``
    points on ``|z| = radius``), ``rect`` (step grid, corners included) or
    ``points`` (explicit list).  Properties whose samples are not complex
    points (index subsets, angles, coefficient indices) store them in
    ``values``.
    """

    kind: str
    count: int = 0
    radius: float = 0.0
    start: complex = 0j
    end: complex = 0j
    theta: float = 0.0
    values: tuple = ()

    @classmethod
    def disk(cls, count: int, radius: float) -> "GridSpec":
        return cls("disk", count=count, radius=radius)

    @classmethod
    def segment(cls, start: complex, end: complex, count: int) -> "GridSpec":
        return cls("segment", count=count, start=complex(start), end=complex(end))

    @classmethod
    def ray(cls, theta: float, radii: Sequence[float]) -> "GridSpec":
        return cls("ray", theta=theta, values=tuple(float(r) for r in radii))

    @classmethod
    def circle(cls, radius: float, count: int) -> "GridSpec":
        return cls("circle", count=count, radius=radius)

    @classmethod
    def rect(cls, x0: float, x1: float, y0: float, y1: float, step: float) -> "GridSpec":
        return cls("rect", values=(x0, x1, y0, y1, step))

    @classmethod
    def points(cls, pts: Sequence) -> "GridSpec":
        return cls("points", values=tuple(pts))

    def samples(self) -> list:
        if self.kind == "disk":
            i = np.arange(self.count)
            golden = math.pi * (3.0 - math.sqrt(5.0))
            r = self.radius * np.sqrt((i + 0.5) / self.count)
            return list(r * np.exp(1j * golden * i))
        if self.kind == "segment":
            return list(np.linspace(self.start, self.end, self.count))
        if self.kind == "ray":
            return [r * cmath.exp(1j * self.theta) for r in self.values]
        if self.kind == "circle":
            th = 2 * np.pi * np.arange(self.count) / self.count
            return list(self.radius * np.exp(1j * th))
        if self.kind == "rect":
            x0, x1, y0, y1, step = self.values
            nx = int(round((x1 - x0) / step)) + 1
            ny = int(round((y1 - y0) / step)) + 1
            return [complex(x0 + a * step, y0 + b * step) for b in range(ny) for a in range(nx)]
        if self.kind == "points":
            return list(self.values)
        raise UnknownName(f"unknown grid kind {self.kind!r}")

    def __len__(self) -> int:
        return len(self.samples())


def _jsonable(x):
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, Fraction):
        return float(x)
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


@dataclass
class PropertyReport:
    """Outcome of one property over its grid; ``passed`` iff ``max_violation <= threshold``."""

    property_id: str
    family: str
    params: dict
    grid: list
    residuals: list
    max_violation: float
    threshold: float
    passed: bool = field(init=False)

    def __post_init__(self):
        self.passed = bool(self.max_violation <= self.threshold)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["grid"] = _jsonable(self.grid)
        d["residuals"] = _jsonable(self.residuals)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, allow_nan=True)


# ---------------------------------------------------------------- growth tools

def named_evaluator(name: str, spec: QuadratureSpec = QuadratureSpec(), **params) -> Evaluator:
    """``z -> f(z)`` for ``u`` (or ``Ai``), ``phi``, ``psi``, ``U``, ``H``, ``G``."""
    if name in ("u", "Ai"):
        p = PhiParams(params.get("n", 2), 1, 0)
        return lambda z: phi_eval(p, 0, z, spec).value
    if name == "phi":
        p = PhiParams(params["n"], params["k"], params.get("b", 0))
        return lambda z: phi_eval(p, 0, z, spec).value
    if name == "psi":
        p = PsiParams(params["n"], params["k"])
        return lambda z: psi_eval(p, 0, z, spec).value
    if name in ("U", "H", "H_neg", "G"):
        return lambda z: special_eval(name, 0, z, spec).value
    raise UnknownName(f"unknown evaluator {name!r}")


def max_modulus(evaluator: Evaluator, r: float, theta_samples: int = 128,
                refine: bool = True) -> tuple[float, float]:
    """``(M(r), theta*)``: maximum of ``|f|`` on ``|z| = r`` and where it occurs.

    The grid maximum is polished with a bounded scalar search over the two
    neighbouring grid cells.
    """
    th = -np.pi + 2 * np.pi * np.arange(theta_samples) / theta_samples
    vals = np.array([abs(evaluator(r * cmath.exp(1j * t))) for t in th])
    i = int(np.argmax(vals))
    best, arg = float(vals[i]), float(th[i])
    if refine:
        step = 2 * np.pi / theta_samples
        res = minimize_scalar(lambda t: -abs(evaluator(r * cmath.exp(1j * t))),
                              bounds=(arg - step, arg + step), method="bounded",
                              options={"xatol": 1e-10})
        if -res.fun > best:
            best, arg = float(-res.fun), float(res.x)
    arg = math.remainder(arg, 2 * math.pi)
    return best, arg


def _log_max_modulus(evaluator, r, theta_samples) -> float:
    m, _ = max_modulus(evaluator, r, theta_samples)
    if not m > 0 or not math.isfinite(m):
        raise NonPositiveModulus(f"maximum modulus {m} at r={r} has no usable logarithm")
    return math.log(m)


def estimate_order_max_modulus(evaluator: Evaluator, radii: Sequence[float],
                               theta_samples: int = 128,
                               method: str = "log_derivative") -> float:
    """Order of growth ``d`` from maximum-modulus samples.

    ``method="loglog"`` is the direct least-squares slope of
    ``log log M(r)`` against ``log r``.  It carries the full additive
    constant and the ``log r`` prefactor terms of ``log M`` and so converges
    slowly.

    ``method="log_derivative"`` (default) measures
    ``G(r) = d log M / d log r`` by a central difference in ``log r`` and
    fits ``G(r) = C r^d + a``.  If ``log M = c r^d + a log r + O(1)`` then
    ``G = c d r^d + a + o(1)``, so the additive constant drops out and the
    power-law prefactor becomes the fitted offset.
    """
    radii = [float(r) for r in radii]
    if len(radii) < 3 or any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("need at least 3 increasing radii")
    if theta_samples < 64:
        raise ValueError("theta_samples must be >= 64")
    rs = np.asarray(radii)
    if method == "loglog":
        logm = np.array([_log_max_modulus(evaluator, r, theta_samples) for r in radii])
        if np.any(logm <= 0):
            raise NonPositiveModulus("log M(r) <= 0; log log M undefined")
        return float(np.polyfit(np.log(rs), np.log(logm), 1)[0])
    if method != "log_derivative":
        raise ValueError(f"unknown method {method!r}")
    G = np.array([
        (_log_max_modulus(evaluator, r * math.exp(LOG_STEP), theta_samples)
         - _log_max_modulus(evaluator, r * math.exp(-LOG_STEP), theta_samples)) / (2 * LOG_STEP)
        for r in radii
    ])
    # initial guess from the two largest radii with zero offset
    d0 = max(0.1, math.log(G[-1] / G[-2]) / math.log(rs[-1] / rs[-2])) if G[-2] > 0 < G[-1] else 1.0
    fit = least_squares(lambda p: p[0] * rs ** p[1] + p[2] - G, [G[-1] / rs[-1] ** d0, d0, 0.0],
                        x_scale="jac")
    return float(fit.x[1])


def decay_fit(params: PhiParams, theta: float, radii: Sequence[float],
              spec: QuadratureSpec = QuadratureSpec()) -> tuple[int, float]:
    """Fit ``log|phi(r e^(i theta))| = -K r^(1+1/n) + a log r + c``.

    Returns ``(sign of -K, |K|)``.  The ``log r`` column absorbs the
    algebraic prefactor of the decay so that ``K`` is the exponential rate.
    """
    lo, hi = decay_sector_bounds(params.n)
    if not lo < theta < hi:
        raise OutOfSector(f"theta={theta} outside ({lo}, {hi})")
    rs = np.asarray([float(r) for r in radii])
    if len(rs) < 3 or np.any(np.diff(rs) <= 0):
        raise ValueError("need at least 3 increasing radii")
    y = np.array([math.log(abs(phi_eval(params, 0, r * cmath.exp(1j * theta), spec).value))
                  for r in rs])
    X = np.column_stack([rs ** (1 + 1 / params.n), np.log(rs), np.ones_like(rs)])
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    slope = float(coef[0])
    return int(np.sign(slope)), abs(slope)


# ---------------------------------------------------------------- properties

@dataclass(frozen=True)
class _Property:
    family: str
    default_params: object
    default_grid: GridSpec
    run: Callable  # (params, samples, spec) -> (residuals, threshold)


def _scaled(res, z):
    return res / (1.0 + abs(z))


def _p_phi_real(params, samples, spec):
    return [abs(phi_eval(params, 0, x, spec).value.imag) for x in samples], 10 * spec.abs_tol


def _p_phi_ode(params, samples, spec):
    return [_scaled(ode_residual_phi(params, z, spec), z) for z in samples], 100 * spec.abs_tol


def _p_psi_ode(params, samples, spec):
    return [_scaled(ode_residual_psi(params, z, spec), z) for z in samples], 100 * spec.abs_tol


def _p_identity(params, samples, spec):
    out = []
    for z in samples:
        h = special_eval("H", 0, z, spec).value
        out.append(identity_residual(z, spec) / (1.0 + abs(h)))
    return out, 100 * spec.abs_tol


def _p_psi_even(params, samples, spec):
    return [abs(psi_eval(params, 0, z, spec).value - psi_eval(params, 0, -z, spec).value)
            for z in samples], 10 * spec.abs_tol


def _p_psi_real(params, samples, spec):
    """Imaginary part on the real axis, and on the imaginary axis when n even, k odd."""
    out = [abs(psi_eval(params, 0, complex(z).real, spec).value.imag) for z in samples]
    if params.n % 2 == 0 and params.k % 2 == 1:
        out += [abs(psi_eval(params, 0, 1j * complex(z).real, spec).value.imag) for z in samples]
    return out, 10 * spec.abs_tol


def _p_wronskian(params, samples, spec):
    n = params.n
    return [max(0.0, NONZERO_FLOOR - abs(phi_wronskian_zero(n, js, spec))) for js in samples], 0.0


def _p_U_imag_negative(params, samples, spec):
    # shortfall from U(ir) <= -abs_tol; the imaginary part must vanish too
    out = []
    for r in samples:
        v = special_eval("U", 0, 1j * r, spec).value
        out.append(max(0.0, v.real + spec.abs_tol) + max(0.0, abs(v.imag) - 10 * spec.abs_tol))
    return out, 0.0


def _p_U_max_direction(params, samples, spec, theta_samples=128):
    ev = named_evaluator("U", spec)
    step = 2 * math.pi / theta_samples
    out = []
    for r in samples:
        _, arg = max_modulus(ev, r, theta_samples)
        dist = min(abs(arg - math.pi / 2), abs(arg + math.pi / 2))
        sym = abs(abs(ev(1j * r)) - abs(ev(-1j * r))) / abs(ev(1j * r))
        out.append(max(0.0, dist - step) + max(0.0, sym - 1e-10))
    return out, 0.0


def _p_psi_existence(params, samples, spec):
    out = []
    for n, k in samples:
        try:
            cert = psi_existence_check(PsiParams(n, k), spec)
            out.append(0.0 if cert.q_bound < math.pi / 2 and cert.re_value > 0 else 1.0)
        except CertFailure:
            out.append(1.0)
    return out, 0.0


def _p_phi_nontrivial(params, samples, spec):
    out = []
    for n, k, b in samples:
        p = PhiParams(n, k, complex(*b) if isinstance(b, (list, tuple)) else b)
        best = max(abs(phi_deriv_zero_re(p, q, spec)) for q in range(n + 1))
        out.append(max(0.0, NONZERO_FLOOR - best))
    return out, 0.0


def _p_decay(params, samples, spec, radii=tuple(range(2, 9)), k_floor=0.1):
    out = []
    for theta in samples:
        sign, k_hat = decay_fit(params, theta, radii, spec)
        out.append(max(0.0, k_floor - k_hat) if sign == -1 else 1.0)
    return out, 0.0


def _p_contour_invariance(params, samples, spec):
    out = []
    for z in samples:
        a = phi_eval(params, 0, z, spec)
        t = choose_truncation_radius(params.n + 1, params.beta,
                                     [(1, abs(z)), (params.k + 1, abs(params.b * params.alpha))],
                                     spec.tail_tol)
        b = phi_eval(params, 0, z, spec, contour=contour_c(params.n, t))
        out.append(_scaled(abs(a.value - b.value), z))
    return out, 100 * spec.abs_tol


def _p_radius_invariance(params, samples, spec):
    out = []
    for z in samples:
        base = psi_radius(params.k, z)
        v = [psi_eval(params, 0, z, spec, radius=r).value
             for r in (1.0, max(abs(z), 1e-300) ** (1 / params.k), 2 * base)]
        out.append(_scaled(max(abs(v[0] - v[1]), abs(v[0] - v[2])), z))
    return out, 100 * spec.abs_tol


def _p_coeff_agreement(params, samples, spec):
    u = PsiParams(4, 3)
    seed = [psi_deriv_zero_sum(u, s) for s in range(4)]
    rec = recurrence_extend(u, seed, 2 * max(samples))
    out = []
    for nu in samples:
        a = U_coeff(nu)
        b = psi_deriv_zero_sum(u, 2 * nu) / math.factorial(2 * nu)
        c = rec[2 * nu]
        out.append(float(max(abs(a - b), abs(a - c), abs(b - c))))
    return out, 1e-10


def _p_stirling(params, samples, spec):
    out = []
    for nu in samples:
        la = log_abs(U_coeff(nu))
        upper = 3 * nu * (1 - math.log(2 * nu))
        lower = upper - math.log(5)
        out.append(max(0.0, lower - la, la - upper))
    return out, 0.0


def _p_fj_residual(params, samples, spec):
    n = params.n
    sgn = (-1) ** (n + 1)
    out = []
    for z in samples:
        worst = 0.0
        for j in range(1, n + 2):
            f0 = u_family_eval(n, "f", 0, z, spec, j).value
            fn = u_family_eval(n, "f", n, z, spec, j).value
            worst = max(worst, abs(fn + sgn * z * f0))
        out.append(_scaled(worst, z))
    return out, 100 * spec.abs_tol


def _p_uj_relation(params, samples, spec):
    n = params.n
    beta = roots_of_unity(n)
    out = []
    for z in samples:
        worst = 0.0
        for j in range(1, n + 2):
            a = u_family_eval(n, "uj", 0, z, spec, j).value
            b = beta[j - 1] * u_family_eval(n, "f", 0, z, spec, j).value
            worst = max(worst, abs(a - b))
        out.append(_scaled(worst, z))
    return out, 100 * spec.abs_tol


def _p_series_agreement(params, samples, spec, m_max=60):
    if isinstance(params, PsiParams):
        seed = [psi_deriv_zero_sum(params, s) for s in range(params.n)]
        ev = lambda z: psi_eval(params, 0, z, spec).value  # noqa: E731
    else:
        seed = [complex(v) for v in phi_eval_derivs_zero(params, spec)]
        ev = lambda z: phi_eval(params, 0, z, spec).value  # noqa: E731
    rec = recurrence_extend(params, seed, m_max)
    return [abs(rec.evaluate(z) - ev(z)) for z in samples], 1e-8


def phi_eval_derivs_zero(params: PhiParams, spec: QuadratureSpec) -> list:
    from .phi import phi_derivatives

    return list(phi_derivatives(params, range(params.n), 0, spec).value)


def _p_G_consistency(params, samples, spec):
    p32 = PsiParams(3, 2)
    out = []
    for z in samples:
        g1 = special_eval("G", 0, z, spec, R=1.0).value
        g2 = special_eval("G", 0, z, spec, R=2.0).value
        s = 2j * math.pi * psi_eval(p32, 0, z, spec).value
        out.append(max(abs(s - g1), abs(g1 - g2)))
    return out, 1e-9


def _p_UH_wronskian(params, samples, spec):
    # W(U, H)(0) = U(0) H'(0) since U'(0) = 0; each factor cross-checked
    u0 = special_eval("U", 0, 0, spec).value
    u1 = special_eval("U", 1, 0, spec).value
    hp = special_eval("H", 1, 0, spec).value
    ref_u0 = float(U_coeff(0))
    ref_hp = h_prime_zero(spec)
    w = abs(u0 * hp)
    return [abs(u0 - ref_u0), abs(hp - ref_hp), abs(u1), max(0.0, NONZERO_FLOOR - w)], 1e-8


def _order_property(name, target, **kw):
    def run(params, samples, spec):
        ev = named_evaluator(name, spec, **kw)
        d = estimate_order_max_modulus(ev, samples)
        return [abs(d - target)], 0.05

    return run


def _pairs(n):
    return [list(js) for js in combinations(range(1, n + 2), n)]


PROPERTIES: dict[str, _Property] = {
    "phi_real": _Property("phi", PhiParams(2, 1, 0), GridSpec.segment(-3, 3, 13), _p_phi_real),
    "phi_ode_residual": _Property("phi", PhiParams(2, 1, 0), GridSpec.disk(10, 2.0), _p_phi_ode),
    "psi_ode_residual": _Property("psi", PsiParams(4, 3), GridSpec.disk(10, 2.0), _p_psi_ode),
    "identity_UH": _Property("psi", PsiParams(4, 3), GridSpec.disk(20, 2.0), _p_identity),
    "psi_even": _Property("psi", PsiParams(4, 3), GridSpec.disk(10, 2.0), _p_psi_even),
    "psi_real": _Property("psi", PsiParams(4, 3), GridSpec.segment(-3, 3, 13), _p_psi_real),
    "wronskian_nonzero": _Property("phi", PhiParams(4, 1, 0), None, _p_wronskian),
    "U_imag_axis_negative": _Property(
        "psi", PsiParams(4, 3), GridSpec.points([i / 10 for i in range(101)]), _p_U_imag_negative),
    "U_max_direction": _Property("psi", PsiParams(4, 3), GridSpec.points([4.0, 6.0, 8.0]),
                                 _p_U_max_direction),
    "psi_existence": _Property(
        "psi", None,
        GridSpec.points([(n, k) for n in range(3, 9) for k in range(2, n)]), _p_psi_existence),
    "phi_nontrivial": _Property(
        "phi", None,
        GridSpec.points([(2, 1, 0.0), (3, 1, 1.0), (3, 2, 1.0), (4, 2, (1.0, 1.0)),
                         (5, 3, (-2.0, 0.5))]), _p_phi_nontrivial),
    "phi_decay": _Property("phi", PhiParams(2, 1, 0), GridSpec.points([0.0, 0.3, -0.3, 0.9, -0.9]),
                           _p_decay),
    "contour_invariance_phi": _Property(
        "phi", PhiParams(2, 1, 0),
        GridSpec.points([3.0, 4 * cmath.exp(0.4j), 5 * cmath.exp(-0.8j), 6.0]),
        _p_contour_invariance),
    "radius_invariance_psi": _Property("psi", PsiParams(4, 3), GridSpec.disk(8, 3.0),
                                       _p_radius_invariance),
    "coefficient_agreement": _Property("psi", PsiParams(4, 3), GridSpec.points(list(range(31))),
                                       _p_coeff_agreement),
    "stirling_bounds": _Property("psi", PsiParams(4, 3), GridSpec.points(list(range(20, 201))),
                                 _p_stirling),
    "fj_ode_residual": _Property("phi", PhiParams(2, 1, 0), GridSpec.points([1 + 1j, -0.5, 0.7j]),
                                 _p_fj_residual),
    "uj_relation": _Property("phi", PhiParams(3, 1, 0), GridSpec.disk(5, 1.5), _p_uj_relation),
    "series_quadrature_agreement": _Property("psi", PsiParams(4, 3), GridSpec.disk(8, 1.0),
                                             _p_series_agreement),
    "G_consistency": _Property("psi", PsiParams(3, 2),
                               GridSpec.points([0.0, 1.0, -1.5 + 0.5j, 2j, 0.3 - 1.2j]),
                               _p_G_consistency),
    "UH_wronskian_nonzero": _Property("psi", PsiParams(4, 3), GridSpec.points([0.0]),
                                      _p_UH_wronskian),
    "order_u": _Property("phi", PhiParams(2, 1, 0), GridSpec.points([4.0, 6.0, 8.0]),
                         _order_property("u", 1.5)),
    "order_U": _Property("psi", PsiParams(4, 3), GridSpec.points([10.0, 20.0, 40.0, 80.0]),
                         _order_property("U", 2 / 3)),
    "order_psi32": _Property("psi", PsiParams(3, 2), GridSpec.points([10.0, 20.0, 40.0, 80.0]),
                             _order_property("psi", 0.5, n=3, k=2)),
}


def _params_dict(params) -> dict:
    return params.to_dict() if hasattr(params, "to_dict") else {}


def run_property(property_id: str, params=None, grid: GridSpec | None = None,
                 spec: QuadratureSpec = QuadratureSpec()) -> PropertyReport:
    """Evaluate one registered property and return its report."""
    try:
        prop = PROPERTIES[property_id]
    except KeyError:
        raise UnknownProperty(property_id) from None
    if params is None:
        params = prop.default_params
    if grid is None:
        grid = prop.default_grid
    if property_id == "wronskian_nonzero" and grid is None:
        grid = GridSpec.points(_pairs(params.n))
    samples = grid.samples()
    if not samples:
        raise ValueError("grid is empty")
    residuals, threshold = prop.run(params, samples, spec)
    worst = max(residuals) if residuals else 0.0
    if any(not math.isfinite(r) for r in residuals):
        worst = math.inf
    return PropertyReport(property_id, prop.family, _params_dict(params), samples,
                          [float(r) for r in residuals], float(worst), float(threshold))


def run_all(spec: QuadratureSpec = QuadratureSpec(), ids: Sequence[str] | None = None):
    """Yield reports for ``ids`` (default: every registered property) in registry order."""
    for pid in (ids if ids is not None else PROPERTIES):
        yield run_property(pid, spec=spec)

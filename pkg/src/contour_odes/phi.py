"""The phi family: contour integrals generalizing the Airy integral.

``phi(z) = (1/2 pi i) int_C exp(-w z + b alpha w^(k+1) + beta w^(n+1)) dw``
solves ``f^(n) + (-1)^(n+1) b f^(k) + (-1)^(n+1) z f = 0``.  With ``b = 0``
it is the function ``u`` whose rotations ``f_j(z) = u(beta_j z)`` span the
solution space.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np
from scipy import integrate as sp_integrate

from .contours import contour_c, contour_cj, contour_j, decay_sector_bounds, JContourSpec
from .errors import BadIndex, DuplicateIndex, UnknownName
from .quadrature import (
    Contour,
    EvalResult,
    QuadratureSpec,
    choose_truncation_radius,
    integrate_path,
)

__all__ = [
    "PhiParams",
    "roots_of_unity",
    "phi_eval",
    "phi_derivatives",
    "phi_deriv_zero_re",
    "u_family_eval",
    "phi_wronskian_zero",
    "ode_residual_phi",
    "select_phi_contour",
]

TWO_PI_I = 2j * math.pi
# contour J replaces C only for |z| >= this radius ...
J_SWITCH_RADIUS = 2.0
# ... and when arg z is at least this far inside the decay sector
J_SECTOR_MARGIN = 0.05


@dataclass(frozen=True)
class PhiParams:
    """Parameters ``(n, k, b)`` with ``n >= 2``, ``0 < k < n``."""

    n: int
    k: int
    b: complex = 0j

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"n must be an integer >= 2, got {self.n}")
        if int(self.k) != self.k or not 0 < self.k < self.n:
            raise ValueError(f"k must satisfy 0 < k < n, got k={self.k}, n={self.n}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "b", complex(self.b))

    @property
    def alpha(self) -> float:
        return (-1) ** (self.k + 1) / (self.k + 1)

    @property
    def beta(self) -> float:
        return 1.0 / (self.n + 1)

    @property
    def gamma(self) -> float:
        return (self.k + 1) * math.pi / (self.n + 1)

    @property
    def lam(self) -> float | None:
        """``arg b``; undefined (``None``) when ``b = 0``."""
        return None if self.b == 0 else cmath.phase(self.b)

    def to_dict(self) -> dict:
        return {"n": self.n, "k": self.k, "b": [self.b.real, self.b.imag]}


def roots_of_unity(n: int) -> np.ndarray:
    """``beta_j = exp(2 pi i (j-1)/(n+1))`` for ``j = 1..n+1`` (index 0 is beta_1)."""
    j = np.arange(n + 1)
    beta = np.exp(2j * np.pi * j / (n + 1))
    beta[0] = 1.0
    return beta


def _integrand(params: PhiParams, z: complex, orders: Sequence[int]):
    ba = params.b * params.alpha
    beta = params.beta
    k1, n1 = params.k + 1, params.n + 1
    orders = np.asarray(orders)

    def f(w):
        e = np.exp(-w * z + ba * w ** k1 + beta * w ** n1) / TWO_PI_I
        return (-w[:, None]) ** orders[None, :] * e[:, None]

    return f


def select_phi_contour(params: PhiParams, z: complex, spec: QuadratureSpec,
                       max_order: int = 0) -> Contour:
    """C, or the deformed contour J when ``z`` is large and well inside the sector."""
    n, k = params.n, params.k
    z = complex(z)
    r, theta = abs(z), cmath.phase(z)
    growth_b = (k + 1, abs(params.b * params.alpha))
    lo, hi = decay_sector_bounds(n)
    if r >= J_SWITCH_RADIUS and lo + J_SECTOR_MARGIN <= theta <= hi - J_SECTOR_MARGIN:
        g = JContourSpec(theta, n, r)
        # on both rays Re(-w z) <= 0, so only the b-term competes with the decay
        c = params.beta * min(-math.cos((n + 1) * g.mu), -math.cos((n + 1) * g.tau))
        t = choose_truncation_radius(n + 1, c, [growth_b], spec.tail_tol, max_order)
        return contour_j(theta, n, r, max(t, 2.0 * g.R))
    t = choose_truncation_radius(n + 1, params.beta, [(1, r), growth_b],
                                 spec.tail_tol, max_order)
    return contour_c(n, t)


def phi_derivatives(params: PhiParams, orders: Sequence[int], z: complex,
                    spec: QuadratureSpec = QuadratureSpec(),
                    contour: Contour | None = None) -> EvalResult:
    """``phi^(p)(z)`` for every ``p`` in ``orders`` from one quadrature pass.

    Differentiation happens under the integral sign (a factor ``(-w)^p``).
    The result's ``value`` is an array aligned with ``orders``.
    """
    orders = [int(p) for p in orders]
    if any(p < 0 for p in orders):
        raise ValueError("derivative orders must be nonnegative")
    if contour is None:
        contour = select_phi_contour(params, z, spec, max(orders))
    res = integrate_path(_integrand(params, complex(z), orders), contour, spec)
    return EvalResult(np.atleast_1d(res.value), res.error_estimate,
                      res.truncation_radius_used, res.points_used)


def phi_eval(params: PhiParams, p: int, z: complex,
             spec: QuadratureSpec = QuadratureSpec(),
             contour: Contour | None = None) -> EvalResult:
    """p-th derivative of phi at z."""
    r = phi_derivatives(params, [p], z, spec, contour)
    return EvalResult(complex(r.value[0]), r.error_estimate, r.truncation_radius_used,
                      r.points_used)


def phi_deriv_zero_re(params: PhiParams, p: int,
                      spec: QuadratureSpec = QuadratureSpec()) -> float:
    """``Re phi^(p)(0)`` as two real half-line integrals.

    Independent of the contour code: it integrates the real and imaginary
    parts of the parametrized rays with ``scipy.integrate.quad``.
    """
    if p < 0:
        raise ValueError("p must be nonnegative")
    n, k = params.n, params.k
    ba = abs(params.b) * params.alpha
    lam = params.lam or 0.0
    g = params.gamma
    beta = params.beta
    shift = (p + 1) * math.pi / (n + 1)
    rmax = choose_truncation_radius(n + 1, beta, [(k + 1, abs(ba))], spec.tail_tol, p)

    def term(angle):
        c, s = math.cos(angle), math.sin(angle)

        def f(r):
            return r ** p * math.exp(ba * r ** (k + 1) * c - beta * r ** (n + 1)) * math.sin(
                ba * r ** (k + 1) * s + shift)

        val, _ = sp_integrate.quad(f, 0.0, rmax, epsabs=spec.abs_tol * 1e-2,
                                   epsrel=spec.rel_tol, limit=500)
        return val

    return (-1) ** p / (2 * math.pi) * (term(g - lam) + term(g + lam))


def u_family_eval(n: int, which: str, p: int, z: complex,
                  spec: QuadratureSpec = QuadratureSpec(), j: int | None = None) -> EvalResult:
    """Evaluate ``u``, ``f_j(z) = u(beta_j z)`` or ``u_j`` (integral over ``C_j``).

    ``which`` is one of ``"u"``, ``"f"``, ``"uj"``.
    """
    params = PhiParams(n, 1, 0)
    if which == "u":
        return phi_eval(params, p, z, spec)
    if which not in ("f", "uj"):
        raise UnknownName(f"unknown u-family member {which!r}")
    if j is None or not 1 <= j <= n + 1:
        raise BadIndex(f"j={j} outside [1, {n + 1}]")
    bj = roots_of_unity(n)[j - 1]
    if which == "f":
        r = phi_eval(params, p, bj * complex(z), spec)
        return EvalResult(bj ** p * r.value, r.error_estimate, r.truncation_radius_used,
                          r.points_used)
    t = choose_truncation_radius(n + 1, params.beta, [(1, abs(z))], spec.tail_tol, p)
    return phi_eval(params, p, z, spec, contour=contour_cj(n, j, t))


def phi_wronskian_zero(n: int, js: Sequence[int], spec: QuadratureSpec = QuadratureSpec()) -> complex:
    """``W(f_{j_1}, ..., f_{j_n})(0)`` via its Vandermonde factorization."""
    from .series import u_deriv_zero

    js = list(js)
    if len(js) != n:
        raise BadIndex(f"need exactly n={n} indices, got {len(js)}")
    for j in js:
        if not 1 <= j <= n + 1:
            raise BadIndex(f"j={j} outside [1, {n + 1}]")
    if len(set(js)) != len(js):
        raise DuplicateIndex(f"indices must be distinct: {js}")
    beta = roots_of_unity(n)
    derivs = math.prod(u_deriv_zero(n, p) for p in range(n))
    vander = complex(1.0)
    for a, b in combinations(js, 2):
        vander *= beta[b - 1] - beta[a - 1]
    return derivs * vander


def ode_residual_phi(params: PhiParams, z: complex,
                     spec: QuadratureSpec = QuadratureSpec()) -> float:
    """``|phi^(n) + (-1)^(n+1) b phi^(k) + (-1)^(n+1) z phi|`` at ``z``."""
    n, k = params.n, params.k
    v = phi_derivatives(params, [0, k, n], z, spec).value
    sgn = (-1) ** (n + 1)
    return float(abs(v[2] + sgn * params.b * v[1] + sgn * complex(z) * v[0]))

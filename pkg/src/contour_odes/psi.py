"""The psi family: circle integrals solving ``f^(n) - z f^(k) - f = 0``.

``psi(z) = (1/2 pi i) int_{|w|=R} w^(k-2) exp(z/w - sigma w^-(n-k+1) - eta w^(k-1)) dw``
with ``sigma = 1/(n-k+1)``, ``eta = 1/(k-1)``.  The special members are
``U = psi`` for ``(n, k) = (4, 3)``, ``G = 2 pi i psi`` for ``(3, 2)``, and
``H``, an integral of the ``U`` integrand over an open contour ``A`` made of
two real rays joined by the upper unit semicircle; ``2 pi i U(z) = H(z) + H(-z)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import integrate as sp_integrate

from .contours import contour_a, contour_p
from .errors import CertFailure, UnknownName
from .quadrature import (
    EvalResult,
    QuadratureSpec,
    choose_truncation_radius,
    integrate_circle_spectral,
    integrate_path,
)

__all__ = [
    "PsiParams",
    "PsiExistenceCert",
    "psi_eval",
    "psi_derivatives",
    "psi_radius",
    "special_eval",
    "SPECIAL_NAMES",
    "h_prime_zero",
    "h_prime_zero_terms",
    "identity_residual",
    "psi_existence_check",
    "ode_residual_psi",
]

TWO_PI_I = 2j * math.pi
SPECIAL_NAMES = ("U", "H", "H_neg", "G")
# grid used to bound |Q| in the existence certificate
CERT_GRID_POINTS = 20001


@dataclass(frozen=True)
class PsiParams:
    """Parameters ``(n, k)`` with ``1 < k < n``."""

    n: int
    k: int

    def __post_init__(self):
        if int(self.n) != self.n or int(self.k) != self.k or not 1 < self.k < self.n:
            raise ValueError(f"need integers with 1 < k < n, got n={self.n}, k={self.k}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "k", int(self.k))

    @property
    def sigma(self) -> float:
        return 1.0 / (self.n - self.k + 1)

    @property
    def eta(self) -> float:
        return 1.0 / (self.k - 1)

    def to_dict(self) -> dict:
        return {"n": self.n, "k": self.k}


@dataclass(frozen=True)
class PsiExistenceCert:
    k: int
    n: int
    q_bound: float
    re_value: float


def psi_radius(k: int, z: complex) -> float:
    """Circle radius ``max(1, |z|^(1/k))``."""
    return max(1.0, abs(z) ** (1.0 / k))


def _integrand(params: PsiParams, z: complex, orders: Sequence[int]):
    n, k = params.n, params.k
    sigma, eta = params.sigma, params.eta
    powers = np.asarray([k - 2 - s for s in orders])

    def f(w):
        e = np.exp(z / w - sigma * w ** (-(n - k + 1)) - eta * w ** (k - 1)) / TWO_PI_I
        return w[:, None] ** powers[None, :] * e[:, None]

    return f


def psi_derivatives(params: PsiParams, orders: Sequence[int], z: complex,
                    spec: QuadratureSpec = QuadratureSpec(),
                    radius: float | None = None) -> EvalResult:
    """``psi^(s)(z)`` for every ``s`` in ``orders``; ``value`` is an array."""
    orders = [int(s) for s in orders]
    if any(s < 0 for s in orders):
        raise ValueError("derivative orders must be nonnegative")
    z = complex(z)
    if radius is None:
        radius = psi_radius(params.k, z)
    res = integrate_circle_spectral(_integrand(params, z, orders), 0.0, radius, spec)
    return EvalResult(np.atleast_1d(res.value), res.error_estimate, None, res.points_used)


def psi_eval(params: PsiParams, s: int, z: complex,
             spec: QuadratureSpec = QuadratureSpec(),
             radius: float | None = None) -> EvalResult:
    """s-th derivative of psi at z (derivatives insert ``w^-s``)."""
    r = psi_derivatives(params, [s], z, spec, radius)
    return EvalResult(complex(r.value[0]), r.error_estimate, None, r.points_used)


def _h_integrand(z: complex, p: int):
    def f(w):
        return w ** (1 - p) * np.exp(z / w - 0.5 / w ** 2 - 0.5 * w ** 2)

    return f


def _h_eval(p: int, z: complex, spec: QuadratureSpec, negate: bool) -> EvalResult:
    # on the rays |w| >= 1, so |exp(z/w)| <= exp(|z|): a constant against the decay
    t = choose_truncation_radius(2, 0.5, [(0, abs(z))], spec.tail_tol, max(1 - p, 0))
    t = max(t, 2.0)
    contour = contour_p(t) if negate else contour_a(t)
    return integrate_path(_h_integrand(complex(z), p), contour, spec)


def special_eval(name: str, p: int, z: complex, spec: QuadratureSpec = QuadratureSpec(),
                 R: float | None = None) -> EvalResult:
    """Evaluate ``U``, ``H``, ``H_neg`` or ``G`` (or their ``p``-th derivative).

    ``H_neg`` integrates over the mirrored contour and equals ``H(-z)`` as a
    function, so its ``p``-th derivative in ``z`` is ``(-1)^p H^(p)(-z)``.
    ``R`` sets the circle radius for ``U`` and ``G``.
    """
    if p < 0:
        raise ValueError("p must be nonnegative")
    z = complex(z)
    if name == "U":
        return psi_eval(PsiParams(4, 3), p, z, spec, R)
    if name == "G":
        r = psi_eval(PsiParams(3, 2), p, z, spec, R)
        return EvalResult(TWO_PI_I * r.value, 2 * math.pi * r.error_estimate, None,
                          r.points_used)
    if name == "H":
        return _h_eval(p, z, spec, negate=False)
    if name == "H_neg":
        return _h_eval(p, z, spec, negate=True)
    raise UnknownName(f"unknown special function {name!r}; expected one of {SPECIAL_NAMES}")


def h_prime_zero_terms(spec: QuadratureSpec = QuadratureSpec()) -> tuple[float, float]:
    """The arc and ray contributions to ``H'(0)``, each by real quadrature."""
    first, _ = sp_integrate.quad(lambda t: math.sin(t) * math.exp(-math.cos(2 * t)), 0.0, math.pi,
                                 epsabs=1e-14, epsrel=1e-12)
    rmax = choose_truncation_radius(2, 0.5, [], spec.tail_tol)
    second, _ = sp_integrate.quad(lambda r: math.exp(-0.5 / r ** 2 - 0.5 * r ** 2), 1.0, rmax,
                                  epsabs=1e-14, epsrel=1e-12, limit=200)
    return -first, -2.0 * second


def h_prime_zero(spec: QuadratureSpec = QuadratureSpec()) -> float:
    """``H'(0)`` from two real integrals; strictly negative."""
    a, b = h_prime_zero_terms(spec)
    return a + b


def identity_residual(z: complex, spec: QuadratureSpec = QuadratureSpec()) -> float:
    """``|2 pi i U(z) - H(z) - H(-z)|``."""
    z = complex(z)
    u = special_eval("U", 0, z, spec).value
    h = special_eval("H", 0, z, spec).value
    hn = special_eval("H_neg", 0, z, spec).value
    return float(abs(TWO_PI_I * u - h - hn))


def psi_existence_check(params: PsiParams,
                        spec: QuadratureSpec = QuadratureSpec()) -> PsiExistenceCert:
    """Certify ``Re psi^(k-1)(0) > 0`` through the real angular integral.

    On ``|w| = 1`` the exponent is ``P + iQ`` with
    ``P = -sigma cos((n-k+1) t) - eta cos((k-1) t)`` and
    ``Q = sigma sin((n-k+1) t) - eta sin((k-1) t)``; ``|Q| < pi/2`` keeps
    ``cos Q`` positive, so the integral of ``e^P cos Q`` is positive.
    """
    n, k = params.n, params.k
    sigma, eta = params.sigma, params.eta
    a, c = n - k + 1, k - 1

    def P(t):
        return -sigma * np.cos(a * t) - eta * np.cos(c * t)

    def Q(t):
        return sigma * np.sin(a * t) - eta * np.sin(c * t)

    grid = np.linspace(-math.pi, math.pi, CERT_GRID_POINTS)
    q_bound = float(np.abs(Q(grid)).max())
    val, _ = sp_integrate.quad(lambda t: math.exp(P(t)) * math.cos(Q(t)), -math.pi, math.pi,
                               epsabs=spec.abs_tol, epsrel=spec.rel_tol, limit=200)
    re_value = val / (2 * math.pi)
    if not q_bound < math.pi / 2:
        raise CertFailure(f"max |Q| = {q_bound} is not below pi/2 for (n, k) = ({n}, {k})")
    if not re_value > 0:
        raise CertFailure(f"Re psi^(k-1)(0) = {re_value} is not positive for (n, k) = ({n}, {k})")
    return PsiExistenceCert(k, n, q_bound, re_value)


def ode_residual_psi(params: PsiParams, z: complex,
                     spec: QuadratureSpec = QuadratureSpec()) -> float:
    """``|psi^(n)(z) - z psi^(k)(z) - psi(z)|``."""
    v = psi_derivatives(params, [0, params.k, params.n], z, spec).value
    return float(abs(v[2] - complex(z) * v[1] - v[0]))

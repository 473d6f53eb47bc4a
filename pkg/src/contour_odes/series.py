"""Maclaurin coefficients of the two families and growth estimates from them.

Residue sums and the closed form for ``U`` are accumulated as exact
``fractions.Fraction`` values: the coefficients needed for order/type
estimation fall far below the double-precision range (``|a_400|`` is about
``1e-1300``), so magnitudes are compared in log space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Number
from typing import Sequence

import numpy as np

from .errors import SeedLengthMismatch, TooFewCoefficients
from .phi import PhiParams
from .psi import PsiParams

__all__ = [
    "SeriesCoeffs",
    "OrderTypeEstimate",
    "u_deriv_zero",
    "u_deriv_zero_quad",
    "psi_deriv_zero_sum",
    "psi_coefficients",
    "U_coeff",
    "U_coefficients",
    "recurrence_extend",
    "order_type_estimate",
    "log_abs",
]

PROVENANCES = ("residue_sum", "closed_form_U", "recurrence", "quadrature_seed")
DEFAULT_TRUNC_TOL = 1e-30


@dataclass(frozen=True)
class SeriesCoeffs:
    """Coefficients ``coeffs[m]`` of ``z^m`` for one family member."""

    family: PhiParams | PsiParams
    coeffs: tuple
    provenance: str
    trunc_tol: float = DEFAULT_TRUNC_TOL

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        if not self.trunc_tol > 0:
            raise ValueError("trunc_tol must be positive")
        object.__setattr__(self, "coeffs", tuple(self.coeffs))

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, m):
        return self.coeffs[m]

    def evaluate(self, z: complex, m_max: int | None = None) -> complex:
        """Partial sum ``sum_{m <= m_max} c_m z^m`` (Horner, complex floats)."""
        cs = self.coeffs if m_max is None else self.coeffs[: m_max + 1]
        acc = 0j
        for c in reversed(cs):
            acc = acc * z + complex(c)
        return acc


@dataclass(frozen=True)
class OrderTypeEstimate:
    rho_hat: float
    tau_hat: float
    nu_used: int


def log_abs(x) -> float:
    """``log|x|`` for ints, Fractions (of any size) and floats."""
    if isinstance(x, Fraction):
        if x == 0:
            return -math.inf
        return math.log(abs(x.numerator)) - math.log(x.denominator)
    if isinstance(x, int):
        return math.log(abs(x)) if x else -math.inf
    a = abs(complex(x))
    return math.log(a) if a > 0 else -math.inf


def _as_fraction(tol) -> Fraction:
    return tol if isinstance(tol, Fraction) else Fraction(tol)


def u_deriv_zero(n: int, p: int, spec=None) -> float:
    """``u^(p)(0)`` in closed form (``spec`` is accepted but no quadrature is needed).

    ``(-1)^p / pi * sin((p+1) pi/(n+1)) * (n+1)^((p+1)/(n+1) - 1) * Gamma((p+1)/(n+1))``,
    the value of ``int_0^inf r^p exp(-r^(n+1)/(n+1)) dr`` after substituting
    ``t = r^(n+1)/(n+1)``.
    """
    if n < 2 or p < 0:
        raise ValueError("need n >= 2 and p >= 0")
    if (p + 1) % (n + 1) == 0:
        return 0.0
    s = (p + 1) / (n + 1)
    return (-1) ** p / math.pi * math.sin(s * math.pi) * (n + 1) ** (s - 1) * math.gamma(s)


def u_deriv_zero_quad(n: int, p: int, tail_tol: float = 1e-16) -> float:
    """Same quantity by direct real quadrature (the oracle for the closed form)."""
    from scipy import integrate as sp_integrate

    from .quadrature import choose_truncation_radius

    if (p + 1) % (n + 1) == 0:
        return 0.0
    rmax = choose_truncation_radius(n + 1, 1.0 / (n + 1), [], tail_tol, p)
    val, _ = sp_integrate.quad(lambda r: r ** p * math.exp(-r ** (n + 1) / (n + 1)), 0.0, rmax,
                               epsabs=1e-14, epsrel=1e-12, limit=200)
    return (-1) ** p / math.pi * math.sin((p + 1) * math.pi / (n + 1)) * val


def _diophantine_pairs(a: int, c: int, t: int):
    """Nonnegative ``(i, j)`` with ``j*a - i*c = t``, in increasing ``i``."""
    g = math.gcd(a, c)
    if t % g:
        return
    i = 0 if t >= 0 else -(-(-t) // c)
    while (t + i * c) % a:
        i += 1
    step_i, step_j = a // g, c // g
    j = (t + i * c) // a
    while True:
        yield i, j
        i += step_i
        j += step_j


def psi_deriv_zero_sum(params: PsiParams, s: int, trunc_tol=DEFAULT_TRUNC_TOL) -> Fraction:
    """``psi^(s)(0)`` as the residue at ``w = 0`` of the defining integrand.

    Expanding ``exp(-sigma w^-(n-k+1))`` and ``exp(-eta w^(k-1))`` leaves the
    double sum over ``i, j >= 0`` with ``j(k-1) - i(n-k+1) = s + 1 - k`` of
    ``(-sigma)^i/i! * (-eta)^j/j!``.  Along that solution family both indices
    grow and ``sigma, eta <= 1``, so terms decrease monotonically; summation
    stops once a term drops below ``trunc_tol`` times the running sum.
    """
    if s < 0:
        raise ValueError("s must be nonnegative")
    n, k = params.n, params.k
    sigma, eta = Fraction(1, n - k + 1), Fraction(1, k - 1)
    tol = _as_fraction(trunc_tol)
    total = Fraction(0)
    for i, j in _diophantine_pairs(k - 1, n - k + 1, s + 1 - k):
        term = (-sigma) ** i * (-eta) ** j / (math.factorial(i) * math.factorial(j))
        total += term
        if abs(term) <= tol * abs(total):
            break
    return total


def psi_coefficients(params: PsiParams, m_max: int, trunc_tol=DEFAULT_TRUNC_TOL) -> SeriesCoeffs:
    cs = [psi_deriv_zero_sum(params, s, trunc_tol) / math.factorial(s) for s in range(m_max + 1)]
    return SeriesCoeffs(params, cs, "residue_sum", float(trunc_tol))


def U_coeff(nu: int, trunc_tol=DEFAULT_TRUNC_TOL) -> Fraction:
    """Maclaurin coefficient ``a_{2 nu}`` of ``U`` from its single-sum closed form."""
    if nu < 0:
        raise ValueError("nu must be nonnegative")
    tol = _as_fraction(trunc_tol)
    shift = 1 if nu == 0 else nu - 1
    total = Fraction(0)
    m = 0
    while True:
        term = Fraction(1, 4 ** m * math.factorial(m) * math.factorial(m + shift))
        total += term
        if term <= tol * total:
            break
        m += 1
    if nu == 0:
        return -total / 2
    return (-1) ** (nu + 1) * total / (2 ** (nu - 1) * math.factorial(2 * nu))


def U_coefficients(nu_max: int, trunc_tol=DEFAULT_TRUNC_TOL) -> SeriesCoeffs:
    """Coefficients of ``z^0 .. z^(2 nu_max)``, odd ones exactly zero."""
    cs = []
    for nu in range(nu_max + 1):
        cs.append(U_coeff(nu, trunc_tol))
        cs.append(Fraction(0))
    return SeriesCoeffs(PsiParams(4, 3), cs[:-1], "closed_form_U", float(trunc_tol))


def recurrence_extend(family: PhiParams | PsiParams, seed: Sequence[Number], m_max: int,
                      trunc_tol: float = DEFAULT_TRUNC_TOL) -> SeriesCoeffs:
    """Continue ``n`` derivative values at 0 into coefficients up to ``z^m_max``.

    phi family: ``c_{m+n} (m+n)!/m! = -(-1)^(n+1) [b c_{m+k} (m+k)!/m! + c_{m-1}]``;
    psi family: ``c_{m+n} (m+n)!/m! = c_{m+k-1} (m+k-1)!/(m-1)! [m >= 1] + c_m``.
    Exact seeds (ints/Fractions) give exact coefficients.
    """
    n, k = family.n, family.k
    if len(seed) != n:
        raise SeedLengthMismatch(f"need {n} seed values, got {len(seed)}")
    if m_max < n:
        raise ValueError("m_max must be >= n")
    c = [seed[m] / math.factorial(m) if isinstance(seed[m], (int, Fraction))
         else seed[m] / math.factorial(m) for m in range(n)]
    if isinstance(family, PhiParams):
        b = family.b
        if b.imag == 0:
            b = b.real
            if b == int(b):
                b = int(b)
        sgn = -((-1) ** (n + 1))
        for m in range(0, m_max - n + 1):
            prev = c[m - 1] if m >= 1 else 0
            rhs = sgn * (b * c[m + k] * math.perm(m + k, k) + prev) if b else sgn * prev
            c.append(rhs / math.perm(m + n, n))
    else:
        for m in range(0, m_max - n + 1):
            rhs = c[m]
            if m >= 1:
                rhs = rhs + c[m + k - 1] * math.perm(m + k - 1, k)
            c.append(rhs / math.perm(m + n, n))
    return SeriesCoeffs(family, c, "recurrence", trunc_tol)


def order_type_estimate(coeffs: SeriesCoeffs | Sequence[Number], even_only: bool = False,
                        method: str = "regression") -> OrderTypeEstimate:
    """Order and type of an entire function from its Maclaurin coefficients.

    ``method="limsup"`` evaluates the classical formulas
    ``rho = limsup m log m / (-log|c_m|)`` and
    ``tau = (e rho)^-1 limsup m |c_m|^(rho/m)`` as maxima over the upper half
    of the available indices.  Their finite-``m`` bias decays only like
    ``1/log m``.

    ``method="regression"`` (default) uses the same asymptotics,
    ``-log|c_m| / m = (1/rho) log m - log(e rho tau)/rho + O(log m / m)``,
    and fits ``[log m, 1, log m / m, 1/m]`` by least squares over the upper
    half; the last two columns absorb the Stirling corrections.
    """
    cs = coeffs.coeffs if isinstance(coeffs, SeriesCoeffs) else tuple(coeffs)
    idx = [m for m in range(1, len(cs)) if (not even_only or m % 2 == 0) and cs[m] != 0]
    if len(idx) < 20:
        raise TooFewCoefficients(f"need at least 20 nonzero coefficients, got {len(idx)}")
    top = idx[len(idx) // 2:]
    m = np.array(top, dtype=float)
    neglog = np.array([-log_abs(cs[i]) for i in top])
    if method == "limsup":
        rho = float(np.max(m * np.log(m) / neglog))
        tau = float(np.max(m * np.exp(-rho * neglog / m))) / (math.e * rho)
    elif method == "regression":
        X = np.column_stack([np.log(m), np.ones_like(m), np.log(m) / m, 1.0 / m])
        beta, *_ = np.linalg.lstsq(X, neglog / m, rcond=None)
        rho = 1.0 / beta[0]
        tau = math.exp(-beta[1] * rho) / (math.e * rho)
    else:
        raise ValueError(f"unknown method {method!r}")
    return OrderTypeEstimate(float(rho), float(tau), len(top))

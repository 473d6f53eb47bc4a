"""Named integration contours for the two function families.

Every constructor returns a finite :class:`~contour_odes.quadrature.Contour`;
the infinite ends of the underlying paths are cut at ``truncation``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import BadIndex, OutOfSector, UnknownName
from .quadrature import Arc, Contour, Ray

__all__ = [
    "JContourSpec",
    "decay_sector_bounds",
    "contour_c",
    "contour_cj",
    "contour_j",
    "contour_a",
    "contour_p",
    "standard_contour",
]

# fraction of the admissible supremum for the arc-radius constant B
B_FRACTION = 0.9


def decay_sector_bounds(n: int) -> tuple[float, float]:
    """Open sector ``(-n pi/(2n+2), n pi/(2n+2))`` in which phi decays."""
    if n < 2:
        raise ValueError("n must be >= 2")
    half = n * math.pi / (2 * n + 2)
    return -half, half


@dataclass(frozen=True)
class JContourSpec:
    """Geometry of the deformed contour used for ``arg z = theta``.

    ``mu``, ``tau``, the constant ``A`` and ``B`` are derived from
    ``(theta, n)``; the arc radius is ``R = B |z|^(1/n)``.
    """

    theta: float
    n: int
    z_abs: float

    def __post_init__(self):
        lo, hi = decay_sector_bounds(self.n)
        if not lo < self.theta < hi:
            raise OutOfSector(f"theta={self.theta} outside ({lo}, {hi}) for n={self.n}")
        if not self.z_abs > 0:
            raise ValueError("z_abs must be positive")

    @property
    def mu(self) -> float:
        return -math.pi / (self.n + 1) - self.theta / self.n

    @property
    def tau(self) -> float:
        return math.pi / (self.n + 1) - self.theta / self.n

    @property
    def A(self) -> float:
        return min(math.cos(self.mu + self.theta), math.cos(self.tau + self.theta))

    @property
    def B_max(self) -> float:
        return ((self.n + 1) * self.A) ** (1.0 / self.n)

    @property
    def B(self) -> float:
        return B_FRACTION * self.B_max

    @property
    def R(self) -> float:
        return self.B * self.z_abs ** (1.0 / self.n)


def _two_rays(angle_in: float, angle_out: float, truncation: float) -> Contour:
    return Contour(
        (Ray(angle_in, 0.0, truncation, "inward"), Ray(angle_out, 0.0, truncation, "outward")),
        truncation=truncation,
    )


def contour_c(n: int, truncation: float) -> Contour:
    """In along ``arg w = -pi/(n+1)``, out along ``arg w = pi/(n+1)``."""
    if n < 2:
        raise ValueError("n must be >= 2")
    a = math.pi / (n + 1)
    return _two_rays(-a, a, truncation)


def contour_cj(n: int, j: int, truncation: float) -> Contour:
    """``C`` rotated by ``2 pi (j-1)/(n+1)``, for ``1 <= j <= n+1``."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if not 1 <= j <= n + 1:
        raise BadIndex(f"j={j} outside [1, {n + 1}]")
    a = math.pi / (n + 1)
    rot = 2 * math.pi * (j - 1) / (n + 1)
    return _two_rays(-a + rot, a + rot, truncation)


def contour_j(theta: float, n: int, z_abs: float, truncation: float) -> Contour:
    """In along ``mu`` down to ``R``, arc from ``mu`` to ``tau``, out along ``tau``."""
    g = JContourSpec(theta, n, z_abs)
    if not truncation > g.R:
        raise ValueError(f"truncation {truncation} must exceed arc radius {g.R}")
    return Contour(
        (
            Ray(g.mu, g.R, truncation, "inward"),
            Arc(0.0, g.R, g.mu, g.tau),
            Ray(g.tau, g.R, truncation, "outward"),
        ),
        truncation=truncation,
    )


def contour_a(truncation: float) -> Contour:
    """Positive real axis in to 1, upper unit semicircle, negative real axis out."""
    if not truncation > 1:
        raise ValueError("truncation must exceed 1")
    return Contour(
        (
            Ray(0.0, 1.0, truncation, "inward"),
            Arc(0.0, 1.0, 0.0, math.pi),
            Ray(math.pi, 1.0, truncation, "outward"),
        ),
        truncation=truncation,
    )


def contour_p(truncation: float) -> Contour:
    """Image of ``contour_a`` under ``w -> -w``."""
    if not truncation > 1:
        raise ValueError("truncation must exceed 1")
    return Contour(
        (
            Ray(math.pi, 1.0, truncation, "inward"),
            Arc(0.0, 1.0, math.pi, 2 * math.pi),
            Ray(2 * math.pi, 1.0, truncation, "outward"),
        ),
        truncation=truncation,
    )


def standard_contour(kind: str, truncation: float, *, n: int | None = None,
                     j: int | None = None, theta: float | None = None,
                     z_abs: float | None = None) -> Contour:
    """Dispatch on ``kind`` in ``{"C", "Cj", "J", "A", "P"}``."""
    if kind == "C":
        return contour_c(n, truncation)
    if kind == "Cj":
        return contour_cj(n, j, truncation)
    if kind == "J":
        return contour_j(theta, n, z_abs, truncation)
    if kind == "A":
        return contour_a(truncation)
    if kind == "P":
        return contour_p(truncation)
    raise UnknownName(f"unknown contour kind {kind!r}")

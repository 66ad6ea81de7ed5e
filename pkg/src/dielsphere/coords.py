"""Spherical, offset prolate spheroidal, and radially-inverted coordinates.

The offset spheroidal system has foci at the origin and at (0, 0, c); the
radially-inverted system is its image under the Kelvin transformation
r -> a^2/r, whose degenerate surface xi = 1 is the semi-infinite ray
{theta = 0, r >= R_e}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, SingularityError

_AXIS_TOL = 1e-12


@dataclass(frozen=True)
class EvaluationPoint:
    """Field point in spherical coordinates (r in units of the sphere radius)."""

    r: float
    theta: float
    phi: float = 0.0
    x: float = field(init=False)
    y: float = field(init=False)
    z: float = field(init=False)

    def __post_init__(self):
        if self.r < 0:
            raise DomainError(f"r must be >= 0, got {self.r}")
        s = math.sin(self.theta)
        object.__setattr__(self, "x", self.r * s * math.cos(self.phi))
        object.__setattr__(self, "y", self.r * s * math.sin(self.phi))
        object.__setattr__(self, "z", self.r * math.cos(self.theta))

    @classmethod
    def from_cartesian(cls, x: float, y: float, z: float) -> "EvaluationPoint":
        rho = math.hypot(x, y)
        r = math.hypot(rho, z)
        return cls(r, math.atan2(rho, z), math.atan2(y, x))


@dataclass(frozen=True)
class OffsetSpheroidalCoords:
    """Prolate spheroidal coordinates with foci at the origin and (0, 0, c)."""

    xi: float
    eta: float
    phi: float
    c: float


@dataclass(frozen=True)
class InvertedSpheroidalCoords:
    """Kelvin image of offset spheroidal coordinates (inversion radius a).

    xi_check = 1 corresponds to the external axis ray theta = 0, r >= R_e.
    """

    xi_check: float
    eta_check: float
    phi: float
    a: float
    R_e: float


def axis_distance(r: float, c: float, theta: float) -> float:
    """|r_vec - c z_hat| in the cancellation-safe form sqrt((r-c)^2 + 4rc sin^2(t/2))."""
    s = math.sin(0.5 * theta)
    return math.sqrt((r - c) ** 2 + 4.0 * r * c * s * s)


def to_offset_spheroidal(p: EvaluationPoint, c: float) -> OffsetSpheroidalCoords:
    """(xi, eta) = ((r + r')/c, (r - r')/c) with r' the distance to the focus at c z_hat.

    eta is evaluated through the algebraically equivalent
    (2 r cos(theta) - c)/(r + r'), which has no cancellation; points on the
    axis are resolved exactly.
    """
    if c <= 0:
        raise DomainError(f"focal offset c must be > 0, got {c}")
    r, theta = p.r, p.theta
    if theta < _AXIS_TOL or math.pi - theta < _AXIS_TOL:
        # exact axis handling: eta = +-1 off the focal segment, interior value on it
        if theta < _AXIS_TOL:
            rp = abs(r - c)
            xi = (r + rp) / c
            eta = 1.0 if r >= c else (2.0 * r - c) / c
        else:
            rp = r + c
            xi = (2.0 * r + c) / c
            eta = -1.0
        return OffsetSpheroidalCoords(xi, eta, p.phi, c)
    rp = axis_distance(r, c, theta)
    xi = (r + rp) / c
    eta = (2.0 * r * math.cos(theta) - c) / (r + rp)
    return OffsetSpheroidalCoords(xi, eta, p.phi, c)


def from_offset_spheroidal(sc: OffsetSpheroidalCoords) -> EvaluationPoint:
    """Inverse map: r = c(xi+eta)/2, cos(theta) = (1 + xi*eta)/(xi + eta)."""
    xi, eta, c = sc.xi, sc.eta, sc.c
    if xi < 1.0 or abs(eta) > 1.0:
        raise DomainError("require xi >= 1 and |eta| <= 1")
    r = 0.5 * c * (xi + eta)
    if r == 0.0:
        return EvaluationPoint(0.0, 0.0, sc.phi)
    ct = min(1.0, max(-1.0, (1.0 + xi * eta) / (xi + eta)))
    return EvaluationPoint(r, math.acos(ct), sc.phi)


def kelvin_transform(p: EvaluationPoint, a: float) -> EvaluationPoint:
    """Radial inversion (r, theta, phi) -> (a^2/r, theta, phi); an involution."""
    if a <= 0:
        raise DomainError(f"inversion radius must be > 0, got {a}")
    if p.r == 0.0:
        raise SingularityError("Kelvin transform is singular at the origin")
    return EvaluationPoint(a * a / p.r, p.theta, p.phi)


def to_inverted_spheroidal(p: EvaluationPoint, a: float, R_e: float) -> InvertedSpheroidalCoords:
    """Offset spheroidal coordinates of the Kelvin-transformed point, c = a^2/R_e."""
    if R_e <= a:
        raise DomainError(f"source distance R_e must exceed the inversion radius, got {R_e} <= {a}")
    sc = to_offset_spheroidal(kelvin_transform(p, a), a * a / R_e)
    return InvertedSpheroidalCoords(sc.xi, sc.eta, p.phi, a, R_e)


def from_inverted_spheroidal(ic: InvertedSpheroidalCoords) -> EvaluationPoint:
    """Inverse of to_inverted_spheroidal."""
    back = from_offset_spheroidal(
        OffsetSpheroidalCoords(ic.xi_check, ic.eta_check, ic.phi, ic.a ** 2 / ic.R_e)
    )
    return kelvin_transform(back, ic.a)


# ---------------------------------------------------------------------------
# batch forms used by the grid evaluators


def offset_xi_eta(r, theta, c):
    """Vectorized (xi, eta) for arrays of points; exact where sin(theta/2) is exact."""
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    s = np.sin(0.5 * theta)
    rp = np.sqrt((r - c) ** 2 + 4.0 * r * c * s * s)
    xi = (r + rp) / c
    eta = (2.0 * r * np.cos(theta) - c) / (r + rp)
    return xi, eta


def inverted_xi_eta(r, theta, a, R_e):
    """Vectorized (xi_check, eta_check); r must be nonzero."""
    r = np.asarray(r, dtype=float)
    if np.any(r == 0.0):
        raise SingularityError("Kelvin transform is singular at the origin")
    return offset_xi_eta(a * a / r, theta, a * a / R_e)

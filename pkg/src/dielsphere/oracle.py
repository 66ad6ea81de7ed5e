"""Series-free reference values: line-charge integral and Havelock identities.

The internal potential of an external source equals a closed transmitted
term plus the potential of an image line charge on {theta = 0, z >= R_e}
with density proportional to (R_e/z)^mu.  The Havelock formulas express
Q_n P_n products in the offset and radially-inverted spheroidal systems
as weighted single-layer potentials on the focal segment / ray, giving an
independent quadrature check of the special-function stack.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import Legendre
from scipy import integrate

from .coords import EvaluationPoint
from .errors import ConvergenceError, DomainError, SingularityError
from .series import EXTERNAL_SOURCE, ProblemConfig

# fraction of R_e below which a point counts as "near" the image line and
# the sinh substitution replaces the endpoint-regularized one
_NEAR_LINE = 0.01


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and subdivision budget for the adaptive integrals."""

    scheme: str = "adaptive"
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_subdivisions: int = 200

    def __post_init__(self):
        if self.scheme not in ("adaptive", "fixed-node"):
            raise DomainError(f"unknown quadrature scheme {self.scheme!r}")
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise DomainError("tolerances must be > 0")


DEFAULT_QUAD = QuadratureSpec()


def _quad(f, a, b, spec: QuadratureSpec, points=None):
    if spec.scheme == "fixed-node":
        x, w = np.polynomial.legendre.leggauss(64)
        edges = np.linspace(a, b, max(2, spec.max_subdivisions // 8))
        lo, width = edges[:-1, None], np.diff(edges)[:, None]
        u = (lo + width * 0.5 * (x + 1.0)).ravel()
        ww = (width * 0.5 * w).ravel()
        vals = np.array([f(v) for v in u])
        return float(np.dot(vals, ww)), math.nan
    out = integrate.quad(
        f,
        a,
        b,
        epsabs=spec.abs_tol,
        epsrel=spec.rel_tol,
        limit=spec.max_subdivisions,
        points=points,
        full_output=1,
    )
    if len(out) > 3:  # explanation string present: quadpack gave up
        raise ConvergenceError(f"quadrature failed: {out[3].splitlines()[0]}")
    return out[0], out[1]


def _rho(p: EvaluationPoint) -> float:
    return math.hypot(p.x, p.y)


def _ray_distance(p: EvaluationPoint, R_e: float) -> float:
    """Distance from p to the ray {rho = 0, z >= R_e}."""
    d = _rho(p)
    return d if p.z >= R_e else math.hypot(d, R_e - p.z)


def _on_external_ray(p: EvaluationPoint, R_e: float, tol: float = 1e-12) -> bool:
    return _ray_distance(p, R_e) < tol * R_e


def v_in_line_integral(
    p: EvaluationPoint,
    cfg: ProblemConfig,
    q: QuadratureSpec = DEFAULT_QUAD,
    with_error: bool = False,
):
    """Internal potential of an external source in image-line integral form.

    2 V_q / (eps+1) + (a/R_e) (beta_inf/(eps+1)) *
        int_{R_e}^inf (R_e/z)^mu / sqrt(x^2+y^2+(z-zt)^2) dzt.

    The density exponent follows from expanding 1/(n(eps+1)+1) as
    int_0^1 s^{n+mu-1} ds mu; the same derivation fixes the prefactor to
    beta_inf/(eps+1) (the n = 0 moment then reproduces V_in(0) = a/R_e).
    """
    if cfg.side != EXTERNAL_SOURCE:
        raise DomainError("the line-integral form applies to the external-source problem")
    if _on_external_ray(p, cfg.R_e):
        raise SingularityError("point lies on the image line {theta=0, r >= R_e}")
    mat = cfg.material
    mu = mat.mu
    R_e = cfg.R_e
    d = _rho(p)
    z = p.z

    if _ray_distance(p, R_e) < _NEAR_LINE * R_e:
        # z_t = z + d sinh(v) turns dz_t/sqrt(d^2+(z-z_t)^2) into dv exactly
        v0 = math.asinh((R_e - z) / d)

        def g(v):
            if v > 700.0:  # integrand ~ exp(-mu v); sinh would overflow
                return 0.0
            zt = z + d * math.sinh(v)
            return (R_e / zt) ** mu

        integral, err = _quad(g, v0, math.inf, q)
    else:
        # t = R_e/z_t maps to (0,1]; t = s^(1/mu) absorbs the t^(mu-1)
        # endpoint; t*dist written as a hypot to stay finite at s -> 0
        def g(s):
            t = s ** (1.0 / mu)
            return (R_e / mu) / math.hypot(t * d, t * z - R_e)

        pts = None
        if z > R_e:
            pts = [min(1.0, (R_e / z) ** mu)]
        integral, err = _quad(g, 0.0, 1.0, q, points=pts)

    dq = math.sqrt(d * d + (z - R_e) ** 2)
    base = 2.0 * (cfg.a / dq) / (cfg.eps + 1.0)
    pref = (cfg.a / R_e) * mat.beta_inf / (cfg.eps + 1.0)
    value = base + pref * integral
    if with_error:
        return value, abs(pref) * err
    return value


def havelock_offset(
    n: int,
    p: EvaluationPoint,
    R_i: float,
    q: QuadratureSpec = DEFAULT_QUAD,
    with_error: bool = False,
):
    """(1/2) int_0^{R_i} P_n(2 z_t/R_i - 1) / |r - z_t z_hat| dz_t.

    Equals Q_n(xi) P_n(eta) in offset spheroidal coordinates with c = R_i.
    """
    if n < 0:
        raise DomainError("n must be >= 0")
    if R_i <= 0:
        raise DomainError("R_i must be > 0")
    d = _rho(p)
    z = p.z
    if d < 1e-12 * R_i and -1e-12 * R_i <= z <= R_i * (1.0 + 1e-12):
        raise SingularityError("point lies on the focal segment [0, R_i]")
    pn = Legendre.basis(n)

    if d < _NEAR_LINE * R_i and 0.0 < z < R_i:
        v0 = math.asinh((0.0 - z) / d)
        v1 = math.asinh((R_i - z) / d)

        def g(v):
            zt = z + d * math.sinh(v)
            return pn(2.0 * zt / R_i - 1.0)

        integral, err = _quad(g, v0, v1, q)
    else:

        def g(zt):
            return pn(2.0 * zt / R_i - 1.0) / math.sqrt(d * d + (z - zt) ** 2)

        pts = [min(max(z, 0.0), R_i)] if 0.0 < z < R_i else None
        integral, err = _quad(g, 0.0, R_i, q, points=pts)

    if with_error:
        return 0.5 * integral, 0.5 * err
    return 0.5 * integral


def havelock_inverted(
    n: int,
    p: EvaluationPoint,
    R_e: float,
    q: QuadratureSpec = DEFAULT_QUAD,
    parameterization: str = "t",
    with_error: bool = False,
):
    """(1/2) int_{R_e}^inf P_n(2 R_e/z_t - 1)/z_t / |r - z_t z_hat| dz_t.

    Equals Q_n(xi_check) P_n(eta_check) / r in the radially-inverted
    system.  parameterization 't' integrates over t = R_e/z_t in (0, 1];
    'z' keeps the semi-infinite form (the two agree, which is itself a
    tested identity).
    """
    if n < 0:
        raise DomainError("n must be >= 0")
    if R_e <= 0:
        raise DomainError("R_e must be > 0")
    if _on_external_ray(p, R_e):
        raise SingularityError("point lies on the ray {theta=0, r >= R_e}")
    d = _rho(p)
    z = p.z
    pn = Legendre.basis(n)

    if _ray_distance(p, R_e) < _NEAR_LINE * R_e and parameterization != "z":
        v0 = math.asinh((R_e - z) / d)

        def g(v):
            if v > 700.0:  # integrand ~ exp(-v); sinh would overflow
                return 0.0
            zt = z + d * math.sinh(v)
            return pn(2.0 * R_e / zt - 1.0) / zt

        integral, err = _quad(g, v0, math.inf, q)
    elif parameterization == "t":
        # t*dist written as a hypot to stay finite at t -> 0
        def g(t):
            return pn(2.0 * t - 1.0) / math.hypot(t * d, t * z - R_e)

        pts = [R_e / z] if z > R_e else None
        integral, err = _quad(g, 0.0, 1.0, q, points=pts)
    elif parameterization == "z":

        def g(zt):
            return pn(2.0 * R_e / zt - 1.0) / (zt * math.sqrt(d * d + (z - zt) ** 2))

        integral, err = _quad(g, R_e, math.inf, q)
    else:
        raise DomainError(f"unknown parameterization {parameterization!r}")

    if with_error:
        return 0.5 * integral, 0.5 * err
    return 0.5 * integral


def laplacian_fd(field, p: EvaluationPoint, h: float, with_scale: bool = False):
    """7-point Cartesian finite-difference Laplacian of field(x, y, z) at p.

    with_scale also returns the sum of |second-difference| quotients, the
    local curvature scale against which harmonicity is judged.
    """
    if h <= 0:
        raise DomainError("step h must be > 0")
    x, y, z = p.x, p.y, p.z
    f0 = field(x, y, z)
    dxx = (field(x + h, y, z) + field(x - h, y, z) - 2.0 * f0) / (h * h)
    dyy = (field(x, y + h, z) + field(x, y - h, z) - 2.0 * f0) / (h * h)
    dzz = (field(x, y, z + h) + field(x, y, z - h) - 2.0 * f0) / (h * h)
    lap = dxx + dyy + dzz
    if with_scale:
        return lap, abs(dxx) + abs(dyy) + abs(dzz)
    return lap

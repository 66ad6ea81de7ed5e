"""Series solutions for a point charge near a dielectric sphere.

All potentials are the dimensionless V-bar (physical potential times
4 pi eps0 eps1 a / q); the sphere radius a is the length unit.  For an
external source at R_e on the +z axis the reflected potential outside is
available in spherical (irregular harmonics) and offset-spheroidal bases,
and the internal potential in spherical, radially-inverted spheroidal,
and regular offset-spheroidal bases.  The internal-source problem mirrors
these with source and image exchanged.

Note on the internal-source outside potential: the spherical/spheroidal
outside series are stated in the literature in a normalization tied to
the outer medium, which differs from the inner-medium normalization of
the direct + reflected potentials by the factor eps.  Both evaluators
here return values in the single inner-medium normalization (the printed
outside series times eps), so that potential continuity and the
eps-weighted normal-derivative condition hold at r = a.  See README.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy import integrate
from scipy.special import digamma, gammaln

from .coords import EvaluationPoint, axis_distance, inverted_xi_eta, offset_xi_eta
from .errors import ConvergenceError, DomainError, SingularityError
from .legendre import (
    XI_GUARD,
    eval_P_sequence,
    eval_Q_sequence,
    log_p_offcut_batch,
    p_cos_batch,
    q_batch,
)

EXTERNAL_SOURCE = "external"
INTERNAL_SOURCE = "internal"

EXTERNAL_BASES = (
    "spherical_reflected",
    "spherical_internal",
    "spheroidal_reflected",
    "inverted_spheroidal_internal",
    "regular_spheroidal_internal",
)
INTERNAL_BASES = (
    "spherical_reflected",
    "spherical_outside",
    "spheroidal_reflected",
    "spheroidal_outside",
)

# est_error below this fraction of |value| marks a series as converged
CONVERGED_FRACTION = 1e-3
# growth of the windowed |term| envelope over its running minimum flagging divergence
DIVERGENCE_FACTOR = 1e6


@dataclass(frozen=True)
class MaterialCoefficients:
    """Derived material ratios mu = 1/(eps+1), beta_inf = (eps-1)/(eps+1)."""

    eps: float
    mu: float
    beta_inf: float

    @classmethod
    def from_eps(cls, eps: float) -> "MaterialCoefficients":
        if abs(eps + 1.0) < 1e-9:
            raise DomainError("eps = -1 is a pole of mu = 1/(eps+1)")
        return cls(eps, 1.0 / (eps + 1.0), (eps - 1.0) / (eps + 1.0))

    def beta(self, n) -> np.ndarray | float:
        n = np.asarray(n, dtype=float)
        out = n * (self.eps - 1.0) / (n * (self.eps + 1.0) + 1.0)
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ProblemConfig:
    """Sphere of radius a, point source on the +z axis, permittivity ratio eps.

    R_source is the source distance: > a for an external source, < a for an
    internal one.  R_e and R_i are the conjugate external/internal axis
    distances with R_e * R_i = a^2.
    """

    a: float
    R_source: float
    eps: float
    side: str = EXTERNAL_SOURCE

    def __post_init__(self):
        if self.a <= 0:
            raise DomainError(f"sphere radius must be > 0, got {self.a}")
        if self.eps <= 0:
            raise DomainError(f"relative permittivity must be > 0, got {self.eps}")
        if self.side not in (EXTERNAL_SOURCE, INTERNAL_SOURCE):
            raise DomainError(f"side must be 'external' or 'internal', got {self.side!r}")
        if self.side == EXTERNAL_SOURCE and not self.R_source > self.a:
            raise DomainError("external source requires R_source > a")
        if self.side == INTERNAL_SOURCE and not 0 < self.R_source < self.a:
            raise DomainError("internal source requires 0 < R_source < a")

    @property
    def R_e(self) -> float:
        return self.R_source if self.side == EXTERNAL_SOURCE else self.a ** 2 / self.R_source

    @property
    def R_i(self) -> float:
        return self.a ** 2 / self.R_source if self.side == EXTERNAL_SOURCE else self.R_source

    @property
    def material(self) -> MaterialCoefficients:
        return MaterialCoefficients.from_eps(self.eps)


# ---------------------------------------------------------------------------
# coefficient families


def coeff_c(n: int, mu: float, method: str = "product") -> float:
    """c_n, reflection-series coefficient.

    Reference form is the product prod_{k=0}^n (mu-k)/(mu+k); the
    equivalent finite sum
    mu * sum_k (n+k)!/((n-k)! k!^2) (-1)^{n+k}/(k+mu) is kept for
    cross-validation.
    """
    if n < 0:
        raise DomainError("n must be >= 0")
    near = round(mu)
    if abs(mu - near) < 1e-12 and -n <= near <= 0:
        raise DomainError(f"mu = {mu} hits a pole of the coefficient family")
    if method == "product":
        out = 1.0
        for k in range(1, n + 1):
            out *= (mu - k) / (mu + k)
        return out
    if method == "sum":
        total = 0.0
        for k in range(0, n + 1):
            if n + k <= 40:
                ratio = float(
                    Fraction(math.factorial(n + k), math.factorial(n - k) * math.factorial(k) ** 2)
                )
            else:
                ratio = math.exp(
                    gammaln(n + k + 1) - gammaln(n - k + 1) - 2.0 * gammaln(k + 1)
                )
            total += ratio * (-1.0) ** (n + k) / (k + mu)
        return mu * total
    raise DomainError(f"unknown method {method!r}")


def c_table(N: int, mu: float) -> np.ndarray:
    """c_n for n = 0..N via the cumulative product form."""
    k = np.arange(1, N + 1, dtype=float)
    return np.concatenate([[1.0], np.cumprod((mu - k) / (mu + k))])


def _d_term(k, n: int, eps: float):
    """t(k) = k!^2 / ((k-n)!(k+n+1)!) / (k(eps+1)+1) as a product of n factors.

    Avoids the gammaln-difference formulation, whose absolute log error
    (~ k ln k * ulp) caps relative accuracy near 1e-10 at large k.
    """
    k = np.asarray(k, dtype=float)
    out = 1.0 / ((k + n + 1.0) * (k * (eps + 1.0) + 1.0))
    for j in range(1, n + 1):
        out = out * ((k - n + j) / (k + j))
    return out


def _d_first_term(n: int, eps: float) -> float:
    out = 1.0 / ((2.0 * n + 1.0) * (n * (eps + 1.0) + 1.0))
    for j in range(1, n + 1):
        out *= j / (n + j)
    return out


@lru_cache(maxsize=8)
def _gl_nodes(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    return 0.5 * (x + 1.0), 0.5 * w  # mapped to [0, 1]


def _d_tail_integral(a: float, n: int, eps: float) -> tuple[float, float]:
    """int_a^inf t(k) dk via k = a/u on graded Gauss-Legendre panels.

    The integrand in u is smooth with an exp(-n^2 u / a) hump near u = 0;
    panel edges follow a geometric grading down to that scale.  Two node
    orders give value and error estimate.
    """
    hump = min(1.0, a / (a + float(n) * n))
    sigma = max(0.5, (0.25 * hump) ** (1.0 / 9.0))
    edges = np.concatenate([[0.0], sigma ** np.arange(9, -1, -1.0)])

    def integral(order: int) -> float:
        x0, w0 = _gl_nodes(order)
        lo = edges[:-1, None]
        width = np.diff(edges)[:, None]
        u = (lo + width * x0[None, :]).ravel()
        w = (width * w0[None, :]).ravel()
        g = _d_term(a / u, n, eps) * a / (u * u)
        return float(np.dot(g, w))

    coarse, fine = integral(24), integral(48)
    return fine, abs(fine - coarse)


def _d_value(K: int, n: int, eps: float) -> float:
    """Partial sum to K plus the Euler-Maclaurin tail int + t/2 - t'/12."""
    k = np.arange(n, K, dtype=float)
    ratios = (
        (k + 1.0) ** 2
        / ((k + 1.0 - n) * (k + n + 2.0))
        * (k * (eps + 1.0) + 1.0)
        / ((k + 1.0) * (eps + 1.0) + 1.0)
    )
    terms = _d_first_term(n, eps) * np.concatenate([[1.0], np.cumprod(ratios)])
    partial = float(terms.sum())
    a = K + 1.0
    integral, _ = _d_tail_integral(a, n, eps)
    ta = float(_d_term(a, n, eps))
    dlog = (
        2.0 * digamma(a + 1.0)
        - digamma(a - n + 1.0)
        - digamma(a + n + 2.0)
        - (eps + 1.0) / (a * (eps + 1.0) + 1.0)
    )
    return partial + integral + 0.5 * ta - ta * dlog / 12.0


def coeff_d(n: int, eps: float, tol: float = 1e-11) -> float:
    """d_n = sum_{k>=n} [k!^2 / ((k-n)!(k+n+1)!)] / (k(eps+1)+1).

    Terms decay only like 1/k^2, so the sum is evaluated as a direct
    partial sum plus an Euler-Maclaurin integral tail; the split point is
    grown until two successive evaluations agree to tol relative.
    """
    if n < 0:
        raise DomainError("n must be >= 0")
    if eps <= 0 or tol <= 0:
        raise DomainError("require eps > 0 and tol > 0")
    K = max(64, 2 * n)
    prev = None
    while K <= 8_000_000:
        value = _d_value(K, n, eps)
        if prev is not None and abs(value - prev) <= tol * abs(value):
            return value
        prev = value
        K *= 4
    raise ConvergenceError(f"d_{n} did not stabilize to {tol:.3e} relative")


def _log_coeff_e(n: int, eps: float, f_over_Re: float, tol: float) -> float:
    """log e_n by streaming log-sum-exp with a geometric tail bound.

    The term ratio is rho * b(k) * (<1 factor) with
    b(k) = (k+1)^2 / ((k+1)(k+2) - n(n+1)); for k >= n, b decreases from
    its initial value to a minimum and then rises to 1 from below, so
    sup of all ratios past k is rho * max(b(k), 1).  Once that is < 1 the
    remaining tail is geometrically bounded.
    """
    rho = f_over_Re
    c = float(n) * (n + 1.0)
    # k = n term
    log_t = n * math.log(rho) + 2.0 * gammaln(n + 1.0) - gammaln(2 * n + 2.0) - math.log(
        n * (eps + 1.0) + 1.0
    )
    lse_max = log_t
    lse_sum = 1.0
    k = n
    while True:
        b = (k + 1.0) ** 2 / ((k + 1.0) * (k + 2.0) - c)
        q = rho * max(b, 1.0)
        if q < 0.9999:
            log_bound = log_t + math.log(q) - math.log1p(-q)
            if log_bound < lse_max + math.log(lse_sum) + math.log(0.5 * tol):
                return lse_max + math.log(lse_sum)
        ratio = (
            rho * b * (k * (eps + 1.0) + 1.0) / ((k + 1.0) * (eps + 1.0) + 1.0)
        )
        log_t += math.log(ratio)
        k += 1
        if log_t > lse_max:
            lse_sum = lse_sum * math.exp(lse_max - log_t) + 1.0
            lse_max = log_t
        else:
            lse_sum += math.exp(log_t - lse_max)
        if k - n > 2_000_000:
            raise ConvergenceError(f"e_{n} failed to meet tol={tol:g} (f/R_e={f_over_Re:g})")


def coeff_e(n: int, eps: float, f_over_Re: float, tol: float = 1e-12) -> float:
    """e_n, the regular-spheroidal coefficient with geometric factor (f/R_e)^k.

    Reduces to d_n at f = R_e; for f < R_e the geometric factor makes the
    sum rapidly convergent.
    """
    if n < 0:
        raise DomainError("n must be >= 0")
    if not 0.0 < f_over_Re <= 1.0:
        raise DomainError("require 0 < f/R_e <= 1")
    if eps <= 0 or tol <= 0:
        raise DomainError("require eps > 0 and tol > 0")
    if f_over_Re == 1.0:
        return coeff_d(n, eps, tol)
    return math.exp(_log_coeff_e(n, eps, f_over_Re, tol))


@dataclass(frozen=True)
class CoefficientTable:
    """Coefficients of one family for n = 0..N (family 'c', 'd' or 'e')."""

    family: str
    values: np.ndarray
    params: dict
    tail_tol: float

    @property
    def log_values(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(np.abs(self.values))


@lru_cache(maxsize=64)
def _cached_table(family: str, N: int, key: tuple, tol: float) -> CoefficientTable:
    params = dict(key)
    if family == "c":
        vals = c_table(N, params["mu"])
    elif family == "d":
        vals = np.array([coeff_d(n, params["eps"], tol) for n in range(N + 1)])
    elif family == "e":
        vals = np.array(
            [coeff_e(n, params["eps"], params["f_over_Re"], tol) for n in range(N + 1)]
        )
    else:
        raise DomainError(f"unknown coefficient family {family!r}")
    return CoefficientTable(family, vals, params, tol)


def coefficient_table(family: str, N: int, tol: float = 1e-12, **params) -> CoefficientTable:
    return _cached_table(family, N, tuple(sorted(params.items())), tol)


@lru_cache(maxsize=64)
def _cached_log_e_table(N: int, eps: float, f_over_Re: float, tol: float) -> np.ndarray:
    if f_over_Re == 1.0:
        return np.log(np.array([coeff_d(n, eps, tol) for n in range(N + 1)]))
    return np.array([_log_coeff_e(n, eps, f_over_Re, tol) for n in range(N + 1)])


# ---------------------------------------------------------------------------
# series evaluation bookkeeping


def detect_divergence(terms: np.ndarray) -> bool:
    """Growing-term flag: the 3-term windowed |term| envelope exceeds its
    running minimum by DIVERGENCE_FACTOR, or terms stop being finite.

    The window absorbs isolated near-zeros from Legendre sign crossings.
    """
    t = np.abs(np.asarray(terms, dtype=float))
    if t.size == 0:
        return False
    if not np.all(np.isfinite(t)):
        return True
    if t.size < 6:
        return False
    w = t.copy()
    w[1:] = np.maximum(w[1:], t[:-1])
    w[2:] = np.maximum(w[2:], t[:-2])
    w_eff = np.where(w > 0.0, w, np.inf)
    runmin = np.minimum.accumulate(w_eff)
    mask = np.isfinite(runmin[5:])
    return bool(np.any(w[5:][mask] > DIVERGENCE_FACTOR * runmin[5:][mask]))


def _tail_estimate(terms: np.ndarray) -> float:
    """|last term| plus a geometric extrapolation from the last five ratios."""
    t = np.abs(np.asarray(terms, dtype=float))
    if t.size == 0:
        return 0.0
    if not np.all(np.isfinite(t)):
        return math.inf
    last = t[-1]
    window = t[-6:]
    if np.all(window == 0.0):
        return 0.0  # underflowed/exhausted tail
    nz = window[window > 0.0]
    if nz.size < 2:
        return math.inf
    ratios = nz[1:] / nz[:-1]
    rho = float(np.median(ratios))
    if not math.isfinite(rho) or rho >= 1.0:
        return math.inf
    return last + last * rho / (1.0 - rho)


@dataclass(frozen=True)
class SeriesEvaluation:
    """A truncated series value with per-degree terms and diagnostics.

    value = base + sum(terms); partial_sums[n] = base + sum(terms[:n+1]).
    est_error is |last term| plus a geometric tail extrapolation;
    converged means est_error < 1e-3 |value|.
    """

    value: float
    base: float
    terms: np.ndarray
    partial_sums: np.ndarray
    N: int
    converged: bool
    est_error: float
    diverging: bool = False

    @classmethod
    def from_terms(cls, base: float, terms: np.ndarray) -> "SeriesEvaluation":
        terms = np.asarray(terms, dtype=float)
        partial = base + np.cumsum(terms)
        value = float(partial[-1]) if partial.size else float(base)
        if partial.size == 0:
            partial = np.array([base])
        est = _tail_estimate(terms)
        diverging = detect_divergence(terms)
        converged = (not diverging) and math.isfinite(value) and est <= CONVERGED_FRACTION * abs(
            value
        )
        return cls(value, base, terms, partial, max(terms.size - 1, 0), converged, est, diverging)


# ---------------------------------------------------------------------------
# batch term builders (vectorized over arrays of points)


def _as_arrays(r, theta):
    r = np.atleast_1d(np.asarray(r, dtype=float))
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    return np.broadcast_arrays(r, theta)


def point_charge_closed_batch(r, theta, R: float, a: float) -> np.ndarray:
    """a / |r_vec - R z_hat| on arrays of points."""
    r, theta = _as_arrays(r, theta)
    s = np.sin(0.5 * theta)
    d = np.sqrt((r - R) ** 2 + 4.0 * r * R * s * s)
    if np.any(d < 1e-13 * a):
        raise SingularityError("evaluation at the source point")
    return a / d


def _degree_weights(N: int) -> np.ndarray:
    return np.arange(N + 1, dtype=float)


def ext_spherical_reflected_terms(cfg: ProblemConfig, r, theta, N: int):
    r, theta = _as_arrays(r, theta)
    n = _degree_weights(N)
    mat = cfg.material
    p = p_cos_batch(N, np.cos(theta))
    ratio = cfg.R_i / r
    powers = ratio[None, :] ** (n[:, None] + 1.0)
    terms = -mat.beta(n)[:, None] * powers * p
    return np.zeros_like(r), terms


def ext_spherical_internal_terms(cfg: ProblemConfig, r, theta, N: int):
    r, theta = _as_arrays(r, theta)
    n = _degree_weights(N)
    p = p_cos_batch(N, np.cos(theta))
    coef = (cfg.a / cfg.R_e) * (2.0 * n + 1.0) / (n * (cfg.eps + 1.0) + 1.0)
    with np.errstate(under="ignore"):
        powers = (r[None, :] / cfg.R_e) ** n[:, None]
    terms = coef[:, None] * powers * p
    return np.zeros_like(r), terms


def ext_spheroidal_reflected_terms(cfg: ProblemConfig, r, theta, N: int):
    r, theta = _as_arrays(r, theta)
    mat = cfg.material
    xi, eta = offset_xi_eta(r, theta, cfg.R_i)
    q = q_batch(N, xi)
    p = p_cos_batch(N, eta)
    cn = coefficient_table("c", N, mu=mat.mu).values
    n = _degree_weights(N)
    terms = 2.0 * mat.beta_inf * ((2.0 * n + 1.0) * cn)[:, None] * q * p
    rp = axis_distance_batch(r, cfg.R_i, theta)
    base = -mat.beta_inf * cfg.R_i / rp
    return base, terms


def ext_inverted_internal_terms(cfg: ProblemConfig, r, theta, N: int):
    r, theta = _as_arrays(r, theta)
    mat = cfg.material
    xi, eta = inverted_xi_eta(r, theta, cfg.a, cfg.R_e)
    q = q_batch(N, xi)
    p = p_cos_batch(N, eta)
    cn = coefficient_table("c", N, mu=mat.mu).values
    n = _degree_weights(N)
    with np.errstate(under="ignore"):
        terms = 2.0 * mat.beta_inf * (cfg.a / r)[None, :] * ((2.0 * n + 1.0) * cn)[:, None] * q * p
    base = 2.0 * point_charge_closed_batch(r, theta, cfg.R_e, cfg.a) / (cfg.eps + 1.0)
    return base, terms


def ext_regular_internal_terms(cfg: ProblemConfig, r, theta, N: int, f: float | None = None):
    """Regular offset-spheroidal expansion with focal length f (default R_e).

    Assembled in log space: the off-cut P_n factor and the e_n coefficients
    separately overflow/underflow at large N although their product is tame.
    """
    r, theta = _as_arrays(r, theta)
    mat = cfg.material
    f = cfg.R_e if f is None else float(f)
    if not 0.0 < f <= cfg.R_e:
        raise DomainError("focal length must satisfy 0 < f <= R_e")
    xi, eta = offset_xi_eta(r, theta, f)
    log_p_xi = log_p_offcut_batch(N, xi)
    p_eta = p_cos_batch(N, eta)
    log_e = _cached_log_e_table(N, cfg.eps, f / cfg.R_e, 1e-11)
    n = _degree_weights(N)
    pref = cfg.a * mat.beta_inf / cfg.R_e
    with np.errstate(divide="ignore", under="ignore", over="ignore", invalid="ignore"):
        log_mag = (
            math.log(abs(pref))
            + np.log(2.0 * n + 1.0)[:, None]
            + log_e[:, None]
            + log_p_xi
            + np.log(np.abs(p_eta))
        )
        terms = math.copysign(1.0, pref) * np.sign(p_eta) * np.exp(log_mag)
    terms = np.where(p_eta == 0.0, 0.0, terms)
    base = 2.0 * point_charge_closed_batch(r, theta, cfg.R_e, cfg.a) / (cfg.eps + 1.0)
    return base, terms


def int_spherical_reflected_terms(cfg: ProblemConfig, r, theta, N: int):
    r, theta = _as_arrays(r, theta)
    n = _degree_weights(N)
    p = p_cos_batch(N, np.cos(theta))
    coef = (n + 1.0) * (cfg.eps - 1.0) / (n * (cfg.eps + 1.0) + 1.0)
    with np.errstate(under="ignore"):
        powers = (r[None, :] / cfg.R_e) ** n[:, None]
    return np.zeros_like(r), coef[:, None] * powers * p


def int_spherical_outside_terms(cfg: ProblemConfig, r, theta, N: int):
    # printed outside series times eps (normalization conversion, see module docstring)
    r, theta = _as_arrays(r, theta)
    n = _degree_weights(N)
    p = p_cos_batch(N, np.cos(theta))
    coef = cfg.eps * (cfg.a / cfg.R_i) * (2.0 * n + 1.0) / (n * (cfg.eps + 1.0) + 1.0)
    powers = (cfg.R_i / r[None, :]) ** (n[:, None] + 1.0)
    return np.zeros_like(r), coef[:, None] * powers * p


def int_spheroidal_reflected_terms(cfg: ProblemConfig, r, theta, N: int):
    r, theta = _as_arrays(r, theta)
    mat = cfg.material
    xi, eta = inverted_xi_eta(r, theta, cfg.a, cfg.R_e)
    q = q_batch(N, xi)
    p = p_cos_batch(N, eta)
    cn = coefficient_table("c", N, mu=mat.mu).values
    n = _degree_weights(N)
    with np.errstate(under="ignore"):
        terms = (
            2.0
            * mat.beta_inf
            * cfg.eps
            * (cfg.R_e / r)[None, :]
            * ((2.0 * n + 1.0) * cn)[:, None]
            * q
            * p
        )
    base = mat.beta_inf * cfg.R_e * point_charge_closed_batch(r, theta, cfg.R_e, cfg.a) / cfg.a
    return base, terms


def int_spheroidal_outside_terms(cfg: ProblemConfig, r, theta, N: int):
    # printed Eq. for V_out times eps (normalization conversion)
    r, theta = _as_arrays(r, theta)
    mat = cfg.material
    xi, eta = offset_xi_eta(r, theta, cfg.R_i)
    q = q_batch(N, xi)
    p = p_cos_batch(N, eta)
    cn = coefficient_table("c", N, mu=mat.mu).values
    n = _degree_weights(N)
    terms = (
        cfg.eps
        * 2.0
        * (cfg.a * mat.beta_inf / cfg.R_i)
        * ((2.0 * n + 1.0) * cn)[:, None]
        * q
        * p
    )
    base = (
        cfg.eps
        * 2.0
        * point_charge_closed_batch(r, theta, cfg.R_i, cfg.a)
        / (cfg.eps + 1.0)
    )
    return base, terms


def axis_distance_batch(r, c, theta):
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    s = np.sin(0.5 * theta)
    return np.sqrt((r - c) ** 2 + 4.0 * r * c * s * s)


_EXT_BUILDERS = {
    "spherical_reflected": ext_spherical_reflected_terms,
    "spherical_internal": ext_spherical_internal_terms,
    "spheroidal_reflected": ext_spheroidal_reflected_terms,
    "inverted_spheroidal_internal": ext_inverted_internal_terms,
    "regular_spheroidal_internal": ext_regular_internal_terms,
}

_INT_BUILDERS = {
    "spherical_reflected": int_spherical_reflected_terms,
    "spherical_outside": int_spherical_outside_terms,
    "spheroidal_reflected": int_spheroidal_reflected_terms,
    "spheroidal_outside": int_spheroidal_outside_terms,
}

# bases whose physical region is the interior (r <= a)
_INSIDE_BASES = {
    EXTERNAL_SOURCE: ("spherical_internal", "inverted_spheroidal_internal", "regular_spheroidal_internal"),
    INTERNAL_SOURCE: ("spherical_reflected", "spheroidal_reflected"),
}


def _check_region(cfg: ProblemConfig, basis: str, r: float, side: str) -> None:
    inside = basis in _INSIDE_BASES[side]
    if inside and r > cfg.a * (1.0 + 1e-12):
        raise DomainError(f"basis {basis!r} is valid for r <= a, got r = {r}")
    if not inside and r < cfg.a * (1.0 - 1e-12):
        raise DomainError(f"basis {basis!r} is valid for r >= a, got r = {r}")


def v_point_charge(
    p: EvaluationPoint, cfg: ProblemConfig, mode: str = "closed", N: int = 0
) -> SeriesEvaluation:
    """Bare point-charge potential a/|r_vec - R_source z_hat|.

    Series mode uses the Legendre expansion about the origin, valid for
    r < R_source (external source) or r > R_source (internal source).
    """
    R = cfg.R_source
    if mode == "closed":
        val = float(point_charge_closed_batch(p.r, p.theta, R, cfg.a)[0])
        return SeriesEvaluation.from_terms(0.0, np.array([val]))
    if mode != "series":
        raise DomainError(f"mode must be 'closed' or 'series', got {mode!r}")
    n = _degree_weights(N)
    pl = p_cos_batch(N, np.array([math.cos(p.theta)]))[:, 0]
    if cfg.side == EXTERNAL_SOURCE:
        if not p.r < R:
            raise DomainError("series form of the external-source potential requires r < R_e")
        terms = (cfg.a / R) * (p.r / R) ** n * pl
    else:
        if not p.r > R:
            raise DomainError("series form of the internal-source potential requires r > R_i")
        terms = (cfg.a / R) * (R / p.r) ** (n + 1.0) * pl
    return SeriesEvaluation.from_terms(0.0, terms)


def v_external_source(
    p: EvaluationPoint,
    cfg: ProblemConfig,
    basis: str,
    N: int,
    f: float | None = None,
    strict_region: bool = True,
) -> SeriesEvaluation:
    """Potential of an external point source in the requested basis.

    Reflected bases return V_r (outside); internal bases return the full
    V_in.  strict_region=False permits evaluating the analytic
    continuation across r = a (used by the boundary-condition stencils).
    """
    if cfg.side != EXTERNAL_SOURCE:
        raise DomainError("v_external_source requires an external-source configuration")
    if basis not in _EXT_BUILDERS:
        raise DomainError(f"unknown basis {basis!r}; expected one of {EXTERNAL_BASES}")
    if strict_region:
        _check_region(cfg, basis, p.r, EXTERNAL_SOURCE)
    if basis == "regular_spheroidal_internal":
        base, terms = ext_regular_internal_terms(cfg, p.r, p.theta, N, f)
    else:
        base, terms = _EXT_BUILDERS[basis](cfg, p.r, p.theta, N)
    return SeriesEvaluation.from_terms(float(base[0]), terms[:, 0])


def v_internal_source(
    p: EvaluationPoint,
    cfg: ProblemConfig,
    basis: str,
    N: int,
    strict_region: bool = True,
) -> SeriesEvaluation:
    """Potential of an internal point source (at R_i, image at R_e).

    Reflected bases return V_r inside; outside bases return the full V_out
    in the inner-medium normalization (see module docstring).
    """
    if cfg.side != INTERNAL_SOURCE:
        raise DomainError("v_internal_source requires an internal-source configuration")
    if basis not in _INT_BUILDERS:
        raise DomainError(f"unknown basis {basis!r}; expected one of {INTERNAL_BASES}")
    if strict_region:
        _check_region(cfg, basis, p.r, INTERNAL_SOURCE)
    base, terms = _INT_BUILDERS[basis](cfg, p.r, p.theta, N)
    return SeriesEvaluation.from_terms(float(base[0]), terms[:, 0])


# ---------------------------------------------------------------------------
# basis harmonics as standalone scalar fields


def inverted_spheroidal_harmonic(n: int, a: float, R_e: float):
    """The field Q_n(xi_check) P_n(eta_check) / r as a function of (x, y, z)."""

    def field(x: float, y: float, z: float) -> float:
        pt = EvaluationPoint.from_cartesian(x, y, z)
        if pt.r == 0.0:
            raise SingularityError("field has the Kelvin center at the origin")
        xi, eta = inverted_xi_eta(pt.r, pt.theta, a, R_e)
        q = eval_Q_sequence(0, n, float(xi))
        pl = eval_P_sequence(0, n, float(eta))
        return q[n] * pl[n] / pt.r

    return field


def offset_spheroidal_harmonic(n: int, c: float):
    """The field Q_n(xi) P_n(eta) in offset spheroidal coordinates."""

    def field(x: float, y: float, z: float) -> float:
        pt = EvaluationPoint.from_cartesian(x, y, z)
        xi, eta = offset_xi_eta(pt.r, pt.theta, c)
        q = eval_Q_sequence(0, n, float(xi))
        pl = eval_P_sequence(0, n, float(eta))
        return q[n] * pl[n]

    return field

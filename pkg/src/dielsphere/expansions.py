"""Expansion identities between solid spherical and offset spheroidal harmonics.

Four identities are evaluated with both sides computed independently:

  PP_in_P : P_n^m(xi)P_n^m(eta) as a finite sum of (r/c)^k P_k^m(cos th)
  P_in_QP : (c/r)^{n+1} P_n^m(cos th) as an infinite sum of Q_k^m P_k^m
  P_in_PP : (r/c)^n P_n^m(cos th) as a finite sum of P_k^m(xi)P_k^m(eta)
  QP_in_P : Q_n^m(xi)P_n^m(eta) as an infinite sum of (c/r)^{k+1} P_k^m

The finite pair (PP_in_P, P_in_PP) are mutually inverse triangular basis
changes; composing their coefficient matrices is the identity, which is
the matrix-level content of the partial-fraction lemma tested here in
exact rational arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import gammaln

from .coords import EvaluationPoint, to_offset_spheroidal
from .errors import DomainError, SingularityError
from .legendre import XI_GUARD, eval_P_sequence, eval_Q_sequence
from .oracle import DEFAULT_QUAD, QuadratureSpec, _quad
from .series import detect_divergence

IDENTITY_IDS = ("PP_in_P", "P_in_QP", "P_in_PP", "QP_in_P")


@dataclass(frozen=True)
class IdentityReport:
    """Two-sided evaluation of one expansion identity.

    rel_gap is |lhs - rhs| over the largest magnitude appearing in the
    comparison (|lhs|, |rhs| or the largest summed term).  Normalizing by
    the operand scale keeps the gap meaningful at zero crossings of the
    on-cut Legendre factors, where a plain relative gap only amplifies
    rounding noise.
    """

    identity_id: str
    n: int
    m: int
    point: EvaluationPoint
    c: float
    K: int
    lhs: float
    rhs: float
    rel_gap: float
    growing_terms: bool = False


def _lfr(a: int, b: int) -> float:
    """log(a!/b!)"""
    return gammaln(a + 1.0) - gammaln(b + 1.0)


def _ratio(num: list[int], den: list[int]) -> float:
    """Product of factorials num / product of factorials den, exactly.

    Exact integer arithmetic, rounded once to float; the alternating
    finite identities lose several digits to cancellation, so coefficient
    noise from log-gamma differences is not affordable there.
    """
    top = 1
    for a_ in num:
        top *= math.factorial(a_)
    bot = 1
    for b_ in den:
        bot *= math.factorial(b_)
    return float(Fraction(top, bot))


def _report(identity_id, n, m, p, c, K, lhs, rhs, scale=0.0, growing=False) -> IdentityReport:
    gap = abs(lhs - rhs) / max(abs(lhs), abs(rhs), abs(scale), 1e-300)
    return IdentityReport(identity_id, n, m, p, c, K, lhs, rhs, gap, growing)


def evaluate_identity(
    identity_id: str, n: int, m: int, p: EvaluationPoint, c: float, K: int = 80
) -> IdentityReport:
    """Evaluate both sides of one expansion identity at a point.

    K truncates the two infinite identities; the finite ones ignore it.
    Factorial ratios are evaluated through log-gamma with explicit signs.
    Probing outside a validity region reports growing_terms instead of
    raising (the series' divergence there is itself under test).
    """
    if identity_id not in IDENTITY_IDS:
        raise DomainError(f"unknown identity {identity_id!r}")
    if m > n:
        raise DomainError(f"require m <= n, got m={m}, n={n}")
    if m < 0 or n < 0:
        raise DomainError("require n, m >= 0")
    if p.r == 0.0:
        raise SingularityError("identities are singular at the origin (powers of c/r)")
    sc = to_offset_spheroidal(p, c)
    xi, eta, ct = sc.xi, sc.eta, math.cos(p.theta)
    r = p.r

    if identity_id == "PP_in_P":
        lhs = eval_P_sequence(m, n, xi)[n] * eval_P_sequence(m, n, eta)[n]
        pk = eval_P_sequence(m, n, ct)
        terms = np.zeros(n + 1 - m)
        for k in range(m, n + 1):
            coef = _ratio([n + m, n + k], [n - m, n - k, k, k + m])
            terms[k - m] = (-1.0) ** (n + k) * coef * (r / c) ** k * pk[k]
        rhs = float(terms.sum())
        return _report(identity_id, n, m, p, c, n, lhs, rhs, np.abs(terms).max())

    if identity_id == "P_in_PP":
        lhs = (r / c) ** n * eval_P_sequence(m, n, ct)[n]
        pxi = eval_P_sequence(m, n, xi)
        peta = eval_P_sequence(m, n, eta)
        terms = np.zeros(n + 1 - m)
        for k in range(m, n + 1):
            coef = (2 * k + 1) * _ratio([n, n + m, k - m], [n - k, n + k + 1, k + m])
            terms[k - m] = coef * pxi[k] * peta[k]
        rhs = float(terms.sum())
        return _report(identity_id, n, m, p, c, n, lhs, rhs, np.abs(terms).max())

    if identity_id == "P_in_QP":
        # excluded set xi = 1 (the focal segment)
        lhs = (c / r) ** (n + 1) * eval_P_sequence(m, n, ct)[n]
        qk = eval_Q_sequence(m, K, xi)  # raises on xi ~ 1
        pk = eval_P_sequence(m, K, eta)
        terms = np.empty(K + 1 - n)
        for k in range(n, K + 1):
            coef = (2 * k + 1) * _ratio([k + n, k - m], [k - n, k + m, n, n - m])
            terms[k - n] = (-1.0) ** k * coef * qk[k] * pk[k]
        pref = 2.0 * (-1.0) ** (n + m)
        rhs = pref * float(terms.sum())
        return _report(
            identity_id, n, m, p, c, K, lhs, rhs, 2.0 * np.abs(terms).max(), detect_divergence(terms)
        )

    # QP_in_P: converges for r > c, diverges inside
    lhs = eval_Q_sequence(m, n, xi)[n] * eval_P_sequence(m, n, eta)[n]
    pk = eval_P_sequence(m, K, ct)
    terms = np.empty(K + 1 - n)
    with np.errstate(over="ignore"):
        for k in range(n, K + 1):
            coef = _ratio([k, k - m, n + m], [k - n, k + n + 1, n - m])
            terms[k - n] = coef * (c / r) ** (k + 1) * pk[k]
    rhs = 0.5 * (-1.0) ** m * float(terms.sum())
    return _report(
        identity_id, n, m, p, c, K, lhs, rhs, 0.5 * np.abs(terms).max(), detect_divergence(terms)
    )


def partial_fraction_identity(p: int, k: int) -> tuple[Fraction, Fraction]:
    """Both sides of the Appendix lemma
    sum_{q=0}^p (-)^{q+p} (q+p)!/(q!^2 (p-q)!) / (k+q+1) = k!^2/((k-p)!(k+p+1)!)
    in exact rational arithmetic."""
    if not 0 <= p <= k:
        raise DomainError(f"require 0 <= p <= k, got p={p}, k={k}")
    lhs = Fraction(0)
    for q in range(p + 1):
        num = (-1) ** (q + p) * math.factorial(q + p)
        den = math.factorial(q) ** 2 * math.factorial(p - q) * (k + q + 1)
        lhs += Fraction(num, den)
    rhs = Fraction(math.factorial(k) ** 2, math.factorial(k - p) * math.factorial(k + p + 1))
    return lhs, rhs


def shifted_legendre_orthogonality(
    n: int, p: int, q: QuadratureSpec = DEFAULT_QUAD
) -> float:
    """int_0^1 P_n(2x-1) P_p(2x-1) dx, which should be delta_np/(2p+1)."""
    if n < 0 or p < 0:
        raise DomainError("require n, p >= 0")
    pn = np.polynomial.legendre.Legendre.basis(n)
    pp = np.polynomial.legendre.Legendre.basis(p)

    def g(x):
        u = 2.0 * x - 1.0
        return pn(u) * pp(u)

    value, _ = _quad(g, 0.0, 1.0, q)
    return value


def _frac_ratio(num: list[int], den: list[int]) -> Fraction:
    top = 1
    for a_ in num:
        top *= math.factorial(a_)
    bot = 1
    for b_ in den:
        bot *= math.factorial(b_)
    return Fraction(top, bot)


def forward_matrix(n_max: int, m: int, exact: bool = False) -> np.ndarray:
    """A with P_n^m(xi)P_n^m(eta) = sum_k A[n,k] (r/c)^k P_k^m(cos th)."""
    A = np.zeros((n_max + 1, n_max + 1), dtype=object if exact else float)
    if exact:
        A[:] = Fraction(0)
    for n in range(m, n_max + 1):
        for k in range(m, n + 1):
            val = (-1) ** (n + k) * _frac_ratio([n + m, n + k], [n - m, n - k, k, k + m])
            A[n, k] = val if exact else float(val)
    return A


def inverse_matrix(n_max: int, m: int, exact: bool = False) -> np.ndarray:
    """B with (r/c)^n P_n^m(cos th) = sum_k B[n,k] P_k^m(xi)P_k^m(eta)."""
    B = np.zeros((n_max + 1, n_max + 1), dtype=object if exact else float)
    if exact:
        B[:] = Fraction(0)
    for n in range(m, n_max + 1):
        for k in range(m, n + 1):
            val = (2 * k + 1) * _frac_ratio([n, n + m, k - m], [n - k, n + k + 1, k + m])
            B[n, k] = val if exact else float(val)
    return B

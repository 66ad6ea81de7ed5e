"""Legendre functions of the first and second kinds.

Evaluates P_n^m on and off the cut and Q_n^m for real argument > 1.
Q sequences use a Miller-type backward recurrence (Q is the minimal
solution of the degree recurrence for argument > 1, so forward recurrence
is unstable there).  Also provides the large-n asymptotic estimates and
the antiderivative of Q_n used by the convergence-boundary analysis.

On the cut the associated functions carry the Condon-Shortley phase
(-1)^m, matching scipy.special.lpmv; off the cut both P_n^m and Q_n^m use
the real Hobson normalization (x^2-1)^{m/2} with no extra phase.  The
spheroidal-expansion identities in `expansions` hold under either on-cut
phase choice (each side carries exactly one on-cut factor); the phase
here was fixed by that numerical experiment and is documented in the
README.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SingularityError

# reject Q evaluation closer to the log singularity at xi = 1 than this
XI_GUARD = 1e-12

# working values are renormalized past this magnitude during recurrences
_RESCALE_AT = 1e250
_RESCALE_LOG = math.log(_RESCALE_AT)


@dataclass(frozen=True)
class LegendreSequence:
    """Values of P_n^m or Q_n^m for n = 0..N at a fixed argument.

    For kind 'P' entries below degree m are zero (P_n^m = 0 for n < m).
    """

    kind: str  # 'P' or 'Q'
    m: int
    N: int
    x: float
    values: np.ndarray

    def __getitem__(self, n: int) -> float:
        return float(self.values[n])


def _check_order_degree(m: int, N: int) -> None:
    if m < 0:
        raise DomainError(f"order m must be >= 0, got {m}")
    if N < 0:
        raise DomainError(f"max degree N must be >= 0, got {N}")
    if m > N:
        raise DomainError(f"order m={m} exceeds max degree N={N}")


def _double_factorial(n: int) -> float:
    out = 1.0
    while n >= 2:
        out *= n
        n -= 2
    return out


def eval_P_sequence(m: int, N: int, x: float) -> LegendreSequence:
    """P_n^m(x) for n = 0..N by forward recurrence from the n = m seed.

    Valid on the cut (|x| <= 1) and off it (x > 1); the off-cut seed uses
    (x^2-1)^{m/2}.  Forward recurrence is stable for P on both domains.
    """
    _check_order_degree(m, N)
    if not math.isfinite(x):
        raise DomainError(f"argument must be finite, got {x}")
    vals = np.zeros(N + 1)
    if abs(x) <= 1.0:
        seed = (-1.0) ** m * _double_factorial(2 * m - 1) * (1.0 - x * x) ** (m / 2.0)
    else:
        seed = _double_factorial(2 * m - 1) * (x * x - 1.0) ** (m / 2.0)
    vals[m] = seed
    if m + 1 <= N:
        vals[m + 1] = (2 * m + 1) * x * seed
    for n in range(m + 1, N):
        vals[n + 1] = ((2 * n + 1) * x * vals[n] - (n + m) * vals[n - 1]) / (n - m + 1)
    return LegendreSequence("P", m, N, x, vals)


def _q0_associated(m: int, x: float) -> float:
    """Closed-form Q_0^m(x) for x > 1 (normalizes the backward recurrence)."""
    s2 = x * x - 1.0
    s = math.sqrt(s2)
    if m == 0:
        return 0.5 * math.log((x + 1.0) / (x - 1.0))
    if m == 1:
        return -1.0 / s
    if m == 2:
        return 2.0 * x / s2
    # fixed-degree order recurrence: Q_0^{k+2} = -2(k+1)(x/s) Q_0^{k+1} - k(k+1) Q_0^k
    qa = -1.0 / s
    qb = 2.0 * x / s2
    for k in range(1, m - 1):
        qa, qb = qb, -2.0 * (k + 1) * (x / s) * qb - k * (k + 1) * qa
    return qb


def _q_start_order(N: int, x: float) -> int:
    # contamination by the dominant solution decays like lambda^{-2(n_start-N)}
    lam = x + math.sqrt(x * x - 1.0)
    return N + 20 + math.ceil(36.0 / math.log(lam))


def _check_xi(xi) -> None:
    xi = np.asarray(xi, dtype=float)
    if np.any(~np.isfinite(xi)) or np.any(xi <= 1.0):
        raise DomainError("Q_n requires argument xi > 1 (log singularity at xi = 1)")
    if np.any(xi <= 1.0 + XI_GUARD):
        raise SingularityError(
            f"xi within {XI_GUARD:g} of the singular value 1; evaluate the "
            "axis/segment case analytically instead"
        )


def eval_Q_sequence(m: int, N: int, xi: float) -> LegendreSequence:
    """Q_n^m(xi) for n = 0..N, xi > 1, by backward (Miller) recurrence.

    Seeded with (0, 1) at the start order and normalized against the
    closed form Q_0^m.  Values that fall below double-precision range
    underflow to zero (only possible far outside the tested n, xi ranges).
    """
    _check_order_degree(m, N)
    _check_xi(xi)
    xi = float(xi)
    n_start = _q_start_order(N, xi)
    vals = np.zeros(N + 1)
    scale_log = np.zeros(N + 1)
    acc = 0.0
    vp = 0.0  # v[n+1]
    vc = 1.0  # v[n]
    if n_start <= N:  # cannot happen with the +20 margin, kept for safety
        vals[n_start] = vc
    for n in range(n_start, 0, -1):
        vm = ((2 * n + 1) * xi * vc - (n - m + 1) * vp) / (n + m)
        vp, vc = vc, vm
        if abs(vc) > _RESCALE_AT:
            vc *= 1.0 / _RESCALE_AT
            vp *= 1.0 / _RESCALE_AT
            acc += _RESCALE_LOG
        if n - 1 <= N:
            vals[n - 1] = vc
            scale_log[n - 1] = acc
    ratio = _q0_associated(m, xi) / vals[0]
    with np.errstate(under="ignore"):
        out = vals * ratio * np.exp(scale_log - acc)
    return LegendreSequence("Q", m, N, xi, out)


_ASYMPTOTIC_KINDS = ("P_on_cut", "P_off_cut", "Q_off_cut")


def asymptotic_estimate(kind: str, n: int, u: float) -> float:
    """Large-n estimate of P_n or Q_n.

    P_on_cut (|u| < 1) is the oscillatory form
        sqrt(2/(pi n sqrt(1-u^2))) sin((n+1/2) arccos u + pi/4);
    off the cut (u > 1) P and Q are the mutually reciprocal exponential
    forms in (u + sqrt(u^2-1))^(n+1/2).
    """
    if kind not in _ASYMPTOTIC_KINDS:
        raise DomainError(f"unknown asymptotic kind {kind!r}")
    if n < 1:
        raise DomainError("asymptotic estimates require n >= 1")
    if kind == "P_on_cut":
        if not abs(u) < 1.0:
            raise DomainError("P_on_cut requires |u| < 1")
        amp = math.sqrt(2.0 / (math.pi * n * math.sqrt(1.0 - u * u)))
        return amp * math.sin((n + 0.5) * math.acos(u) + math.pi / 4.0)
    if not u > 1.0:
        raise DomainError(f"{kind} requires u > 1")
    lam = u + math.sqrt(u * u - 1.0)
    quart = (u * u - 1.0) ** 0.25
    if kind == "P_off_cut":
        return lam ** (n + 0.5) / (math.sqrt(2.0 * math.pi * n) * quart)
    return math.sqrt(math.pi / (2.0 * n)) / (quart * lam ** (n + 0.5))


def integral_Q(n: int, u: float) -> float:
    """Antiderivative of Q_n vanishing at infinity: int_inf^u Q_n(v) dv.

    Computed as (Q_{n+1}(u) - Q_{n-1}(u)) / (2n+1), whose u-derivative is
    Q_n by the standard derivative identity.  Decays like
    n^{-3/2} (u + sqrt(u^2-1))^{-n} at large n.  n = 0 is unsupported: the
    closed antiderivative in that form needs Q_{-1}.
    """
    if n < 1:
        raise DomainError("integral_Q requires n >= 1")
    q = eval_Q_sequence(0, n + 1, u)
    return (q[n + 1] - q[n - 1]) / (2 * n + 1)


# ---------------------------------------------------------------------------
# batch helpers used by the series evaluators (m = 0, vectorized over points)


def p_cos_batch(N: int, x: np.ndarray) -> np.ndarray:
    """P_n(x) for n = 0..N over an array of on-cut arguments, shape (N+1, M)."""
    x = np.asarray(x, dtype=float)
    out = np.empty((N + 1,) + x.shape)
    out[0] = 1.0
    if N >= 1:
        out[1] = x
    for n in range(1, N):
        out[n + 1] = ((2 * n + 1) * x * out[n] - n * out[n - 1]) / (n + 1)
    return out


def q_batch(N: int, xi: np.ndarray) -> np.ndarray:
    """Q_n(xi) for n = 0..N over an array of off-cut arguments, shape (N+1, M).

    Backward recurrence run from the largest start order in the batch with
    per-point renormalization bookkeeping, then scaled to the closed-form
    Q_0 of each point.
    """
    xi = np.asarray(xi, dtype=float)
    _check_xi(xi)
    flat = xi.reshape(-1)
    lam = flat + np.sqrt(flat * flat - 1.0)
    n_start = int(N + 20 + np.ceil(36.0 / np.log(lam)).max())
    m = flat.size
    vals = np.zeros((N + 1, m))
    scale_log = np.zeros((N + 1, m))
    acc = np.zeros(m)
    vp = np.zeros(m)
    vc = np.ones(m)
    for n in range(n_start, 0, -1):
        vm = ((2 * n + 1) * flat * vc - (n + 1) * vp) / n
        vp, vc = vc, vm
        big = np.abs(vc) > _RESCALE_AT
        if big.any():
            vc[big] *= 1.0 / _RESCALE_AT
            vp[big] *= 1.0 / _RESCALE_AT
            acc[big] += _RESCALE_LOG
        if n - 1 <= N:
            vals[n - 1] = vc
            scale_log[n - 1] = acc
    q0 = 0.5 * np.log((flat + 1.0) / (flat - 1.0))
    with np.errstate(under="ignore"):
        out = vals * (q0 / vals[0]) * np.exp(scale_log - acc)
    return out.reshape((N + 1,) + xi.shape)


def log_p_offcut_batch(N: int, xi: np.ndarray) -> np.ndarray:
    """log P_n(xi) for n = 0..N, xi > 1, shape (N+1, M).

    P_n(xi) > 0 for xi >= 1, so the log form carries the full value; used
    where P_n would overflow (regular-spheroidal series at large N).
    xi = 1 (points on the focal segment) gives log P_n = 0 exactly.
    """
    xi = np.asarray(xi, dtype=float)
    if np.any(xi < 1.0):
        raise DomainError("log_p_offcut_batch requires xi >= 1")
    flat = xi.reshape(-1)
    m = flat.size
    logs = np.zeros((N + 1, m))
    acc = np.zeros(m)
    wp = np.ones(m)
    wc = flat.copy()
    if N >= 1:
        logs[1] = np.log(flat)
    for n in range(1, N):
        wn = ((2 * n + 1) * flat * wc - n * wp) / (n + 1)
        wp, wc = wc, wn
        big = np.abs(wc) > _RESCALE_AT
        if big.any():
            wc[big] *= 1.0 / _RESCALE_AT
            wp[big] *= 1.0 / _RESCALE_AT
            acc[big] += _RESCALE_LOG
        logs[n + 1] = np.log(wc) + acc
    return logs.reshape((N + 1,) + xi.shape)

"""Dunkl two-variable Hermite polynomials.

    h_n(xi, alpha) = gamma_mu(n) * sum_{k <= n/2} alpha**k xi**(n-2k) / (k! gamma_mu(n-2k))
    H_n(xi, alpha) = n! h_n(xi, alpha) / gamma_mu(n)

generated by ``sum_n h_n t**n / gamma_mu(n) = exp(alpha t**2) e_mu(xi t)``.
At ``mu = 0`` both reduce to the Hermite Kampe de Feriet polynomials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .core import DunklParam, dunkl_exp, log_gamma_nu

__all__ = [
    "HermiteQuery",
    "GfCheckReport",
    "hermite_h",
    "hermite_H",
    "log_hermite_h",
    "hermite_table",
    "gf_check",
    "gf_check_order0",
    "gf_check_order1",
    "gf_check_order2",
    "MAX_ABS_T",
    "log_gamma_table",
]

# The generating-function checks refuse larger |t|.
MAX_ABS_T = 0.5

_LOG_MAX = math.log(np.finfo(float).max)


@dataclass(frozen=True)
class HermiteQuery:
    n: int
    xi: float
    alpha: float = 0.0
    p: DunklParam = DunklParam()

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("degree n must be nonnegative")
        if not self.alpha >= 0:
            raise ValueError("alpha must be ≥ 0")


@dataclass(frozen=True)
class GfCheckReport:
    t: float
    lhs: float
    rhs: float
    abs_gap: float
    terms: int
    envelope: float = 0.0
    order: int = 0


@lru_cache(maxsize=256)
def _log_gamma_table(mu: float, size: int) -> np.ndarray:
    m, odd = np.divmod(np.arange(size), 2)
    out = (
        np.arange(size) * math.log(2.0)
        + gammaln(m + 1.0)
        + gammaln(m + mu + 0.5 + odd)
        - math.lgamma(mu + 0.5)
    )
    out[0] = 0.0
    out.setflags(write=False)
    return out


def log_gamma_table(p: DunklParam, size: int) -> np.ndarray:
    """Read-only array of ``log gamma_mu(k)`` for ``k < size``, memoized per ``mu``."""
    # Round the cache key up so nearby sizes share one table.
    cap = 1 << max(6, int(size - 1).bit_length())
    return _log_gamma_table(float(p.mu), cap)[:size]


def _signed_log(v: float) -> tuple[float, float]:
    if v == 0:
        return 0.0, -math.inf
    return math.copysign(1.0, v), math.log(abs(v))


def _log_terms(p: DunklParam, n: int, xi: float, alpha: float):
    """Signs and logs of the summands of ``h_n``; ``0**0`` counts as 1."""
    sa, la = _signed_log(alpha)
    sx, lx = _signed_log(xi)
    k = np.arange(n // 2 + 1)
    j = n - 2 * k
    keep = ~(((k > 0) & (alpha == 0)) | ((j > 0) & (xi == 0)))
    k, j = k[keep], j[keep]
    lgam = log_gamma_table(p, n + 1)
    with np.errstate(invalid="ignore"):
        logs = np.where(k > 0, k * la, 0.0) + np.where(j > 0, j * lx, 0.0) - gammaln(k + 1.0) - lgam[j]
    signs = np.where(k & 1, sa, 1.0) * np.where(j & 1, sx, 1.0)
    return signs, logs


def _combine(signs: np.ndarray, logs: np.ndarray) -> tuple[float, float]:
    if logs.size == 0:
        return 0.0, -math.inf
    top = logs.max()
    s = math.fsum(signs * np.exp(logs - top))
    if s == 0:
        return 0.0, -math.inf
    return math.copysign(1.0, s), top + math.log(abs(s))


def log_hermite_h(p: DunklParam, n: int, xi: float, alpha: float) -> tuple[float, float]:
    """``(sign, log|h_n(xi, alpha)|)``; valid for any real ``alpha``."""
    signs, logs = _log_terms(p, n, xi, alpha)
    sign, lg = _combine(signs, logs)
    return sign, lg + log_gamma_nu(p, n)


def _finite(sign: float, lg: float, what: str) -> float:
    if sign == 0:
        return 0.0
    if lg > _LOG_MAX:
        raise OverflowError(f"{what} exceeds the floating-point range")
    return sign * math.exp(lg)


def hermite_h(q: HermiteQuery) -> float:
    """Normalized polynomial ``h_n(xi, alpha)``, summed in log space."""
    return _finite(*log_hermite_h(q.p, q.n, q.xi, q.alpha), what=f"h_{q.n}")


def hermite_H(q: HermiteQuery) -> float:
    """``H_n(xi, alpha) = n! h_n / gamma_mu(n)``."""
    signs, logs = _log_terms(q.p, q.n, q.xi, q.alpha)
    sign, lg = _combine(signs, logs)
    return _finite(sign, lg + math.lgamma(q.n + 1), what=f"H_{q.n}")


def hermite_table(p: DunklParam, xi: float, alpha: float, n_max: int) -> tuple[np.ndarray, np.ndarray]:
    """Signs and log-magnitudes of ``h_n(xi, alpha)`` for ``n = 0..n_max``."""
    signs, logs = _cached_table(p, float(xi), float(alpha), max(n_max, 64))
    return signs[: n_max + 1], logs[: n_max + 1]


@lru_cache(maxsize=512)
def _cached_table(p: DunklParam, xi: float, alpha: float, n_max: int):
    out = [log_hermite_h(p, n, xi, alpha) for n in range(n_max + 1)]
    signs = np.array([s for s, _ in out])
    logs = np.array([lg for _, lg in out])
    signs.setflags(write=False)
    logs.setflags(write=False)
    return signs, logs


def _rhs(p: DunklParam, order: int, xi: float, alpha: float, t: float) -> float:
    g = math.exp(alpha * t * t)
    e = dunkl_exp(p, xi * t).value
    if order == 0:
        return g * e
    if order == 1:
        return (xi + 2 * alpha * t) * g * e
    poly = xi * xi + 4 * xi * alpha * t + 4 * alpha * alpha * t * t + 2 * alpha
    return poly * g * e + 4 * alpha * p.mu * g * dunkl_exp(p, -xi * t).value


def gf_check(p: DunklParam, order: int, xi: float, alpha: float, t: float, N: int = 60) -> GfCheckReport:
    """Compare ``sum_{n<=N} h_{n+order} t**n / gamma_mu(n)`` with its closed form.

    ``envelope`` bounds the neglected terms: the next ``N`` coefficients are
    summed explicitly and the remainder is closed with a geometric bound from
    the last coefficient ratio.
    """
    if order not in (0, 1, 2):
        raise ValueError("order must be 0, 1 or 2")
    if abs(t) > MAX_ABS_T:
        raise ValueError(f"|t| must be at most {MAX_ABS_T}")
    if N < 2:
        raise ValueError("N must be at least 2")
    rhs = _rhs(p, order, xi, alpha, t)
    if t == 0:
        lhs = hermite_h(HermiteQuery(order, xi, alpha, p))
        return GfCheckReport(t, lhs, rhs, abs(lhs - rhs), 1, 0.0, order)

    n_last = 2 * N
    signs, logs = hermite_table(p, xi, alpha, n_last + order)
    n = np.arange(n_last + 1)
    lg = logs[order:] + n * math.log(abs(t)) - log_gamma_table(p, n_last + 1)
    sg = signs[order:] * np.where((n & 1) & (t < 0), -1.0, 1.0)
    c = np.where(sg == 0, 0.0, sg * np.exp(np.minimum(lg, _LOG_MAX)))
    lhs = math.fsum(c[: N + 1])

    mag = np.abs(c)
    envelope = math.fsum(mag[N + 1 :])
    pairs = [mag[-1] / mag[-2] if mag[-2] else 0.0, mag[-2] / mag[-3] if mag[-3] else 0.0]
    rho = max(pairs)
    envelope += mag[-1] * rho / (1 - rho) if rho < 1 else math.inf
    return GfCheckReport(t, lhs, rhs, abs(lhs - rhs), N + 1, envelope, order)


def gf_check_order0(p: DunklParam, xi: float, alpha: float, t: float, N: int = 60) -> GfCheckReport:
    return gf_check(p, 0, xi, alpha, t, N)


def gf_check_order1(p: DunklParam, xi: float, alpha: float, t: float, N: int = 60) -> GfCheckReport:
    return gf_check(p, 1, xi, alpha, t, N)


def gf_check_order2(p: DunklParam, xi: float, alpha: float, t: float, N: int = 60) -> GfCheckReport:
    return gf_check(p, 2, xi, alpha, t, N)

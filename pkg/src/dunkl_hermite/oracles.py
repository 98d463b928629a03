"""Independent reference computations used to cross-check the main routines.

Each oracle takes a different route from the code it checks: exact rational
arithmetic, the gamma-function closed form in multiprecision, Poisson masses
from scipy, or the classical Hermite three-term recurrence.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np
from scipy.stats import poisson

__all__ = [
    "rational_gamma_nu",
    "rational_dunkl_exp",
    "rational_exp_ratio",
    "rational_hermite_h",
    "mp_gamma_nu",
    "poisson_szasz",
    "krech_operator",
    "krech_central_moments",
    "dunkl_szasz",
    "dunkl_szasz_weights",
]


def rational_gamma_nu(mu: Fraction, k: int) -> Fraction:
    """``gamma_mu(k)`` by iterating the factorial ratio exactly."""
    mu = Fraction(mu)
    g = Fraction(1)
    for j in range(k):
        g *= 2 * mu * ((j + 1) % 2) + j + 1
    return g


def _rational_terms(mu: Fraction, x: Fraction, tol: Fraction):
    """Yield ``(k, x**k / gamma_mu(k))`` until past the peak and below ``tol`` in size."""
    t = Fraction(1)
    k = 0
    yield 0, t
    while True:
        t = t * x / (2 * mu * ((k + 1) % 2) + k + 1)
        k += 1
        yield k, t
        if k > 2 * abs(x) and abs(t) < tol:
            return


def rational_dunkl_exp(mu, x, tol: Fraction = Fraction(1, 10**30)) -> Fraction:
    """Partial sum of ``e_mu(x)`` in exact arithmetic."""
    return sum((t for _, t in _rational_terms(Fraction(mu), Fraction(x), tol)), Fraction(0))


def rational_exp_ratio(mu, y, tol: Fraction = Fraction(1, 10**30)) -> Fraction:
    """``e_mu(-y) / e_mu(y)`` from exact partial sums of both series."""
    even = odd = Fraction(0)
    for k, t in _rational_terms(Fraction(mu), Fraction(y), tol):
        if k % 2:
            odd += t
        else:
            even += t
    return (even - odd) / (even + odd)


def rational_hermite_h(mu, n: int, xi, alpha) -> Fraction:
    """``h_n(xi, alpha)`` as an exact rational."""
    mu, xi, alpha = Fraction(mu), Fraction(xi), Fraction(alpha)
    total = sum(
        alpha**k * xi ** (n - 2 * k) / (math.factorial(k) * rational_gamma_nu(mu, n - 2 * k))
        for k in range(n // 2 + 1)
    )
    return rational_gamma_nu(mu, n) * total


def mp_gamma_nu(mu, k: int, dps: int = 40):
    """``gamma_mu(k)`` from the gamma-function closed form at ``dps`` digits."""
    with mpmath.workdps(dps):
        mu = mpmath.mpf(mu)
        m, odd = divmod(k, 2)
        return mpmath.mpf(2) ** k * mpmath.factorial(m) * mpmath.gamma(m + mu + 0.5 + odd) / mpmath.gamma(mu + 0.5)


def poisson_szasz(n: int, f, x: float) -> float:
    """Classical Szasz-Mirakyan operator with scipy's Poisson masses."""
    lam = n * x
    if lam == 0:
        return float(f(np.zeros(1))[0])
    k = np.arange(int(lam + 40 * math.sqrt(lam) + 60))
    w = poisson.pmf(k, lam)
    return math.fsum(w * f(k / n))


def krech_operator(n: int, alpha: float, f, x: float) -> float:
    """Krech's ``G_n^alpha(f; x)`` via the classical Hermite recurrence.

    ``H_{k+1}(xi, a) = xi H_k + 2 a k H_{k-1}`` gives, for
    ``u_k = H_k(n, alpha) x**k / k!``, the positive recurrence
    ``u_{k+1} = x / (k+1) * (n u_k + 2 alpha x u_{k-1})``.  The values are
    rescaled as they grow and multiplied by ``exp(-(n x + alpha x**2))`` at the end.
    """
    if x == 0:
        return float(f(np.zeros(1))[0])
    log_norm = -(n * x + alpha * x * x)
    prev, cur = 0.0, 1.0
    shift = 0.0  # log of the factor divided out of prev/cur so far
    logs = [log_norm]
    k = 0
    mean = n * x + 2 * alpha * x * x
    while True:
        prev, cur = cur, x / (k + 1) * (n * cur + 2 * alpha * x * prev)
        k += 1
        if cur > 1e200:
            prev, cur = prev / 1e200, cur / 1e200
            shift += math.log(1e200)
        lw = math.log(cur) + shift + log_norm if cur > 0 else -math.inf
        logs.append(lw)
        if k > mean and lw < max(logs) - 60:
            break
    w = np.exp(np.array(logs))
    return math.fsum(w * f(np.arange(k + 1) / n))


def krech_central_moments(n: int, alpha: float, x: float) -> tuple[float, float]:
    """First and second central moments of ``G_n^alpha``."""
    return 2 * alpha * x * x / n, x * (4 * x**3 * alpha**2 + 4 * alpha * x + n) / n**2


@lru_cache(maxsize=1024)
def dunkl_szasz_weights(n: int, mu, x: float, dps: int = 30) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of ``S_n*`` at ``x`` with factorials from the gamma closed form."""
    y = n * x
    if y == 0:
        return np.zeros(1), np.ones(1)
    with mpmath.workdps(dps):
        ym = mpmath.mpf(y)
        terms = []
        k = 0
        while True:
            terms.append(ym**k / mp_gamma_nu(mu, k, dps))
            if k > 2 * y + 10 and terms[-1] < mpmath.mpf(10) ** (-dps) * terms[int(y)]:
                break
            k += 1
        total = mpmath.fsum(terms)
        w = np.array([float(t / total) for t in terms])
    kk = np.arange(len(terms))
    return (kk + 2.0 * float(mu) * (kk % 2)) / n, w


def dunkl_szasz(n: int, mu, f, x: float, dps: int = 30) -> float:
    """Dunkl-Szasz operator ``S_n*(f; x)``."""
    nodes, w = dunkl_szasz_weights(n, mu, float(x), dps)
    return math.fsum(w * f(nodes))

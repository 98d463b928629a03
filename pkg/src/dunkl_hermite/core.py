"""Dunkl factorials, the Dunkl exponential and the Dunkl derivative on polynomials.

The generalized factorials satisfy

    gamma_mu(k + 1) / gamma_mu(k) = 2 * mu * theta(k + 1) + k + 1,   gamma_mu(0) = 1,

with ``theta(k) = k mod 2``, and the Dunkl exponential is
``e_mu(x) = sum_k x**k / gamma_mu(k)``.  At ``mu = 0`` everything reduces to
factorials and the classical exponential.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from typing import Sequence

import mpmath
import numpy as np

__all__ = [
    "DunklParam",
    "SeriesResult",
    "Polynomial",
    "PrecisionExhausted",
    "MAX_PRECISION_BITS",
    "theta",
    "log_gamma_nu",
    "gamma_nu_ratio",
    "log_series_weights",
    "dunkl_exp",
    "log_dunkl_exp",
    "dunkl_exp_ratio",
    "dunkl_derivative",
]

EPS = sys.float_info.epsilon

# Escalated summations never use more mantissa bits than this.
MAX_PRECISION_BITS = 4096


class PrecisionExhausted(ArithmeticError):
    """Cancellation destroyed the result even at the largest allowed precision."""


@dataclass(frozen=True)
class DunklParam:
    """Reflection parameter ``mu`` plus the tolerances used by every series."""

    mu: float = 0.0
    eps_term: float = 1e-14
    eps_cancel: float = 1e-8

    def __post_init__(self):
        if not math.isfinite(self.mu) or self.mu < 0:
            raise ValueError("mu must be ≥ 0")
        for name in ("eps_term", "eps_cancel"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise ValueError(f"{name} must lie in (0, 1), got {v!r}")


@dataclass(frozen=True)
class SeriesResult:
    """Value of a truncated infinite series with its error estimates."""

    value: float
    terms_used: int
    tail_bound: float = 0.0
    cancel_error: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))
        for name in ("tail_bound", "cancel_error"):
            v = float(getattr(self, name))
            object.__setattr__(self, name, v)
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be finite and nonnegative, got {v!r}")

    @property
    def error(self) -> float:
        return self.tail_bound + self.cancel_error


# ---------------------------------------------------------------------------
# Combinatorial kernel
# ---------------------------------------------------------------------------


def theta(k: int) -> int:
    """Parity indicator: 0 for even ``k``, 1 for odd ``k``."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    return k & 1


def gamma_nu_ratio(p: DunklParam, k: int) -> float:
    """``gamma_mu(k + 1) / gamma_mu(k) = 2 mu theta(k + 1) + k + 1``."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    return 2.0 * p.mu * ((k + 1) & 1) + k + 1


def log_gamma_nu(p: DunklParam, k: int) -> float:
    """Natural log of ``gamma_mu(k)`` from the gamma-function closed form.

    For ``k = 2m`` the factorial is ``4**m m! Gamma(m + mu + 1/2) / Gamma(mu + 1/2)``;
    for ``k = 2m + 1`` it is ``2**(2m+1) m! Gamma(m + mu + 3/2) / Gamma(mu + 1/2)``.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        return 0.0
    m, odd = divmod(k, 2)
    h = p.mu + 0.5
    return k * math.log(2.0) + math.lgamma(m + 1) + math.lgamma(m + h + odd) - math.lgamma(h)


def _ratios(mu: float, start: int, stop: int) -> np.ndarray:
    """``gamma_mu(k + 1) / gamma_mu(k)`` for ``start <= k < stop``."""
    k = np.arange(start, stop)
    return 2.0 * mu * ((k + 1) & 1) + k + 1


# ---------------------------------------------------------------------------
# Dunkl exponential
# ---------------------------------------------------------------------------


def _double_terms(p: DunklParam, x: float) -> tuple[list[float], float]:
    """Terms ``x**k / gamma_mu(k)`` until the stopping rule fires.

    Returns the terms and a geometric bound on everything left out.
    """
    ax = abs(x)
    terms = [1.0]
    t = 1.0
    running = 1.0
    k = 0
    while True:
        t *= x / gamma_nu_ratio(p, k)
        k += 1
        terms.append(t)
        running += t
        if k > ax and abs(t) < p.eps_term * abs(running) or t == 0.0:
            rho = ax / gamma_nu_ratio(p, k)
            if rho < 0.5:
                return terms, abs(t) * rho / (1.0 - rho)
        if not math.isfinite(t):
            raise OverflowError(f"Dunkl exponential overflows at x={x!r}")


def _mp_sum(p: DunklParam, x: float, prec: int):
    """Terms summed in ``prec``-bit arithmetic, even and odd powers apart.

    Returns (even part, odd part, sum of |terms|, number of terms, tail bound)
    as mpf values.
    """
    ctx = mpmath.mp.clone()
    ctx.prec = prec
    xm = ctx.mpf(x)
    ax = abs(xm)
    mu2 = ctx.mpf(2 * p.mu)
    cut = ctx.mpf(2) ** (-prec - 8)
    t = ctx.one
    parts = [ctx.one, ctx.zero]
    absum = ctx.one
    k = 0
    while True:
        t = t * xm / (mu2 * ((k + 1) & 1) + k + 1)
        k += 1
        parts[k & 1] += t
        absum += abs(t)
        if k > ax and abs(t) < cut * absum:
            rho = ax / (mu2 * ((k + 1) & 1) + k + 1)
            if rho < 0.5:
                return parts[0], parts[1], absum, k + 1, abs(t) * rho / (1 - rho)


def _start_bits(y: float) -> int:
    # At mu = 0 the cancellation ratio is exactly e^{2y}; mu > 0 only shrinks it.
    return min(MAX_PRECISION_BITS, max(2 * 53, int(2 * abs(y) * math.log2(math.e)) + 128))


def _next_bits(prec: int, whole, diff) -> int:
    lost = float(mpmath.log(whole, 2)) - float(mpmath.log(max(abs(diff), whole * mpmath.mpf(2) ** (-prec)), 2))
    return min(MAX_PRECISION_BITS, max(2 * prec, int(lost) + 2 * 53 + 16))


def _escalated(p: DunklParam, x: float, rel_needed: float):
    """Sum at growing precision until the cancellation estimate is acceptable."""
    prec = _start_bits(x)
    while True:
        even, odd, absum, n, tail = _mp_sum(p, x, prec)
        total = even + odd
        cancel = absum * n * mpmath.mpf(2) ** (-prec)
        if total != 0 and cancel / abs(total) <= rel_needed:
            return total, n, tail, cancel
        if prec >= MAX_PRECISION_BITS:
            raise PrecisionExhausted(
                f"Dunkl exponential at x={x!r}: cancellation exceeds tolerance "
                f"at {prec} bits"
            )
        prec = _next_bits(prec, absum, total)


def dunkl_exp(p: DunklParam, x: float) -> SeriesResult:
    """Dunkl exponential ``e_mu(x)``.

    Terms are built from the factorial ratio, summed with ``math.fsum``.  For
    negative ``x`` the alternating series may cancel badly; when the estimated
    relative cancellation error exceeds ``p.eps_cancel`` the sum is redone in
    extended precision.
    """
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"x must be finite, got {x!r}")
    if x == 0.0:
        return SeriesResult(1.0, 1)
    try:
        terms, tail = _double_terms(p, x)
    except OverflowError:
        if x > 0:
            raise
        terms = None  # the terms overflow but the alternating sum may not
    if terms is not None:
        value = math.fsum(terms)
        if x > 0:
            cancel = value * len(terms) * EPS
            return SeriesResult(value, len(terms), tail, cancel)
        absum = math.fsum(abs(t) for t in terms)
        cancel = absum * len(terms) * EPS
        if value != 0.0 and cancel / abs(value) <= p.eps_cancel:
            return SeriesResult(value, len(terms), tail, cancel)
    total, n, tail_mp, cancel_mp = _escalated(p, x, p.eps_cancel)
    value = float(total)
    if not math.isfinite(value):
        raise OverflowError(f"Dunkl exponential at x={x!r} exceeds the floating-point range")
    return SeriesResult(value, n, float(tail_mp), float(cancel_mp) + abs(value) * EPS)


def log_dunkl_exp(p: DunklParam, y: float) -> float:
    """``log e_mu(y)`` for ``y >= 0`` without overflow."""
    if y < 0 or not math.isfinite(y):
        raise ValueError("log_dunkl_exp needs a finite y >= 0")
    if y == 0:
        return 0.0
    return log_series_weights(p, y)[2]


def log_series_weights(p: DunklParam, y: float, cut: float = 1e-25):
    """Normalized Dunkl-Poisson weights ``y**k / (gamma_mu(k) e_mu(y))``.

    Terms are grown from the largest one with the factorial ratio in both
    directions and dropped once they fall below ``cut`` relative to the peak.
    Returns ``(k0, weights, log_normalizer, tail_mass)`` where ``weights[i]``
    belongs to index ``k0 + i``.
    """
    if y == 0:
        return 0, np.ones(1), 0.0, 0.0
    mu = p.mu
    # The ratio y / (k + 1 + 2 mu theta) crosses 1 near k = y - mu.
    peak = max(0, int(math.floor(y - mu)))
    log_peak = peak * math.log(y) - log_gamma_nu(p, peak)

    # Right side: grow until the term ratio is < 1/2 and terms are negligible.
    span = int(20 * math.sqrt(y) + 40)
    hi = peak + span
    while True:
        r = y / _ratios(mu, peak, hi)
        right = np.cumprod(r)
        if right[-1] < cut and y / gamma_nu_ratio(p, hi) < 0.5:
            break
        hi += span
    keep = np.nonzero(right >= cut)[0]
    right = right[: keep[-1] + 2] if keep.size else right[:1]
    rho = y / gamma_nu_ratio(p, peak + right.size)
    tail_right = right[-1] * rho / (1.0 - rho)

    # Left side: divide by the ratio going down to k = 0.
    if peak > 0:
        r = _ratios(mu, 0, peak)[::-1] / y
        left = np.cumprod(r)
        small = np.nonzero(left < cut)[0]
        tail_left = 0.0
        if small.size:
            stop = small[0] + 1
            # Left-going ratios keep shrinking, so the rest is geometric.
            rho_l = float(r[stop : stop + 2].max()) if stop < r.size else 0.0
            if rho_l < 1.0:
                tail_left = left[stop - 1] * rho_l / (1.0 - rho_l)
            else:
                tail_left = left[stop - 1] * (r.size - stop)
            left = left[:stop]
        vals = np.concatenate([left[::-1], [1.0], right])
        k0 = peak - left.size
    else:
        tail_left = 0.0
        vals = np.concatenate([[1.0], right])
        k0 = 0
    s = math.fsum(vals)
    return k0, vals / s, log_peak + math.log(s), (tail_left + tail_right) / s


def dunkl_exp_ratio(p: DunklParam, y: float) -> SeriesResult:
    """``r(y) = e_mu(-y) / e_mu(y)`` for ``y >= 0``.

    With even part ``E`` and odd part ``O`` of the series, ``r = (E - O) / (E + O)``.
    If ``E - O`` cancels beyond what ``MAX_PRECISION_BITS`` can resolve the
    result is 0 with a tail bound covering the true value.
    """
    y = float(y)
    if not math.isfinite(y) or y < 0:
        raise ValueError(f"y must be finite and >= 0, got {y!r}")
    if y == 0.0:
        return SeriesResult(1.0, 1)

    if y <= 700.0:
        k0, w, _, tail = log_series_weights(p, y, cut=EPS * 1e-3)
        ks = np.arange(k0, k0 + w.size)
        odd = math.fsum(w[ks & 1 == 1])
        even = math.fsum(w[ks & 1 == 0])
        diff = even - odd
        cancel = w.size * EPS
        if diff > 0 and cancel / diff <= p.eps_cancel:
            return SeriesResult(diff, w.size, tail, cancel)

    prec = _start_bits(y)
    while True:
        even, odd, whole, n, tail = _mp_sum(p, y, prec)
        diff = even - odd
        cancel = whole * n * mpmath.mpf(2) ** (-prec)
        if diff > 0 and cancel / diff <= p.eps_cancel:
            return SeriesResult(float(diff / whole), n, float(2 * tail / whole), float(cancel / whole))
        if prec >= MAX_PRECISION_BITS:
            # The ratio is below the resolvable floor cancel / whole.
            envelope = max(10.0 * math.exp(-2.0 * y), float(cancel / whole))
            return SeriesResult(0.0, n, envelope, 0.0)
        prec = _next_bits(prec, whole, diff)


# ---------------------------------------------------------------------------
# Polynomials and the Dunkl derivative
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Polynomial:
    """Dense real polynomial; ``coeffs[k]`` multiplies ``x**k``."""

    coeffs: tuple[float, ...] = field(default_factory=tuple)

    def __init__(self, coeffs: Sequence[float] = ()):
        c = [float(v) for v in coeffs]
        while c and c[-1] == 0.0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def monomial(cls, n: int, c: float = 1.0) -> "Polynomial":
        return cls([0.0] * n + [c])

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def __call__(self, x):
        return np.polynomial.polynomial.polyval(x, self.coeffs) if self.coeffs else 0.0 * np.asarray(x)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0.0,) * (n - len(self.coeffs))
        b = other.coeffs + (0.0,) * (n - len(other.coeffs))
        return Polynomial([u + v for u, v in zip(a, b)])

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            if not self.coeffs or not other.coeffs:
                return Polynomial()
            return Polynomial(np.convolve(self.coeffs, other.coeffs))
        return Polynomial([c * other for c in self.coeffs])

    __rmul__ = __mul__

    def is_even(self) -> bool:
        return all(c == 0.0 for c in self.coeffs[1::2])


def dunkl_derivative(p: DunklParam, q: Polynomial) -> Polynomial:
    """Apply the Dunkl operator ``D_mu f = f'(x) + mu/x (f(x) - f(-x))`` to ``q``.

    On monomials this is ``x**n -> gamma_mu(n) / gamma_mu(n - 1) x**(n - 1)``.
    """
    return Polynomial([gamma_nu_ratio(p, k) * c for k, c in enumerate(q.coeffs[1:])])

"""The positive linear operators built from the Dunkl-Hermite polynomials.

    T_n(f; x) = 1 / (exp(alpha x**2) e_mu(n x))
                * sum_k h_k(n, alpha) x**k / gamma_mu(k) * f((k + 2 mu theta(k)) / n)

Expanding ``h_k`` shows that the weight of index ``k`` is the law of ``2J + L``
where ``J`` is Poisson with mean ``alpha x**2`` and ``L`` has the Dunkl-Poisson
weights ``(n x)**l / (gamma_mu(l) e_mu(n x))``.  Both factors are built from
their largest term with the factorial ratio and convolved, so no weight is
ever assembled from overflowing pieces.  ``mu = 0`` gives Krech's operators
``G_n^alpha``; ``alpha = 0`` gives the Dunkl-Szasz operators ``S_n*``.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .core import (
    DunklParam,
    SeriesResult,
    dunkl_exp_ratio,
    log_dunkl_exp,
    log_gamma_nu,
    log_series_weights,
)
from .hermite import log_hermite_h

__all__ = [
    "OperatorConfig",
    "TargetFunction",
    "MomentReport",
    "WeightTable",
    "UnboundedGrowth",
    "weight",
    "node",
    "operator_weights",
    "apply",
    "moments",
    "closed_moments",
    "central_moments",
    "power",
    "exp_ratio",
]

EPS = sys.float_info.epsilon

# Terms below this fraction of the largest one are dropped.
_CUT = 1e-25


class UnboundedGrowth(ValueError):
    """The target function grows too fast for the weight tail bound."""


@dataclass(frozen=True)
class OperatorConfig:
    n: int
    alpha: float = 0.0
    p: DunklParam = DunklParam()

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("n must be a positive integer")
        if not (math.isfinite(self.alpha) and self.alpha >= 0):
            raise ValueError("alpha must be ≥ 0")

    @property
    def mu(self) -> float:
        return self.p.mu


@dataclass(frozen=True)
class TargetFunction:
    """A function on ``[0, inf)`` with whatever regularity is known about it.

    ``known_lipschitz`` is ``(M, lip_exponent)`` with
    ``|f(s) - f(t)| <= M |s - t|**lip_exponent``.  ``sup_norm`` is set for
    bounded functions; otherwise ``growth_degree`` d promises
    ``|f(t)| <= growth_const * (1 + t)**d``.
    """

    eval: Callable
    label: str
    known_lipschitz: Optional[tuple[float, float]] = None
    sup_norm: Optional[float] = None
    growth_degree: Optional[int] = None
    growth_const: float = 1.0

    def __post_init__(self):
        if self.known_lipschitz is not None:
            M, beta = self.known_lipschitz
            if not (M > 0 and 0 < beta <= 1):
                raise ValueError("Lipschitz data needs M > 0 and exponent in (0, 1]")

    @property
    def known_bounded(self) -> bool:
        return self.sup_norm is not None

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        try:
            out = np.asarray(self.eval(t), dtype=float)
        except TypeError:
            out = None  # scalar-only callable
        if out is None or out.shape != t.shape:
            out = np.vectorize(lambda s: float(self.eval(float(s))), otypes=[float])(t)
        return out


def power(i: int) -> TargetFunction:
    """The Korovkin test function ``t**i``."""
    if i == 0:
        return TargetFunction(np.ones_like, "e0", sup_norm=1.0)
    return TargetFunction(lambda t: t**i, f"e{i}", growth_degree=i)


@dataclass(frozen=True)
class WeightTable:
    """Truncated operator weights: ``weights[i]`` belongs to index ``k0 + i``."""

    k0: int
    weights: np.ndarray
    nodes: np.ndarray
    tail_mass: float

    @property
    def node_max(self) -> float:
        return float(self.nodes[-1])


@dataclass(frozen=True)
class MomentReport:
    x: float
    m0: float
    m1: float
    m2: float
    m0_s: float
    m1_s: float
    m2_s: float
    delta1: float
    delta2: float
    max_rel_gap: float
    ratio: float = field(default=1.0)


def node(cfg: OperatorConfig, k: int) -> float:
    """Sampling point ``(k + 2 mu theta(k)) / n``."""
    return (k + 2.0 * cfg.mu * (k & 1)) / cfg.n


def weight(cfg: OperatorConfig, k: int, x: float) -> float:
    """Weight of index ``k``, assembled in log space from its defining pieces."""
    if x < 0:
        raise ValueError("x must be ≥ 0")
    if x == 0:
        return 1.0 if k == 0 else 0.0
    sign, log_h = log_hermite_h(cfg.p, k, float(cfg.n), cfg.alpha)
    lw = (
        log_h
        + k * math.log(x)
        - log_gamma_nu(cfg.p, k)
        - cfg.alpha * x * x
        - log_dunkl_exp(cfg.p, cfg.n * x)
    )
    return sign * math.exp(lw)


@lru_cache(maxsize=4096)
def operator_weights(cfg: OperatorConfig, x: float) -> WeightTable:
    """All non-negligible weights of ``T_n(.; x)`` with their nodes."""
    if not (math.isfinite(x) and x >= 0):
        raise ValueError("x must be finite and ≥ 0")
    if x == 0:
        w = np.ones(1)
        k0, tail = 0, 0.0
    else:
        l0, q, _, tail_q = log_series_weights(cfg.p, cfg.n * x, _CUT)
        lam = cfg.alpha * x * x
        j0, pj, _, tail_p = log_series_weights(DunklParam(0.0), lam, _CUT)
        spread = np.zeros(2 * pj.size - 1)
        spread[::2] = pj
        w = np.convolve(spread, q)
        k0, tail = 2 * j0 + l0, tail_p + tail_q
    k = np.arange(k0, k0 + w.size)
    nodes = (k + 2.0 * cfg.mu * (k & 1)) / cfg.n
    w.setflags(write=False)
    nodes.setflags(write=False)
    return WeightTable(k0, w, nodes, float(tail))


def _tail_size(f: TargetFunction, table: WeightTable) -> float:
    if f.sup_norm is not None:
        return f.sup_norm
    if f.growth_degree is None:
        raise UnboundedGrowth(f"{f.label}: need a sup-norm or a polynomial growth degree")
    if f.growth_degree > 2:
        raise UnboundedGrowth(f"{f.label}: growth degree {f.growth_degree} > 2 is not supported")
    # The neglected weights sit beyond the last node and decay geometrically.
    return 2.0 * f.growth_const * (1.0 + 2.0 * table.node_max) ** f.growth_degree


def apply(cfg: OperatorConfig, f: TargetFunction, x: float) -> SeriesResult:
    """``T_n(f; x)`` by truncated series with compensated summation."""
    table = operator_weights(cfg, float(x))
    terms = table.weights * f(table.nodes)
    value = math.fsum(terms)
    tail = table.tail_mass * _tail_size(f, table)
    cancel = math.fsum(np.abs(terms)) * terms.size * EPS
    return SeriesResult(value, int(terms.size), tail, cancel)


@lru_cache(maxsize=8192)
def exp_ratio(p: DunklParam, y: float) -> float:
    return dunkl_exp_ratio(p, y).value


def closed_moments(cfg: OperatorConfig, x: float) -> tuple[float, float, float, float]:
    """``(T_n(1), T_n(t), T_n(t**2), e_mu(-nx)/e_mu(nx))`` from the closed forms."""
    n, a = cfg.n, cfg.alpha
    r = exp_ratio(cfg.p, float(n * x))
    m1 = x + 2 * a * x * x / n
    m2 = (
        x * x
        + 4 * a * x * x / n**2
        + 4 * a * x**3 / n
        + 4 * a * a * x**4 / n**2
        + x / n
        + 2 * cfg.mu * x / n * r
    )
    return 1.0, m1, m2, r


def central_moments(cfg: OperatorConfig, x: float) -> tuple[float, float]:
    """Closed-form ``T_n(t - x; x)`` and ``T_n((t - x)**2; x)``."""
    if x < 0:
        raise ValueError("x must be ≥ 0")
    n, a = cfg.n, cfg.alpha
    r = exp_ratio(cfg.p, float(n * x))
    delta1 = 2 * a * x * x / n
    delta2 = x * (4 * x**3 * a * a + 4 * a * x + n) / n**2 + 2 * cfg.mu * x / n * r
    return delta1, delta2


def _gap(closed: float, series: float) -> float:
    return abs(series - closed) / abs(closed) if closed else abs(series)


def moments(cfg: OperatorConfig, x: float) -> MomentReport:
    """Closed-form moments next to their series-summed counterparts."""
    if x < 0:
        raise ValueError("x must be ≥ 0")
    m0, m1, m2, r = closed_moments(cfg, x)
    s0, s1, s2 = (apply(cfg, power(i), x).value for i in range(3))
    d1, d2 = central_moments(cfg, x)
    gap = max(_gap(m0, s0), _gap(m1, s1), _gap(m2, s2))
    return MomentReport(x, m0, m1, m2, s0, s1, s2, d1, d2, gap, r)

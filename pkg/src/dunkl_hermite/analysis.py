"""Moduli of smoothness, error-bound evaluators and convergence sweeps.

Every bound is compared with the actual error ``|T_n(g; x) - g(x)|``.  Moduli
are sups over ``[0, inf)``; numerically they are taken over a window
``[0, B]`` that contains ``x``, every node the operator touches and room for
the second differences.  The window spacing is tied to the modulus argument,
and the discretization error is carried into the comparison as slack.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .operators import (
    OperatorConfig,
    TargetFunction,
    apply,
    central_moments,
    exp_ratio,
    operator_weights,
    power,
)

__all__ = [
    "DomainGrid",
    "BoundReport",
    "SweepRow",
    "KorovkinRow",
    "SweepTable",
    "modulus",
    "second_modulus",
    "bound_window",
    "window_modulus",
    "support_upper",
    "mixed_bound_arguments",
    "check_lipschitz_bound",
    "check_omega_bound",
    "check_peetre_bound",
    "check_mixed_bound",
    "convergence_sweep",
]

# Window spacing is delta / LAGS_PER_DELTA, never finer than delta / MAX_LAGS.
LAGS_PER_DELTA = 32
MAX_LAGS = 64
REL_SLACK = 1e-9


@dataclass(frozen=True)
class DomainGrid:
    a: float = 0.0
    b: float = 2.0
    points: int = 201

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ValueError("grid ends must be finite")
        if self.a < 0:
            raise ValueError("grid start a must be ≥ 0")
        if not self.b > self.a:
            raise ValueError("grid end b must exceed a")
        if int(self.points) != self.points or self.points < 2:
            raise ValueError("grid needs at least 2 points")

    @property
    def h(self) -> float:
        return (self.b - self.a) / (self.points - 1)

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(self.a, self.b, int(self.points))


@dataclass
class BoundReport:
    theorem_id: str
    x: float
    actual: float
    bound: float
    holds: bool
    slack: float = 0.0
    components: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# Moduli
# ---------------------------------------------------------------------------


@lru_cache(maxsize=1024)
def _values(f: TargetFunction, grid: DomainGrid) -> np.ndarray:
    v = f(grid.xs)
    v.setflags(write=False)
    return v


def _lags(delta: float, grid: DomainGrid) -> int:
    # Tolerate representation error in delta / h.
    return int(math.floor(delta / grid.h * (1 + 1e-12)))


def modulus(f: TargetFunction, delta: float, grid: DomainGrid) -> float:
    """Grid modulus of continuity: max ``|f(s) - f(t)|`` over grid pairs with ``|s - t| <= delta``."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    v = _values(f, grid)
    m = min(_lags(delta, grid), v.size - 1)
    if m >= v.size - 1:
        return float(v.max() - v.min())
    best = 0.0
    for lag in range(1, m + 1):
        best = max(best, float(np.abs(v[lag:] - v[:-lag]).max()))
    return best


def second_modulus(f: TargetFunction, delta: float, grid: DomainGrid) -> float:
    """Grid second modulus: max ``|f(x+2s) - 2f(x+s) + f(x)|`` over ``0 < s <= delta``."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    if grid.b - grid.a < 2 * delta * (1 - 1e-12):
        raise ValueError("grid must span at least 2*delta")
    v = _values(f, grid)
    best = 0.0
    for s in range(1, min(_lags(delta, grid), (v.size - 1) // 2) + 1):
        best = max(best, float(np.abs(v[2 * s :] - 2 * v[s:-s] + v[: -2 * s]).max()))
    return best


def _slope(f: TargetFunction, grid: DomainGrid) -> float:
    v = _values(f, grid)
    return float(np.abs(np.diff(v)).max()) / grid.h


def bound_window(upper: float, delta: float, grid: DomainGrid) -> DomainGrid:
    """Window ``[0, B]`` for a modulus with argument ``delta``.

    ``B`` covers ``upper`` and ``grid.b`` plus ``2 delta``, rounded up to a
    power of two so neighbouring evaluation points share one window.  The
    spacing divides ``delta`` exactly, so pairs exactly ``delta`` apart are seen.
    """
    reach = max(upper, grid.b) + 2 * delta
    B = 2.0 ** math.ceil(math.log2(max(reach, 1.0)))
    lags = min(MAX_LAGS, max(LAGS_PER_DELTA, math.ceil(delta / grid.h)))
    h = delta / lags
    steps = int(math.ceil(B / h))
    return DomainGrid(0.0, steps * h, steps + 1)


@lru_cache(maxsize=4096)
def window_modulus(kind: str, f: TargetFunction, delta: float, upper: float, grid: DomainGrid):
    """Modulus over a window standing in for ``[0, inf)``.

    ``kind`` is ``"omega"`` or ``"omega2"``.  Returns the value, the resolution
    allowance and the window used (``None`` for a zero argument).
    """
    if delta <= 0:
        return 0.0, 0.0, None
    win = bound_window(upper, delta, grid)
    value = modulus(f, delta, win) if kind == "omega" else second_modulus(f, delta, win)
    allowance = (2.0 if kind == "omega" else 4.0) * _slope(f, win) * win.h
    return value, allowance, win


def support_upper(cfg: OperatorConfig, x: float) -> float:
    # Round up so that nearby x share cached window moduli.
    top = max(x, operator_weights(cfg, float(x)).node_max)
    return 2.0 ** math.ceil(math.log2(max(top, 1.0)))


def _actual(cfg: OperatorConfig, g: TargetFunction, x: float) -> tuple[float, float]:
    res = apply(cfg, g, x)
    gx = float(g(np.array(float(x))))
    return abs(res.value - gx), res.error


def _sup_norm(g: TargetFunction, upper: float, grid: DomainGrid) -> float:
    if g.sup_norm is not None:
        return g.sup_norm
    win = bound_window(upper, grid.h, grid)
    return float(np.abs(_values(g, win)).max())


# ---------------------------------------------------------------------------
# Bound checks
# ---------------------------------------------------------------------------


def check_lipschitz_bound(cfg: OperatorConfig, h: TargetFunction, x: float) -> BoundReport:
    """``|T_n(h; x) - h(x)| <= M * delta2**(beta/2)`` for ``h`` in Lip_M(beta)."""
    if h.known_lipschitz is None:
        raise ValueError(f"{h.label} carries no Lipschitz data")
    M, beta = h.known_lipschitz
    d1, d2 = central_moments(cfg, x)
    bound = M * d2 ** (beta / 2)
    actual, err = _actual(cfg, h, x)
    slack = REL_SLACK * (1 + abs(bound)) + err
    return BoundReport(
        "T6", x, actual, bound, actual <= bound + slack, slack,
        {"delta1": d1, "delta2": d2, "M": M, "lip_exponent": beta},
    )


def check_omega_bound(cfg: OperatorConfig, g: TargetFunction, x: float, grid: DomainGrid) -> BoundReport:
    """``|T_n(g; x) - g(x)| <= (1 + sqrt(n delta2)) omega(g; 1/sqrt(n))``."""
    n = cfg.n
    delta = 1.0 / math.sqrt(n)
    d1, d2 = central_moments(cfg, x)
    omega, allowance, win = window_modulus("omega", g, delta, support_upper(cfg, x), grid)
    factor = 1.0 + math.sqrt(n * d2)
    bound = factor * omega
    actual, err = _actual(cfg, g, x)
    slack = REL_SLACK * (1 + abs(bound)) + err + factor * allowance
    return BoundReport(
        "T7", x, actual, bound, actual <= bound + slack, slack,
        {"delta1": d1, "delta2": d2, "delta": delta, "omega": omega, "window_b": win.b, "window_h": win.h},
    )


def check_peetre_bound(
    cfg: OperatorConfig, g: TargetFunction, x: float, grid: DomainGrid, M_const: float = 1.0
) -> BoundReport:
    """``2M {min(1, chi/2) ||g|| + omega_2(g; sqrt(chi/2))}`` with ``chi = delta1 + delta2``.

    ``M_const`` stands in for a constant the theory only asserts exists, so
    ``holds`` is informational.
    """
    if not M_const > 0:
        raise ValueError("M_const must be positive")
    d1, d2 = central_moments(cfg, x)
    chi = d1 + d2
    delta = math.sqrt(chi / 2)
    upper = support_upper(cfg, x)
    omega2, allowance, _ = window_modulus("omega2", g, delta, upper, grid)
    norm = _sup_norm(g, upper, grid)
    bound = 2 * M_const * (min(1.0, chi / 2) * norm + omega2)
    actual, err = _actual(cfg, g, x)
    slack = REL_SLACK * (1 + abs(bound)) + err + 2 * M_const * allowance
    return BoundReport(
        "T9", x, actual, bound, actual <= bound + slack, slack,
        {"delta1": d1, "delta2": d2, "chi": chi, "delta": delta, "omega2": omega2, "sup_norm": norm, "M": M_const},
    )


def mixed_bound_arguments(cfg: OperatorConfig, x: float, ratio: float | None = None) -> tuple[float, float]:
    """Arguments of omega_2 and omega in the mixed bound.

    The omega_2 argument uses ``8 x**3 alpha**2`` where delta2 has ``4 x**3 alpha**2``.
    """
    n, a, mu = cfg.n, cfg.alpha, cfg.mu
    if ratio is None:
        ratio = exp_ratio(cfg.p, float(n * x))
    inner = x * (8 * x**3 * a * a + 4 * x * a + n) / n**2 + 2 * mu * x / n * ratio
    return 0.5 * math.sqrt(inner), 2 * a * x * x / n


def check_mixed_bound(
    cfg: OperatorConfig, g: TargetFunction, x: float, grid: DomainGrid, M_const: float = 1.0
) -> BoundReport:
    """``M omega_2(g; delta_a) + omega(g; 2 alpha x**2 / n)``, evaluated verbatim."""
    if not M_const > 0:
        raise ValueError("M_const must be positive")
    delta_a, delta_b = mixed_bound_arguments(cfg, x)
    upper = support_upper(cfg, x)
    omega2, al2, _ = window_modulus("omega2", g, delta_a, upper, grid)
    omega, al1, _ = window_modulus("omega", g, delta_b, upper, grid)
    bound = M_const * omega2 + omega
    actual, err = _actual(cfg, g, x)
    slack = REL_SLACK * (1 + abs(bound)) + err + M_const * al2 + al1
    d1, d2 = central_moments(cfg, x)
    return BoundReport(
        "T10", x, actual, bound, actual <= bound + slack, slack,
        {"delta1": d1, "delta2": d2, "delta_omega2": delta_a, "delta_omega": delta_b,
         "omega2": omega2, "omega": omega, "M": M_const},
    )


# ---------------------------------------------------------------------------
# Convergence sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    n: int
    sup_error: float
    delta2_max: float
    t7_bound_max: float


@dataclass(frozen=True)
class KorovkinRow:
    n: int
    i: int
    sup_error: float


@dataclass
class SweepTable:
    label: str
    rows: list[SweepRow]
    korovkin: list[KorovkinRow]


def convergence_sweep(
    mu: float,
    alpha: float,
    n_list: Sequence[int],
    g: TargetFunction,
    grid: DomainGrid,
    p=None,
) -> SweepTable:
    """Sup-norm error of ``T_n g`` on the grid for each ``n``, with Korovkin rows.

    ``t7_bound_max`` is the largest omega bound over the grid; its modulus is
    taken on one window covering every grid point.
    """
    from .core import DunklParam

    n_list = [int(n) for n in n_list]
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be strictly increasing")
    if p is None:
        p = DunklParam(mu)
    elif p.mu != mu:
        raise ValueError("mu disagrees with the DunklParam given")
    xs = grid.xs
    tests = [power(i) for i in range(3)]
    rows, kor = [], []
    for n in n_list:
        cfg = OperatorConfig(n, alpha, p)
        gx = g(xs)
        err = np.array([abs(apply(cfg, g, float(x)).value - gx[j]) for j, x in enumerate(xs)])
        d2 = max(central_moments(cfg, float(x))[1] for x in xs)
        upper = max(support_upper(cfg, float(x)) for x in xs)
        omega, _, _ = window_modulus("omega", g, 1.0 / math.sqrt(n), upper, grid)
        rows.append(SweepRow(n, float(err.max()), d2, (1.0 + math.sqrt(n * d2)) * omega))
        for i, e in enumerate(tests):
            ex = e(xs)
            worst = max(abs(apply(cfg, e, float(x)).value - ex[j]) for j, x in enumerate(xs))
            kor.append(KorovkinRow(n, i, float(worst)))
    return SweepTable(g.label, rows, kor)

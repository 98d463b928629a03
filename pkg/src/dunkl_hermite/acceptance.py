"""The acceptance suite: one function per criterion, each returning a verdict.

Both ``selftest`` and ``tests/test_acceptance.py`` run these, so the two
always agree on what passes.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from . import config, oracles
from .analysis import (
    DomainGrid,
    check_lipschitz_bound,
    check_mixed_bound,
    check_omega_bound,
    check_peetre_bound,
    convergence_sweep,
    support_upper,
    window_modulus,
)
from .core import (
    DunklParam,
    Polynomial,
    dunkl_derivative,
    dunkl_exp,
    dunkl_exp_ratio,
    gamma_nu_ratio,
    log_gamma_nu,
)
from .corpus import CORPUS
from .hermite import gf_check
from .operators import OperatorConfig, apply, central_moments, closed_moments, moments

__all__ = ["Verdict", "Settings", "CRITERIA", "run_all", "format_line"]


@dataclass(frozen=True)
class Verdict:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float


@dataclass(frozen=True)
class Settings:
    grid_points: int = config.DEFAULT_POINTS
    mus: tuple[float, ...] = config.STANDARD_MU

    def __post_init__(self):
        if self.grid_points < 2:
            raise ValueError("grid points must be at least 2")
        if any(not (math.isfinite(m) and m >= 0) for m in self.mus):
            raise ValueError("mu must be ≥ 0")

    @property
    def sweep_grid(self) -> DomainGrid:
        return DomainGrid(config.SWEEP_A, config.SWEEP_B, self.grid_points)


def _configs(s: Settings):
    for n, mu, a in itertools.product(config.STANDARD_N, s.mus, config.STANDARD_ALPHA):
        yield OperatorConfig(n, a, DunklParam(mu))


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(1.0, abs(b))


# ---------------------------------------------------------------------------
# Criteria
# ---------------------------------------------------------------------------


def moment_identities(s: Settings):
    """Series-summed T_n(t**i) against closed forms; relative 1e-9, under 10 s."""
    t0 = time.perf_counter()
    worst = 0.0
    for cfg in _configs(s):
        for x in config.STANDARD_X:
            r = moments(cfg, x)
            for closed, series in ((r.m0, r.m0_s), (r.m1, r.m1_s), (r.m2, r.m2_s)):
                gap = abs(series - closed) / abs(closed) if closed else abs(series)
                tol = 1e-9 if closed else 1e-12
                worst = max(worst, gap / tol)
    dt = time.perf_counter() - t0
    return worst <= 1.0 and dt < 10.0, f"worst gap/tol {worst:.3g}, {dt:.2f} s"


def central_moment_identities(s: Settings):
    """delta1, delta2 equal the moment combinations; delta2 >= 0."""
    worst, negative = 0.0, 0
    for cfg in _configs(s):
        for x in config.STANDARD_X:
            d1, d2 = central_moments(cfg, x)
            _, m1, m2, _ = closed_moments(cfg, x)
            for closed, combo in ((d1, m1 - x), (d2, m2 - 2 * x * m1 + x * x)):
                gap = abs(combo - closed) / abs(closed) if closed else abs(combo) / 1e-12 * 1e-10
                worst = max(worst, gap)
            negative += d2 < 0
    ok = worst <= 1e-10 and negative == 0
    return ok, f"worst relative gap {worst:.3g}, negative delta2 {negative}"


def reductions(s: Settings):
    """mu = 0 against Krech's operators, alpha = 0 against S_n*, both against Poisson sums."""
    fns = list(CORPUS.values())
    worst = {"krech": 0.0, "szasz": 0.0, "poisson": 0.0}
    for n, a, x in itertools.product(config.STANDARD_N, config.STANDARD_ALPHA, config.STANDARD_X):
        cfg = OperatorConfig(n, a, DunklParam(0.0))
        for f in fns:
            worst["krech"] = max(worst["krech"], _rel(apply(cfg, f, x).value, oracles.krech_operator(n, a, f, x)))
    for n, mu, x in itertools.product(config.STANDARD_N, s.mus, config.STANDARD_X):
        cfg = OperatorConfig(n, 0.0, DunklParam(mu))
        for f in fns:
            worst["szasz"] = max(worst["szasz"], _rel(apply(cfg, f, x).value, oracles.dunkl_szasz(n, mu, f, x)))
            if mu == 0:
                worst["poisson"] = max(worst["poisson"], _rel(apply(cfg, f, x).value, oracles.poisson_szasz(n, f, x)))
    ok = max(worst.values()) <= 1e-12
    return ok, ", ".join(f"{k} {v:.3g}" for k, v in worst.items())


def dunkl_kernel(s: Settings):
    """Factorial recursion vs closed form, e_0 = exp, ratio vs exact oracle."""
    mus = sorted(set(s.mus) | {0.0, 0.25, 0.5, 1.0, 2.0, 5.0})
    g_gap = 0.0
    for mu in mus:
        p = DunklParam(mu)
        g = 1.0
        for k in range(41):
            g_gap = max(g_gap, abs(g - math.exp(log_gamma_nu(p, k))) / g)
            g *= gamma_nu_ratio(p, k)
    # The default eps_cancel lets negative arguments carry up to 1e-8 relative
    # error; asking for 1e-12 means tightening it so the sum escalates.
    p0 = DunklParam(0.0, eps_cancel=1e-13)
    e_gap = 0.0
    for x in np.linspace(-10.0, 10.0, 201):
        e_gap = max(e_gap, abs(dunkl_exp(p0, float(x)).value - math.exp(x)) / math.exp(x))
    r_gap = 0.0
    for mu in s.mus:
        for y in (0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 35.0, 50.0):
            exact = float(oracles.rational_exp_ratio(Fraction(mu), Fraction(y)))
            r_gap = max(r_gap, abs(dunkl_exp_ratio(DunklParam(mu), y).value - exact))
    ok = g_gap <= 1e-12 and e_gap <= 1e-12 and r_gap <= 1e-10
    return ok, f"gamma {g_gap:.3g}, e_0 {e_gap:.3g}, ratio {r_gap:.3g}"


def generating_functions(s: Settings):
    """Generating function and its first two t-derivatives on the lattice; under 20 s."""
    t0 = time.perf_counter()
    worst = 0.0
    for mu, xi, a, t, order in itertools.product(
        config.GF_MU, config.GF_XI, config.GF_ALPHA, config.GF_T, (0, 1, 2)
    ):
        worst = max(worst, gf_check(DunklParam(mu), order, xi, a, t).abs_gap)
    dt = time.perf_counter() - t0
    return worst <= 1e-9 and dt < 20.0, f"worst abs_gap {worst:.3g}, {dt:.2f} s"


def _direct_dunkl(mu: float, q: Polynomial, x: np.ndarray) -> np.ndarray:
    """``q'(x) + mu/x (q(x) - q(-x))`` evaluated pointwise."""
    dq = np.polynomial.polynomial.polyder(q.coeffs) if q.degree > 0 else [0.0]
    return np.polynomial.polynomial.polyval(x, dq) + mu / x * (q(x) - q(-x))


def _coef_gap(a: Polynomial, b: Polynomial) -> float:
    n = max(len(a.coeffs), len(b.coeffs))
    ca = np.array(a.coeffs + (0.0,) * (n - len(a.coeffs)))
    cb = np.array(b.coeffs + (0.0,) * (n - len(b.coeffs)))
    scale = max(np.abs(cb).max(initial=0.0), 1e-300)
    return float(np.abs(ca - cb).max(initial=0.0) / scale)


def dunkl_derivative_rules(s: Settings):
    """Monomial mapping, product rule with an even factor, truncated eigenfunction."""
    rng = np.random.default_rng(0)
    xs = np.array([0.3, 0.7, 1.3, 2.1])
    worst = 0.0
    for mu in sorted(set(s.mus) | {1.0}):
        p = DunklParam(mu)
        for n in range(1, 9):
            d = dunkl_derivative(p, Polynomial.monomial(n))
            expected = math.exp(log_gamma_nu(p, n) - log_gamma_nu(p, n - 1))
            worst = max(worst, _coef_gap(d, Polynomial.monomial(n - 1, expected)))
            direct = _direct_dunkl(mu, Polynomial.monomial(n), xs)
            worst = max(worst, float(np.max(np.abs(d(xs) - direct) / np.abs(direct))))
        for deg_phi in range(0, 9, 2):
            for deg_psi in range(0, 9 - deg_phi):
                phi_c = rng.uniform(-1, 1, deg_phi + 1)
                phi_c[1::2] = 0.0
                phi = Polynomial(phi_c)
                psi = Polynomial(rng.uniform(-1, 1, deg_psi + 1))
                lhs = dunkl_derivative(p, phi * psi)
                rhs = dunkl_derivative(p, phi) * psi + phi * dunkl_derivative(p, psi)
                worst = max(worst, _coef_gap(lhs, rhs))
        for lam in (0.5, -1.5, 3.0):
            for N in range(1, 9):
                series = [lam**k / math.exp(log_gamma_nu(p, k)) for k in range(N + 1)]
                lhs = dunkl_derivative(p, Polynomial(series))
                worst = max(worst, _coef_gap(lhs, Polynomial(series[:N]) * lam))
    return worst <= 1e-12, f"worst relative gap {worst:.3g}"


def hard_bounds(s: Settings):
    """Lipschitz bound on abs1/sqrtabs1, omega bound on the corpus; no violations."""
    grid = s.sweep_grid
    checks = violations = 0
    worst_ratio = 0.0
    for cfg in _configs(s):
        for x in config.STANDARD_X:
            for label in ("abs1", "sqrtabs1"):
                r = check_lipschitz_bound(cfg, CORPUS[label], x)
                checks += 1
                violations += not r.holds
            for f in CORPUS.values():
                r = check_omega_bound(cfg, f, x, grid)
                checks += 1
                violations += not r.holds
                if r.bound > 0:
                    worst_ratio = max(worst_ratio, r.actual / r.bound)
    return violations == 0, f"{violations} violations in {checks} checks, worst actual/bound {worst_ratio:.3g}"


def convergence(s: Settings):
    """sup_error(160) < sup_error(10)/4 per corpus function and (mu, alpha); 2/n for t**2."""
    grid = s.sweep_grid
    lo, hi = config.SWEEP_N[0], config.SWEEP_N[-1]
    failures = []
    for f, mu, a in itertools.product(CORPUS.values(), s.mus, config.STANDARD_ALPHA):
        rows = convergence_sweep(mu, a, config.SWEEP_N, f, grid).rows
        e_lo, e_hi = rows[0].sup_error, rows[-1].sup_error
        # Functions reproduced exactly sit at rounding level for every n.
        if not (e_hi < e_lo / 4 or max(e_lo, e_hi) <= 1e-12):
            failures.append(f"{f.label}(mu={mu:g},alpha={a:g}) {e_hi / e_lo:.3f}")
    classical = convergence_sweep(0.0, 0.0, (10, 20, 40, 80, 160), CORPUS["square"], grid).rows
    exact_gap = max(abs(r.sup_error - grid.b / r.n) for r in classical)
    ok = not failures and exact_gap <= 1e-10
    head = f"classical t^2 gap {exact_gap:.3g}; {len(failures)} ratio failures"
    return ok, head + (": " + "; ".join(failures) if failures else "")


def _krech_mixed_bound(cfg: OperatorConfig, g, x: float, grid: DomainGrid, M_const: float) -> float:
    """The mixed bound rebuilt from Krech's central moments."""
    d1, d2 = oracles.krech_central_moments(cfg.n, cfg.alpha, x)
    # The omega_2 argument doubles the alpha**2 term of delta2.
    delta_a = 0.5 * math.sqrt(d2 + 4 * x**4 * cfg.alpha**2 / cfg.n**2)
    upper = support_upper(cfg, x)
    omega2 = window_modulus("omega2", g, delta_a, upper, grid)[0]
    omega = window_modulus("omega", g, d1, upper, grid)[0]
    return M_const * omega2 + omega


def peetre_and_mixed(s: Settings):
    """chi = delta1 + delta2 in the reports; mu = 0 mixed bound agrees with Krech's form."""
    grid = s.sweep_grid
    chi_gap = krech_gap = 0.0
    for cfg in _configs(s):
        for x in config.STANDARD_X:
            for f in CORPUS.values():
                r = check_peetre_bound(cfg, f, x, grid)
                c = r.components
                chi_gap = max(chi_gap, abs(c["chi"] - (c["delta1"] + c["delta2"])))
                d1, d2 = central_moments(cfg, x)
                chi_gap = max(chi_gap, _rel(c["chi"], d1 + d2))
                if cfg.mu == 0:
                    m = check_mixed_bound(cfg, f, x, grid)
                    krech_gap = max(krech_gap, _rel(m.bound, _krech_mixed_bound(cfg, f, x, grid, 1.0)))
    ok = chi_gap <= 1e-12 and krech_gap <= 1e-10
    return ok, f"chi gap {chi_gap:.3g}, mu=0 mixed bound gap {krech_gap:.3g}"


CRITERIA: list[tuple[int, str, Callable[[Settings], tuple[bool, str]]]] = [
    (1, "moment identities", moment_identities),
    (2, "central moments", central_moment_identities),
    (3, "reductions", reductions),
    (4, "Dunkl kernel", dunkl_kernel),
    (5, "generating functions", generating_functions),
    (6, "Dunkl derivative", dunkl_derivative_rules),
    (7, "hard bound checks", hard_bounds),
    (8, "convergence", convergence),
    (9, "Peetre and mixed bound reports", peetre_and_mixed),
]

SELFTEST_LIMIT = 60.0


def run_criterion(number: int, settings: Optional[Settings] = None) -> Verdict:
    settings = settings or Settings()
    _, name, fn = next(c for c in CRITERIA if c[0] == number)
    t0 = time.perf_counter()
    try:
        ok, detail = fn(settings)
    except Exception as exc:  # a crash is a failure, reported on its line
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return Verdict(number, name, bool(ok), detail, time.perf_counter() - t0)


def run_all(settings: Optional[Settings] = None, emit: Optional[Callable[[str], None]] = None) -> list[Verdict]:
    """Run criteria 1 to 9, then the end-to-end verdict on the whole run."""
    settings = settings or Settings()
    t0 = time.perf_counter()
    out = []
    for number, _, _ in CRITERIA:
        v = run_criterion(number, settings)
        out.append(v)
        if emit:
            emit(format_line(v))
    total = time.perf_counter() - t0
    ok = all(v.passed for v in out) and total < SELFTEST_LIMIT
    failed = [str(v.number) for v in out if not v.passed]
    detail = f"{total:.2f} s" + (f", failed: {','.join(failed)}" if failed else "")
    end = Verdict(10, "end-to-end", ok, detail, total)
    out.append(end)
    if emit:
        emit(format_line(end))
    return out


def format_line(v: Verdict) -> str:
    return f"{'PASS' if v.passed else 'FAIL'} [{v.number:2d}] {v.name}: {v.detail} ({v.seconds:.2f} s)"

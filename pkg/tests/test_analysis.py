import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dunkl_hermite.analysis import (
    DomainGrid,
    bound_window,
    check_lipschitz_bound,
    check_mixed_bound,
    check_omega_bound,
    check_peetre_bound,
    convergence_sweep,
    mixed_bound_arguments,
    modulus,
    second_modulus,
    window_modulus,
)
from dunkl_hermite.core import DunklParam
from dunkl_hermite.corpus import CORPUS
from dunkl_hermite.operators import OperatorConfig, TargetFunction, central_moments

GRID = DomainGrid(0.0, 2.0, 201)
const = TargetFunction(lambda t: np.full_like(t, 3.0), "c", known_lipschitz=(1.0, 1.0), sup_norm=3.0)
affine = TargetFunction(lambda t: 2.0 * t - 1.0, "affine", growth_degree=1, growth_const=2.0)
ident = CORPUS["id"]
square = CORPUS["square"]

bounded = st.sampled_from(["one", "sin", "exp_neg", "runge"])
any_label = st.sampled_from(list(CORPUS))


class TestDomainGrid:
    def test_defaults(self):
        g = DomainGrid()
        assert (g.a, g.b, g.points) == (0.0, 2.0, 201)
        assert g.h == pytest.approx(0.01)
        assert g.xs[-1] == 2.0

    @pytest.mark.parametrize("a, b, points", [(-1, 2, 10), (2, 2, 10), (0, 2, 1), (0, math.inf, 10)])
    def test_invalid(self, a, b, points):
        with pytest.raises(ValueError):
            DomainGrid(a, b, points)


class TestModuli:
    def test_constant(self):
        assert modulus(const, 0.4, GRID) == 0.0
        assert second_modulus(const, 0.4, GRID) == 0.0

    def test_identity(self):
        assert modulus(ident, 0.3, GRID) == pytest.approx(0.3, abs=GRID.h)

    def test_square(self):
        # brute force over every grid pair
        v = GRID.xs**2
        d = np.abs(GRID.xs[:, None] - GRID.xs[None, :])
        brute = np.abs(v[:, None] - v[None, :])[d <= 0.5 + 1e-12].max()
        got = modulus(square, 0.5, GRID)
        assert got == brute
        assert got == pytest.approx(0.5 * 3.5, abs=2 * GRID.h)

    def test_affine_second_modulus(self):
        assert second_modulus(affine, 0.7, GRID) == pytest.approx(0.0, abs=1e-14)

    def test_square_second_modulus(self):
        assert second_modulus(square, 0.5, GRID) == pytest.approx(2 * 0.25, abs=1e-12)

    def test_full_oscillation_beyond_span(self):
        assert modulus(CORPUS["sin"], 10.0, GRID) == pytest.approx(1.0 - 0.0, abs=1e-4)

    def test_argument_checks(self):
        with pytest.raises(ValueError):
            modulus(ident, 0.0, GRID)
        with pytest.raises(ValueError):
            second_modulus(ident, 1.5, GRID)

    @given(label=any_label, d1=st.floats(0.01, 1.0), d2=st.floats(0.01, 1.0))
    @settings(max_examples=60)
    def test_monotone(self, label, d1, d2):
        f = CORPUS[label]
        lo, hi = sorted((d1, d2))
        assert modulus(f, lo, GRID) <= modulus(f, hi, GRID)
        assert second_modulus(f, lo / 2, GRID) <= second_modulus(f, hi / 2, GRID)

    @given(label=bounded, delta=st.floats(0.01, 1.0))
    @settings(max_examples=40)
    def test_second_modulus_bounded_by_sup(self, label, delta):
        f = CORPUS[label]
        assert second_modulus(f, delta, GRID) <= 4 * f.sup_norm
        assert second_modulus(f, delta, GRID) <= 2 * modulus(f, delta, GRID) + 1e-15

    @given(label=st.sampled_from(["abs1", "sqrtabs1", "sin", "runge"]), delta=st.floats(0.01, 1.0))
    @settings(max_examples=40)
    def test_lipschitz_controls_modulus(self, label, delta):
        f = CORPUS[label]
        M, beta = f.known_lipschitz
        assert modulus(f, delta, GRID) <= M * delta**beta * (1 + 1e-12)

    def test_window_spacing_divides_delta(self):
        for delta in (0.1, 1 / math.sqrt(7), 0.9):
            win = bound_window(5.0, delta, GRID)
            lags = delta / win.h
            assert abs(lags - round(lags)) < 1e-9 and 32 <= round(lags) <= 64
            assert win.b >= 5.0 + 2 * delta and win.a == 0.0

    def test_window_modulus_zero_argument(self):
        assert window_modulus("omega", ident, 0.0, 4.0, GRID) == (0.0, 0.0, None)


class TestHardBounds:
    def test_lipschitz_identity(self):
        cfg = OperatorConfig(25)
        r = check_lipschitz_bound(cfg, ident, 1.0)
        assert r.bound == pytest.approx(math.sqrt(1.0 / 25), rel=1e-14)
        assert r.actual == pytest.approx(0.0, abs=1e-14) and r.holds

    def test_lipschitz_abs1_example(self):
        r = check_lipschitz_bound(OperatorConfig(50, 1.0, DunklParam(0.5)), CORPUS["abs1"], 1.0)
        assert r.holds and r.theorem_id == "T6"

    def test_lipschitz_constant(self):
        r = check_lipschitz_bound(OperatorConfig(5, 1.0, DunklParam(2.0)), const, 0.7)
        assert r.actual == pytest.approx(0.0, abs=1e-14) and r.holds

    def test_lipschitz_needs_metadata(self):
        with pytest.raises(ValueError):
            check_lipschitz_bound(OperatorConfig(5), square, 1.0)

    def test_omega_constant(self):
        r = check_omega_bound(OperatorConfig(9, 1.0, DunklParam(1.0)), const, 1.0, GRID)
        assert r.actual == pytest.approx(0.0, abs=1e-14) and r.bound >= 0 and r.holds

    def test_omega_identity_example(self):
        r = check_omega_bound(OperatorConfig(100), ident, 1.0, GRID)
        assert r.actual == pytest.approx(0.0, abs=1e-14)
        assert r.bound == pytest.approx(0.2, rel=1e-12)
        assert r.holds

    def test_omega_sin_example(self):
        r = check_omega_bound(OperatorConfig(25, 0.5, DunklParam(1.0)), CORPUS["sin"], 0.5, GRID)
        assert r.holds and 0 < r.actual / r.bound < 1

    @given(
        n=st.integers(1, 120),
        mu=st.sampled_from([0.0, 0.5, 2.0]),
        alpha=st.sampled_from([0.0, 1.0, 5.0]),
        x=st.floats(0.0, 5.0),
        label=any_label,
    )
    @settings(max_examples=80, deadline=None)
    def test_omega_bound_holds(self, n, mu, alpha, x, label):
        r = check_omega_bound(OperatorConfig(n, alpha, DunklParam(mu)), CORPUS[label], x, GRID)
        assert r.holds, r

    @given(
        n=st.integers(1, 120),
        mu=st.sampled_from([0.0, 0.5, 2.0]),
        alpha=st.sampled_from([0.0, 1.0, 5.0]),
        x=st.floats(0.0, 5.0),
        label=st.sampled_from(["abs1", "sqrtabs1", "sin", "runge", "exp_neg"]),
    )
    @settings(max_examples=80, deadline=None)
    def test_lipschitz_bound_holds(self, n, mu, alpha, x, label):
        assert check_lipschitz_bound(OperatorConfig(n, alpha, DunklParam(mu)), CORPUS[label], x).holds


class TestReports:
    def test_peetre_components(self):
        cfg = OperatorConfig(50, 1.0, DunklParam(0.5))
        r = check_peetre_bound(cfg, CORPUS["runge"], 1.0, GRID)
        d1, d2 = central_moments(cfg, 1.0)
        assert r.components["chi"] == d1 + d2
        assert r.components["delta"] == pytest.approx(math.sqrt((d1 + d2) / 2))
        assert r.theorem_id == "T9" and isinstance(r.holds, bool)

    def test_peetre_constant_and_affine(self):
        r = check_peetre_bound(OperatorConfig(10, 0.0, DunklParam(1.0)), const, 1.0, GRID)
        assert r.actual == pytest.approx(0.0, abs=1e-14) and r.holds
        r = check_peetre_bound(OperatorConfig(10, 0.0, DunklParam(1.0)), affine, 1.0, GRID)
        assert r.actual == pytest.approx(0.0, abs=1e-13) and r.bound >= 0

    def test_peetre_needs_positive_constant(self):
        with pytest.raises(ValueError):
            check_peetre_bound(OperatorConfig(10), const, 1.0, GRID, M_const=0.0)

    def test_mixed_arguments(self):
        cfg = OperatorConfig(10, 1.0)
        da, db = mixed_bound_arguments(cfg, 1.0)
        assert db == pytest.approx(0.2)
        assert da == pytest.approx(0.5 * math.sqrt((8 + 4 + 10) / 100))

    def test_mixed_report(self):
        r = check_mixed_bound(OperatorConfig(100, 1.0, DunklParam(2.0)), CORPUS["exp_neg"], 0.5, GRID)
        for key in ("omega2", "omega", "delta_omega2", "delta_omega", "M"):
            assert key in r.components
        assert r.theorem_id == "T10"

    def test_mixed_constant(self):
        r = check_mixed_bound(OperatorConfig(7, 2.0, DunklParam(0.5)), const, 1.3, GRID)
        assert r.actual == pytest.approx(0.0, abs=1e-14)

    def test_mixed_zero_alpha_has_no_omega_term(self):
        r = check_mixed_bound(OperatorConfig(20), CORPUS["sin"], 1.0, GRID)
        assert r.components["delta_omega"] == 0.0 and r.components["omega"] == 0.0


class TestSweep:
    def test_constant_and_identity(self):
        for g, a in ((CORPUS["one"], 1.0), (ident, 0.0)):
            table = convergence_sweep(0.5, a, [5, 10], g, DomainGrid(0, 2, 21))
            assert all(r.sup_error <= 1e-12 for r in table.rows)

    def test_classical_square(self):
        grid = DomainGrid(0.0, 1.0, 11)
        table = convergence_sweep(0.0, 0.0, [10, 20, 40], square, grid)
        for r in table.rows:
            assert r.sup_error == pytest.approx(1.0 / r.n, abs=1e-12)

    def test_runge_decreasing(self):
        table = convergence_sweep(0.5, 1.0, [10, 20, 40, 80, 160], CORPUS["runge"], DomainGrid(0, 2, 41))
        errs = [r.sup_error for r in table.rows]
        assert all(b < a for a, b in zip(errs, errs[1:]))
        kor = {(k.n, k.i): k.sup_error for k in table.korovkin}
        assert kor[(160, 0)] <= 1e-12
        assert kor[(160, 2)] < kor[(10, 2)]

    def test_needs_increasing_n(self):
        with pytest.raises(ValueError):
            convergence_sweep(0.0, 0.0, [10, 10], square, GRID)

    def test_mu_mismatch(self):
        with pytest.raises(ValueError):
            convergence_sweep(0.0, 0.0, [10], square, GRID, p=DunklParam(1.0))

import numpy as np
import pytest

from waveblow.dalembert import (
    GridField,
    QuadratureConfig,
    duhamel_integral,
    duhamel_time_derivative,
    free_solution,
)
from waveblow.model import (
    InitialData,
    MixedDerivativeTerm,
    PowerTerm,
    ProblemSpec,
    symmetric_data,
)
from waveblow.picard import (
    PicardDivergedError,
    WeightedPair,
    displacement_norm,
    integral_residual,
    picard_step,
    run_picard,
    velocity_norm,
)
from waveblow.solver import GridConfig, solve

R = 2.0


def axes(h=0.1, horizon=2.0):
    n_t = int(round(horizon / h)) + 1
    ts = np.arange(n_t) * h
    n_half = int(np.ceil((horizon + R + 2 * h) / h)) + 1
    xs = np.arange(-n_half, n_half + 1) * h
    return xs, ts


class TestNorms:
    def test_zero_field(self):
        xs, ts = axes()
        Z = np.zeros((ts.size, xs.size))
        assert displacement_norm(Z, xs, ts, R) == 0.0
        assert velocity_norm(Z, xs, ts, R) == 0.0

    def test_weight_cancels(self):
        xs, ts = axes()
        T, X = np.meshgrid(ts, xs, indexing="ij")
        U = T + np.abs(X) + R
        assert displacement_norm(U, xs, ts, R) == pytest.approx(1.0, rel=1e-14)

    def test_single_peak(self):
        xs, ts = axes()
        U = np.zeros((ts.size, xs.size))
        it, ix = 5, 3
        U[it, ix] = 7.0
        expected = 7.0 / (ts[it] + abs(xs[ix]) + R)
        assert displacement_norm(U, xs, ts, R) == pytest.approx(expected, rel=1e-14)

    def test_velocity_norm_flat_inside_interior(self):
        xs, ts = axes(h=0.1, horizon=6.0)
        T, X = np.meshgrid(ts, xs, indexing="ij")
        V = np.where(T - np.abs(X) >= R, 1.0, 0.0)
        assert velocity_norm(V, xs, ts, R) == pytest.approx(1.0)

    def test_velocity_norm_exterior_peak(self):
        xs, ts = axes()
        V = np.zeros((ts.size, xs.size))
        it = 2  # t = 0.2, far outside the interior region
        ix = int(np.argmin(np.abs(xs - 1.0)))
        V[it, ix] = 3.0
        expected = 3.0 / (ts[it] + abs(xs[ix]) + R)
        assert velocity_norm(V, xs, ts, R) == pytest.approx(expected, rel=1e-14)


class TestStep:
    def make_free(self, spec, xs, ts):
        T, X = np.meshgrid(ts, xs, indexing="ij")
        return free_solution(spec.data, spec.epsilon, X, T)

    def test_zero_source_is_fixed_point(self):
        data = symmetric_data(f_amplitude=1.0)
        spec = ProblemSpec(terms=(), data=data, epsilon=0.5)
        xs, ts = axes()
        fu, fut = self.make_free(spec, xs, ts)
        prev = WeightedPair(np.zeros_like(fu), np.zeros_like(fu), xs, ts, R)
        new = picard_step(prev, spec, fu, fut)
        assert np.max(np.abs(new.U)) == 0.0
        assert np.max(np.abs(new.V)) == 0.0

    def test_first_step_matches_pointwise_quadrature(self):
        data = symmetric_data(f_amplitude=1.0, g_amplitude=0.5, g_width=0.8)
        spec = ProblemSpec(terms=(PowerTerm(r=3.0),), data=data, epsilon=0.4)
        h = 0.05
        xs, ts = axes(h=h, horizon=1.5)
        fu, fut = self.make_free(spec, xs, ts)
        prev = WeightedPair(np.zeros_like(fu), np.zeros_like(fu), xs, ts, R)
        new = picard_step(prev, spec, fu, fut)

        src = np.abs(fu) ** 3
        field = GridField(src, xs, ts, R)
        quad = QuadratureConfig(h=h)
        rng = np.random.default_rng(1)
        for _ in range(25):
            it = int(rng.integers(1, ts.size))
            ix = int(rng.integers(xs.size // 4, 3 * xs.size // 4))
            ref = duhamel_integral(field, xs[ix], ts[it], quad)
            assert new.U[it, ix] == pytest.approx(ref, abs=5e-4)
            ref_t = duhamel_time_derivative(field, xs[ix], ts[it], quad)
            assert new.V[it, ix] == pytest.approx(ref_t, abs=5e-4)

    def test_tiny_epsilon_converges_immediately(self):
        data = symmetric_data(f_amplitude=1.0)
        spec = ProblemSpec(terms=(PowerTerm(r=3.0),), data=data, epsilon=1e-8)
        res = run_picard(spec, horizon=1.0, h=0.1)
        assert res.report.converged
        assert res.report.steps <= 2


class TestRun:
    BENCH = ProblemSpec(
        terms=(PowerTerm(r=3.0),),
        data=symmetric_data(f_amplitude=1.0, g_amplitude=0.5, g_width=0.8),
        epsilon=0.3,
    )

    def test_contracts_below_lifespan(self):
        res = run_picard(self.BENCH, horizon=2.0, h=0.05)
        rep = res.report
        assert rep.converged
        assert all(r < 1.0 for r in rep.contraction_ratios)
        # a priori boundedness: iterates stay at the scale of the first image
        assert max(rep.u_norms) <= 3.0 * rep.u_norms[0]
        assert max(rep.v_norms) <= 3.0 * rep.v_norms[0]

    def test_derivative_norms_tracked(self):
        res = run_picard(self.BENCH, horizon=1.0, h=0.1)
        rep = res.report
        assert len(rep.ux_norms) == rep.steps
        assert len(rep.vx_norms) == rep.steps
        assert len(rep.contraction_ratios) == rep.steps - 1

    @pytest.mark.parametrize(
        "spec,horizon",
        [
            (BENCH, 2.0),
            (
                ProblemSpec(
                    terms=(PowerTerm(r=2.0),),
                    data=symmetric_data(f_amplitude=0.8, g_amplitude=0.3, g_width=0.6),
                    epsilon=0.25,
                ),
                1.5,
            ),
            (
                ProblemSpec(
                    terms=(MixedDerivativeTerm(p=2.0, q=0.0), PowerTerm(r=3.0)),
                    data=symmetric_data(f_amplitude=1.0, g_amplitude=0.5, g_width=0.8),
                    epsilon=0.25,
                ),
                1.5,
            ),
        ],
        ids=["power-r3", "power-r2", "mixed+power"],
    )
    def test_matches_grid_solver(self, spec, horizon):
        h = 0.05
        res = run_picard(spec, horizon=horizon, h=h)
        assert res.report.converged
        sol = solve(spec, GridConfig(h=h, t_max=horizon))
        u_fd = np.interp(res.xs, sol.xs, sol.u_cur)
        err = np.max(np.abs(res.u[-1] - u_fd))
        assert err <= 50.0 * h**2

    def test_integral_residual_small(self):
        h = 0.05
        res = run_picard(self.BENCH, horizon=2.0, h=h)
        resid = integral_residual(res, self.BENCH, n_sample=40, seed=3)
        assert resid <= 10.0 * h**2

    def test_diverges_beyond_lifespan(self):
        spec = ProblemSpec(
            terms=(PowerTerm(r=3.0),),
            data=symmetric_data(f_amplitude=1.0, g_amplitude=1.0),
            epsilon=1.5,
        )
        with pytest.raises(PicardDivergedError):
            run_picard(spec, horizon=6.0, h=0.1, max_steps=40)

    def test_zero_data_fixed_point(self):
        data = InitialData(f_bumps=(), g_bumps=(), radius=2.0)
        spec = ProblemSpec(terms=(PowerTerm(r=3.0),), data=data, epsilon=0.3)
        res = run_picard(spec, horizon=1.0, h=0.1)
        assert res.report.converged and res.report.steps == 1
        assert np.max(np.abs(res.u)) == 0.0

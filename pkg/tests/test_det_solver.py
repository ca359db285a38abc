"""Tests for the deterministic fixed-point solver.

Oracles: closed-form solutions of the scalar integral equations (t,
t^2/2, e^t, cos t), exact Gaussian smoothing of sines, d'Alembert
averages, and structural facts (light-cone support, spatial-constancy
preservation, contraction of the iteration).
"""

import math

import numpy as np
import pytest

from fracfield import (DriftSpec, EquationKind, GridFunction, InitialData,
                       MaxIterExceededError, PointGrid, drift_truncate,
                       initial_term, initial_term_grid, make_drift,
                       make_initial_data, ode_oracle, picard_apply, solve_F)

HEAT = EquationKind.HEAT
WAVE = EquationKind.WAVE


def const_field(grid, value):
    return GridFunction(grid=grid,
                        values=np.full((grid.n_t + 1, grid.n_x + 1),
                                       float(value)))


def heat_grid(n_t=200):
    return PointGrid(horizon=1.0, half_width=0.5, n_t=n_t, n_x=8)


def wave_grid(n_t=100, n_x=16):
    # dx == dt == 1/n_t when half_width = n_x / (2 n_t).
    return PointGrid(horizon=1.0, half_width=0.5 * n_x / n_t,
                     n_t=n_t, n_x=n_x)


# Clipped identity drift: b(z) = z wherever |z| <= 10, declared bounded
# so the heat solver accepts it.
BLIN = drift_truncate(make_drift("linear", a=1.0), 10.0)


class TestPointGrid:
    def test_spacings_and_nodes(self):
        g = PointGrid(horizon=2.0, half_width=1.0, n_t=4, n_x=8)
        assert g.dt == 0.5
        assert g.dx == 0.25
        assert np.array_equal(g.times(), np.linspace(0.0, 2.0, 5))
        assert np.array_equal(g.positions(), np.linspace(-1.0, 1.0, 9))
        pts = g.points()
        assert len(pts) == 45
        assert pts[0] == (0.0, -1.0)
        assert pts[-1] == (2.0, 1.0)

    def test_alignment_flag(self):
        assert wave_grid().is_aligned
        assert not PointGrid(horizon=1.0, half_width=1.0,
                             n_t=10, n_x=10).is_aligned

    @pytest.mark.parametrize("kwargs", [
        dict(horizon=0.0, half_width=1.0, n_t=4, n_x=4),
        dict(horizon=1.0, half_width=-1.0, n_t=4, n_x=4),
        dict(horizon=1.0, half_width=1.0, n_t=1, n_x=4),
        dict(horizon=1.0, half_width=1.0, n_t=4, n_x=0),
    ])
    def test_invalid_grid_rejected(self, kwargs):
        with pytest.raises(ValueError):
            PointGrid(**kwargs)


class TestGridFunction:
    def test_shape_mismatch_rejected(self):
        g = heat_grid(n_t=4)
        with pytest.raises(ValueError):
            GridFunction(grid=g, values=np.zeros((3, 3)))

    def test_non_finite_rejected(self):
        g = heat_grid(n_t=4)
        vals = np.zeros((5, 9))
        vals[2, 2] = np.inf
        with pytest.raises(ValueError):
            GridFunction(grid=g, values=vals)


class TestDriftSpec:
    def test_understated_lipschitz_rejected(self):
        with pytest.raises(ValueError):
            DriftSpec(func=lambda z: 2.0 * np.asarray(z, dtype=float),
                      lipschitz_constant=1.0)

    def test_understated_bound_rejected(self):
        with pytest.raises(ValueError):
            DriftSpec(func=np.tanh, lipschitz_constant=1.0, bound=0.5)

    def test_negative_metadata_rejected(self):
        with pytest.raises(ValueError):
            DriftSpec(func=np.tanh, lipschitz_constant=-1.0)
        with pytest.raises(ValueError):
            DriftSpec(func=np.tanh, lipschitz_constant=1.0, bound=-2.0)

    def test_non_finite_drift_rejected(self):
        with np.errstate(divide="ignore"), pytest.raises(ValueError):
            DriftSpec(func=lambda z: 1.0 / np.asarray(z, dtype=float),
                      lipschitz_constant=100.0)

    def test_honest_specs_pass(self):
        bounded = DriftSpec(func=np.tanh, lipschitz_constant=1.0, bound=1.0)
        assert bounded.is_bounded
        linear = DriftSpec(func=lambda z: np.asarray(z, dtype=float),
                           lipschitz_constant=1.0)
        assert not linear.is_bounded


class TestMakeDrift:
    def test_registry_values(self):
        z = np.array([-2.0, 0.0, 1.5])
        assert np.array_equal(make_drift("zero")(z), np.zeros(3))
        assert np.array_equal(make_drift("const", c=2.5)(z),
                              np.full(3, 2.5))
        assert np.array_equal(make_drift("linear", a=3.0)(z), 3.0 * z)
        assert np.allclose(make_drift("tanh_scaled", a=2.0)(z),
                           2.0 * np.tanh(z), rtol=1e-15)

    def test_registry_metadata(self):
        assert make_drift("const", c=-4.0).bound == 4.0
        assert make_drift("linear", a=3.0).lipschitz_constant == 3.0
        assert make_drift("linear", a=3.0).bound is None
        assert make_drift("tanh_scaled", a=2.0).bound == 2.0

    def test_table_drift(self):
        d = make_drift("table", xs=[-1.0, 0.0, 1.0], ys=[1.0, 0.0, 1.0])
        assert d(0.5) == 0.5
        assert d(3.0) == 1.0
        assert d.lipschitz_constant == 1.0
        assert d.bound == 1.0

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            make_drift("banana")

    @pytest.mark.parametrize("kwargs", [
        dict(xs=[1.0, 0.0], ys=[0.0, 1.0]),
        dict(xs=[0.0, 1.0], ys=[0.0, 1.0, 2.0]),
        dict(xs=[0.0], ys=[0.0]),
        dict(),
    ])
    def test_bad_table_rejected(self, kwargs):
        with pytest.raises(ValueError):
            make_drift("table", **kwargs)


class TestDriftTruncate:
    def test_clips_outside_level(self):
        clipped = drift_truncate(make_drift("linear", a=1.0), 2.0)
        assert clipped(3.0) == 2.0
        assert clipped(-5.0) == -2.0
        assert clipped(1.5) == 1.5

    def test_metadata(self):
        base = make_drift("linear", a=1.0)
        clipped = drift_truncate(base, 2.0)
        assert clipped.bound == 2.0
        assert clipped.truncation_level == 2.0
        assert clipped.lipschitz_constant == base.lipschitz_constant
        assert clipped.name.endswith("|clip2")

    def test_bound_takes_minimum(self):
        # Truncating above an existing bound cannot loosen it.
        clipped = drift_truncate(make_drift("tanh_scaled", a=1.0), 5.0)
        assert clipped.bound == 1.0

    def test_level_must_be_positive(self):
        with pytest.raises(ValueError):
            drift_truncate(make_drift("zero"), 0.0)


class TestInitialTerm:
    def test_heat_constant_is_preserved(self):
        data = make_initial_data(u0=("const", {"c": 3.0}))
        assert initial_term(HEAT, data, 0.7, 1.2) == pytest.approx(
            3.0, rel=1e-13)

    @pytest.mark.parametrize("k", [1.0, 3.0])
    def test_heat_damps_sine_modes(self, k):
        # Gaussian smoothing multiplies sin(kx) by exp(-t k^2 / 2).
        data = make_initial_data(u0=("sin", {"a": 1.0, "k": k}))
        xs = np.linspace(-2.0, 2.0, 9)
        got = initial_term(HEAT, data, 0.7, xs)
        want = math.exp(-0.7 * k * k / 2.0) * np.sin(k * xs)
        assert np.max(np.abs(got - want)) <= 1e-12

    def test_wave_unit_speed_gives_time(self):
        data = make_initial_data(u0=("zero", {}), v0=("const", {"c": 1.0}))
        for t in (0.25, 1.0, 2.0):
            assert initial_term(WAVE, data, t, 0.3) == pytest.approx(
                t, rel=1e-9)

    def test_wave_identity_profile_travels_in_place(self):
        # Averaging u0(x+t) and u0(x-t) leaves a linear profile fixed.
        data = InitialData(u0=lambda x: np.asarray(x, dtype=float),
                           bounded=False)
        for t, x in ((0.4, 1.3), (2.0, -0.7)):
            assert initial_term(WAVE, data, t, x) == pytest.approx(
                x, abs=1e-12)

    def test_time_zero_returns_u0(self):
        data = make_initial_data(u0=("bump", {"a": 2.0, "w": 0.5}))
        xs = np.array([-1.0, 0.0, 0.5])
        got = initial_term(HEAT, data, 0.0, xs)
        assert np.array_equal(got, 2.0 * np.exp(-xs ** 2 / 0.5))

    def test_negative_time_rejected(self):
        data = make_initial_data()
        with pytest.raises(ValueError):
            initial_term(HEAT, data, -0.1, 0.0)

    def test_scalar_in_scalar_out(self):
        data = make_initial_data(u0=("const", {"c": 1.0}))
        out = initial_term(HEAT, data, 0.5, 0.0)
        assert isinstance(out, float)

    def test_grid_evaluation(self):
        g = heat_grid(n_t=4)
        data = make_initial_data(u0=("sin", {"a": 1.0, "k": 2.0}))
        field = initial_term_grid(HEAT, data, g)
        assert field.values.shape == (5, 9)
        assert np.allclose(field.values[0], np.sin(2.0 * g.positions()),
                           rtol=0, atol=1e-15)


class TestOdeOracle:
    def test_zero_drift_returns_forcing_exactly(self):
        ts = np.linspace(0.0, 1.0, 2001)
        got = ode_oracle(HEAT, make_drift("zero"), math.sin, 1.0,
                         n_steps=2000)
        assert np.array_equal(got, np.sin(ts))

    def test_heat_identity_drift_grows_exponentially(self):
        got = ode_oracle(HEAT, BLIN, 1.0, 1.0, n_steps=100000)
        ts = np.linspace(0.0, 1.0, 100001)
        assert np.max(np.abs(got - np.exp(ts))) <= 1e-8

    def test_wave_unit_drift_gives_half_square(self):
        got = ode_oracle(WAVE, make_drift("const", c=1.0), 0.0, 2.0,
                         n_steps=2000)
        ts = np.linspace(0.0, 2.0, 2001)
        assert np.max(np.abs(got - ts ** 2 / 2.0)) <= 1e-12

    def test_wave_restoring_drift_oscillates(self):
        got = ode_oracle(WAVE, make_drift("linear", a=-1.0), 1.0, 1.0,
                         n_steps=2000)
        ts = np.linspace(0.0, 1.0, 2001)
        assert np.max(np.abs(got - np.cos(ts))) <= 1e-6

    def test_constant_forcing_accepted_as_scalar(self):
        got = ode_oracle(HEAT, make_drift("zero"), 2.5, 1.0, n_steps=100)
        assert np.array_equal(got, np.full(101, 2.5))

    def test_too_few_steps_rejected(self):
        with pytest.raises(ValueError):
            ode_oracle(HEAT, make_drift("zero"), 1.0, 1.0, n_steps=50)


class TestPicardApply:
    def test_heat_unit_drift_integrates_time(self):
        g = heat_grid()
        out = picard_apply(HEAT, make_drift("const", c=1.0),
                           const_field(g, 0.0), const_field(g, 0.0))
        want = g.times()[:, None] * np.ones((1, g.n_x + 1))
        assert np.max(np.abs(out.values - want)) <= 1e-12

    def test_wave_unit_drift_integrates_cone(self):
        g = wave_grid()
        out = picard_apply(WAVE, make_drift("const", c=1.0),
                           const_field(g, 0.0), const_field(g, 0.0))
        want = (g.times() ** 2 / 2.0)[:, None] * np.ones((1, g.n_x + 1))
        assert np.max(np.abs(out.values - want)) <= 1e-13

    def test_heat_time_quadrature_exact_on_linear(self):
        # Trapezoid in time: integrating f(s) = s must give t^2/2 to
        # rounding, and spatial constancy must survive the convolution.
        g = heat_grid()
        zt = GridFunction(grid=g, values=g.times()[:, None]
                          * np.ones((1, g.n_x + 1)))
        out = picard_apply(HEAT, BLIN, zt, const_field(g, 0.0))
        want = (g.times() ** 2 / 2.0)[:, None]
        assert np.max(np.abs(out.values - want)) <= 1e-13
        assert max(np.ptp(row) for row in out.values) == 0.0

    def test_wave_time_quadrature_second_order(self):
        g = wave_grid()
        zt = GridFunction(grid=g, values=g.times()[:, None]
                          * np.ones((1, g.n_x + 1)))
        out = picard_apply(WAVE, make_drift("linear", a=1.0),
                           zt, const_field(g, 0.0))
        want = (g.times() ** 3 / 6.0)[:, None]
        assert np.max(np.abs(out.values - want)) <= 5e-5

    def test_wave_respects_light_cone(self):
        # A source supported at x = 0 cannot reach |x| > t (plus a
        # two-cell discretization halo).
        g = PointGrid(horizon=1.0, half_width=0.5, n_t=100, n_x=100)
        vals = np.zeros((101, 101))
        vals[:, 50] = 1.0
        out = picard_apply(WAVE, make_drift("tanh_scaled", a=1.0),
                           GridFunction(grid=g, values=vals),
                           const_field(g, 0.0))
        for i, t in enumerate(g.times()):
            outside = np.abs(g.positions()) > t + 2.0 * g.dx
            if outside.any():
                assert np.max(np.abs(out.values[i, outside])) == 0.0

    def test_grid_mismatch_rejected(self):
        z = const_field(heat_grid(), 0.0)
        eta = const_field(heat_grid(n_t=100), 0.0)
        with pytest.raises(ValueError):
            picard_apply(HEAT, make_drift("zero"), z, eta)

    def test_heat_requires_bounded_drift(self):
        g = heat_grid()
        with pytest.raises(ValueError, match="bounded"):
            picard_apply(HEAT, make_drift("linear", a=1.0),
                         const_field(g, 0.0), const_field(g, 0.0))

    def test_wave_requires_aligned_grid(self):
        g = PointGrid(horizon=1.0, half_width=1.0, n_t=10, n_x=10)
        with pytest.raises(ValueError, match="alignment"):
            picard_apply(WAVE, make_drift("zero"),
                         const_field(g, 0.0), const_field(g, 0.0))


class TestSolveF:
    def test_heat_unit_drift_certified_in_one_step(self):
        g = heat_grid()
        z, info = solve_F(HEAT, make_drift("const", c=1.0),
                          const_field(g, 0.0), return_info=True)
        want = g.times()[:, None] * np.ones((1, g.n_x + 1))
        assert np.max(np.abs(z.values - want)) <= 1e-12
        assert info.iterations == 1
        assert info.used_certificate

    def test_wave_unit_drift(self):
        g = wave_grid()
        z, info = solve_F(WAVE, make_drift("const", c=1.0),
                          const_field(g, 0.0), return_info=True)
        want = (g.times() ** 2 / 2.0)[:, None] * np.ones((1, g.n_x + 1))
        assert np.max(np.abs(z.values - want)) <= 1e-13
        assert info.iterations == 1

    def test_heat_identity_drift_tracks_exponential(self):
        g = PointGrid(horizon=1.0, half_width=0.016, n_t=1000, n_x=32)
        z, info = solve_F(HEAT, BLIN, const_field(g, 1.0),
                          return_info=True)
        err = np.max(np.abs(z.values - np.exp(g.times())[:, None]))
        assert err <= 1e-3
        assert info.converged
        assert info.iterations <= 20

    def test_wave_restoring_drift_tracks_cosine(self):
        errs = []
        for n_t, n_x in ((100, 16), (200, 32)):
            g = wave_grid(n_t=n_t, n_x=n_x)
            z = solve_F(WAVE, make_drift("linear", a=-1.0),
                        const_field(g, 1.0))
            errs.append(np.max(np.abs(
                z.values - np.cos(g.times())[:, None])))
        assert errs[0] <= 1.2e-5
        assert errs[1] <= 3e-6
        assert errs[1] < errs[0]

    def test_fixed_point_independent_of_start(self):
        g = heat_grid()
        eta = const_field(g, 1.0)
        drift = make_drift("tanh_scaled", a=1.0)
        za = solve_F(HEAT, drift, eta)
        zb = solve_F(HEAT, drift, eta, start=eta.values + 3.0)
        assert np.max(np.abs(za.values - zb.values)) <= 1e-7

    def test_increments_shrink(self):
        g = heat_grid()
        _, info = solve_F(HEAT, make_drift("tanh_scaled", a=1.0),
                          const_field(g, 1.0), return_info=True)
        inc = info.increments
        assert all(b < a for a, b in zip(inc[1:], inc[2:]))

    def test_start_shape_checked(self):
        g = heat_grid()
        with pytest.raises(ValueError):
            solve_F(HEAT, make_drift("zero"), const_field(g, 0.0),
                    start=np.zeros((2, 2)))

    def test_bad_controls_rejected(self):
        g = heat_grid()
        eta = const_field(g, 0.0)
        with pytest.raises(ValueError):
            solve_F(HEAT, make_drift("zero"), eta, tol=0.0)
        with pytest.raises(ValueError):
            solve_F(HEAT, make_drift("zero"), eta, max_iter=0)

    def test_iteration_budget_enforced(self):
        g = heat_grid()
        with pytest.raises(MaxIterExceededError) as exc_info:
            solve_F(HEAT, make_drift("tanh_scaled", a=1.0),
                    const_field(g, 1.0), tol=1e-12, max_iter=1)
        assert exc_info.value.iterations == 1
        assert exc_info.value.last_increment > 1e-12

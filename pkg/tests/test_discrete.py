from __future__ import annotations

import io
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from starnls.discrete import (DiscreteField, GridSpec, discrete_energy, discrete_mass,
                              edge_centroid, gn_coercivity_bound, kinetic_integral, minimize,
                              renormalize, sample_field, sample_soliton_on_edge,
                              sample_stationary)
from starnls.existence import critical_mass
from starnls.params import DomainError, NonlinearParams
from starnls.soliton import line_energy, omega_of_mass_line
from starnls.stationary import energy_eta, solve_stationary

BALANCED = NonlinearParams(4, 3)


def perturbed(field, rng, level=0.01):
    values = field.values * (1 + level * rng.standard_normal(field.values.shape))
    values[:, 0] = values[0, 0]
    return DiscreteField(field.grid, values)


class TestGrid:
    def test_nodes(self):
        grid = GridSpec(3, 40.0, 0.005)
        assert grid.nodes_per_edge == 8001
        assert grid.x[-1] == pytest.approx(40.0)
        assert grid.trapezoid_weights().sum() == pytest.approx(40.0)

    @pytest.mark.parametrize("args", [(3, 1.0, 0.3), (1, 10.0, 0.1), (3, -1.0, 0.1),
                                      (3, 1.0, 0.0)])
    def test_invalid(self, args):
        with pytest.raises(DomainError):
            GridSpec(*args)

    def test_tail_check(self):
        assert GridSpec(3, 20.0, 0.1).tail_ok(1.0)
        assert not GridSpec(3, 19.0, 0.1).tail_ok(1.0)


class TestField:
    def test_vertex_continuity_enforced(self):
        grid = GridSpec(2, 1.0, 0.5)
        with pytest.raises(DomainError, match="vertex"):
            DiscreteField(grid, [[1.0, 0.5, 0.0], [0.9, 0.5, 0.0]])
        with pytest.raises(DomainError, match="finite"):
            DiscreteField(grid, [[1.0, np.nan, 0.0], [1.0, 0.5, 0.0]])

    def test_csv(self):
        grid = GridSpec(2, 1.0, 0.5)
        field = DiscreteField(grid, [[1.0, 0.5, 0.0], [1.0, 0.25, 0.0]])
        buf = io.StringIO()
        field.to_csv(buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == "edge,node,x,value"
        assert lines[5] == "1,1,0.5,0.25"
        assert len(lines) == 7


class TestEnergy:
    def test_zero_field(self):
        grid = GridSpec(3, 5.0, 0.1)
        assert discrete_energy(DiscreteField(grid, np.zeros((3, 51))), BALANCED) == 0.0

    def test_sampled_radial_state(self):
        mass = 6 * (1 - math.sqrt(2 / 11))
        state = solve_stationary(BALANCED, 3, 0, mass)
        field = sample_stationary(state, GridSpec(3, 30.0, 0.01))
        assert discrete_energy(field, BALANCED) == pytest.approx(-mass / 6, abs=1e-3)
        assert discrete_energy(field, BALANCED) == pytest.approx(-0.5736, abs=1e-3)

    def test_line_soliton_on_one_edge(self):
        mu = 2.0
        omega = omega_of_mass_line(4, mu)
        grid = GridSpec(3, 60.0, 0.01)
        field = sample_soliton_on_edge(grid, 4, omega, 30.0)
        assert discrete_energy(field, BALANCED) == pytest.approx(line_energy(4, mu), abs=1e-3)
        assert discrete_mass(field) == pytest.approx(mu, rel=1e-6)

    def test_second_order_convergence(self):
        state = solve_stationary(BALANCED, 3, 0, 1.0)
        errors = []
        for dx in (0.02, 0.01):
            field = sample_stationary(state, GridSpec(3, 40.0, dx))
            errors.append(abs(discrete_energy(field, BALANCED) - state.energy))
        slope = math.log2(errors[0] / errors[1])
        assert 1.7 <= slope <= 2.3


class TestMass:
    @given(mu=st.floats(0.01, 100))
    def test_renormalize(self, mu):
        grid = GridSpec(3, 10.0, 0.1)
        field = sample_field(grid, lambda x: np.outer([1, 2, 3], x * np.exp(-x)) + np.exp(-x))
        assert discrete_mass(renormalize(field, mu)) == pytest.approx(mu, rel=1e-14)

    def test_scaling(self):
        grid = GridSpec(3, 10.0, 0.1)
        field = sample_field(grid, lambda x: np.outer([1, 2, 3], x * np.exp(-x)) + np.exp(-x))
        assert discrete_mass(field.scaled(2.0)) == pytest.approx(4 * discrete_mass(field),
                                                                 rel=1e-15)

    def test_zero_field_rejected(self):
        grid = GridSpec(3, 5.0, 0.1)
        with pytest.raises(DomainError):
            renormalize(DiscreteField(grid, np.zeros((3, 51))), 1.0)

    def test_sampled_state_mass(self):
        state = solve_stationary(NonlinearParams(4, 2.5), 3, 0, 2.0)
        field = sample_stationary(state, GridSpec(3, 40.0, 0.01))
        assert discrete_mass(field) == pytest.approx(2.0, rel=1e-4)


class TestCoercivity:
    def test_values(self):
        assert gn_coercivity_bound(BALANCED, 1.0, 0.0) == 0.0
        assert gn_coercivity_bound(BALANCED, 1.0, 1e6) > 0
        with pytest.raises(DomainError):
            gn_coercivity_bound(BALANCED, 1.0, -1.0)

    @given(p=st.floats(2.3, 5.8), q=st.floats(2.1, 3.9), amp=st.floats(0.1, 5),
           width=st.floats(0.2, 5))
    def test_bound_holds_on_sampled_fields(self, p, q, amp, width):
        params = NonlinearParams(p, q)
        grid = GridSpec(3, 20.0, 0.05)
        field = sample_field(grid, lambda x: np.outer([amp, amp, amp],
                                                      np.exp(-(x / width) ** 2)))
        mu = discrete_mass(field)
        k = math.sqrt(kinetic_integral(field))
        assert discrete_energy(field, params) >= gn_coercivity_bound(params, mu, k)


class TestMinimize:
    def test_recovers_radial_state(self, rng):
        state = solve_stationary(BALANCED, 3, 0, 1.0)
        grid = GridSpec(3, 40.0, 0.005)
        result = minimize(BALANCED, grid, 1.0, perturbed(sample_stationary(state, grid), rng))
        assert result.converged
        assert abs(result.energy - state.energy) <= 1e-4
        assert result.field.vertex == pytest.approx(state.vertex_value, rel=1e-2)
        assert np.all(np.diff(result.energies) <= 0)
        assert discrete_mass(result.field) == pytest.approx(1.0, rel=1e-13)
        for energy, k in zip(result.energies, result.kinetic_norms):
            assert energy >= gn_coercivity_bound(BALANCED, 1.0, k)

    def test_existence_regime_beats_line_level(self, rng):
        params = NonlinearParams(4, 2.5)
        mu = 1.0  # critical mass is ~7.9
        state = solve_stationary(params, 3, 0, mu)
        grid = GridSpec(3, 80.0, 0.01)
        result = minimize(params, grid, mu, perturbed(sample_stationary(state, grid), rng))
        assert result.energy < line_energy(4, mu) - 1e-6
        assert result.energy == pytest.approx(state.energy, abs=1e-4)

    def test_nonexistence_sandwich(self):
        params = NonlinearParams(4, 2.5)
        n = 5
        mu = 3 * critical_mass(params, n).mu_critical
        omega = omega_of_mass_line(4, mu)
        grid = GridSpec(n, 80.0, 0.005)
        init = sample_soliton_on_edge(grid, 4, omega, 40.0)
        result = minimize(params, grid, mu, init)
        assert line_energy(4, mu) - 5e-3 < result.energy < energy_eta(params, n, 0, mu)
        assert edge_centroid(result.field, 0) >= edge_centroid(init, 0) - 1e-6

    def test_mass_conserved_each_iterate(self, rng):
        grid = GridSpec(3, 20.0, 0.05)
        init = sample_field(grid, lambda x: np.outer([1.0, 1.0, 1.0], np.exp(-x)))
        result = minimize(BALANCED, grid, 2.0, perturbed(init, rng, 0.2), max_iter=30)
        assert not result.converged
        assert result.iterations == 30
        assert np.all(np.diff(result.energies) <= 0)

    def test_zero_init_rejected(self):
        grid = GridSpec(3, 5.0, 0.1)
        with pytest.raises(DomainError):
            minimize(BALANCED, grid, 1.0, DiscreteField(grid, np.zeros((3, 51))))

import numpy as np
import pytest

from neelwall.energy import energy
from neelwall.profiles import (
    FieldParam,
    Grid,
    Offset,
    WindingNumber,
    degree_of,
    initial_ansatz,
    wall_locations,
)
from neelwall.solver import (
    MinimizeConfig,
    NumericsError,
    continuation,
    minimize,
    minimize_multistart,
    recenter,
    reclamp,
)


class TestMinimizeConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"max_iters": 0},
            {"armijo_c": 0.0},
            {"armijo_c": 1.0},
            {"grad_tol": 0.0},
            {"backtrack": 1.0},
        ],
    )
    def test_invalid_rejected(self, kwargs):
        with pytest.raises(ValueError):
            MinimizeConfig(**kwargs)


class TestMinimize:
    def test_zero_degree_reaches_constant_well(self):
        p, g = FieldParam(0.7), Grid(40.0, 401)
        start = initial_ansatz(WindingNumber(0), p, g)
        phi = start.phi.copy()
        phi[1:-1] += 0.3 * np.sin(np.linspace(0, np.pi, g.n))[1:-1]
        res = minimize(WindingNumber(0), p, g, MinimizeConfig(),
                       init=start.with_phi(phi))
        assert res.converged
        assert res.breakdown.total <= 1e-8

    def test_single_wall_benchmark_properties(self, single_wall_09):
        res = single_wall_09
        assert res.converged
        assert res.breakdown.total >= (1.0 - 0.9) ** 2
        assert len(wall_locations(res.profile)) == 1

    def test_one_wall_for_ell1_at_h_half(self):
        res = minimize(
            WindingNumber(1, Offset.MINUS), FieldParam(0.5), Grid(60.0, 1201),
            MinimizeConfig(),
        )
        assert res.converged
        assert len(wall_locations(res.profile)) == 1

    def test_deterministic_bitwise_trace(self):
        p, g = FieldParam(0.9), Grid(40.0, 513)
        d = WindingNumber(0, Offset.PLUS)
        cfg = MinimizeConfig(max_iters=300)
        r1 = minimize(d, p, g, cfg)
        r2 = minimize(d, p, g, cfg)
        assert r1.energy_trace == r2.energy_trace

    def test_energy_monotone_along_iterates(self, single_wall_09):
        assert single_wall_09.monotonic_energy
        trace = single_wall_09.energy_trace
        assert all(b <= a + 1e-12 for a, b in zip(trace, trace[1:]))

    def test_degree_conserved(self, single_wall_09):
        d = degree_of(single_wall_09.profile)
        assert (d.k, d.offset) == (0, Offset.PLUS)

    def test_nonconvergence_reported_not_raised(self):
        p, g = FieldParam(0.99), Grid(60.0, 601)
        res = minimize(
            WindingNumber(2, Offset.MINUS), p, g, MinimizeConfig(max_iters=3)
        )
        assert not res.converged
        assert res.iterations == 3
        assert res.grad_norm > 0

    def test_nan_energy_aborts_with_state(self):
        p, g = FieldParam(0.9), Grid(20.0, 201)
        start = initial_ansatz(WindingNumber(0, Offset.PLUS), p, g, [0.0], 1.0)
        phi = start.phi.copy()
        phi[5] = np.inf
        with pytest.raises(NumericsError) as err:
            minimize(WindingNumber(0, Offset.PLUS), p, g, MinimizeConfig(),
                     init=start.with_phi(phi))
        assert err.value.profile is not None

    def test_mismatched_init_degree_rejected(self):
        p, g = FieldParam(0.9), Grid(20.0, 201)
        wrong = initial_ansatz(WindingNumber(0), p, g)
        with pytest.raises(ValueError, match="degree"):
            minimize(WindingNumber(0, Offset.PLUS), p, g, MinimizeConfig(),
                     init=wrong)

    def test_grid_refinement_stability(self):
        p = FieldParam(0.9)
        d = WindingNumber(0, Offset.PLUS)
        cfg = MinimizeConfig()
        e_coarse = minimize(d, p, Grid(100.0, 1025), cfg).breakdown.total
        e_fine = minimize(d, p, Grid(100.0, 2049), cfg).breakdown.total
        assert abs(e_fine - e_coarse) / e_fine < 0.005


class TestMultistart:
    def test_sorted_best_first_and_deterministic(self):
        p, g = FieldParam(0.95), Grid(60.0, 609)
        d = WindingNumber(1, Offset.MINUS)
        cfg = MinimizeConfig(max_iters=4000, grad_tol=1e-6)
        runs1 = minimize_multistart(d, p, g, cfg, n_starts=3)
        runs2 = minimize_multistart(d, p, g, cfg, n_starts=3)
        energies1 = [r.breakdown.total for r in runs1]
        energies2 = [r.breakdown.total for r in runs2]
        assert energies1 == energies2
        assert energies1[0] == min(energies1)


class TestContinuation:
    def test_single_entry_equals_minimize(self):
        p, g = FieldParam(0.9), Grid(40.0, 513)
        d = WindingNumber(0, Offset.PLUS)
        cfg = MinimizeConfig()
        runs = continuation(d, [0.9], g, cfg)
        direct = minimize(d, p, g, cfg)
        assert len(runs) == 1
        assert runs[0][0] == 0.9
        assert runs[0][1].breakdown.total == pytest.approx(
            direct.breakdown.total, rel=1e-12
        )

    def test_monotone_schedule_enforced(self):
        g = Grid(40.0, 513)
        with pytest.raises(ValueError, match="monotone"):
            continuation(WindingNumber(0, Offset.PLUS), [0.9, 0.95, 0.93], g)

    def test_energies_vary_continuously_and_warm_start_helps(self):
        g = Grid(60.0, 1219)
        d = WindingNumber(1, Offset.MINUS)
        cfg = MinimizeConfig(grad_tol=1e-6)
        ladder = [0.97, 0.95, 0.93, 0.9]
        runs = continuation(d, ladder, g, cfg)
        energies = [r.breakdown.total for _, r in runs]
        assert all(r.converged for _, r in runs)
        for a, b in zip(energies, energies[1:]):
            assert abs(b - a) / a < 0.05
        cold = minimize(d, FieldParam(0.9), g, cfg)
        warm_iters = runs[-1][1].iterations
        assert warm_iters < cold.iterations

    def test_reclamp_changes_boundary_phases(self):
        p_old, p_new = FieldParam(0.95), FieldParam(0.9)
        g = Grid(40.0, 513)
        d = WindingNumber(1, Offset.MINUS)
        prof = initial_ansatz(d, p_old, g)
        re = reclamp(prof, d, p_new)
        assert re.phi[0] == pytest.approx(p_new.alpha)
        got = degree_of(re)
        assert (got.k, got.offset) == (1, Offset.MINUS)


class TestRecenter:
    def test_symmetric_profile_unchanged(self):
        p, g = FieldParam(0.9), Grid(40.0, 513)
        prof = initial_ansatz(WindingNumber(0, Offset.PLUS), p, g, [0.0], 1.0)
        out = recenter(prof)
        assert out.shift == 0.0
        assert np.array_equal(out.profile.phi, prof.phi)

    def test_no_walls_identity(self):
        p, g = FieldParam(0.9), Grid(40.0, 513)
        prof = initial_ansatz(WindingNumber(0), p, g)
        out = recenter(prof)
        assert out.shift == 0.0

    def test_median_wall_moves_to_origin(self):
        p, g = FieldParam(0.9), Grid(40.0, 513)
        prof = initial_ansatz(WindingNumber(0, Offset.PLUS), p, g, [7.3], 1.0)
        out = recenter(prof)
        walls = wall_locations(out.profile)
        assert abs(walls[0][0]) <= g.spacing

    def test_translate_then_recenter_idempotent(self):
        p, g = FieldParam(0.9), Grid(40.0, 513)
        prof = initial_ansatz(WindingNumber(0, Offset.PLUS), p, g, [5.0], 1.0)
        once = recenter(prof)
        twice = recenter(once.profile)
        assert twice.shift == 0.0
        assert np.array_equal(once.profile.phi, twice.profile.phi)

    def test_energy_drift_below_0p1_percent(self, single_wall_09):
        prof = single_wall_09.profile
        shifted_start = initial_ansatz(
            WindingNumber(0, Offset.PLUS), prof.params, prof.grid, [11.7], 1.0
        )
        res = minimize(
            WindingNumber(0, Offset.PLUS), prof.params, prof.grid,
            MinimizeConfig(), init=shifted_start,
        )
        out = recenter(res.profile)
        assert out.energy_drift <= 1e-3
        e_before = energy(res.profile).total
        e_after = energy(out.profile).total
        assert abs(e_after - e_before) / e_before <= 1e-3

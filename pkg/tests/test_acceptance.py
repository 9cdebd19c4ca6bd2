"""Acceptance gate: every release criterion at its frozen tolerance.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one pass/fail
line per criterion.  The heavy minimisations are shared through module
fixtures; total runtime is dominated by the pinned N = 4097 benchmarks.
"""

import math

import numpy as np
import pytest

from conftest import make_bump
from neelwall.energy import energy, equipartition_defect, gradient
from neelwall.experiments import appendix_suite, energy_table, splitting_diagnostic
from neelwall.experiments import decay_fit, enumerate_partitions, structure_check
from neelwall.partitions import Partition
from neelwall.profiles import (
    FieldParam,
    Grid,
    Offset,
    WindingNumber,
    initial_ansatz,
    wall_locations,
)
from neelwall.solver import MinimizeConfig, minimize
from neelwall.strayfield import (
    SampledField,
    default_heights,
    dirichlet_energy_extension,
    h12_double_integral,
    h12_spectral,
)
from test_partitions import as_keys, brute_force

PI4 = math.pi / 4.0


def report(criterion: str, passed: bool, detail: str) -> None:
    print(f"[{'PASS' if passed else 'FAIL'}] {criterion}: {detail}")
    assert passed, f"{criterion}: {detail}"


# --------------------------------------------------------------------------
# criterion 1: stray-field cross-validation


class TestCriterion1StrayCrossValidation:
    def test_lorentzian_three_ways(self):
        f = SampledField(Grid(200.0, 4001),
                         1.0 / (1.0 + Grid(200.0, 4001).nodes**2))
        di = h12_double_integral(f)
        sp = h12_spectral(f)
        f2 = SampledField(Grid(100.0, 2001),
                          1.0 / (1.0 + Grid(100.0, 2001).nodes**2))
        ex = dirichlet_energy_extension(f2, default_heights(f2.grid, top=10.0))
        err_di = abs(di - PI4) / PI4
        err_sp = abs(sp - PI4) / PI4
        err_ex = abs(ex - PI4) / PI4
        report(
            "criterion 1a (Lorentzian pi/4)",
            err_di <= 0.01 and err_sp <= 0.01 and err_ex <= 0.05,
            f"double {err_di:.2e}, spectral {err_sp:.2e}, extension {err_ex:.2e}",
        )

    def test_fifty_bump_three_way_suite(self):
        rng = np.random.default_rng(11)
        g = Grid(30.0, 641)
        worst_sp = worst_ex = 0.0
        for _ in range(50):
            f = np.zeros(g.n)
            for _ in range(rng.integers(1, 3)):
                f += rng.uniform(0.3, 1.0) * make_bump(
                    g, rng.uniform(-12, 12), rng.uniform(1.5, 5.0)
                )
            fld = SampledField(g, f)
            a = h12_double_integral(fld)
            worst_sp = max(worst_sp, abs(h12_spectral(fld) - a) / a)
            worst_ex = max(worst_ex, abs(dirichlet_energy_extension(fld) - a) / a)
        report(
            "criterion 1b (50-bump agreement)",
            worst_sp <= 0.01 and worst_ex <= 0.05,
            f"worst spectral {worst_sp:.2e} (<=1%), extension {worst_ex:.2e} (<=5%)",
        )


# --------------------------------------------------------------------------
# criterion 2: gradient correctness


class TestCriterion2Gradient:
    def test_twenty_random_profiles(self):
        g = Grid(30.0, 385)
        eps = 1e-6
        worst = 0.0
        for seed in range(20):
            rng = np.random.default_rng(1000 + seed)
            h = rng.uniform(0.3, 0.99)
            p = FieldParam(h)
            prof = initial_ansatz(WindingNumber(0, Offset.PLUS), p, g,
                                  [rng.uniform(-3, 3)], rng.uniform(0.7, 2.0))
            pert = np.zeros(g.n)
            for k in range(1, 6):
                pert += rng.normal() * 0.1 * np.sin(
                    k * math.pi * (g.nodes / g.half_width + 1) / 2
                )
            phi = prof.phi.copy()
            phi[1:-1] += pert[1:-1]
            prof = prof.with_phi(phi)
            grad = gradient(prof)
            v = rng.normal(size=g.n - 2)
            v /= np.linalg.norm(v)
            hi, lo = prof.phi.copy(), prof.phi.copy()
            hi[1:-1] += eps * v
            lo[1:-1] -= eps * v
            fd = (energy(prof.with_phi(hi)).total
                  - energy(prof.with_phi(lo)).total) / (2 * eps)
            worst = max(worst, abs(fd - float(np.dot(grad, v)))
                        / max(abs(fd), 1e-12))
        report("criterion 2 (gradient FD)", worst <= 1e-6,
               f"worst relative mismatch {worst:.2e} over 20 profiles")


# --------------------------------------------------------------------------
# criterion 3: single-wall benchmark at pinned resolution


@pytest.fixture(scope="module")
def benchmark_4097():
    return minimize(
        WindingNumber(0, Offset.PLUS), FieldParam(0.9), Grid(100.0, 4097),
        MinimizeConfig(),
    )


class TestCriterion3SingleWall:
    def test_benchmark(self, benchmark_4097):
        res = benchmark_4097
        walls = wall_locations(res.profile)
        defect = equipartition_defect(res.profile)
        ok = (
            res.converged
            and res.breakdown.total >= 0.01
            and defect <= 0.02
            and len(walls) == 1
        )
        report(
            "criterion 3 (single-wall benchmark)", ok,
            f"converged={res.converged} E={res.breakdown.total:.6f}>=0.01 "
            f"equipartition={defect:.2e}<=2% walls={len(walls)}",
        )


# --------------------------------------------------------------------------
# criterion 4: wall-count law


class TestCriterion4WallCounts:
    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_h1_integers(self, k):
        res = minimize(WindingNumber(k), FieldParam(1.0), Grid(100.0, 2049),
                       MinimizeConfig(grad_tol=1e-6))
        walls = wall_locations(res.profile)
        signs = [s for _, s in walls]
        ok = (res.converged and len(walls) == 2 * k - 1
              and signs == [(-1) ** n for n in range(1, 2 * k)])
        report(f"criterion 4 (h=1, d={k})", ok,
               f"converged={res.converged} walls={len(walls)} signs={signs}")

    @pytest.mark.parametrize("ell", [1, 2])
    def test_h099_minus_classes(self, ell, ell2_099):
        if ell == 2:
            res = ell2_099
        else:
            res = minimize(WindingNumber(1, Offset.MINUS), FieldParam(0.99),
                           Grid(100.0, 2049), MinimizeConfig())
        walls = wall_locations(res.profile)
        signs = [s for _, s in walls]
        ok = (res.converged and len(walls) == 2 * ell - 1
              and signs == [(-1) ** n for n in range(1, 2 * ell)])
        report(f"criterion 4 (h=0.99, d={ell}-a/pi)", ok,
               f"converged={res.converged} walls={len(walls)} signs={signs}")


# --------------------------------------------------------------------------
# criterion 5: energy-table ordering laws


TABLE_CFG = MinimizeConfig(grad_tol=1e-5)
FRACTIONAL_DEGREES = [
    WindingNumber(0, Offset.PLUS),
    WindingNumber(1, Offset.MINUS),
    WindingNumber(1, Offset.ZERO),
    WindingNumber(1, Offset.PLUS),
    WindingNumber(2, Offset.MINUS),
    WindingNumber(2, Offset.ZERO),
    WindingNumber(3, Offset.MINUS),
    WindingNumber(3, Offset.ZERO),
]


@pytest.fixture(scope="module")
def table_below_one():
    return energy_table(FRACTIONAL_DEGREES, [0.9, 0.99], Grid(100.0, 2049),
                        TABLE_CFG, n_starts=2)


@pytest.fixture(scope="module")
def table_at_one():
    return energy_table(
        [WindingNumber(1), WindingNumber(2), WindingNumber(3)], [1.0],
        Grid(100.0, 2049), TABLE_CFG, n_starts=2,
    )


class TestCriterion5EnergyTable:
    def test_all_cells_converged(self, table_below_one, table_at_one):
        unconverged = [
            (r["h"], r["degree"])
            for rep in (table_below_one, table_at_one)
            for r in rep.rows
            if not r["converged"]
        ]
        report("criterion 5a (table convergence)", not unconverged,
               f"unconverged cells: {unconverged or 'none'}")

    def test_lower_bounds_and_monotonicity(self, table_below_one, table_at_one):
        details = []
        ok = True
        for rep in (table_below_one, table_at_one):
            by_name = {v.name: v for v in rep.verdicts}
            for name in ("lower_bounds", "monotonicity"):
                v = by_name[name]
                ok = ok and v.passed is True
                details.append(f"{name}@{rep.parameters['h_set']}: "
                               f"margin={v.margin:.3e}")
        report("criterion 5b (bounds + monotonicity)", ok, "; ".join(details))

    def test_strict_composite_inequality(self, table_below_one):
        v = {v.name: v for v in table_below_one.verdicts}["strict_composite"]
        report("criterion 5c (strict composite at h=0.99)",
               v.passed is True,
               f"E(1) + E(1-a/pi) - E(2-a/pi) = {v.margin:.3e} > 0")

    def test_subadditivity(self, table_below_one, table_at_one):
        ok = True
        margins = []
        for rep in (table_below_one, table_at_one):
            v = {v.name: v for v in rep.verdicts}["subadditivity"]
            ok = ok and v.passed is not False
            margins.append(v.margin)
        report("criterion 5d (subadditivity)", ok,
               f"worst margins {[f'{m:.3e}' for m in margins]}")


# --------------------------------------------------------------------------
# criterion 6: splitting signatures


SPLIT_R = [10.0, 14.142, 20.0, 28.284, 40.0]


class TestCriterion6Splitting:
    def test_attraction_for_2_minus(self):
        d = WindingNumber(2, Offset.MINUS)
        p = FieldParam(0.99)
        rep = splitting_diagnostic(
            d, p, Partition((WindingNumber(1), WindingNumber(1, Offset.MINUS)), d),
            SPLIT_R, Grid(100.0, 2049), MinimizeConfig(grad_tol=1e-5),
            expected_behaviour="attractive",
        )
        by_name = {v.name: v for v in rep.verdicts}
        slope = rep.parameters["tail_fit"]["slope"]
        ok = (
            by_name["exceeds_direct"].passed is True
            and by_name["signature"].passed is True
            and -2.5 <= slope <= -1.5
        )
        report(
            "criterion 6a (attraction, d=2-a/pi)", ok,
            f"exceeds_direct margin={by_name['exceeds_direct'].margin:.3e}, "
            f"interaction slope={slope:.2f} in [-2.5,-1.5], "
            f"classification={rep.rows[0]['classification']}",
        )

    def test_repulsion_for_1_plus(self):
        d = WindingNumber(1, Offset.PLUS)
        p = FieldParam(0.99)
        rep = splitting_diagnostic(
            d, p, Partition((WindingNumber(0, Offset.PLUS), WindingNumber(1)), d),
            SPLIT_R, Grid(100.0, 2049), MinimizeConfig(grad_tol=1e-5),
            expected_behaviour="repulsive",
        )
        by_name = {v.name: v for v in rep.verdicts}
        ok = (
            by_name["monotone_separation"].passed is True
            and by_name["signature"].passed is True
            and by_name["decoupling"].passed is True
        )
        report(
            "criterion 6b (repulsion, d=1+a/pi)", ok,
            f"E(R) decreasing toward parts sum, "
            f"decoupling margin={by_name['decoupling'].margin:.3e}, "
            f"classification={rep.rows[0]['classification']}",
        )


# --------------------------------------------------------------------------
# criterion 7: structure theorem


class TestCriterion7Structure:
    def test_ell2_pattern(self, ell2_099):
        rep = structure_check(ell2_099)
        by_name = {v.name: v for v in rep.verdicts}
        violation = 1e-6 - by_name["sign_pattern"].margin
        ok = all(
            by_name[name].passed is True
            for name in ("wall_count", "alternating_signs",
                         "h_crossing_count", "sign_pattern")
        )
        report("criterion 7 (structure, l=2, h=0.99)", ok,
               f"alternating walls with sign violation {violation:.2e} <= 1e-6")


# --------------------------------------------------------------------------
# criterion 8: decay-rate fit at L = 200


class TestCriterion8Decay:
    def test_single_wall_tail_slope(self):
        res = minimize(WindingNumber(0, Offset.PLUS), FieldParam(0.9),
                       Grid(200.0, 4097), MinimizeConfig())
        rep = decay_fit(res)
        slope = rep.parameters["fit"]["slope"]
        ok = res.converged and -2.5 <= slope <= -1.6
        report("criterion 8 (decay slope)", ok,
               f"fitted tail slope {slope:.3f} in [-2.5, -1.6] "
               f"(with log correction {rep.parameters['fit']['slope_with_log_correction']:.3f})")


# --------------------------------------------------------------------------
# criterion 9: appendix suite


class TestCriterion9Appendix:
    def test_appendix_suite(self):
        rep = appendix_suite()
        by_name = {v.name: v for v in rep.verdicts}
        ok = rep.all_ok and all(
            v.passed is True for v in rep.verdicts
        )
        report("criterion 9 (appendix lemmas)", ok,
               "; ".join(f"{n}={v.passed}" for n, v in by_name.items()))


# --------------------------------------------------------------------------
# criterion 10: partition enumeration oracle


class TestCriterion10Partitions:
    def test_enumeration_matches_brute_force(self):
        checked = 0
        for h in (0.8, 0.99, 1.0):
            p = FieldParam(h)
            for k in range(0, 4):
                for off in (Offset.ZERO, Offset.PLUS, Offset.MINUS):
                    d = WindingNumber(k, off).normalized(p)
                    from neelwall.partitions import admissible_positive

                    if not admissible_positive(d, p):
                        continue
                    got = as_keys(enumerate_partitions(d, p, 4))
                    assert got == brute_force(d, p, 4), (h, d.label())
                    checked += 1
        report("criterion 10 (partition oracle)", checked > 0,
               f"{checked} (degree, h) pairs match the brute-force oracle")

"""Claim-by-claim verification harness.

Each experiment minimises what it needs, measures one family of claims
(energy ordering laws, splitting signatures, structure of minimisers, decay
rates, integral bounds), and returns an :class:`ExperimentReport` whose
verdicts carry measured margins.  Anything computed from an unconverged run
is reported as untested, never as failed.

Existence and non-existence of minimisers concern infima over the whole
line; the reports here record finite-domain *signatures* of those claims
(bound versus escaping wall packets, monotone separation-energy curves),
not proofs.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor

import numpy as np
from scipy.optimize import minimize_scalar

from .energy import LocalizeError, energy, energy_lower_bound, localize
from .partitions import Partition, admissible_positive, enumerate_partitions
from .profiles import (
    FieldParam,
    Grid,
    Offset,
    Profile,
    WindingNumber,
    degree_of,
    wall_locations,
)
from .reports import ExperimentReport
from .solver import (
    MinimizeConfig,
    MinimizeResult,
    continuation,
    minimize,
    minimize_multistart,
)
from .strayfield import SampledField, poisson_extend

__all__ = [
    "aux_inf",
    "aux_inf_scan",
    "energy_table",
    "splitting_diagnostic",
    "structure_check",
    "decay_fit",
    "l1_parts_scan",
    "local_estimate_check",
    "width_diagnostic",
    "decay_to_l1_check",
    "extension_bound_check",
    "appendix_suite",
    "enumerate_partitions",
]


# ---------------------------------------------------------------------------
# small shared helpers


def _fit_loglog(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    """Least-squares slope/intercept of log y vs log x, with slope stderr."""
    lx, ly = np.log(x), np.log(y)
    if lx.size < 3:
        coef = np.polyfit(lx, ly, 1)
        return float(coef[0]), float(coef[1]), float("nan")
    coef, cov = np.polyfit(lx, ly, 1, cov=True)
    return float(coef[0]), float(coef[1]), float(math.sqrt(max(cov[0, 0], 0.0)))


def _label(d: WindingNumber) -> str:
    return d.label()


def _phi_slopes(profile: Profile) -> np.ndarray:
    return np.diff(profile.phi) / profile.grid.spacing


# ---------------------------------------------------------------------------
# appendix lemmas


def aux_inf(alpha: float) -> float:
    """Infimum over (0, pi) of (1 - cos(alpha) cos(phi)) / sin(phi)^2."""
    if not 0.0 <= alpha <= 0.5 * math.pi + 1e-12:
        raise ValueError(f"alpha must lie in [0, pi/2], got {alpha}")
    return 0.5 * (1.0 + math.sin(alpha))


def aux_inf_scan(alpha: float, n_grid: int = 10**6) -> float:
    """Grid scan of the same infimum with local refinement.

    The infimum sits at the interval boundary for alpha = 0, so the
    refinement bracket is clipped to (0, pi) rather than centred.
    """
    if not 0.0 <= alpha <= 0.5 * math.pi + 1e-12:
        raise ValueError(f"alpha must lie in [0, pi/2], got {alpha}")
    ca = math.cos(alpha)
    base = 2.0 * math.sin(0.5 * alpha) ** 2  # 1 - cos(alpha), cancellation-free

    def f(phi):
        s = np.sin(phi)
        # 1 - cos(a) cos(p) = (1 - cos a) + cos(a) (1 - cos p), stable near 0
        return (base + ca * 2.0 * np.sin(0.5 * phi) ** 2) / (s * s)

    eps = math.pi * 1e-7
    phis = np.linspace(eps, math.pi - eps, n_grid)
    vals = f(phis)
    i = int(np.argmin(vals))
    lo = phis[max(i - 2, 0)] if i > 0 else eps * 1e-3
    hi = phis[min(i + 2, n_grid - 1)]
    res = minimize_scalar(f, bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-12})
    return float(min(res.fun, vals[i]))


def decay_to_l1_check(
    sigma: float,
    t: np.ndarray,
    psi: np.ndarray,
    r_ladder=(1.0, 2.0, 4.0, 8.0, 16.0),
    name: str = "decay_to_l1",
) -> ExperimentReport:
    """Tail-mass bound: if int_R^inf psi^2 <= R^-sigma then
    int_R^inf psi <= 2 sqrt(sigma R^(1-sigma)) / (sigma - 1).

    The hypothesis is verified numerically on the sample first; if it fails
    the verdict is untested.
    """
    if sigma <= 1.0:
        raise ValueError("sigma must exceed 1")
    t = np.asarray(t, dtype=float)
    psi = np.asarray(psi, dtype=float)
    if np.any(psi < 0):
        raise ValueError("psi must be nonnegative")

    rep = ExperimentReport(
        name=name,
        parameters={"sigma": sigma, "r_ladder": list(r_ladder), "t_max": float(t[-1])},
        columns=["R", "tail_l1", "bound", "hypothesis_lhs", "hypothesis_rhs"],
    )
    hyp_ok = True
    margin = math.inf
    for r in r_ladder:
        sel = t >= r
        if not np.any(sel):
            continue
        tail2 = float(np.trapezoid(psi[sel] ** 2, t[sel]))
        tail1 = float(np.trapezoid(psi[sel], t[sel]))
        bound = 2.0 * math.sqrt(sigma * r ** (1.0 - sigma)) / (sigma - 1.0)
        hyp_rhs = r**-sigma
        hyp_ok = hyp_ok and tail2 <= hyp_rhs * (1.0 + 1e-9)
        margin = min(margin, bound - tail1)
        rep.add_row(R=r, tail_l1=tail1, bound=bound,
                    hypothesis_lhs=tail2, hypothesis_rhs=hyp_rhs)
    if not hyp_ok:
        rep.add_verdict("tail_l1_bound", None, 0.0,
                        "hypothesis int_R psi^2 <= R^-sigma failed on the sample")
    else:
        rep.add_verdict(
            "tail_l1_bound", bool(margin >= -1e-12), margin,
            "square-tail decay R^-sigma implies the stated L1 tail bound",
        )
    return rep


def extension_bound_check(
    f: SampledField, p_exp: float, R: float, name: str = "extension_bounds"
) -> ExperimentReport:
    """Slab L2 bounds for the harmonic extension of f.

    Checks the R^(2-2/p) bound on [0, R], the |log R| bound on [1/R, R],
    and the sup bound on [0, 1/R] x [-R, R], all against quadrature of the
    Poisson-extended field.
    """
    if not 1.0 < p_exp <= 2.0:
        raise ValueError("p_exp must lie in (1, 2]")
    if R <= 1.0:
        raise ValueError("R must exceed 1")
    x = f.grid.nodes
    absf = np.abs(f.values)
    norm_p = float(np.trapezoid(absf**p_exp, x)) ** (1.0 / p_exp)
    norm_1 = float(np.trapezoid(absf, x))
    norm_inf = float(np.max(absf))

    ys = np.geomspace(min(0.25 / R, 0.01), R, 140)
    slab = poisson_extend(f, ys)
    row_l2 = np.trapezoid(slab.values**2, x, axis=1)  # int v^2 dx per layer

    def band(y_lo, y_hi, x_cut=None):
        sel = (ys >= y_lo) & (ys <= y_hi)
        if x_cut is None:
            return float(np.trapezoid(row_l2[sel], ys[sel]))
        cols = np.abs(x) <= x_cut
        part = np.trapezoid(slab.values[np.ix_(sel, cols)] ** 2, x[cols], axis=1)
        return float(np.trapezoid(part, ys[sel]))

    rep = ExperimentReport(
        name=name,
        parameters={"p": p_exp, "R": R, "grid": {"L": f.grid.half_width, "N": f.grid.n}},
        columns=["check", "lhs", "rhs", "ratio"],
    )

    lhs1 = band(ys[0], R)
    rhs1 = (
        (8.0 * p_exp / (p_exp + 2.0)) ** (3.0 - 2.0 / p_exp)
        * p_exp * R ** (2.0 - 2.0 / p_exp)
        / (2.0 * math.pi**2 * (p_exp - 1.0))
        * norm_p**2
    )
    rep.add_row(check="lp_band", lhs=lhs1, rhs=rhs1, ratio=lhs1 / rhs1 if rhs1 else 0.0)
    rep.add_verdict("lp_band", bool(lhs1 <= rhs1), rhs1 - lhs1,
                    "slab L2 mass of the extension obeys the R^(2-2/p) Lp bound")

    lhs2 = band(1.0 / R, R)
    rhs2 = (16.0 / (3.0 * math.pi**2)) * abs(math.log(R)) * norm_1**2
    rep.add_row(check="log_band", lhs=lhs2, rhs=rhs2, ratio=lhs2 / rhs2 if rhs2 else 0.0)
    rep.add_verdict("log_band", bool(lhs2 <= rhs2), rhs2 - lhs2,
                    "slab L2 mass on [1/R, R] obeys the |log R| L1 bound")

    lhs3 = band(ys[0], 1.0 / R, x_cut=R)
    rhs3 = 2.0 * norm_inf**2
    rep.add_row(check="sup_band", lhs=lhs3, rhs=rhs3, ratio=lhs3 / rhs3 if rhs3 else 0.0)
    rep.add_verdict("sup_band", bool(lhs3 <= rhs3), rhs3 - lhs3,
                    "thin-slab L2 mass obeys the maximum-principle sup bound")
    return rep


def appendix_suite(name: str = "appendix") -> ExperimentReport:
    """Deterministic bundle of the auxiliary-lemma checks."""
    rep = ExperimentReport(
        name=name,
        parameters={},
        columns=["check", "lhs", "rhs", "ratio"],
    )

    worst = 0.0
    for alpha in (0.0, math.pi / 6, 0.2, math.pi / 4, math.pi / 3, math.pi / 2):
        exact = aux_inf(alpha)
        scanned = aux_inf_scan(alpha, n_grid=10**6)
        worst = max(worst, abs(exact - scanned))
        rep.add_row(check=f"aux_inf_alpha={alpha:.6f}", lhs=scanned, rhs=exact,
                    ratio=scanned / exact)
    rep.add_verdict("aux_inf_scan", bool(worst <= 1e-9), 1e-9 - worst,
                    "grid+refined minimum of (1 - h cos phi)/sin^2 phi matches "
                    "(1 + sin alpha)/2")
    spot = (
        abs(aux_inf(0.0) - 0.5)
        + abs(aux_inf(math.pi / 2) - 1.0)
        + abs(aux_inf(math.pi / 6) - 0.75)
    )
    rep.add_verdict("aux_inf_values", bool(spot == 0.0), -spot,
                    "closed-form values at alpha = 0, pi/6, pi/2")

    t = np.geomspace(1.0, 1e4, 20001)
    ok = True
    worst_m = math.inf
    for sigma in (1.2, 1.5, 2.0, 3.0):
        psi = math.sqrt(sigma) * t ** (-(sigma + 1.0) / 2.0)
        sub = decay_to_l1_check(sigma, t, psi)
        ok = ok and sub.all_ok
        worst_m = min(worst_m, min(v.margin for v in sub.verdicts))
        for row in sub.rows:
            rep.add_row(check=f"decay_l1_sigma={sigma}", lhs=row["tail_l1"],
                        rhs=row["bound"],
                        ratio=row["tail_l1"] / row["bound"])
    zero = decay_to_l1_check(1.5, t, np.zeros_like(t))
    ok = ok and zero.all_ok
    rep.add_verdict("decay_to_l1", bool(ok), worst_m,
                    "saturating power family and the zero function satisfy "
                    "the tail L1 bound")

    g = Grid(60.0, 1201)
    f = SampledField(g, 1.0 / (1.0 + g.nodes**2))
    ext = extension_bound_check(f, 2.0, 10.0)
    for row in ext.rows:
        rep.add_row(check=f"extension_{row['check']}", lhs=row["lhs"],
                    rhs=row["rhs"], ratio=row["ratio"])
    rep.add_verdict("extension_bounds", bool(ext.all_ok),
                    min(v.margin for v in ext.verdicts),
                    "harmonic-extension slab bounds on the Lorentzian")
    return rep


# ---------------------------------------------------------------------------
# energy table


def _table_cell(args):
    k, off_value, h, L, n, cfg, n_starts = args
    d = WindingNumber(k, Offset(off_value))
    p = FieldParam(h)
    g = Grid(L, n)
    if n_starts > 1:
        res = minimize_multistart(d, p, g, cfg, n_starts=n_starts)[0]
    else:
        res = minimize(d, p, g, cfg)
    return (k, off_value, h), res


def _monotone_exception(d1: WindingNumber, d2: WindingNumber, h: float) -> bool:
    # the one incomparable pair for 0 < h < 1: (l + a/pi, 1 + l - a/pi)
    return (
        0.0 < h < 1.0
        and d1.offset is Offset.PLUS
        and d2.offset is Offset.MINUS
        and d2.k == d1.k + 1
    )


def _subadd_exception(d: WindingNumber, d1: WindingNumber, d2: WindingNumber,
                      p: FieldParam) -> bool:
    # at h = cos(pi/3) the concatenation argument needs d integer when the
    # two parts differ by an integer
    if abs(p.h - 0.5) > 1e-12:
        return False
    if d.is_integer(p):
        return False
    return d1.offset.value == d2.offset.value


def energy_table(
    d_set,
    h_set,
    g: Grid,
    cfg: MinimizeConfig = MinimizeConfig(),
    n_starts: int = 1,
    jobs: int = 1,
    name: str = "table",
) -> ExperimentReport:
    """Minimal energies over a (degree, field) grid plus the ordering laws.

    Verdicts: proved lower bounds, monotonicity in the degree (skipping the
    one incomparable pair), subadditivity over two-part partitions, and the
    strict composite inequality E(2 - a/pi) < E(1) + E(1 - a/pi) when those
    three cells are present at some h < 1.
    """
    d_set = list(d_set)
    h_set = [float(h) for h in h_set]
    tasks = [
        (d.k, d.offset.value, h, g.half_width, g.n, cfg, n_starts)
        for h in h_set
        for d in d_set
    ]
    results: dict[tuple, MinimizeResult] = {}
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for key, res in pool.map(_table_cell, tasks):
                results[key] = res
    else:
        for task in tasks:
            key, res = _table_cell(task)
            results[key] = res

    rep = ExperimentReport(
        name=name,
        parameters={
            "degrees": [_label(d) for d in d_set],
            "h_set": h_set,
            "grid": {"L": g.half_width, "N": g.n},
            "solver": {"max_iters": cfg.max_iters, "grad_tol": cfg.grad_tol},
            "n_starts": n_starts,
        },
        columns=["h", "degree", "d_value", "energy", "exchange", "anisotropy",
                 "stray", "lower_bound", "converged", "iterations", "n_walls"],
    )

    def cell(d: WindingNumber, h: float) -> MinimizeResult | None:
        return results.get((d.k, d.offset.value, h))

    bound_margin = math.inf
    bound_any = False
    mono_margin = math.inf
    mono_any = False
    sub_margin = math.inf
    sub_any = False
    strict_margin = -math.inf
    strict_any = False

    for h in h_set:
        p = FieldParam(h)
        for d in d_set:
            res = cell(d, h)
            e = res.breakdown.total
            rep.add_row(
                h=h, degree=_label(d), d_value=d.value(p), energy=e,
                exchange=res.breakdown.exchange,
                anisotropy=res.breakdown.anisotropy,
                stray=res.breakdown.stray,
                lower_bound=energy_lower_bound(d, p),
                converged=res.converged, iterations=res.iterations,
                n_walls=len(wall_locations(res.profile)),
            )
            if res.converged:
                bound_any = True
                bound_margin = min(bound_margin, e - energy_lower_bound(d, p))

        conv = [(d, cell(d, h)) for d in d_set
                if cell(d, h) is not None and cell(d, h).converged]
        for i, (d1, r1) in enumerate(conv):
            for d2, r2 in conv:
                v1, v2 = d1.value(p), d2.value(p)
                if not 0.0 <= v1 < v2:
                    continue
                if _monotone_exception(d1, d2, h):
                    continue
                mono_any = True
                mono_margin = min(mono_margin, r2.breakdown.total - r1.breakdown.total)

        by_symbol = {(d.k, d.offset.value): r for d, r in conv}
        for d, r in conv:
            if not admissible_positive(d, p):
                continue
            for part in enumerate_partitions(d, p, max_parts=2):
                d1, d2 = part.parts
                r1 = by_symbol.get((d1.k, d1.offset.value))
                r2 = by_symbol.get((d2.k, d2.offset.value))
                if r1 is None or r2 is None:
                    continue
                if _subadd_exception(d, d1, d2, p):
                    continue
                sub_any = True
                sub_margin = min(
                    sub_margin,
                    r1.breakdown.total + r2.breakdown.total - r.breakdown.total,
                )
        if h < 1.0:
            rc = by_symbol.get((2, Offset.MINUS.value))
            r1 = by_symbol.get((1, Offset.ZERO.value))
            r2 = by_symbol.get((1, Offset.MINUS.value))
            if rc is not None and r1 is not None and r2 is not None:
                strict_any = True
                strict_margin = max(
                    strict_margin,
                    r1.breakdown.total + r2.breakdown.total - rc.breakdown.total,
                )

    tol = 1e-6
    # a composite run is capped at the window separation while its parts
    # each enjoy the full window, leaving a residual interaction ~ 1/L^2
    # that the ordering laws must absorb
    window_slack = 40.0 / g.half_width**2
    rep.add_verdict(
        "lower_bounds",
        bool(bound_margin >= -1e-9) if bound_any else None,
        bound_margin if bound_any else 0.0,
        "every converged energy meets its proved lower bound "
        "((1-h)^2, (1+h)^2, or 2|d|-1)",
    )
    rep.add_verdict(
        "monotonicity",
        bool(mono_margin >= -tol) if mono_any else None,
        mono_margin if mono_any else 0.0,
        "minimal energy is nondecreasing in the degree outside the one "
        "incomparable pair",
    )
    rep.add_verdict(
        "subadditivity",
        bool(sub_margin >= -window_slack) if sub_any else None,
        sub_margin if sub_any else 0.0,
        "concatenating two compatible transitions costs at least the "
        "composite optimum, up to the residual finite-window interaction "
        "of order 1/L^2",
    )
    rep.add_verdict(
        "strict_composite",
        bool(strict_margin > tol) if strict_any else None,
        strict_margin if strict_any else 0.0,
        "E(2 - a/pi) is strictly below E(1) + E(1 - a/pi) near h = 1",
    )
    return rep


# ---------------------------------------------------------------------------
# splitting diagnostics


def _orient_for_chain(
    phi: np.ndarray, d: WindingNumber, start_sign: int, p: FieldParam
) -> tuple[np.ndarray, int]:
    """Possibly reflect a part so its left well type matches ``start_sign``.

    Returns (phi, end_sign).  Only integer degrees can flip their well
    type; for fractional degrees the well sequence is fixed.
    """
    if d.offset is Offset.MINUS:
        natural_start, natural_end = +1, -1
    elif d.offset is Offset.PLUS:
        natural_start, natural_end = -1, +1
    else:
        natural_start = natural_end = -1
    if natural_start == start_sign:
        return phi, natural_end
    if d.offset is Offset.ZERO:
        return -phi[::-1], -natural_end
    raise ValueError(
        f"part {d.label()} cannot start at the {'+' if start_sign > 0 else '-'}"
        "alpha well; partition incompatible with the boundary convention"
    )


def splitting_diagnostic(
    d: WindingNumber,
    p: FieldParam,
    partition: Partition,
    r_list,
    part_grid: Grid,
    cfg: MinimizeConfig = MinimizeConfig(),
    spacing: float = 6.0,
    expected_behaviour: str | None = None,
    name: str = "split",
) -> ExperimentReport:
    """Energy of localised parts concatenated at separation ``spacing * R``.

    For each R the parts are localised (constant wells outside [-2R, 2R]),
    placed ``spacing * R`` apart with well-valued gaps, and the total energy
    E(R) is compared against the sum of the parts' energies and against the
    direct minimiser of the full degree.  The tail of E(R) - sum behaves
    like c / R^2; its sign separates attraction (bound composite walls)
    from repulsion (energy decreasing as the pieces separate).
    """
    d = d.normalized(p)
    r_list = sorted(float(r) for r in r_list)
    J = len(partition.parts)
    if max(r_list) * spacing * J > 6.0 * part_grid.half_width:
        raise ValueError("largest R too big for the construction window")
    if max(r_list) > 0.5 * part_grid.half_width:
        raise ValueError("largest R exceeds half the part-grid width")

    cache: dict[tuple, MinimizeResult] = {}

    def part_result(q: WindingNumber) -> MinimizeResult:
        key = (q.k, q.offset.value)
        if key not in cache:
            cache[key] = minimize(q, p, part_grid, cfg)
        return cache[key]

    part_results = [part_result(q) for q in partition.parts]
    direct = minimize(d, p, part_grid, cfg)
    sum_parts = sum(r.breakdown.total for r in part_results)
    all_conv = all(r.converged for r in part_results) and direct.converged

    dx = part_grid.spacing
    confined_cache: dict[tuple, tuple[np.ndarray, np.ndarray, bool]] = {}

    def compact_part(q: WindingNumber, R: float) -> tuple[np.ndarray, np.ndarray, bool]:
        """Phase and nodes of a representative constant outside [-2R, 2R].

        Localising the free minimiser is used when its walls sit well inside
        [-R, R]; for pieces whose walls spread (no minimiser exists for
        them), the piece is minimised on a clamp-confined grid of
        half-width 2R instead, which is the compact representative the
        concatenation needs.
        """
        key = (q.k, q.offset.value, R)
        if key in confined_cache:
            return confined_cache[key]
        res = part_result(q)
        try:
            loc = localize(res.profile, R)
            out = (loc.phi, part_grid.nodes, res.converged)
        except LocalizeError:
            half_cells = max(int(round(2.0 * R / dx)), 2)
            g_conf = Grid(half_cells * dx, 2 * half_cells + 1)
            res_c = minimize(q, p, g_conf, cfg)
            out = (res_c.profile.phi, g_conf.nodes, res_c.converged)
        confined_cache[key] = out
        return out

    def concatenate(r_loc: float, separation: float) -> float:
        """Energy of the parts localised at r_loc, placed ``separation`` apart."""
        centers = [separation * (j - (J - 1) / 2.0) for j in range(J)]
        centers = [round(c / dx) * dx for c in centers]
        l_big = abs(centers[-1]) + 2.0 * r_loc + max(4.0 * r_loc, 20.0)
        n_big = int(round(2.0 * l_big / dx))
        if n_big % 2 == 1:
            n_big += 1
        g_big = Grid(n_big * dx / 2.0, n_big + 1)

        start_sign = +1 if d.offset is Offset.MINUS else -1
        phi_minus_overall = p.alpha * start_sign
        phi_big = np.full(g_big.n, phi_minus_overall)
        level = phi_minus_overall
        sign = start_sign
        xb = g_big.nodes
        for q, c in zip(partition.parts, centers):
            phi_loc, nodes_loc, conv = compact_part(q, r_loc)
            conv_flags.append(conv)
            phi_part, sign = _orient_for_chain(phi_loc, q, sign, p)
            ell_minus = phi_part[0]
            shifted = np.interp(
                xb - c, nodes_loc, phi_part,
                left=phi_part[0], right=phi_part[-1],
            )
            seg = xb >= c - 2.0 * r_loc - dx
            phi_big[seg] = level - ell_minus + shifted[seg]
            level = level - ell_minus + phi_part[-1]
        prof_big = Profile(g_big, phi_big, p, d)
        assert degree_of(prof_big).normalized(p) == d
        return energy(prof_big, cfg.padding_factor).total

    conv_flags: list[bool] = []
    rows = [(R, concatenate(R, spacing * R)) for R in r_list]

    # interaction probe: freeze the compact parts at the smallest radius and
    # sweep the separation alone, so the energy varies only through the
    # cross-interaction; differences on the geometric ladder then recover
    # the interaction power without any reference-value bias, and the sign
    # of dE/dseparation distinguishes attraction from repulsion directly
    r0 = r_list[0]
    probe = [(spacing * R, concatenate(r0, spacing * R)) for R in r_list]

    all_conv = all_conv and all(conv_flags)
    gaps = [e - sum_parts for _, e in rows]

    probe_e = np.array([e for _, e in probe])
    probe_tol = 1e-6 * max(1.0, abs(sum_parts))
    if len(probe) >= 2 and probe_e[-1] - probe_e[0] > probe_tol:
        behaviour = "attractive"  # separating the pieces costs energy
    elif len(probe) >= 2 and probe_e[-1] - probe_e[0] < -probe_tol:
        behaviour = "repulsive"  # separating the pieces pays
    else:
        behaviour = "indeterminate"

    seps = np.array([s for s, _ in probe])
    diffs = np.abs(np.diff(probe_e))
    mids = np.sqrt(seps[:-1] * seps[1:])
    usable = diffs > 1e-12
    if np.count_nonzero(usable) >= 3:
        slope, intercept, stderr = _fit_loglog(mids[usable], diffs[usable])
    else:
        slope, intercept, stderr = float("nan"), float("nan"), float("nan")

    rep = ExperimentReport(
        name=name,
        parameters={
            "degree": _label(d), "h": p.h,
            "partition": partition.labels(),
            "R_list": r_list, "spacing": spacing,
            "part_grid": {"L": part_grid.half_width, "N": part_grid.n},
            "sum_parts": sum_parts,
            "direct_energy": direct.breakdown.total,
            "tail_fit": {"slope": slope, "intercept": intercept, "stderr": stderr},
            "finite_domain_signature": True,
        },
        columns=["R", "concat_energy", "probe_energy", "sum_parts",
                 "direct_energy", "gap_to_sum", "gap_to_direct", "spacing",
                 "h", "d_value", "classification"],
    )
    for (R, e_r), (_, e_p), gap in zip(rows, probe, gaps):
        rep.add_row(
            R=R, concat_energy=e_r, probe_energy=e_p, sum_parts=sum_parts,
            direct_energy=direct.breakdown.total,
            gap_to_sum=gap, gap_to_direct=e_r - direct.breakdown.total,
            spacing=spacing, h=p.h, d_value=d.value(p),
            classification=behaviour,
        )

    untested = None if not all_conv else True
    rep.add_verdict(
        "decoupling",
        (abs(gaps[-1]) <= 0.02 * sum_parts) if all_conv else None,
        0.02 * sum_parts - abs(gaps[-1]),
        "far-separated parts decouple: E(R_max) within 2% of the parts' sum",
    )
    rep.add_verdict(
        "exceeds_direct",
        (min(e for _, e in rows) > direct.breakdown.total) if all_conv else None,
        min(e for _, e in rows) - direct.breakdown.total,
        "every concatenation costs more than the direct minimiser of the "
        "full degree",
    )
    slope_ok = bool(-3.5 <= slope <= -1.5) if math.isfinite(slope) else False
    rep.add_verdict(
        "tail_power",
        slope_ok if all_conv and math.isfinite(slope) else None,
        slope - (-2.0) if math.isfinite(slope) else 0.0,
        "the cross-interaction of frozen compact parts decays like an "
        "inverse-square-type power of the separation",
    )
    decreasing = all(b <= a + 1e-9 for (_, a), (_, b) in zip(rows, rows[1:]))
    above_sum = all(gv >= -0.02 * abs(sum_parts) for gv in gaps)
    rep.add_verdict(
        "monotone_separation",
        (decreasing and above_sum) if all_conv else None,
        max((b - a for (_, a), (_, b) in zip(rows, rows[1:])), default=0.0),
        "E(R) decreases monotonically in R toward the parts' energy sum "
        "from above",
    )
    if expected_behaviour is not None:
        rep.add_verdict(
            "signature",
            (behaviour == expected_behaviour) if all_conv else None,
            float(probe_e[-1] - probe_e[0]) if len(probe) >= 2 else 0.0,
            f"separation-energy signature is {expected_behaviour} "
            "(sign of dE/dseparation at frozen parts)",
        )
    return rep


# ---------------------------------------------------------------------------
# structure / decay / width diagnostics on a single minimiser


def _require_minus_class(profile: Profile) -> int:
    d = profile.degree
    if d.offset is not Offset.MINUS or d.k < 1 or profile.params.h >= 1.0:
        raise ValueError(
            f"structure theorem applies to degrees l - a/pi at h < 1, "
            f"got {d.label()} at h={profile.params.h}"
        )
    return d.k


def structure_check(result: MinimizeResult, name: str = "structure") -> ExperimentReport:
    """Alternating wall pattern and single sign change of m1 - h per gap.

    Also records min phi' (whether the phase is monotone is open; the value
    is measured, not judged).
    """
    prof = result.profile
    ell = _require_minus_class(prof)
    h = prof.params.h
    x = prof.grid.nodes
    m1 = prof.m1()

    walls = wall_locations(prof)
    signs = [s for _, s in walls]
    expected_signs = [(-1) ** n for n in range(1, 2 * ell)]

    # crossings of m1 through h strictly between the outer walls
    b_points: list[float] = []
    if walls:
        a_lo, a_hi = walls[0][0], walls[-1][0]
        c = m1 - h
        inside = (x > a_lo) & (x < a_hi)
        idx = np.where(inside)[0]
        hyst = 1e-8
        state = None
        for i in idx:
            v = c[i]
            if abs(v) <= hyst:
                continue
            s = 1 if v > 0 else -1
            if state is not None and s != state:
                j = i
                while j > 0 and (c[j - 1] > 0) == (c[i] > 0):
                    j -= 1
                t = c[j - 1] / (c[j - 1] - c[j])
                b_points.append(float(x[j - 1] + t * (x[j] - x[j - 1])))
            state = s

    # worst violation of the alternating-interval sign pattern
    boundaries = [-math.inf, *b_points, math.inf]
    worst = 0.0
    for i in range(len(boundaries) - 1):
        seg = (x >= boundaries[i]) & (x <= boundaries[i + 1])
        expect_below = i % 2 == 0  # tails start below h
        dev = (m1[seg] - h) if expect_below else (h - m1[seg])
        if dev.size:
            worst = max(worst, float(np.max(dev)))

    slopes = _phi_slopes(prof)
    rep = ExperimentReport(
        name=name,
        parameters={
            "degree": _label(prof.degree), "h": h,
            "grid": {"L": prof.grid.half_width, "N": prof.grid.n},
            "converged": result.converged,
            "min_phi_prime": float(np.min(slopes)),
        },
        columns=["kind", "position", "value"],
    )
    for pos, s in walls:
        rep.add_row(kind="wall", position=pos, value=s)
    for b in b_points:
        rep.add_row(kind="h_crossing", position=b, value=0.0)

    conv = result.converged
    rep.add_verdict(
        "wall_count", (len(walls) == 2 * ell - 1) if conv else None,
        float(2 * ell - 1 - len(walls)),
        "a minimiser of degree l - a/pi has exactly 2l - 1 points with m1 = +-1",
    )
    rep.add_verdict(
        "alternating_signs", (signs == expected_signs) if conv else None,
        0.0 if signs == expected_signs else 1.0,
        "the wall values alternate m1(a_n) = (-1)^n",
    )
    rep.add_verdict(
        "h_crossing_count", (len(b_points) == 2 * ell - 2) if conv else None,
        float(2 * ell - 2 - len(b_points)),
        "m1 - h changes sign exactly once between consecutive walls",
    )
    rep.add_verdict(
        "sign_pattern", (worst <= 1e-6) if conv else None, 1e-6 - worst,
        "m1 - h alternates sign across the crossing points with violation "
        "at most 1e-6",
    )
    return rep


def decay_fit(
    result: MinimizeResult,
    r_ladder=None,
    name: str = "decay",
) -> ExperimentReport:
    """Tail-energy power law away from the outermost walls.

    The tail quantity is the one the decay estimate controls: the line
    energy density |m'|^2 + (m1 - h)^2 beyond the walls *plus* the gradient
    energy of the harmonic extension over the strip of height R above that
    region.  The strip term saturates the R^-2 log R rate (the line terms
    alone decay faster), so the ladder starts in the asymptotic regime.
    Fits log(tail) against log R with and without the log R correction;
    also calibrates the pointwise envelope |m1 - h| <= C sigma^(-3/4)
    sqrt(E + 1) on the near region and verifies it on the far region.
    """
    prof = result.profile
    walls = wall_locations(prof)
    if not walls:
        raise ValueError("profile has no walls; nothing decays")
    L = prof.grid.half_width
    a_left, a_right = walls[0][0], walls[-1][0]
    gap = min(L - a_right, L + a_left)
    if gap < 20.0:
        raise ValueError(f"wall-to-boundary gap {gap:.1f} < 20; tail too short")

    if r_ladder is None:
        r_max = 0.25 * gap
        r_ladder = np.geomspace(max(0.3 * r_max, 4.0), max(r_max, 8.0), 7)
    r_ladder = np.asarray(sorted(r_ladder), dtype=float)

    x = prof.grid.nodes
    h = prof.params.h
    m1 = prof.m1()
    dens = np.gradient(prof.phi, x) ** 2 + (m1 - h) ** 2

    ys = np.geomspace(max(0.5 * prof.grid.spacing, 1e-3), 1.2 * r_ladder[-1], 56)
    slab = poisson_extend(SampledField(prof.grid, m1 - h), ys)
    rows_v = np.vstack([m1 - h, slab.values])
    ys_f = np.array([0.0, *ys])
    vx = np.gradient(rows_v, prof.grid.spacing, axis=1)
    vy = np.empty_like(rows_v)
    vy[1:-1] = (rows_v[2:] - rows_v[:-2]) / (ys_f[2:, None] - ys_f[:-2, None])
    vy[0] = (rows_v[1] - rows_v[0]) / (ys_f[1] - ys_f[0])
    vy[-1] = (rows_v[-1] - rows_v[-2]) / (ys_f[-1] - ys_f[-2])
    grad_sq = vx * vx + vy * vy

    tails = []
    for R in r_ladder:
        sel = (x >= a_right + R) | (x <= a_left - R)
        t = 0.0
        if np.count_nonzero(sel) > 1:
            t += float(np.trapezoid(dens[sel], x[sel]))
            ysel = ys_f <= R
            cols = np.trapezoid(grad_sq[np.ix_(ysel, sel)], ys_f[ysel], axis=0)
            t += float(np.trapezoid(cols, x[sel]))
        tails.append(t)
    tails = np.asarray(tails)

    keep = tails > 0
    slope, intercept, stderr = _fit_loglog(r_ladder[keep], tails[keep])
    log_corr = tails[keep] / np.log(np.maximum(r_ladder[keep], math.e))
    slope_log, _, _ = _fit_loglog(r_ladder[keep], log_corr)

    # pointwise envelope calibrated near the walls, tested far from them
    wall_pos = np.array([w for w, _ in walls])
    sigma = 1.0 + np.min(np.abs(x[:, None] - wall_pos[None, :]), axis=1)
    e_term = math.sqrt(result.breakdown.total + 1.0)
    ratio = np.abs(m1 - h) * sigma**0.75 / e_term
    near = sigma <= 5.0
    c_fit = float(np.max(ratio[near])) if np.any(near) else float(np.max(ratio))
    far = sigma > 5.0
    env_margin = (
        float(np.min(c_fit - ratio[far])) if np.any(far) else 0.0
    )

    rep = ExperimentReport(
        name=name,
        parameters={
            "degree": _label(prof.degree), "h": h,
            "grid": {"L": L, "N": prof.grid.n},
            "fit": {"slope": slope, "intercept": intercept, "stderr": stderr,
                    "slope_with_log_correction": slope_log},
            "envelope_C": c_fit,
            "converged": result.converged,
        },
        columns=["R", "tail_integral", "slope", "intercept", "slope_log"],
    )
    for R, t in zip(r_ladder, tails):
        rep.add_row(R=float(R), tail_integral=float(t), slope=slope,
                    intercept=intercept, slope_log=slope_log)
    conv = result.converged
    rep.add_verdict(
        "tail_slope", (-2.5 <= slope <= -1.6) if conv else None, slope - (-2.0),
        "tail energy decays like R^-2 (log-corrected), slope within [-2.5, -1.6]",
    )
    rep.add_verdict(
        "pointwise_envelope", (env_margin >= -1e-12) if conv else None, env_margin,
        "|m1 - h| <= C sigma^(-3/4) sqrt(E + 1) calibrated near the walls "
        "holds on the far tails",
    )
    return rep


def l1_parts_scan(
    d: WindingNumber,
    h_list,
    g: Grid,
    cfg: MinimizeConfig = MinimizeConfig(),
    name: str = "l1scan",
) -> ExperimentReport:
    """Signed-part integrals of m1 - h along a field ladder toward h = 1.

    The positive part must shrink at least like alpha^(2/11) (the proved
    exponent at p = 5/3); the negative part must stay of order one.
    """
    hs = [float(h) for h in h_list]
    if any(b <= a for a, b in zip(hs, hs[1:])):
        raise ValueError("h_list must increase toward 1")
    runs = continuation(d, hs, g, cfg)

    rep = ExperimentReport(
        name=name,
        parameters={
            "degree": _label(d), "h_list": hs,
            "grid": {"L": g.half_width, "N": g.n},
        },
        columns=["h", "alpha", "pos_l1", "neg_l1", "converged"],
    )
    alphas, pos, neg, conv_flags = [], [], [], []
    x = g.nodes
    for h, res in runs:
        p = FieldParam(h)
        m1 = res.profile.m1()
        c = m1 - h
        pos_l1 = float(np.trapezoid(np.clip(c, 0.0, None), x))
        neg_l1 = float(np.trapezoid(np.clip(-c, 0.0, None), x))
        rep.add_row(h=h, alpha=p.alpha, pos_l1=pos_l1, neg_l1=neg_l1,
                    converged=res.converged)
        alphas.append(p.alpha)
        pos.append(pos_l1)
        neg.append(neg_l1)
        conv_flags.append(res.converged)

    all_conv = all(conv_flags)
    fit_pts = [(a, v) for a, v, ok in zip(alphas, pos, conv_flags)
               if ok and a > 0 and v > 1e-14]
    if len(fit_pts) >= 3:
        fa = np.array([a for a, _ in fit_pts])
        fv = np.array([v for _, v in fit_pts])
        q, q_int, q_err = _fit_loglog(fa, fv)
    else:
        q, q_int, q_err = float("nan"), float("nan"), float("nan")
    rep.parameters["positive_part_fit"] = {
        "exponent": q, "intercept": q_int, "stderr": q_err,
        "band": [q - 2 * q_err, q + 2 * q_err] if math.isfinite(q_err) else None,
    }

    target = 2.0 / 11.0 - 0.05
    rep.add_verdict(
        "positive_part_exponent",
        (q >= target) if all_conv and math.isfinite(q) else None,
        (q - target) if math.isfinite(q) else 0.0,
        "fitted decay exponent of the positive-part mass meets the proved "
        "alpha^(2/11) rate",
    )
    neg_conv = [v for v, ok in zip(neg, conv_flags) if ok]
    neg_min = min(neg_conv) if neg_conv else 0.0
    rep.add_verdict(
        "negative_part_bounded",
        (neg_min >= 0.05) if all_conv else None,
        neg_min - 0.05,
        "the negative-part mass stays bounded away from zero along the ladder",
    )
    if hs and hs[-1] == 1.0:
        p_at_1 = pos[-1]
        rep.add_verdict(
            "positive_part_vanishes_at_h1",
            (p_at_1 <= 1e-12) if conv_flags[-1] else None,
            1e-12 - p_at_1,
            "at h = 1 the component m1 never exceeds 1, so the positive part "
            "is identically zero",
        )
    return rep


def width_diagnostic(
    d: WindingNumber,
    h_list,
    g: Grid,
    cfg: MinimizeConfig = MinimizeConfig(),
    name: str = "width",
) -> ExperimentReport:
    """Wall-set diameter along a field ladder, plus a derivative Hoelder fit.

    The diameter must stay bounded (no growth trend) as h -> 1; the
    half-order Hoelder constant of m' should be stable across the ladder.
    """
    hs = [float(h) for h in h_list]
    runs = continuation(d, hs, g, cfg)
    rep = ExperimentReport(
        name=name,
        parameters={
            "degree": _label(d), "h_list": hs,
            "grid": {"L": g.half_width, "N": g.n},
        },
        columns=["h", "diameter", "holder_const", "converged"],
    )
    diameters, holders, conv_flags = [], [], []
    x = g.nodes
    dx = g.spacing
    for h, res in runs:
        walls = wall_locations(res.profile)
        diam = walls[-1][0] - walls[0][0] if len(walls) >= 2 else 0.0
        m1p = np.gradient(res.profile.m1(), x)
        m2p = np.gradient(res.profile.m2(), x)
        max_lag = max(1, int(round(2.0 / dx)))
        c_best = 0.0
        for lag in range(1, max_lag + 1):
            num = np.hypot(m1p[lag:] - m1p[:-lag], m2p[lag:] - m2p[:-lag])
            c_best = max(c_best, float(np.max(num)) / math.sqrt(lag * dx))
        rep.add_row(h=h, diameter=diam, holder_const=c_best, converged=res.converged)
        diameters.append(diam)
        holders.append(c_best)
        conv_flags.append(res.converged)

    all_conv = all(conv_flags)
    pos_d = [v for v, ok in zip(diameters, conv_flags) if ok]
    if pos_d and max(pos_d) > 0:
        span_ok = max(pos_d) < 2.0 * max(min(pos_d), 1e-12)
        margin = 2.0 * min(pos_d) - max(pos_d)
    else:
        span_ok, margin = True, 0.0
    rep.add_verdict(
        "bounded_width",
        span_ok if all_conv else None, margin,
        "the wall-set diameter stays bounded (varies by under 2x) as h -> 1",
    )
    pos_h = [v for v, ok in zip(holders, conv_flags) if ok]
    holder_ok = bool(pos_h) and max(pos_h) <= 3.0 * min(pos_h)
    rep.add_verdict(
        "holder_stable",
        holder_ok if all_conv else None,
        (3.0 * min(pos_h) - max(pos_h)) if pos_h else 0.0,
        "the fitted half-order Hoelder constant of m' is stable across the "
        "ladder",
    )
    return rep


# ---------------------------------------------------------------------------
# local estimates between walls


def _smoothstep(t: np.ndarray) -> np.ndarray:
    t = np.clip(t, 0.0, 1.0)
    return t * t * (3.0 - 2.0 * t)


def local_estimate_check(
    result: MinimizeResult,
    window: tuple[float, float],
    R: float,
    name: str = "localest",
) -> ExperimentReport:
    """First- and second-order local energy inequalities on a wall-free window.

    Builds the separable cutoff eta(x, y) = chi(x) psi(y) with chi ramping
    over width R inside the window and psi dying between R and 2R, extends
    the stray source harmonically, and evaluates both sides of the two
    inequalities by quadrature.
    """
    prof = result.profile
    a1, a2 = float(window[0]), float(window[1])
    if a2 - a1 <= 2.0 * R:
        raise ValueError("window must be wider than 2R")
    walls = wall_locations(prof)
    if any(a1 <= w <= a2 for w, _ in walls):
        raise ValueError("window contains a wall")

    x = prof.grid.nodes
    dx = prof.grid.spacing
    h = prof.params.h
    phi = prof.phi

    chi = np.minimum(_smoothstep((x - a1) / R), _smoothstep((a2 - x) / R))
    chi_p = np.gradient(chi, x)

    m1 = prof.m1()
    f = m1 - h
    phi_p = np.gradient(phi, x)
    phi_pp = np.gradient(phi_p, x)
    sin_phi = prof.m2()

    ys = np.geomspace(max(0.25 * dx, 1e-3), 2.0 * R, 48)
    slab = poisson_extend(SampledField(prof.grid, f), ys)
    rows_v = np.vstack([f, slab.values])
    ys_full = np.array([0.0, *ys])
    psi = _smoothstep((2.0 * R - ys_full) / R)
    psi_p = np.gradient(psi, ys_full)

    vx = np.gradient(rows_v, dx, axis=1)
    vy = np.empty_like(rows_v)
    vy[1:-1] = (rows_v[2:] - rows_v[:-2]) / (ys_full[2:, None] - ys_full[:-2, None])
    vy[0] = (rows_v[1] - rows_v[0]) / (ys_full[1] - ys_full[0])
    vy[-1] = (rows_v[-1] - rows_v[-2]) / (ys_full[-1] - ys_full[-2])
    vxx = np.gradient(vx, dx, axis=1)
    vxy = np.gradient(vx, ys_full, axis=0)

    wx = np.ones(x.size)
    wx[0] = wx[-1] = 0.5

    def slab_integral(dens_rows: np.ndarray) -> float:
        line = np.tensordot(dens_rows, wx, axes=(1, 0)) * dx
        return float(np.trapezoid(line, ys_full))

    eta = chi[None, :] * psi[:, None]
    grad_eta_sq = (chi_p[None, :] * psi[:, None]) ** 2 + (
        chi[None, :] * psi_p[:, None]
    ) ** 2
    grad_v_sq = vx * vx + vy * vy

    # first-order inequality
    lhs1_line = float(np.dot(wx, chi**4 * (0.5 * phi_p**2 + f * f))) * dx
    lhs1_slab = slab_integral(eta**4 * grad_v_sq)
    rhs1 = 576.0 * float(np.dot(wx, chi_p**4)) * dx + 16.0 * slab_integral(
        rows_v**2 * eta**2 * grad_eta_sq
    )
    lhs1 = lhs1_line + lhs1_slab

    # second-order inequality
    m_pp_sq = phi_pp**2 + phi_p**4
    m1_p_sq = (phi_p * sin_phi) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        quart = np.where(np.abs(sin_phi) > 1e-12, phi_p**4 / sin_phi**2, 0.0)
    lhs2_line = float(np.dot(wx, chi**2 * (m_pp_sq + m1_p_sq + quart))) * dx
    hess_sq = 2.0 * (vxx * vxx + vxy * vxy)  # vyy = -vxx for harmonic v
    lhs2_slab = slab_integral(eta**2 * hess_sq)
    rhs2 = 32.0 * float(np.dot(wx, chi_p**2 * phi_p**2)) * dx + 24.0 * slab_integral(
        grad_eta_sq * grad_v_sq
    )
    lhs2 = lhs2_line + lhs2_slab

    # pointwise auxiliary bound on the window
    in_win = (x >= a1) & (x <= a2)
    with np.errstate(divide="ignore", invalid="ignore"):
        aux = (1.0 - h * np.cos(phi)) / np.maximum(sin_phi**2, 1e-300)
    aux_min = float(np.min(aux[in_win]))

    rep = ExperimentReport(
        name=name,
        parameters={
            "degree": _label(prof.degree), "h": h, "window": [a1, a2], "R": R,
            "converged": result.converged,
            "aux_reference": aux_inf(prof.params.alpha),
        },
        columns=["term", "value"],
    )
    for term, val in [
        ("lhs1_line", lhs1_line), ("lhs1_slab", lhs1_slab), ("rhs1", rhs1),
        ("lhs2_line", lhs2_line), ("lhs2_slab", lhs2_slab), ("rhs2", rhs2),
        ("aux_min", aux_min),
    ]:
        rep.add_row(term=term, value=val)

    conv = result.converged
    rep.add_verdict(
        "first_order_inequality", (lhs1 <= rhs1) if conv else None, rhs1 - lhs1,
        "weighted local energy plus extension energy is controlled by "
        "576 int (eta')^4 + 16 int v^2 eta^2 |grad eta|^2",
    )
    rep.add_verdict(
        "second_order_inequality", (lhs2 <= rhs2) if conv else None, rhs2 - lhs2,
        "weighted second-order energy is controlled by "
        "32 int (eta')^2 |m'|^2 + 24 int |grad eta|^2 |grad v|^2",
    )
    rep.add_verdict(
        "well_gap_bound", (aux_min >= 0.5 - 1e-12) if conv else None, aux_min - 0.5,
        "(1 - h cos phi)/sin^2 phi stays above 1/2 (its infimum is "
        "(1 + sin alpha)/2) away from the walls",
    )
    return rep

"""Command-line entry point.

Subcommands: ``minimize`` (one degree-constrained run), ``experiment
<name>`` (the verification harness), and ``selftest`` (fast invariant
suite).  Configuration is a single JSON document plus ``--set key=value``
dotted overrides, echoed into every output so results are re-runnable.

Exit codes: 0 success, 1 configuration error, 2 solver non-convergence,
3 verdict failure.
"""

from __future__ import annotations

import argparse
import copy
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import experiments
from .energy import energy, gradient
from .partitions import Partition
from .profiles import (
    FieldParam,
    Grid,
    Offset,
    Profile,
    WindingNumber,
    initial_ansatz,
    write_profile_csv,
)
from .reports import ExperimentReport
from .solver import MinimizeConfig, minimize
from .strayfield import (
    SampledField,
    dirichlet_energy_extension,
    h12_double_integral,
    h12_spectral,
)

EXPERIMENT_NAMES = (
    "table",
    "split",
    "structure",
    "decay",
    "l1scan",
    "localest",
    "width",
    "appendix",
)

DEFAULT_CONFIG: dict = {
    "grid": {"L": 100.0, "N": 2049},
    "field": {"h": 0.9},
    "degree": {"k": 0, "offset": "plus"},
    "solver": {
        "max_iters": 20000,
        "grad_tol": 1e-7,
        "memory": 10,
        "armijo_c": 1e-4,
        "backtrack": 0.5,
        "min_step": 1e-14,
    },
    "ansatz": {"wall_positions": None, "core_scale": 1.0},
    "experiment": {},
    "out": "results",
}

_OFFSETS = {"zero": Offset.ZERO, "plus": Offset.PLUS, "minus": Offset.MINUS}


def _deep_merge(base: dict, extra: dict) -> dict:
    out = copy.deepcopy(base)
    for key, val in extra.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], val)
        else:
            out[key] = copy.deepcopy(val)
    return out


def _apply_set(cfg: dict, assignment: str) -> None:
    if "=" not in assignment:
        raise ValueError(f"--set needs key=value, got {assignment!r}")
    key, raw = assignment.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    node = cfg
    parts = key.split(".")
    for part in parts[:-1]:
        node = node.setdefault(part, {})
        if not isinstance(node, dict):
            raise ValueError(f"--set path {key!r} crosses a non-object value")
    node[parts[-1]] = value


def load_config(path: str | None, sets: list[str]) -> dict:
    cfg = copy.deepcopy(DEFAULT_CONFIG)
    if path is not None:
        with open(path) as fh:
            cfg = _deep_merge(cfg, json.load(fh))
    for assignment in sets:
        _apply_set(cfg, assignment)
    return cfg


def _parse_degree(node: dict) -> WindingNumber:
    return WindingNumber(int(node["k"]), _OFFSETS[str(node["offset"]).lower()])


def validate_config(cfg: dict, experiment: str | None = None) -> list[str]:
    """Every violated constraint, checked before any compute."""
    errors: list[str] = []
    grid = cfg.get("grid", {})
    n = grid.get("N")
    length = grid.get("L")
    if not isinstance(n, int) or n < 3 or n % 2 == 0:
        errors.append(f"grid.N must be an odd integer >= 3, got {n!r}")
    if not isinstance(length, (int, float)) or length <= 0:
        errors.append(f"grid.L must be positive, got {length!r}")

    field = cfg.get("field", {})
    h = field.get("h")
    if h is not None and not (isinstance(h, (int, float)) and 0.0 <= h <= 1.0):
        errors.append(f"field.h must lie in [0, 1], got {h!r}")

    deg = cfg.get("degree", {})
    if str(deg.get("offset", "")).lower() not in _OFFSETS:
        errors.append(f"degree.offset must be one of {sorted(_OFFSETS)}")
    if not isinstance(deg.get("k"), int):
        errors.append(f"degree.k must be an integer, got {deg.get('k')!r}")

    solver = cfg.get("solver", {})
    try:
        MinimizeConfig(
            max_iters=int(solver.get("max_iters", 1)),
            grad_tol=float(solver.get("grad_tol", 1e-7)),
            memory=int(solver.get("memory", 10)),
            armijo_c=float(solver.get("armijo_c", 1e-4)),
            backtrack=float(solver.get("backtrack", 0.5)),
            min_step=float(solver.get("min_step", 1e-14)),
        )
    except (ValueError, TypeError) as exc:
        errors.append(f"solver: {exc}")

    exp = cfg.get("experiment", {})
    if isinstance(length, (int, float)) and length > 0:
        r_val = exp.get("R")
        if r_val is not None and not (1.0 <= float(r_val) <= 0.5 * float(length)):
            errors.append(f"experiment.R must lie in [1, L/2], got {r_val!r}")
        for r in exp.get("R_list", []) or []:
            if float(r) > 0.5 * float(length):
                errors.append(f"experiment.R_list entry {r} exceeds L/2")
    for ladder_key in ("h_list", "h_set"):
        ladder = exp.get(ladder_key)
        if ladder is not None:
            if not all(isinstance(v, (int, float)) and 0 <= v <= 1 for v in ladder):
                errors.append(f"experiment.{ladder_key} values must lie in [0, 1]")
    if experiment == "split" and not exp.get("partition"):
        errors.append("experiment.partition is required for `experiment split`")
    if experiment == "localest" and not exp.get("window"):
        errors.append("experiment.window is required for `experiment localest`")
    return errors


def _solver_config(cfg: dict) -> MinimizeConfig:
    s = cfg["solver"]
    return MinimizeConfig(
        max_iters=int(s["max_iters"]),
        grad_tol=float(s["grad_tol"]),
        memory=int(s["memory"]),
        armijo_c=float(s["armijo_c"]),
        backtrack=float(s["backtrack"]),
        min_step=float(s["min_step"]),
    )


def _out_dir(cfg: dict, override: str | None) -> Path:
    out = Path(override if override is not None else cfg.get("out", "results"))
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_minimize(cfg: dict, out_override: str | None = None) -> int:
    errors = validate_config(cfg)
    if errors:
        for e in errors:
            print(f"config error: {e}", file=sys.stderr)
        return 1
    g = Grid(float(cfg["grid"]["L"]), int(cfg["grid"]["N"]))
    p = FieldParam(float(cfg["field"]["h"]))
    d = _parse_degree(cfg["degree"])
    scfg = _solver_config(cfg)
    ansatz = cfg.get("ansatz", {})
    init = {
        "wall_positions": ansatz.get("wall_positions"),
        "core_scale": ansatz.get("core_scale", 1.0),
    }
    res = minimize(d, p, g, scfg, init=init)

    out = _out_dir(cfg, out_override)
    write_profile_csv(res.profile, out / "profile.csv")
    payload = {"config": cfg, "result": res.as_dict()}
    with open(out / "minimize.json", "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=float)
        fh.write("\n")
    print(
        f"degree {d.label()} at h={p.h}: converged={res.converged} "
        f"E={res.breakdown.total:.8f} iters={res.iterations} -> {out}"
    )
    return 0 if res.converged else 2


def _run_experiment(name: str, cfg: dict, jobs: int) -> ExperimentReport:
    g = Grid(float(cfg["grid"]["L"]), int(cfg["grid"]["N"]))
    scfg = _solver_config(cfg)
    exp = cfg.get("experiment", {})
    d = _parse_degree(cfg["degree"])
    h = float(cfg["field"]["h"])
    p = FieldParam(h)

    if name == "appendix":
        return experiments.appendix_suite()
    if name == "table":
        degrees = [_parse_degree(node) for node in exp["degrees"]]
        return experiments.energy_table(
            degrees, exp["h_set"], g, scfg,
            n_starts=int(exp.get("n_starts", 1)), jobs=jobs,
        )
    if name == "split":
        parts = tuple(_parse_degree(node) for node in exp["partition"])
        partition = Partition(parts, d)
        return experiments.splitting_diagnostic(
            d, p, partition, exp.get("R_list", [5.0, 10.0, 15.0, 20.0]), g, scfg,
            spacing=float(exp.get("spacing", 6.0)),
            expected_behaviour=exp.get("expected"),
        )
    if name == "structure":
        res = minimize(d, p, g, scfg)
        return experiments.structure_check(res)
    if name == "decay":
        res = minimize(d, p, g, scfg)
        return experiments.decay_fit(res, r_ladder=exp.get("R_ladder"))
    if name == "l1scan":
        return experiments.l1_parts_scan(d, exp["h_list"], g, scfg)
    if name == "localest":
        res = minimize(d, p, g, scfg)
        window = tuple(float(v) for v in exp["window"])
        return experiments.local_estimate_check(res, window, float(exp.get("R", 2.0)))
    if name == "width":
        return experiments.width_diagnostic(d, exp["h_list"], g, scfg)
    raise ValueError(name)


def cmd_experiment(name: str, cfg: dict, out_override: str | None = None,
                   jobs: int | None = None) -> int:
    if name not in EXPERIMENT_NAMES:
        print(
            f"unknown experiment {name!r}; valid names: "
            + ", ".join(EXPERIMENT_NAMES),
            file=sys.stderr,
        )
        return 1
    errors = validate_config(cfg, experiment=name)
    if errors:
        for e in errors:
            print(f"config error: {e}", file=sys.stderr)
        return 1
    jobs = jobs if jobs is not None else (os.cpu_count() or 1)
    report = _run_experiment(name, cfg, jobs)
    report.parameters["config"] = cfg
    out = _out_dir(cfg, out_override)
    csv_path, json_path = report.write(out)
    for v in report.verdicts:
        state = {True: "pass", False: "FAIL", None: "untested"}[v.passed]
        print(f"[{state:>8}] {v.name}: margin={v.margin:.4g}")
    print(f"report -> {csv_path}, {json_path}")
    return 0 if report.all_ok else 3


def selftest(spectral_scale: float = 1.0) -> list[tuple[str, bool, str]]:
    """Fast invariant suite; ``spectral_scale`` is a fault-injection knob
    that multiplies the spectral evaluator inside these checks only."""
    checks: list[tuple[str, bool, str]] = []

    g = Grid(120.0, 2401)
    f = SampledField(g, 1.0 / (1.0 + g.nodes**2))
    target = math.pi / 4.0
    di = h12_double_integral(f)
    sp = h12_spectral(f) * spectral_scale
    checks.append(
        ("lorentzian_double", abs(di - target) / target <= 0.01,
         f"double integral {di:.6f} vs pi/4")
    )
    checks.append(
        ("lorentzian_spectral", abs(sp - target) / target <= 0.01,
         f"spectral {sp:.6f} vs pi/4")
    )

    rng = np.random.default_rng(42)
    gb = Grid(40.0, 801)
    worst = 0.0
    for _ in range(3):
        c = rng.uniform(-10, 10)
        w = rng.uniform(1.0, 3.0)
        fb = SampledField(gb, np.exp(-((gb.nodes - c) ** 2) / (2 * w * w)))
        a = h12_double_integral(fb)
        b = h12_spectral(fb) * spectral_scale
        e = dirichlet_energy_extension(fb)
        worst = max(worst, abs(a - b) / a, abs(e - a) / a * 0.2)
    checks.append(
        ("three_way_agreement", worst <= 0.01,
         f"worst scaled disagreement {worst:.4f}")
    )

    p = FieldParam(0.8)
    gg = Grid(30.0, 385)
    prof = initial_ansatz(WindingNumber(0, Offset.PLUS), p, gg, [0.0], 1.0)
    bump = np.sin(np.pi * (np.arange(gg.n)) / (gg.n - 1)) ** 2
    prof = prof.with_phi(prof.phi + 0.1 * bump * np.cos(gg.nodes))
    gr = gradient(prof)
    eps = 1e-6
    worst_g = 0.0
    for _ in range(3):
        v = rng.normal(size=gg.n - 2)
        v /= np.linalg.norm(v)
        hi = prof.phi.copy()
        hi[1:-1] += eps * v
        lo = prof.phi.copy()
        lo[1:-1] -= eps * v
        fd = (energy(prof.with_phi(hi)).total - energy(prof.with_phi(lo)).total) / (
            2 * eps
        )
        worst_g = max(worst_g, abs(fd - float(np.dot(gr, v))) / max(abs(fd), 1e-12))
    checks.append(
        ("gradient_fd", worst_g <= 1e-6, f"worst directional mismatch {worst_g:.2e}")
    )

    worst_aux = max(
        abs(experiments.aux_inf(a) - experiments.aux_inf_scan(a))
        for a in (0.0, 0.3, math.pi / 2)
    )
    checks.append(
        ("aux_inf", worst_aux <= 1e-9, f"scan mismatch {worst_aux:.2e}")
    )

    import itertools

    pp = FieldParam(0.9)
    d = WindingNumber(2, Offset.MINUS)
    got = {
        tuple((q.k, q.offset.value) for q in part.parts)
        for part in experiments.enumerate_partitions(d, pp, 3)
    }
    pool = [
        WindingNumber(k, off)
        for k in range(0, 3)
        for off in (Offset.MINUS, Offset.ZERO, Offset.PLUS)
        if (k >= 1 or off is Offset.PLUS) and not (k == 0 and off is not Offset.PLUS)
    ]
    brute = set()
    for n_parts in (2, 3):
        for combo in itertools.product(pool, repeat=n_parts):
            if sum(q.k for q in combo) != d.k:
                continue
            if sum(q.offset.value for q in combo) != d.offset.value:
                continue
            non_int = [q for q in combo if q.offset is not Offset.ZERO]
            if any(
                a.offset.value + b.offset.value != 0
                for a, b in zip(non_int, non_int[1:])
            ):
                continue
            brute.add(tuple((q.k, q.offset.value) for q in combo))
    checks.append(
        ("partition_oracle", got == brute,
         f"{len(got)} enumerated vs {len(brute)} brute-forced")
    )
    return checks


def cmd_selftest(spectral_scale: float = 1.0) -> int:
    checks = selftest(spectral_scale)
    ok = True
    for name, passed, detail in checks:
        ok = ok and passed
        print(f"[{'pass' if passed else 'FAIL':>4}] {name}: {detail}")
    return 0 if ok else 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="neelwall",
        description="Degree-constrained nonlocal wall-energy toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp):
        sp.add_argument("--config", help="JSON configuration file")
        sp.add_argument(
            "--set", action="append", default=[], metavar="KEY=VALUE",
            help="dotted-path override, value parsed as JSON",
        )
        sp.add_argument("--out", help="output directory (default from config)")

    sp_min = sub.add_parser("minimize", help="run one constrained minimisation")
    add_common(sp_min)

    sp_exp = sub.add_parser("experiment", help="run a named experiment")
    sp_exp.add_argument("name", help=f"one of: {', '.join(EXPERIMENT_NAMES)}")
    add_common(sp_exp)
    sp_exp.add_argument(
        "--jobs", type=int, default=None,
        help="worker pool size for fan-out experiments (default: logical cores)",
    )

    sp_self = sub.add_parser("selftest", help="fast invariant suite")
    sp_self.add_argument(
        "--spectral-scale", type=float, default=1.0,
        help="fault-injection factor on the spectral evaluator (testing only)",
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "selftest":
        return cmd_selftest(args.spectral_scale)
    try:
        cfg = load_config(args.config, args.set)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    if args.command == "minimize":
        return cmd_minimize(cfg, args.out)
    if args.command == "experiment":
        try:
            return cmd_experiment(args.name, cfg, args.out, args.jobs)
        except (ValueError, KeyError) as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return 1
    return 1


if __name__ == "__main__":
    sys.exit(main())

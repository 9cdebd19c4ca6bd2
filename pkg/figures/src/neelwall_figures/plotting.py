"""Render result-file figures: wall profiles, existence map, separation
curves, and decay fits.

This package never computes physics: every curve, asymptote, and fitted
line is read from the producing tool's CSV columns.  A checksum of the
input files is embedded in the image metadata, and rendering is
deterministic (fixed canvas, fixed fonts, salted SVG ids), so identical
inputs yield identical bytes.
"""

from __future__ import annotations

import csv
import hashlib
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

__all__ = ["FigureSpec", "SchemaError", "FIGURE_KINDS", "plot"]

FIGURE_KINDS = ("profile", "existence-map", "separation", "decay")

_REQUIRED_COLUMNS = {
    "profile": {"x", "phi", "m1", "m2"},
    "existence-map": {"h", "d_value", "classification"},
    "separation": {"R", "concat_energy", "sum_parts", "direct_energy"},
    "decay": {"R", "tail_integral", "slope", "intercept"},
}

_CLASS_STYLE = {
    "attractive": {"marker": "o", "color": "#1a6b2f", "label": "bound (attractive)"},
    "repulsive": {"marker": "x", "color": "#a32626", "label": "splits (repulsive)"},
    "indeterminate": {"marker": "s", "color": "#777777", "label": "indeterminate"},
}


class SchemaError(ValueError):
    """Input file missing, empty, or its columns do not match the kind."""


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    inputs: tuple[str, ...]
    output: str
    title: str | None = None
    size: tuple[float, float] = (7.0, 4.2)
    dpi: int = 150


@dataclass
class Table:
    columns: list[str]
    rows: list[dict] = field(default_factory=list)

    def numbers(self, column: str) -> list[float]:
        return [float(r[column]) for r in self.rows]

    def strings(self, column: str) -> list[str]:
        return [str(r[column]) for r in self.rows]


def _read_table(path: str, kind: str) -> Table:
    p = Path(path)
    if not p.exists():
        raise SchemaError(f"input file not found: {path}")
    with open(p, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise SchemaError(f"{path}: no header row")
        missing = _REQUIRED_COLUMNS[kind] - set(reader.fieldnames)
        if missing:
            raise SchemaError(
                f"{path}: missing columns {sorted(missing)} for kind {kind!r}"
            )
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return Table(list(reader.fieldnames), rows)


def _checksum(paths: tuple[str, ...]) -> str:
    digest = hashlib.sha256()
    for path in paths:
        digest.update(Path(path).read_bytes())
    return digest.hexdigest()


def _plot_profile(ax, tables: list[Table]) -> None:
    for table in tables:
        x = table.numbers("x")
        ax.plot(x, table.numbers("m1"), color="#123c91", lw=1.6,
                label="$m_1$")
        ax.plot(x, table.numbers("m2"), color="#888888", lw=0.9, ls="--",
                label="$m_2$")
    ax.axhline(1.0, color="#bbbbbb", lw=0.6)
    ax.axhline(-1.0, color="#bbbbbb", lw=0.6)
    ax.set_xlabel("$x$")
    ax.set_ylabel("components")
    ax.legend(loc="lower right", frameon=False)


def _plot_existence_map(ax, tables: list[Table]) -> None:
    seen = {}
    for table in tables:
        for row in table.rows:
            key = (float(row["h"]), float(row["d_value"]),
                   str(row["classification"]))
            seen[key[:2]] = key[2]
    for (h, d_value), cls in sorted(seen.items()):
        style = _CLASS_STYLE.get(cls, _CLASS_STYLE["indeterminate"])
        ax.scatter([h], [d_value], marker=style["marker"], s=70,
                   color=style["color"])
    handles = [
        plt.Line2D([], [], linestyle="", marker=s["marker"], color=s["color"],
                   label=s["label"])
        for s in _CLASS_STYLE.values()
    ]
    ax.legend(handles=handles, loc="upper left", frameon=False, fontsize=8)
    ax.set_xlabel("$h$")
    ax.set_ylabel("winding number")


def _plot_separation(ax, tables: list[Table]) -> None:
    for table in tables:
        r = table.numbers("R")
        ax.plot(r, table.numbers("concat_energy"), "o-", color="#123c91",
                lw=1.4, label="$E(R)$ concatenated")
        ax.axhline(table.numbers("sum_parts")[0], color="#1a6b2f", lw=1.0,
                   ls="--", label="parts sum")
        ax.axhline(table.numbers("direct_energy")[0], color="#a32626", lw=1.0,
                   ls=":", label="direct minimiser")
    ax.set_xlabel("separation parameter $R$")
    ax.set_ylabel("energy")
    ax.legend(loc="best", frameon=False, fontsize=8)


def _plot_decay(ax, tables: list[Table]) -> None:
    import math

    for table in tables:
        r = table.numbers("R")
        t = table.numbers("tail_integral")
        ax.loglog(r, t, "o", color="#123c91", label="tail energy")
        slope = table.numbers("slope")[0]
        intercept = table.numbers("intercept")[0]
        fit = [math.exp(intercept) * rv**slope for rv in r]
        ax.loglog(r, fit, "-", color="#a32626", lw=1.0,
                  label=f"fit slope {slope:.2f}")
    ax.set_xlabel("$R$")
    ax.set_ylabel("tail integral")
    ax.legend(loc="best", frameon=False, fontsize=8)


_RENDERERS = {
    "profile": _plot_profile,
    "existence-map": _plot_existence_map,
    "separation": _plot_separation,
    "decay": _plot_decay,
}


def plot(spec: FigureSpec) -> Path:
    """Validate inputs, render, and write the image; returns the path.

    Raises :class:`SchemaError` before any file is written when the inputs
    are missing, empty, or of the wrong shape.
    """
    if spec.kind not in FIGURE_KINDS:
        raise SchemaError(
            f"unknown figure kind {spec.kind!r}; valid: {', '.join(FIGURE_KINDS)}"
        )
    if not spec.inputs:
        raise SchemaError("at least one input CSV is required")
    tables = [_read_table(path, spec.kind) for path in spec.inputs]
    checksum = _checksum(spec.inputs)

    out = Path(spec.output)
    fmt = out.suffix.lstrip(".").lower()
    if fmt not in ("png", "svg"):
        raise SchemaError(f"output must be .png or .svg, got {out.suffix!r}")

    with plt.rc_context({"svg.hashsalt": checksum}):
        fig, ax = plt.subplots(figsize=spec.size, dpi=spec.dpi)
        try:
            _RENDERERS[spec.kind](ax, tables)
            if spec.title:
                ax.set_title(spec.title)
            fig.tight_layout()
            out.parent.mkdir(parents=True, exist_ok=True)
            stamp = f"inputs-sha256:{checksum}"
            if fmt == "png":
                metadata = {"Description": stamp}
            else:
                metadata = {"Description": stamp, "Date": None}
            fig.savefig(out, format=fmt, metadata=metadata)
        finally:
            plt.close(fig)
    return out

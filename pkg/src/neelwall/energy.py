"""Total energy, its exact discrete gradient, optimality residuals, and the
cutoff localisation.

The discretisation is the piecewise-linear one used everywhere in this
package: the exchange term sums squared cell slopes, the anisotropy term is
the trapezoid rule, and the stray term is the spectral quadratic form.  The
gradient is the exact adjoint of this discrete energy (discretise-then-
optimise), so finite differences of ``energy`` match ``gradient`` to
rounding error; the clamped endpoint phases carry no gradient entries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .profiles import FieldParam, Grid, Offset, Profile, WindingNumber
from .strayfield import SampledField, h12_spectral, multiplier_apply

__all__ = [
    "EnergyBreakdown",
    "LocalizeError",
    "energy",
    "gradient",
    "el_residual",
    "equipartition_defect",
    "localize",
    "energy_lower_bound",
]


class LocalizeError(ValueError):
    """Profile not close enough to its wells outside the kept window."""


@dataclass(frozen=True)
class EnergyBreakdown:
    exchange: float
    anisotropy: float
    stray: float

    @property
    def total(self) -> float:
        return self.exchange + self.anisotropy + self.stray

    def as_dict(self) -> dict:
        return {
            "exchange": self.exchange,
            "anisotropy": self.anisotropy,
            "stray": self.stray,
            "total": self.total,
        }


def _trapezoid_weights(n: int) -> np.ndarray:
    w = np.ones(n)
    w[0] = w[-1] = 0.5
    return w


def energy(profile: Profile, padding_factor: int = 4) -> EnergyBreakdown:
    """Exchange + anisotropy + stray components of the wall energy."""
    dx = profile.grid.spacing
    phi = profile.phi
    h = profile.params.h

    dphi = np.diff(phi)
    exchange = 0.5 * float(np.dot(dphi, dphi)) / dx

    f = np.cos(phi) - h
    w = _trapezoid_weights(profile.grid.n)
    anisotropy = 0.5 * float(np.dot(w, f * f)) * dx

    stray = 0.5 * h12_spectral(SampledField(profile.grid, f), padding_factor)
    return EnergyBreakdown(exchange, anisotropy, stray)


def gradient(profile: Profile, padding_factor: int = 4) -> np.ndarray:
    """Exact gradient of the discrete energy at the interior nodes.

    Shape (n - 2,): entry i corresponds to phi[i + 1].  The boundary phases
    are clamped and excluded.
    """
    dx = profile.grid.spacing
    phi = profile.phi
    h = profile.params.h
    n = profile.grid.n

    f = np.cos(phi) - h
    sin_phi = np.sin(phi)
    stray_pull = multiplier_apply(SampledField(profile.grid, f), padding_factor)

    g = (2.0 * phi[1:-1] - phi[:-2] - phi[2:]) / dx
    g -= dx * sin_phi[1:-1] * (f[1:-1] + stray_pull[1 : n - 1])
    return g


def el_residual(
    profile: Profile, collar_cells: int = 5, padding_factor: int = 4
) -> tuple[np.ndarray, float, float]:
    """Pointwise defect of the criticality equation for the phase.

    r = phi'' - (h - cos(phi) + dtn(cos(phi) - h)) * sin(phi) on interior
    nodes; the sup and L2 norms exclude a boundary collar of
    ``collar_cells`` cells where the clamp makes the equation meaningless.
    """
    dx = profile.grid.spacing
    phi = profile.phi
    h = profile.params.h

    f = np.cos(phi) - h
    dtn_vals = -multiplier_apply(SampledField(profile.grid, f), padding_factor)
    phi_xx = (phi[2:] - 2.0 * phi[1:-1] + phi[:-2]) / (dx * dx)
    r = phi_xx - (h - np.cos(phi[1:-1]) + dtn_vals[1:-1]) * np.sin(phi[1:-1])

    lo = max(collar_cells, 1) - 1  # r[0] sits at node 1
    hi = r.size - lo
    core = r[lo:hi] if hi > lo else r
    sup = float(np.max(np.abs(core))) if core.size else 0.0
    l2 = float(math.sqrt(np.dot(core, core) * dx)) if core.size else 0.0
    return r, sup, l2


def equipartition_defect(profile: Profile) -> float:
    """Relative imbalance of the two local energy terms; 0 for constants.

    Critical points on the full line balance exchange against anisotropy
    exactly (Pohozaev), so small values diagnose criticality.
    """
    b = energy(profile)
    denom = b.exchange + b.anisotropy
    if denom == 0.0:
        return 0.0
    return abs(b.exchange - b.anisotropy) / denom


def _smoothstep(t: np.ndarray) -> np.ndarray:
    t = np.clip(t, 0.0, 1.0)
    return t * t * (3.0 - 2.0 * t)


def localize(profile: Profile, R: float, slack: float = 1e-9) -> Profile:
    """Interpolate the lifting to its well phases outside [-2R, 2R].

    phi_tilde = well + eta * (phi - well) with a smooth cutoff eta that is 1
    on [-R, R] and 0 outside [-2R, 2R] with |eta'| <= 2/R; the well phase is
    the clamped endpoint value on each side, so the degree is preserved
    exactly.  Requires the phase to already be within pi/2 of its wells
    outside [-R, R].
    """
    g = profile.grid
    if not 1.0 <= R <= 0.5 * g.half_width:
        raise ValueError(f"R must lie in [1, L/2] = [1, {0.5 * g.half_width}], got {R}")
    x = g.nodes
    phi = profile.phi
    ell_minus = phi[0]
    ell_plus = phi[-1]
    dev = np.where(x <= 0.0, phi - ell_minus, phi - ell_plus)
    outside = np.abs(x) >= R
    worst = float(np.max(np.abs(dev[outside])))
    if worst > 0.5 * math.pi + slack:
        raise LocalizeError(
            f"phase deviates {worst:.3f} > pi/2 from its wells outside [-R, R]"
        )
    eta = _smoothstep((2.0 * R - np.abs(x)) / R)
    new_phi = np.where(x <= 0.0, ell_minus + eta * dev, ell_plus + eta * dev)
    new_phi[0] = ell_minus
    new_phi[-1] = ell_plus
    return profile.with_phi(new_phi)


def energy_lower_bound(d: WindingNumber, p: FieldParam) -> float:
    """Proved lower bound for the minimal energy at degree d.

    (1-h)^2 for |d| = alpha/pi, (1+h)^2 for |d| = 1 - alpha/pi,
    2|d| - 1 otherwise (and 0 for d = 0).
    """
    d = d.normalized(p)
    if d.k == 0 and d.offset is Offset.ZERO:
        return 0.0
    if p.h < 1.0:
        if d.k == 0:
            return (1.0 - p.h) ** 2
        if (d.k, d.offset) in ((1, Offset.MINUS), (-1, Offset.PLUS)):
            return (1.0 + p.h) ** 2
    return 2.0 * abs(d.value(p)) - 1.0

"""Grids, field parameters, winding numbers, and S^1-valued line profiles.

A profile is stored through its phase lifting ``phi`` on a uniform grid
truncating the real line; the magnetisation is ``m = (cos phi, sin phi)``,
which keeps ``|m| = 1`` exact by construction.  The two endpoint phases are
clamped to well values and encode the winding number, so the degree is a
hard constraint that no optimiser step can violate.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Grid",
    "FieldParam",
    "Offset",
    "WindingNumber",
    "Profile",
    "DegreeError",
    "boundary_phases",
    "degree_of",
    "wall_count",
    "initial_ansatz",
    "wall_locations",
    "m_components",
    "write_profile_csv",
    "read_profile_csv",
]


class DegreeError(ValueError):
    """Phase difference does not represent an admissible winding number."""


@dataclass(frozen=True)
class Grid:
    """Uniform symmetric grid on [-L, L] with an odd number of nodes.

    Odd ``n`` puts a node at x = 0 exactly, which the reflection-symmetry
    checks rely on.
    """

    half_width: float
    n: int

    def __post_init__(self):
        if self.half_width <= 0:
            raise ValueError(f"half_width must be positive, got {self.half_width}")
        if self.n < 3 or self.n % 2 == 0:
            raise ValueError(f"n must be an odd integer >= 3, got {self.n}")

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / (self.n - 1)

    @property
    def nodes(self) -> np.ndarray:
        # centred form: the midpoint is 0.0 exactly, endpoints are +-L to ulp
        c = (self.n - 1) // 2
        return (np.arange(self.n) - c) * self.spacing


class Offset(enum.Enum):
    """Fractional part of the winding number, in units of alpha/pi."""

    ZERO = 0
    PLUS = 1
    MINUS = -1


@dataclass(frozen=True)
class FieldParam:
    """Applied-field strength h in [0, 1] and the well angle alpha = arccos h."""

    h: float
    alpha: float = field(init=False)

    def __post_init__(self):
        if not 0.0 <= self.h <= 1.0:
            raise ValueError(f"h must lie in [0, 1], got {self.h}")
        object.__setattr__(self, "alpha", math.acos(self.h))


@dataclass(frozen=True)
class WindingNumber:
    """Exact winding number k + s*(alpha/pi) with s in {0, +1, -1}.

    Stored symbolically so that degree arithmetic (sums, partitions) is
    carried out without floating-point drift.  For h = 1 every offset
    collapses to the integer k.
    """

    k: int
    offset: Offset = Offset.ZERO

    def value(self, p: FieldParam) -> float:
        return self.k + self.offset.value * p.alpha / math.pi

    def is_integer(self, p: FieldParam) -> bool:
        """Whether the realised value is an integer (symbolically for h < 1)."""
        if p.h == 1.0:
            return True
        return self.offset is Offset.ZERO

    def normalized(self, p: FieldParam) -> "WindingNumber":
        """Canonical form: at h = 1 all offsets collapse to the integer k."""
        if p.h == 1.0:
            return WindingNumber(self.k, Offset.ZERO)
        return self

    def __neg__(self) -> "WindingNumber":
        return WindingNumber(-self.k, Offset(-self.offset.value))

    def label(self) -> str:
        suffix = {Offset.ZERO: "", Offset.PLUS: "+a/pi", Offset.MINUS: "-a/pi"}
        return f"{self.k}{suffix[self.offset]}"


def boundary_phases(d: WindingNumber, p: FieldParam) -> tuple[float, float]:
    """Endpoint phases (phi_-, phi_+) realising degree d between well values.

    Convention: phi_- = -alpha for d in Z and Z + alpha/pi, phi_- = +alpha
    for d in Z - alpha/pi; then phi_+ = phi_- + 2*pi*d.  Both endpoints land
    on wells of (cos(phi) - h)^2.
    """
    phi_minus = p.alpha if d.offset is Offset.MINUS else -p.alpha
    phi_plus = phi_minus + 2.0 * math.pi * d.value(p)
    return phi_minus, phi_plus


@dataclass(frozen=True)
class Profile:
    """Immutable phase-lifted profile on a grid.

    ``phi[0]`` and ``phi[-1]`` are clamped boundary phases; optimisers only
    ever touch the interior values.
    """

    grid: Grid
    phi: np.ndarray
    params: FieldParam
    degree: WindingNumber

    def __post_init__(self):
        phi = np.asarray(self.phi, dtype=float)
        if phi.shape != (self.grid.n,):
            raise ValueError(f"phi has shape {phi.shape}, expected ({self.grid.n},)")
        phi = phi.copy()
        phi.flags.writeable = False
        object.__setattr__(self, "phi", phi)

    def with_phi(self, phi: np.ndarray) -> "Profile":
        return Profile(self.grid, phi, self.params, self.degree)

    def m1(self) -> np.ndarray:
        return np.cos(self.phi)

    def m2(self) -> np.ndarray:
        return np.sin(self.phi)


def m_components(profile: Profile) -> tuple[np.ndarray, np.ndarray]:
    """Pointwise magnetisation components (cos phi, sin phi)."""
    return profile.m1(), profile.m2()


def degree_of(profile: Profile, tol: float = 1e-9) -> WindingNumber:
    """Recover the winding number from the clamped endpoint phases.

    Raises :class:`DegreeError` if (phi[-1] - phi[0]) / 2pi is not within
    ``tol`` of any k + {0, +-alpha/pi}.
    """
    p = profile.params
    val = (profile.phi[-1] - profile.phi[0]) / (2.0 * math.pi)
    frac = p.alpha / math.pi
    candidates = [
        WindingNumber(round(val), Offset.ZERO),
        WindingNumber(round(val - frac), Offset.PLUS),
        WindingNumber(round(val + frac), Offset.MINUS),
    ]
    errs = [abs(val - c.value(p)) for c in candidates]
    best = min(range(3), key=lambda i: (errs[i], i))
    if errs[best] > tol:
        raise DegreeError(
            f"phase difference {val} * 2pi is not within {tol} of Z +- alpha/pi"
        )
    return candidates[best].normalized(p)


def wall_count(d: WindingNumber, p: FieldParam) -> int:
    """Number of points with m1 = +-1 for an energy-minimising profile.

    2|d| - 1 for h = 1 and integer d; 2|d| for h < 1 and integer d;
    2l - 1 for h < 1 and |d| = l - 1 + alpha/pi or l - alpha/pi.
    """
    d = d.normalized(p)
    if d.k == 0 and d.offset is Offset.ZERO:
        return 0
    absk = abs(d.k)
    if p.h == 1.0:
        return 2 * absk - 1
    if d.offset is Offset.ZERO:
        return 2 * absk
    if d.offset is Offset.PLUS:
        # |d| = l - 1 + alpha/pi with l = |k| + 1 (k >= 0), l = |k| for k < 0
        ell = absk + 1 if d.k >= 0 else absk
        return 2 * ell - 1
    # offset MINUS: |d| = l - alpha/pi with l = |k| for k > 0, l = |k| + 1 for k <= 0
    ell = absk if d.k > 0 else absk + 1
    return 2 * ell - 1


def _phase_levels(phi_minus: float, phi_plus: float) -> list[float]:
    """Multiples of pi strictly between the endpoint phases, in traversal order."""
    lo, hi = sorted((phi_minus, phi_plus))
    eps = 1e-12
    n_first = math.floor(lo / math.pi) + 1
    levels = []
    n = n_first
    while n * math.pi < hi - eps:
        if n * math.pi > lo + eps:
            levels.append(n * math.pi)
        n += 1
    if phi_plus < phi_minus:
        levels.reverse()
    return levels


def _well_between(lo: float, hi: float, alpha: float) -> float:
    """The well phase (== +-alpha mod 2pi) inside the closed interval [lo, hi]."""
    for m in range(math.floor(lo / (2 * math.pi)) - 1, math.ceil(hi / (2 * math.pi)) + 2):
        for w in (2 * math.pi * m + alpha, 2 * math.pi * m - alpha):
            if lo - 1e-9 <= w <= hi + 1e-9:
                return w
    raise RuntimeError(f"no well level in [{lo}, {hi}]")  # unreachable for valid data


def initial_ansatz(
    d: WindingNumber,
    p: FieldParam,
    g: Grid,
    wall_positions: list[float] | None = None,
    core_scale: float = 1.0,
) -> Profile:
    """Monotone multi-step ansatz with one sigmoidal step per wall.

    The phase rises from phi_- to phi_+ through the sequence of well levels,
    each step centred at a wall position with width ``core_scale``.  The
    number of positions must match :func:`wall_count` for (d, h); for d = 0
    the positions are ignored and the constant well profile is returned.
    """
    if core_scale <= 0:
        raise ValueError("core_scale must be positive")
    d = d.normalized(p)
    phi_minus, phi_plus = boundary_phases(d, p)
    x = g.nodes

    if d.k == 0 and d.offset is Offset.ZERO:
        return Profile(g, np.full(g.n, phi_minus), p, d)

    n_walls = wall_count(d, p)
    if wall_positions is None:
        span = min(6.0 * core_scale, 0.5 * g.half_width / max(n_walls, 1))
        wall_positions = [span * (i - (n_walls - 1) / 2.0) for i in range(n_walls)]
    if len(wall_positions) != n_walls:
        raise ValueError(
            f"expected {n_walls} wall positions for degree {d.label()} at h={p.h}, "
            f"got {len(wall_positions)}"
        )
    pos = list(wall_positions)
    if any(b <= a for a, b in zip(pos, pos[1:])):
        raise ValueError("wall positions must be strictly increasing")
    if pos and (pos[0] <= -g.half_width or pos[-1] >= g.half_width):
        raise ValueError("wall positions must lie strictly inside (-L, L)")

    levels = _phase_levels(phi_minus, phi_plus)
    assert len(levels) == n_walls
    rests = [phi_minus]
    for q_lo, q_hi in zip(levels, levels[1:]):
        lo, hi = sorted((q_lo, q_hi))
        rests.append(_well_between(lo, hi, p.alpha))
    rests.append(phi_plus)

    phi = np.full(g.n, phi_minus)
    for j in range(n_walls):
        rise = rests[j + 1] - rests[j]
        phi = phi + rise * 0.5 * (1.0 + np.tanh((x - pos[j]) / core_scale))
    phi[0] = phi_minus
    phi[-1] = phi_plus
    return Profile(g, phi, p, d)


def _locate_crossing(x, phi, j0: int, j1: int, level: float) -> float:
    """First linearly interpolated crossing of ``level`` on nodes [j0, j1]."""
    for k in range(j0 + 1, j1 + 1):
        lo, hi = phi[k - 1] - level, phi[k] - level
        if hi == 0.0:
            return float(x[k])
        if lo == 0.0:
            return float(x[k - 1])
        if lo * hi < 0.0:
            t = -lo / (hi - lo)
            return float(x[k - 1] + t * (x[k] - x[k - 1]))
    # phase skipped the level inside the hysteresis envelope; report midpoint
    return float(0.5 * (x[j0] + x[j1]))


def wall_locations(
    profile: Profile, hysteresis: float = 1e-6
) -> list[tuple[float, int]]:
    """Crossings of phi through multiples of pi, with the sign of m1 attached.

    Positions are linearly interpolated between nodes; an exact hit at an
    interior node counts once.  A crossing of the level n*pi is registered
    only once phi has moved past it by ``hysteresis`` on both sides, so
    grazing numerical noise near the clamped tails cannot produce spurious
    walls.  The clamped endpoint nodes represent the limits at +-infinity
    and are excluded.
    """
    phi = profile.phi
    x = profile.grid.nodes
    out: list[tuple[float, int]] = []

    def band_of(v: float) -> int | None:
        nearest = round(v / math.pi)
        if abs(v - nearest * math.pi) <= hysteresis:
            return None  # too close to a level to resolve
        return math.floor(v / math.pi)

    current: int | None = None
    anchor = 0  # node index where the current band was last confirmed
    for i in range(profile.grid.n):
        b = band_of(float(phi[i]))
        if b is None:
            continue
        if current is not None and b != current:
            levels = (
                range(current + 1, b + 1) if b > current else range(current, b, -1)
            )
            for n in levels:
                xc = _locate_crossing(x, phi, anchor, i, n * math.pi)
                if x[0] < xc < x[-1]:
                    out.append((xc, 1 if n % 2 == 0 else -1))
        current = b
        anchor = i
    out.sort(key=lambda t: t[0])
    return out


def write_profile_csv(profile: Profile, path) -> None:
    """Snapshot CSV with header x,phi,m1,m2 and >= 15 significant digits."""
    x = profile.grid.nodes
    m1, m2 = m_components(profile)
    data = np.column_stack([x, profile.phi, m1, m2])
    np.savetxt(path, data, delimiter=",", header="x,phi,m1,m2", comments="", fmt="%.17g")


def read_profile_csv(path, p: FieldParam) -> Profile:
    """Rebuild a profile from a snapshot CSV (phase column is authoritative)."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    x, phi = data[:, 0], data[:, 1]
    n = len(x)
    if n < 3 or n % 2 == 0:
        raise ValueError("profile CSV must have an odd number of rows >= 3")
    g = Grid(half_width=float((x[-1] - x[0]) / 2.0), n=n)
    prof = Profile(g, phi, p, WindingNumber(0))
    return Profile(g, phi, p, degree_of(prof))

"""NumPy reference implementations of the two hot kernels.

These are the import-time fallback when the compiled extension is absent;
they must agree with the compiled versions to rounding error.  Summation
order is fixed so repeated evaluations are bitwise identical.
"""

from __future__ import annotations

import numpy as np


def pair_lag_sum(fm: np.ndarray) -> float:
    """sum_{l>=1} l^-2 * sum_i (fm[i] - fm[i+l])^2 over all cell pairs.

    The grid spacing cancels in the midpoint-rule difference quotient, so
    this lag sum is the entire off-diagonal double sum up to the 1/(2 pi)
    prefactor.
    """
    fm = np.asarray(fm, dtype=float)
    c = fm.size
    total = 0.0
    for lag in range(1, c):
        d = fm[lag:] - fm[:-lag]
        total += float(np.dot(d, d)) / (lag * lag)
    return total


def poisson_layer(
    xs: np.ndarray, f: np.ndarray, targets: np.ndarray, y: float
) -> np.ndarray:
    """Harmonic-extension of piecewise-linear f at height y > 0, exactly.

    Integrates f cell by cell against the Poisson kernel in closed form
    (antiderivatives atan and log), so the result is a convex-combination
    bound: max |v| <= max |f| holds exactly.
    """
    xs = np.asarray(xs, dtype=float)
    f = np.asarray(f, dtype=float)
    targets = np.asarray(targets, dtype=float)
    dx = xs[1] - xs[0]
    slopes = np.diff(f) / dx
    out = np.empty(targets.size)
    block = 256
    inv_pi = 1.0 / np.pi
    for start in range(0, targets.size, block):
        t = targets[start : start + block, None]  # (B, 1)
        rel = xs[None, :] - t  # (B, n)
        atn = np.arctan2(rel, y)
        lg = np.log(rel * rel + y * y)
        i0 = inv_pi * np.diff(atn, axis=1)  # (B, c)
        i1 = (y * inv_pi * 0.5) * np.diff(lg, axis=1)
        a = f[None, :-1] + slopes[None, :] * (-rel[:, :-1])
        out[start : start + block] = np.sum(a * i0 + slopes[None, :] * i1, axis=1)
    return out

"""One-dimensional maximization over a bias/price axis with atoms.

The objectives maximized here (revenue curves, designer objectives) are
piecewise smooth with left-continuous jumps at distribution atoms, so a
dense grid plus the atoms plus a bounded Brent refinement of the best grid
cell finds the supremum to well below the 1e-9 the callers need.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable

import numpy as np
from scipy.optimize import minimize_scalar

GRID_POINTS = 10_000


def argmax_1d(
    f: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    extra: Iterable[float] = (),
    grid: int = GRID_POINTS,
    refine: bool = True,
    xatol: float = 1e-13,
) -> tuple[float, float]:
    """Maximize a vectorized ``f`` on ``[lo, hi]``; ties go to the smaller argument.

    ``extra`` points (atoms, known kinks) are always evaluated, even outside
    the interval.
    """
    xs = np.linspace(lo, hi, grid) if hi > lo else np.array([lo])
    pts = np.concatenate([xs, np.asarray(list(extra), dtype=float)])
    vals = np.asarray(f(pts), dtype=float)
    if refine and hi > lo:
        k = int(np.argmax(vals[: len(xs)]))
        a, b = xs[max(k - 1, 0)], xs[min(k + 1, len(xs) - 1)]
        if b > a:
            res = minimize_scalar(
                lambda x: -float(f(np.array([x]))[0]),
                bounds=(a, b),
                method="bounded",
                options={"xatol": xatol},
            )
            pts = np.append(pts, res.x)
            vals = np.append(vals, float(f(np.array([res.x]))[0]))
    best = vals.max()
    tol = 1e-12 * max(1.0, abs(best))
    near = pts[vals >= best - tol]
    x = float(near.min())
    return x, float(f(np.array([x]))[0])

"""Lower envelope of lines over a half-line ``[lo, inf)``.

Both the agent (minimize ``b*w + d``) and the menu buyer (minimize
``p - v*x``) pick the lowest of a family of lines in their private
parameter, with ties going to the line of smaller slope. The envelope
turns that choice into sorted breakpoints ``lo = c_0 < c_1 < ...`` with
line ``j`` owning the left-closed interval ``[c_j, c_{j+1})``.
"""

from __future__ import annotations

from collections.abc import Sequence

from .graph import TAU


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= TAU * max(1.0, abs(a), abs(b))


def lower_envelope(
    lines: Sequence[tuple[float, float]],
    lo: float = 1.0,
) -> tuple[list[float], list[int]]:
    """Return ``(breakpoints, owners)`` for ``lines[k] = (slope, intercept)``.

    ``owners[j]`` is the index of the line that is minimal on
    ``[breakpoints[j], breakpoints[j+1])``. Lines with equal slope and
    intercepts within tolerance keep the larger intercept (then the lower
    index), matching the scalar tie rule; breakpoints closer than the
    tolerance merge.
    """
    if not lines:
        raise ValueError("empty line set")

    by_slope: dict[float, list[int]] = {}
    for k, (s, _) in enumerate(lines):
        by_slope.setdefault(s, []).append(k)
    reps = []
    for s, ks in by_slope.items():
        m = min(lines[k][1] for k in ks)
        tied = [k for k in ks if lines[k][1] <= m + TAU * max(1.0, abs(m))]
        reps.append(min(tied, key=lambda k: (-lines[k][1], k)))
    reps.sort(key=lambda k: -lines[k][0])

    def cross(i: int, j: int) -> float:
        (s1, b1), (s2, b2) = lines[i], lines[j]
        return (b2 - b1) / (s1 - s2)

    stack: list[int] = []
    starts: list[float] = []
    for k in reps:
        while stack:
            x = cross(stack[-1], k)
            if x <= starts[-1] or _close(x, starts[-1]):
                stack.pop()
                starts.pop()
            else:
                break
        if stack:
            starts.append(cross(stack[-1], k))
        else:
            starts.append(lo)
        stack.append(k)
    return starts, stack

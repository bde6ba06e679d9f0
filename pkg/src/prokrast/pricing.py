"""Menus, buyer best responses and optimal posted prices for linear objectives.

A menu is a finite set of (allocation ``x``, price ``p``) options that
always contains ``(0, 0)``. A buyer of value ``v`` picks the option
maximizing ``v*x - p``. Designer objectives are linear,
``alpha * E[x] + beta * E[p]``, with the expectation over ``v ~ F``.

Under the task-graph correspondence an edge ``v -> u`` of a node with
distance ``d`` is the option ``x = 1 - w/d``, ``p = d(u)/d``, and the agent's
bias plays the buyer's value.
"""

from __future__ import annotations

import math
import warnings
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from .distributions import BiasDistribution
from .envelope import lower_envelope
from .errors import DegenerateObjective, NonMonotoneMenu, PreconditionFailed, ValidationError
from .graph import TAU
from .search import argmax_1d

#: Sentinel price meaning "never sell".
NEVER = math.inf


def _tol(x: float) -> float:
    return TAU * max(1.0, abs(x))


@dataclass(frozen=True)
class Menu:
    options: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        if (0.0, 0.0) not in self.options:
            raise ValidationError("a menu must contain the null option (0, 0)")
        for x, p in self.options:
            if not (math.isfinite(x) and math.isfinite(p)):
                raise ValidationError(f"non-finite menu option ({x}, {p})")

    @classmethod
    def of(cls, options: Iterable[Sequence[float]]) -> Menu:
        """Canonical menu: adds ``(0, 0)``, drops exact duplicates, sorts by ``(x, p)``."""
        opts = {(float(x), float(p)) for x, p in options} | {(0.0, 0.0)}
        return cls(tuple(sorted(opts)))


@dataclass(frozen=True)
class LinearObjective:
    alpha: float
    beta: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise ValidationError("objective coefficients must be finite")

    def __call__(self, x: float, p: float) -> float:
        return self.alpha * x + self.beta * p


def best_response(menu: Menu, v: float) -> tuple[float, float]:
    """Option maximizing ``v*x - p``; ties go to the larger price, then the larger ``x``."""
    utils = [v * x - p for x, p in menu.options]
    best = max(utils)
    tied = [o for o, u in zip(menu.options, utils) if u >= best - _tol(best)]
    return max(tied, key=lambda o: (o[1], o[0]))


def menu_intervals(menu: Menu, lo: float = 1.0) -> tuple[list[float], list[tuple[float, float]]]:
    """Buyer choice as left-closed value intervals ``[c_j, c_{j+1})`` starting at ``lo``."""
    # Buyer minimizes p - v*x: lines with slope -x and intercept p.
    lines = [(-x, p) for x, p in menu.options]
    cuts, owners = lower_envelope(lines, lo=lo)
    return cuts, [menu.options[k] for k in owners]


def menu_value(menu: Menu, dist: BiasDistribution, objective: LinearObjective) -> float:
    """``alpha * E[x(v)] + beta * E[p(v)]`` for ``v ~ dist``."""
    cuts, chosen = menu_intervals(menu)
    surv = [1.0, *(float(dist.survival(c - _tol(c))) for c in cuts[1:]), 0.0]
    return math.fsum(
        max(0.0, surv[j] - surv[j + 1]) * objective(x, p) for j, (x, p) in enumerate(chosen)
    )


@dataclass(frozen=True)
class PostedPrice:
    """Optimal two-option menu ``{(0,0), (x, price)}`` and its objective value.

    Uncapped results have ``x = 1`` (or ``x = 0`` with ``price = NEVER``);
    capped results have ``price = 1`` and ``x = 1/threshold``.
    """

    x: float
    price: float
    threshold: float
    value: float
    capped: bool

    def menu(self) -> Menu:
        if self.x == 0:
            return Menu.of([])
        return Menu.of([(self.x, self.price)])


def _degenerate(objective: LinearObjective) -> bool:
    if objective.alpha == 0 and objective.beta == 0:
        warnings.warn("objective is identically zero; any menu is optimal", DegenerateObjective, stacklevel=3)
        return True
    return False


def _pick(cands: list[tuple[float, float, PostedPrice]]) -> PostedPrice:
    """Best value; ties go to the first candidate in the given order."""
    best = max(v for v, _, _ in cands)
    for v, _, res in cands:
        if v >= best - _tol(best):
            return res
    raise AssertionError("unreachable")


def optimal_posted_price(
    dist: BiasDistribution,
    objective: LinearObjective,
    cap: bool = False,
) -> PostedPrice:
    """Best posted-price menu for ``objective`` under ``dist``.

    Uncapped: maximize ``Pr[B >= p] * (alpha + beta*p)`` over prices ``p``.
    Above 1 the search covers the atoms, a dense grid and a bounded Brent
    refinement; below 1 every buyer purchases, so the objective is linear in
    ``p`` and only ``p = 0`` (when ``beta < 0``) can beat ``p = 1``. Never
    selling (value 0) is also a candidate. Ties prefer ``p = 1``, then the
    smallest price.

    Capped: maximize over menus ``{(0,0), (x,1)}``; a buyer takes ``(x,1)``
    iff ``v*x >= 1``, so with threshold ``t = 1/x`` the value is
    ``Pr[B >= t] * (alpha/t + beta)``. Requires ``beta >= 0``.
    """
    if _degenerate(objective):
        return PostedPrice(1.0, 1.0, 1.0, 0.0, cap)
    a, b = objective.alpha, objective.beta
    atoms = [v for v, _ in dist.atoms() if v > 1]
    hi = max(dist.search_upper, 1.0)
    never = PostedPrice(0.0, NEVER, NEVER, 0.0, cap)

    if cap:
        if b < 0:
            raise PreconditionFailed("the capped variant needs beta >= 0")

        def g(t: np.ndarray) -> np.ndarray:
            return dist.survival(t) * (a / t + b)

        t, val = argmax_1d(g, 1.0, hi, extra=atoms)
        at_one = float(g(np.array([1.0]))[0])
        cands = [
            (at_one, 1.0, PostedPrice(1.0, 1.0, 1.0, at_one, True)),
            (val, t, PostedPrice(1.0 / t, 1.0, t, val, True)),
            (0.0, NEVER, never),
        ]
        return _pick(cands)

    def f(p: np.ndarray) -> np.ndarray:
        return dist.survival(p) * (a + b * p)

    p, val = argmax_1d(f, 1.0, hi, extra=atoms)
    at_one = a + b
    cands = [
        (at_one, 1.0, PostedPrice(1.0, 1.0, 1.0, at_one, False)),
        (val, p, PostedPrice(1.0, p, p, val, False)),
    ]
    if b < 0:
        cands.append((a, 0.0, PostedPrice(1.0, 0.0, 1.0, a, False)))
    cands.append((0.0, NEVER, never))
    return _pick(cands)


@dataclass(frozen=True)
class Decomposition:
    """Two-option menus ``{(0,0), (1/v, 1)}`` with weights ``m``.

    ``feasible`` is False when the weights sum above 1, in which case they do
    not form a probability distribution over menus.
    """

    thresholds: tuple[float, ...]
    weights: tuple[float, ...]
    total: float
    feasible: bool

    @property
    def null_weight(self) -> float:
        return max(0.0, 1.0 - self.total)

    def menus(self) -> list[tuple[Menu, float]]:
        return [(Menu.of([(1.0 / v, 1.0)]), m) for v, m in zip(self.thresholds, self.weights)]

    def expected_allocation(self, v: float) -> float:
        return math.fsum(m / t for t, m in zip(self.thresholds, self.weights) if v >= t - _tol(t))

    def expected_payment(self, v: float) -> float:
        return math.fsum(m for t, m in zip(self.thresholds, self.weights) if v >= t - _tol(t))


def randomized_menu_decomposition(menu: Menu) -> Decomposition:
    """Split ``menu`` into a mixture of capped two-option menus.

    The options a buyer with ``v >= 1`` actually picks, in increasing ``x``,
    start at thresholds ``v_0 = 1 < v_1 < ...``; option ``j`` gets weight
    ``m_j = v_{j-1} * (x_j - x_{j-1})`` on the menu ``{(0,0), (1/v_{j-1}, 1)}``.
    """
    for x, p in menu.options:
        if not (0 <= x <= 1 and 0 <= p <= 1):
            raise ValidationError(f"option ({x}, {p}) lies outside [0,1]^2")
    opts = sorted(menu.options)
    for (x1, p1), (x2, p2) in zip(opts, opts[1:]):
        if x2 > x1 and p2 < p1:
            raise NonMonotoneMenu(f"option ({x2}, {p2}) has more allocation but a lower price than ({x1}, {p1})")

    cuts, chosen = menu_intervals(menu)
    thresholds, weights = [], []
    prev_x = 0.0
    for c, (x, _) in zip(cuts, chosen):
        if x > prev_x:
            thresholds.append(c)
            weights.append(c * (x - prev_x))
            prev_x = x
    total = math.fsum(weights)
    return Decomposition(tuple(thresholds), tuple(weights), total, total <= 1 + _tol(1.0))

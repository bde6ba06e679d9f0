"""The naive present-biased agent.

On day ``i`` at node ``v`` with bias ``b`` the agent takes the edge
minimizing ``b * w(e) + d(head(e))``. Perceived-cost ties (within
:data:`~prokrast.graph.TAU`, scaled by magnitude) go to the successor with
the larger remaining distance, i.e. the agent procrastinates, and then to
the canonical edge order.
"""

from __future__ import annotations

import itertools
import math
import os
from bisect import bisect_right
from collections.abc import Iterator, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .distributions import BiasDistribution, Finite
from .envelope import lower_envelope
from .errors import ValidationError
from .graph import TAU, DistanceTable, TaskGraph, distances

MASK64 = (1 << 64) - 1
#: SplitMix64 increment (2^64 / golden ratio); also used to mix trial indices.
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    """SplitMix64 output function (Steele, Lea & Flood 2014)."""
    z = (x + GOLDEN_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, index: int) -> int:
    """Seed of trajectory ``index``: ``splitmix64(seed ^ splitmix64(index))``."""
    return splitmix64((seed & MASK64) ^ splitmix64(index & MASK64))


def _tol(x: float) -> float:
    return TAU * max(1.0, abs(x))


def choose_edge(g: TaskGraph, dt: DistanceTable, v: str, b: float) -> int:
    """Index (into ``g.edges``) of the edge a bias-``b`` agent takes from ``v``."""
    out = g.out_edges(v)
    if not out:
        raise ValueError(f"node {v!r} has no outgoing edges")
    vals = [b * g.edges[k].w + dt[g.edges[k].dst] for k in out]
    best = min(vals)
    tied = [k for k, val in zip(out, vals) if val <= best + _tol(best)]
    return max(tied, key=lambda k: (dt[g.edges[k].dst], -k))


@dataclass(frozen=True)
class ChoicePolicy:
    """Edge chosen at ``node`` for every bias, as left-closed intervals."""

    node: str
    breakpoints: tuple[float, ...]
    edges: tuple[int, ...]

    def lookup(self, b: float) -> int:
        return self.edges[bisect_right(self.breakpoints, b) - 1]

    def probabilities(self, dist: BiasDistribution) -> tuple[float, ...]:
        """Mass of each interval. Boundaries shift left by the tie tolerance so an
        atom sitting on a breakpoint goes to the procrastinating edge."""
        cuts = [float(dist.survival(c - _tol(c))) for c in self.breakpoints[1:]]
        upper = [1.0, *cuts]
        lower = [*cuts, 0.0]
        return tuple(max(0.0, u - l) for u, l in zip(upper, lower))


def choice_policy(g: TaskGraph, dt: DistanceTable, v: str) -> ChoicePolicy:
    out = g.out_edges(v)
    lines = [(g.edges[k].w, dt[g.edges[k].dst]) for k in out]
    cuts, owners = lower_envelope(lines, lo=1.0)
    return ChoicePolicy(v, tuple(cuts), tuple(out[j] for j in owners))


def choice_policies(g: TaskGraph, dt: DistanceTable | None = None) -> dict[str, ChoicePolicy]:
    dt = distances(g) if dt is None else dt
    return {v: choice_policy(g, dt, v) for v in g.nodes if v != g.target}


@dataclass(frozen=True)
class RatioReport:
    method: str
    ratio: float
    expected_cost: float
    d_start: float
    std_error: float | None = None
    trials: int | None = None

    def as_row(self) -> dict[str, object]:
        return {
            "method": self.method,
            "ratio": self.ratio,
            "expected_cost": self.expected_cost,
            "d_start": self.d_start,
            "std_error": self.std_error,
            "trials": self.trials,
        }


def _d_start(g: TaskGraph, dt: DistanceTable) -> float:
    ds = dt[g.start]
    if not ds > 0:
        raise ValidationError("shortest start-to-target cost is zero; the ratio is undefined")
    return ds


def expected_costs(g: TaskGraph, dist: BiasDistribution) -> dict[str, float]:
    """Expected cost-to-go from every node, by backward DP over the envelopes."""
    dt = distances(g)
    cost = {g.target: 0.0}
    for v in reversed(g.nodes):
        if v == g.target:
            continue
        pol = choice_policy(g, dt, v)
        total = 0.0
        for k, pr in zip(pol.edges, pol.probabilities(dist)):
            if pr > 0:
                e = g.edges[k]
                total += pr * (e.w + cost[e.dst])
        cost[v] = total
    return cost


def exact_ratio(g: TaskGraph, dist: BiasDistribution) -> RatioReport:
    dt = distances(g)
    ds = _d_start(g, dt)
    ec = expected_costs(g, dist)[g.start]
    return RatioReport("exact", ec / ds, ec, ds)


@dataclass(frozen=True)
class Trajectory:
    path: tuple[str, ...]
    biases: tuple[float, ...]
    step_costs: tuple[float, ...]

    @property
    def total_cost(self) -> float:
        return math.fsum(self.step_costs)


def follow(g: TaskGraph, biases: Sequence[float], dt: DistanceTable | None = None) -> Trajectory:
    """Walk the graph for one fixed bias sequence using :func:`choose_edge`."""
    dt = distances(g) if dt is None else dt
    if len(biases) != g.n:
        raise ValueError(f"need {g.n} biases, got {len(biases)}")
    v, path, costs = g.start, [g.start], []
    for b in biases:
        e = g.edges[choose_edge(g, dt, v, b)]
        costs.append(e.w)
        v = e.dst
        path.append(v)
    return Trajectory(tuple(path), tuple(float(b) for b in biases), tuple(costs))


def enumerate_ratio(g: TaskGraph, dist: Finite) -> float:
    """Brute-force ratio: walk every bias sequence in ``support^n``, weight by probability.

    Exponential in ``n``; meant as a test oracle for :func:`exact_ratio`.
    """
    dt = distances(g)
    ds = _d_start(g, dt)
    terms = []
    for combo in itertools.product(dist.atoms(), repeat=g.n):
        pr = math.prod(p for _, p in combo)
        if pr > 0:
            terms.append(pr * follow(g, [b for b, _ in combo], dt).total_cost)
    return math.fsum(terms) / ds


@dataclass(frozen=True)
class _Compiled:
    """Padded per-node edge tables for vectorized stepping."""

    nodes: tuple[str, ...]
    start: int
    W: np.ndarray  # edge weight, 0 where padded
    D: np.ndarray  # distance of head, inf where padded
    H: np.ndarray  # head node index
    R: np.ndarray  # tie rank: larger head distance first, then canonical order


def _compile(g: TaskGraph, dt: DistanceTable) -> _Compiled:
    index = {v: i for i, v in enumerate(g.nodes)}
    width = max(len(g.out_edges(v)) for v in g.nodes if v != g.target)
    shape = (len(g.nodes), width)
    W = np.zeros(shape)
    D = np.full(shape, np.inf)
    H = np.zeros(shape, dtype=np.int64)
    R = np.full(shape, np.iinfo(np.int64).max, dtype=np.int64)
    for v in g.nodes:
        out = g.out_edges(v)
        i = index[v]
        ranked = sorted(range(len(out)), key=lambda j: (-dt[g.edges[out[j]].dst], out[j]))
        for j, k in enumerate(out):
            e = g.edges[k]
            W[i, j], D[i, j], H[i, j] = e.w, dt[e.dst], index[e.dst]
        for r, j in enumerate(ranked):
            R[i, j] = r
    return _Compiled(g.nodes, index[g.start], W, D, H, R)


def _draw_biases(dist: BiasDistribution, seed: int, first: int, count: int, n: int) -> np.ndarray:
    out = np.empty((count, n))
    for k in range(count):
        out[k] = dist.sample(np.random.default_rng(derive_seed(seed, first + k)), n)
    return out


def _walk(c: _Compiled, biases: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized twin of :func:`follow`; returns node indices and step costs."""
    count, n = biases.shape
    rows = np.arange(count)
    cur = np.full(count, c.start, dtype=np.int64)
    path = np.empty((count, n + 1), dtype=np.int64)
    steps = np.empty((count, n))
    path[:, 0] = cur
    for i in range(n):
        W, D = c.W[cur], c.D[cur]
        vals = biases[:, i, None] * W + D
        best = vals.min(axis=1)
        tol = TAU * np.maximum(1.0, np.abs(best))
        ranks = np.where(vals <= (best + tol)[:, None], c.R[cur], np.iinfo(np.int64).max)
        j = ranks.argmin(axis=1)
        steps[:, i] = W[rows, j]
        cur = c.H[cur, j]
        path[:, i + 1] = cur
    return path, steps


def _run_chunk(args: tuple) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    c, dist, seed, first, count, n = args
    biases = _draw_biases(dist, seed, first, count, n)
    path, steps = _walk(c, biases)
    return biases, path, steps


def default_workers() -> int:
    raw = os.environ.get("PROKRAST_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass(frozen=True)
class Simulation:
    report: RatioReport
    nodes: tuple[str, ...]
    biases: np.ndarray
    paths: np.ndarray
    step_costs: np.ndarray

    @property
    def totals(self) -> np.ndarray:
        return self.step_costs.sum(axis=1)

    def trajectories(self) -> Iterator[Trajectory]:
        for k in range(len(self.paths)):
            yield Trajectory(
                tuple(self.nodes[i] for i in self.paths[k]),
                tuple(float(b) for b in self.biases[k]),
                tuple(float(w) for w in self.step_costs[k]),
            )


def simulate(
    g: TaskGraph,
    dist: BiasDistribution,
    seed: int = 0,
    trials: int = 1000,
    workers: int | None = None,
) -> Simulation:
    """Monte Carlo estimate of the procrastination ratio.

    Trajectory ``k`` draws its biases from a generator seeded with
    ``derive_seed(seed, k)``, so every per-trajectory result, and hence the
    aggregate, is identical for any ``workers`` count (default: the
    ``PROKRAST_THREADS`` environment variable, else 1).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    dt = distances(g)
    ds = _d_start(g, dt)
    c = _compile(g, dt)
    workers = default_workers() if workers is None else max(1, workers)
    workers = min(workers, trials)
    size = -(-trials // workers)
    chunks = [(c, dist, seed, s, min(size, trials - s), g.n) for s in range(0, trials, size)]
    if workers == 1:
        parts = [_run_chunk(a) for a in chunks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, chunks))
    biases = np.concatenate([p[0] for p in parts])
    paths = np.concatenate([p[1] for p in parts])
    steps = np.concatenate([p[2] for p in parts])
    ratios = steps.sum(axis=1) / ds
    mean = float(ratios.mean())
    se = float(ratios.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    report = RatioReport("monte_carlo", mean, mean * ds, ds, se, trials)
    return Simulation(report, g.nodes, biases, paths, steps)

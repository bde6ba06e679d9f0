"""Present-bias distributions on [1, inf).

Conventions used throughout the package:

* ``cdf(x) = Pr[B <= x]`` (right-continuous),
* ``survival(x) = Pr[B >= x]`` (left-continuous, so atoms at ``x`` count),
* ``z(F) = sup_{b > 1} b * Pr[B >= b]``.

The last one is the revenue of the best posted price strictly above 1. The
point ``b = 1`` itself is excluded because every bias is at least 1, and
counting it would force ``z >= 1`` for every distribution.
"""

from __future__ import annotations

import json
import math
from abc import ABC, abstractmethod
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, ClassVar

import numpy as np
from scipy.special import ndtr, ndtri

from .errors import DistributionError
from .search import GRID_POINTS, argmax_1d

ArrayLike = float | np.ndarray


def _ret(x: Any, arr: np.ndarray) -> ArrayLike:
    return float(arr) if np.ndim(x) == 0 else arr


class BiasDistribution(ABC):
    """Distribution of the daily present-bias factor; immutable."""

    kind: ClassVar[str]

    @abstractmethod
    def cdf(self, x: ArrayLike) -> ArrayLike: ...

    @abstractmethod
    def survival(self, x: ArrayLike) -> ArrayLike:
        """``Pr[B >= x]``."""

    @abstractmethod
    def quantile(self, u: np.ndarray) -> np.ndarray:
        """Generalized inverse ``inf{x : cdf(x) >= u}`` for ``u`` in [0, 1)."""

    @abstractmethod
    def atoms(self) -> tuple[tuple[float, float], ...]:
        """Point masses as ``(value, mass)`` pairs, ascending."""

    @property
    @abstractmethod
    def upper(self) -> float:
        """Largest support point (``inf`` when unbounded)."""

    @property
    def search_upper(self) -> float:
        """Right end of the interval used for numeric searches."""
        return self.upper

    @abstractmethod
    def to_dict(self) -> dict[str, Any]: ...

    def sample(self, rng: np.random.Generator, size: int | None = None) -> ArrayLike:
        """Inverse-CDF draw(s); deterministic for a given generator state."""
        u = rng.random(size)
        return _ret(u, self.quantile(np.asarray(u, dtype=float)))

    def mass_at(self, x: float) -> float:
        return float(sum(p for b, p in self.atoms() if b == x))


@dataclass(frozen=True)
class Finite(BiasDistribution):
    values: tuple[float, ...]
    probs: tuple[float, ...]

    kind: ClassVar[str] = "finite"

    def __post_init__(self) -> None:
        if len(self.values) != len(self.probs) or not self.values:
            raise DistributionError("finite distribution needs matching, nonempty values/probs")
        if any(b < 1 or not math.isfinite(b) for b in self.values):
            raise DistributionError("atoms must lie in [1, inf)")
        if any(p < 0 for p in self.probs):
            raise DistributionError("negative probability")
        if list(self.values) != sorted(set(self.values)):
            raise DistributionError("atoms must be strictly increasing; use Finite.of")
        if abs(sum(self.probs) - 1.0) > 1e-9:
            raise DistributionError(f"probabilities sum to {sum(self.probs)!r}, not 1")
        v = np.asarray(self.values, dtype=float)
        p = np.asarray(self.probs, dtype=float)
        object.__setattr__(self, "_v", v)
        object.__setattr__(self, "_cum", np.concatenate([[0.0], np.cumsum(p)]))
        object.__setattr__(self, "_tail", np.concatenate([np.cumsum(p[::-1])[::-1], [0.0]]))

    @classmethod
    def of(cls, atoms: Mapping[float, float] | Sequence[tuple[float, float]]) -> Finite:
        """Merge duplicate values, drop zero masses, renormalize sums within 1e-6 of 1."""
        items = atoms.items() if isinstance(atoms, Mapping) else atoms
        merged: dict[float, float] = {}
        for b, p in items:
            merged[float(b)] = merged.get(float(b), 0.0) + float(p)
        merged = {b: p for b, p in merged.items() if p > 0}
        total = sum(merged.values())
        if not merged or abs(total - 1.0) > 1e-6:
            raise DistributionError(f"probabilities sum to {total!r}, not 1")
        vals = tuple(sorted(merged))
        return cls(vals, tuple(merged[b] / total for b in vals))

    def cdf(self, x):
        arr = self._cum[np.searchsorted(self._v, x, side="right")]
        return _ret(x, arr)

    def survival(self, x):
        arr = self._tail[np.searchsorted(self._v, x, side="left")]
        return _ret(x, arr)

    def quantile(self, u):
        k = np.searchsorted(self._cum[1:], u, side="left")
        return self._v[np.minimum(k, len(self._v) - 1)]

    def atoms(self):
        return tuple(zip(self.values, self.probs))

    @property
    def upper(self) -> float:
        return self.values[-1]

    def to_dict(self):
        return {"kind": self.kind, "atoms": [[b, p] for b, p in self.atoms()]}


@dataclass(frozen=True)
class Uniform(BiasDistribution):
    lo: float
    hi: float

    kind: ClassVar[str] = "uniform"

    def __post_init__(self) -> None:
        if not (1 <= self.lo < self.hi < math.inf):
            raise DistributionError(f"uniform needs 1 <= lo < hi < inf, got [{self.lo}, {self.hi}]")

    def cdf(self, x):
        return _ret(x, np.clip((np.asarray(x, float) - self.lo) / (self.hi - self.lo), 0.0, 1.0))

    def survival(self, x):
        return _ret(x, np.clip((self.hi - np.asarray(x, float)) / (self.hi - self.lo), 0.0, 1.0))

    def quantile(self, u):
        return self.lo + u * (self.hi - self.lo)

    def atoms(self):
        return ()

    @property
    def upper(self) -> float:
        return self.hi

    def to_dict(self):
        return {"kind": self.kind, "lo": self.lo, "hi": self.hi}


@dataclass(frozen=True)
class EqualRevenue(BiasDistribution):
    """``Pr[B >= x] = min(1, z/x)`` on ``[1, cap]``; mass ``z/cap`` sits at the cap.

    For ``z < 1`` this leaves an atom of mass ``1 - z`` at ``b = 1``.
    """

    z: float
    cap: float

    kind: ClassVar[str] = "equal_revenue"

    def __post_init__(self) -> None:
        if not (self.z > 0 and math.isfinite(self.cap) and self.cap >= max(1.0, self.z)):
            raise DistributionError(f"equal_revenue needs z > 0 and cap >= max(1, z); got z={self.z}, cap={self.cap}")

    def cdf(self, x):
        x_ = np.asarray(x, float)
        inner = 1.0 - np.minimum(1.0, self.z / np.maximum(x_, 1.0))
        return _ret(x, np.where(x_ < 1, 0.0, np.where(x_ >= self.cap, 1.0, inner)))

    def survival(self, x):
        x_ = np.asarray(x, float)
        inner = np.minimum(1.0, self.z / np.maximum(x_, 1.0))
        return _ret(x, np.where(x_ <= 1, 1.0, np.where(x_ > self.cap, 0.0, inner)))

    def quantile(self, u):
        return np.clip(self.z / (1.0 - u), 1.0, self.cap)

    def atoms(self):
        out = []
        if self.z < 1:
            out.append((1.0, 1.0 - self.z))
        out.append((self.cap, self.z / self.cap))
        return tuple(out)

    @property
    def upper(self) -> float:
        return self.cap

    def to_dict(self):
        return {"kind": self.kind, "z": self.z, "cap": self.cap}


@dataclass(frozen=True)
class HalfNormal(BiasDistribution):
    """``B = max(xi, 1)`` with ``xi ~ N(mean, sd^2)``."""

    mean: float = 1.0
    sd: float = 1.0

    kind: ClassVar[str] = "half_normal"

    def __post_init__(self) -> None:
        if not (self.sd > 0 and math.isfinite(self.mean)):
            raise DistributionError("half_normal needs sd > 0 and a finite mean")

    def cdf(self, x):
        x_ = np.asarray(x, float)
        return _ret(x, np.where(x_ < 1, 0.0, ndtr((x_ - self.mean) / self.sd)))

    def survival(self, x):
        x_ = np.asarray(x, float)
        return _ret(x, np.where(x_ <= 1, 1.0, ndtr((self.mean - x_) / self.sd)))

    def quantile(self, u):
        return np.maximum(1.0, self.mean + self.sd * ndtri(u))

    def atoms(self):
        return ((1.0, float(ndtr((1.0 - self.mean) / self.sd))),)

    @property
    def upper(self) -> float:
        return math.inf

    @property
    def search_upper(self) -> float:
        # ndtr(-12) ~ 2e-33: nothing beyond this point can matter at 1e-9.
        return max(1.0, self.mean) + 12.0 * self.sd

    def to_dict(self):
        return {"kind": self.kind, "mean": self.mean, "sd": self.sd}


@dataclass(frozen=True)
class HeavyTailSqrt(BiasDistribution):
    """``cdf(x) = 1 - 1/(2 sqrt(x))`` on ``[1, cap)`` and 1 from the cap on."""

    cap: float = 100.0

    kind: ClassVar[str] = "heavy_tail_sqrt"

    def __post_init__(self) -> None:
        if not (1 < self.cap < math.inf):
            raise DistributionError("heavy_tail_sqrt needs 1 < cap < inf")

    def cdf(self, x):
        x_ = np.asarray(x, float)
        inner = 1.0 - 0.5 / np.sqrt(np.maximum(x_, 1.0))
        return _ret(x, np.where(x_ < 1, 0.0, np.where(x_ >= self.cap, 1.0, inner)))

    def survival(self, x):
        x_ = np.asarray(x, float)
        inner = 0.5 / np.sqrt(np.maximum(x_, 1.0))
        return _ret(x, np.where(x_ <= 1, 1.0, np.where(x_ > self.cap, 0.0, inner)))

    def quantile(self, u):
        return np.clip(0.25 / (1.0 - u) ** 2, 1.0, self.cap)

    def atoms(self):
        return ((1.0, 0.5), (self.cap, 0.5 / math.sqrt(self.cap)))

    @property
    def upper(self) -> float:
        return self.cap

    def to_dict(self):
        return {"kind": self.kind, "cap": self.cap}


def point_mass(b: float) -> Finite:
    return Finite((float(b),), (1.0,))


_KINDS: dict[str, type[BiasDistribution]] = {
    cls.kind: cls for cls in (Finite, Uniform, EqualRevenue, HalfNormal, HeavyTailSqrt)
}


def _num(x: Any) -> float:
    return float(Fraction(x)) if isinstance(x, str) else float(x)


def from_dict(spec: Mapping[str, Any]) -> BiasDistribution:
    """Build a distribution from its JSON form, e.g. ``{"kind": "uniform", "lo": 1, "hi": 3}``.

    Numbers may also be given as strings such as ``"1/3"``.
    """
    kind = spec.get("kind")
    if kind not in _KINDS:
        raise DistributionError(f"unknown distribution kind {kind!r}; expected one of {sorted(_KINDS)}")
    params = {k: v for k, v in spec.items() if k != "kind"}
    try:
        if kind == "finite":
            return Finite.of([(_num(b), _num(p)) for b, p in params["atoms"]])
        return _KINDS[kind](**{k: _num(v) for k, v in params.items()})
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, DistributionError):
            raise
        raise DistributionError(f"bad parameters for {kind}: {exc}") from exc


def load_distribution(path: str | Path) -> BiasDistribution:
    with open(path, encoding="utf-8") as fh:
        return from_dict(json.load(fh))


@dataclass(frozen=True)
class ZValue:
    z: float
    argmax: float
    exact: bool


def _right_of_one(dist: BiasDistribution) -> float:
    """``Pr[B > 1]``, the limit of ``b * survival(b)`` as ``b`` decreases to 1."""
    return 1.0 - float(dist.cdf(1.0))


def z_value(dist: BiasDistribution) -> ZValue:
    """``sup_{b>1} b * Pr[B >= b]`` and the smallest point attaining it.

    When the supremum is only approached as ``b -> 1+``, ``argmax`` is 1.
    Returns ``z = inf`` if the revenue curve is still growing far out in an
    unbounded tail.
    """
    if isinstance(dist, Finite):
        best, arg = _right_of_one(dist), 1.0
        for b in dist.values:
            if b > 1:
                r = b * float(dist.survival(b))
                if r > best + 1e-15:
                    best, arg = r, b
        return ZValue(best, arg, True)
    if isinstance(dist, Uniform):
        b = min(max(dist.hi / 2.0, dist.lo), dist.hi)
        return ZValue(b * float(dist.survival(b)), b, True)
    if isinstance(dist, EqualRevenue):
        return ZValue(dist.z, max(1.0, dist.z), True)

    def revenue(b: np.ndarray) -> np.ndarray:
        return b * dist.survival(b)

    hi = dist.search_upper
    atoms = [b for b, _ in dist.atoms() if b > 1]
    lo = 1.0 + (hi - 1.0) / GRID_POINTS
    arg, best = argmax_1d(revenue, lo, hi, extra=atoms)
    if not math.isfinite(dist.upper):
        far = hi * 1e6
        if far * float(dist.survival(far)) >= best:
            return ZValue(math.inf, math.inf, False)
    edge = _right_of_one(dist)
    if edge > best + 1e-12:
        return ZValue(edge, 1.0, False)
    return ZValue(best, arg, False)


def dominates(
    a: BiasDistribution,
    b: BiasDistribution,
    grid: Sequence[float] | np.ndarray | None = None,
    tol: float = 1e-12,
) -> bool:
    """True iff ``a.survival >= b.survival`` on every probe point (first-order dominance).

    The default probe set is a 10^4-point grid over both supports plus every
    atom and the point just to its right.
    """
    if grid is None:
        hi = max(a.search_upper, b.search_upper)
        atoms = [x for d in (a, b) for x, _ in d.atoms()]
        right = [np.nextafter(x, math.inf) for x in atoms]
        grid = np.concatenate([np.linspace(1.0, hi, GRID_POINTS), atoms, right])
    xs = np.asarray(grid, dtype=float)
    return bool(np.all(a.survival(xs) >= b.survival(xs) - tol))

"""One-dimensional quadratic optimal transport.

Costs and monotone maps computed through the quantile coupling: a two-pointer
merge of cumulative weights for atomic measures, closed forms for Gaussians.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

__all__ = [
    "Atoms1D",
    "Gaussian1D",
    "Weighted1DMeasure",
    "QuantileMap",
    "AffineMap1D",
    "MonotoneMap1D",
    "DegenerateSourceError",
    "w2_1d",
    "monotone_map",
    "lipschitz_scale",
    "fenchel_gap_bound_check",
    "write_atoms",
    "read_atoms",
]

WEIGHT_TOL = 1e-12


class DegenerateSourceError(ValueError):
    """Monotone map requested from a degenerate source to a spread-out target."""


@dataclass(frozen=True)
class Atoms1D:
    """Weighted atoms on the line, sorted by position."""

    positions: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float).reshape(-1)
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if pos.shape != w.shape or pos.size == 0:
            raise ValueError("positions and weights must be equal-length and nonempty")
        if not np.all(np.isfinite(pos)):
            raise ValueError("positions must be finite")
        if np.any(w <= 0):
            raise ValueError("weights must be positive")
        if abs(w.sum() - 1.0) > WEIGHT_TOL * max(1.0, w.size):
            raise ValueError(f"weights must sum to 1, got {w.sum()!r}")
        order = np.argsort(pos, kind="stable")
        object.__setattr__(self, "positions", pos[order])
        object.__setattr__(self, "weights", w[order])

    @classmethod
    def from_samples(cls, x: Sequence[float]) -> "Atoms1D":
        x = np.asarray(x, dtype=float).reshape(-1)
        return cls(x, np.full(x.size, 1.0 / x.size))

    @property
    def degenerate(self) -> bool:
        return self.positions[-1] == self.positions[0]


@dataclass(frozen=True)
class Gaussian1D:
    mean: float
    var: float

    def __post_init__(self):
        if self.var < 0:
            raise ValueError("variance must be nonnegative")


Weighted1DMeasure = Union[Atoms1D, Gaussian1D]


@dataclass(frozen=True)
class QuantileMap:
    """Monotone map given by its values at source atoms (piecewise constant)."""

    breakpoints: np.ndarray
    map_values: np.ndarray

    def __post_init__(self):
        bp = np.asarray(self.breakpoints, dtype=float).reshape(-1)
        mv = np.asarray(self.map_values, dtype=float).reshape(-1)
        if bp.shape != mv.shape or bp.size == 0:
            raise ValueError("breakpoints and values must be equal-length and nonempty")
        if np.any(np.diff(bp) < 0) or np.any(np.diff(mv) < 0):
            raise ValueError("quantile map must be nondecreasing")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "map_values", mv)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(self.breakpoints, x, side="right") - 1
        return self.map_values[np.clip(idx, 0, self.breakpoints.size - 1)]

    @property
    def lipschitz(self) -> float:
        """Max slope between consecutive breakpoints; inf on coincident jumps."""
        db = np.diff(self.breakpoints)
        dv = np.diff(self.map_values)
        if db.size == 0:
            return 0.0
        jump = (db == 0) & (dv > 0)
        if np.any(jump):
            return float("inf")
        keep = db > 0
        if not np.any(keep):
            return 0.0
        return float(np.max(dv[keep] / db[keep]))


@dataclass(frozen=True)
class AffineMap1D:
    slope: float
    intercept: float

    def __post_init__(self):
        if self.slope < 0:
            raise ValueError("monotone affine map needs slope >= 0")

    def __call__(self, x) -> np.ndarray:
        return self.slope * np.asarray(x, dtype=float) + self.intercept

    @property
    def lipschitz(self) -> float:
        return float(self.slope)


MonotoneMap1D = Union[QuantileMap, AffineMap1D]


def _quantile_cost(a: Atoms1D, b: Atoms1D) -> float:
    """Squared quantile-coupling cost via merged cumulative weights."""
    cwa = np.cumsum(a.weights)
    cwb = np.cumsum(b.weights)
    qs = np.union1d(cwa, cwb)
    edges = np.concatenate(([0.0], qs))
    dq = np.diff(edges)
    ia = np.clip(np.searchsorted(cwa, edges[:-1], side="right"), 0, a.positions.size - 1)
    ib = np.clip(np.searchsorted(cwb, edges[:-1], side="right"), 0, b.positions.size - 1)
    return float(np.sum(dq * (a.positions[ia] - b.positions[ib]) ** 2))


def w2_1d(a: Weighted1DMeasure, b: Weighted1DMeasure) -> float:
    """Squared quadratic Wasserstein distance on the line.

    Atom pairs go through the quantile coupling; Gaussian pairs use
    ``(m_a - m_b)^2 + (sqrt(v_a) - sqrt(v_b))^2``.
    """
    if isinstance(a, Gaussian1D) and isinstance(b, Gaussian1D):
        return (a.mean - b.mean) ** 2 + (np.sqrt(a.var) - np.sqrt(b.var)) ** 2
    if isinstance(a, Atoms1D) and isinstance(b, Atoms1D):
        if a is b or (
            a.positions.shape == b.positions.shape
            and np.array_equal(a.positions, b.positions)
            and np.array_equal(a.weights, b.weights)
        ):
            return 0.0
        return _quantile_cost(a, b)
    raise TypeError("w2_1d needs two atomic or two Gaussian measures")


def monotone_map(a: Weighted1DMeasure, b: Weighted1DMeasure) -> MonotoneMap1D:
    """The nondecreasing transport map from ``a`` to ``b``.

    For atoms this is the quantile map evaluated at the source atoms; for
    Gaussians the affine map with slope sqrt(v_b / v_a).

    Raises
    ------
    DegenerateSourceError
        If ``a`` is a point mass (or zero-variance Gaussian) while ``b`` is not.
    """
    if isinstance(a, Gaussian1D) and isinstance(b, Gaussian1D):
        if a.var == 0.0:
            raise DegenerateSourceError("zero-variance source has no monotone map")
        slope = float(np.sqrt(b.var / a.var))
        return AffineMap1D(slope, b.mean - slope * a.mean)
    if isinstance(a, Atoms1D) and isinstance(b, Atoms1D):
        if a.degenerate and not b.degenerate:
            raise DegenerateSourceError("point-mass source has no monotone map to a spread target")
        cwa = np.cumsum(a.weights)
        cwb = np.cumsum(b.weights)
        # F_b^{-1}(F_a(x_i)): first target atom whose cumulative weight reaches
        # the source quantile, with a small guard against cumsum round-off
        idx = np.searchsorted(cwb, cwa - 1e-12, side="left")
        values = b.positions[np.clip(idx, 0, b.positions.size - 1)]
        return QuantileMap(a.positions, values)
    raise TypeError("monotone_map needs two atomic or two Gaussian measures")


def lipschitz_scale(maps: Sequence[MonotoneMap1D]) -> float:
    """Largest Lipschitz constant over a family of monotone maps."""
    maps = list(maps)
    if not maps:
        raise ValueError("lipschitz_scale needs at least one map")
    return max(m.lipschitz for m in maps)


@dataclass(frozen=True)
class FenchelGapCheck:
    lhs: float
    rhs: float
    holds: bool


def fenchel_gap_bound_check(a_samples, b_samples, lam: float) -> FenchelGapCheck:
    """Check the one-dimensional Fenchel-gap inequality on paired samples.

    With tau the empirical monotone map between the two marginals, verifies

        mean |B - tau(A)|^2  <=  lam * (mean |A - B|^2 - W2^2(law A, law B))

    up to a 1e-9 relative slack.  ``lam`` must upper-bound the Lipschitz
    constant of tau for the inequality to be guaranteed.
    """
    if lam <= 0:
        raise ValueError("lam must be positive")
    a = np.asarray(a_samples, dtype=float).reshape(-1)
    b = np.asarray(b_samples, dtype=float).reshape(-1)
    if a.shape != b.shape or a.size == 0:
        raise ValueError("samples must be paired and nonempty")
    law_a = Atoms1D.from_samples(a)
    law_b = Atoms1D.from_samples(b)
    tau = monotone_map(law_a, law_b)
    lhs = float(np.mean((b - tau(a)) ** 2))
    rhs = lam * float(np.mean((a - b) ** 2) - w2_1d(law_a, law_b))
    scale = max(1.0, float(np.mean(a**2 + b**2)))
    return FenchelGapCheck(lhs, rhs, bool(lhs <= rhs + 1e-9 * scale))


def write_atoms(path, a: Atoms1D) -> None:
    """Two-column (position, weight) text."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write("# 1-d atoms: position, weight\n")
        for x, w in zip(a.positions, a.weights):
            fh.write(f"{x:.17g},{w:.17g}\n")


def read_atoms(path) -> Atoms1D:
    pos, w = [], []
    with open(path, "r", encoding="ascii") as fh:
        for ln in fh:
            ln = ln.strip()
            if not ln or ln.startswith("#"):
                continue
            x, ww = ln.split(",")
            pos.append(float(x))
            w.append(float(ww))
    return Atoms1D(np.asarray(pos), np.asarray(w))

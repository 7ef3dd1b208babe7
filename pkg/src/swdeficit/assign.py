"""Exact quadratic Wasserstein distance in R^d.

Equal-size uniform clouds are matched by an exact linear-assignment solver
(shortest augmenting path); Gaussian pairs use the closed-form Bures cost.
Exactness matters downstream: per-direction optimality gaps must never go
negative beyond round-off.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .measures import EmpiricalMeasure, GaussianMeasure

__all__ = ["AssignmentResult", "cost_matrix", "w2_exact_empirical", "w2_gaussian", "SIZE_CAP"]

SIZE_CAP = 4096


@dataclass(frozen=True)
class AssignmentResult:
    """Optimal matching of two equal-size clouds: mean squared cost and permutation."""

    cost: float
    assignment: np.ndarray


def cost_matrix(a: EmpiricalMeasure, b: EmpiricalMeasure) -> np.ndarray:
    """Pairwise squared Euclidean distances, clipped at zero against round-off."""
    sq_a = np.sum(a.points**2, axis=1)[:, None]
    sq_b = np.sum(b.points**2, axis=1)[None, :]
    c = sq_a + sq_b - 2.0 * (a.points @ b.points.T)
    return np.clip(c, 0.0, None)


def w2_exact_empirical(a: EmpiricalMeasure, b: EmpiricalMeasure, size_cap: int = SIZE_CAP) -> AssignmentResult:
    """Exact W2^2 between equal-size uniform clouds.

    Solves the n x n assignment problem on the squared-distance cost matrix
    and returns ``(1/n) * min_pi sum_i |x_i - y_pi(i)|^2`` with an optimal
    permutation.
    """
    if a.n != b.n:
        raise ValueError(f"clouds must have equal size, got {a.n} vs {b.n}")
    if a.d != b.d:
        raise ValueError(f"clouds must share dimension, got {a.d} vs {b.d}")
    if a.n > size_cap:
        raise ValueError(f"cloud size {a.n} exceeds the solver cap {size_cap}")
    c = cost_matrix(a, b)
    rows, cols = linear_sum_assignment(c)
    perm = np.empty_like(cols)
    perm[rows] = cols
    return AssignmentResult(float(c[rows, cols].sum() / a.n), perm)


def _psd_sqrt(s: np.ndarray) -> np.ndarray:
    """Symmetric PSD square root; eigenvalues below -1e-10 * scale are rejected."""
    w, v = np.linalg.eigh(0.5 * (s + s.T))
    scale = max(float(np.max(np.abs(w))), 1.0)
    if w.min() < -1e-10 * scale:
        raise ValueError("matrix square root of a non-PSD input")
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.T


def w2_gaussian(a: GaussianMeasure, b: GaussianMeasure) -> float:
    """Closed-form W2^2 between Gaussians (Bures cost between covariances)."""
    if a.d != b.d:
        raise ValueError("Gaussians must share dimension")
    root_a = _psd_sqrt(a.cov)
    cross = _psd_sqrt(root_a @ b.cov @ root_a)
    dm = a.mean - b.mean
    val = float(dm @ dm + np.trace(a.cov) + np.trace(b.cov) - 2.0 * np.trace(cross))
    # tiny negative round-off on near-identical inputs
    return max(val, 0.0)

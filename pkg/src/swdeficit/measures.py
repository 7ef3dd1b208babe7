"""Probability measures: empirical point clouds and Gaussians.

Empirical measures carry uniform weights 1/n; weighted atoms live only in the
one-dimensional transport module.  All operations are pure and deterministic
given an explicit seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .rng import stream

__all__ = [
    "EmpiricalMeasure",
    "GaussianMeasure",
    "Measure",
    "sample",
    "project",
    "pushforward",
    "gaussian_affine_image",
    "write_cloud",
    "read_cloud",
    "write_gaussian",
    "read_gaussian",
]

PSD_RTOL = 1e-12
FRAME_TOL = 1e-10


@dataclass(frozen=True)
class EmpiricalMeasure:
    """Uniform-weight point cloud: one atom per row of ``points``."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.shape[0] < 1:
            raise ValueError("empirical measure needs at least one atom")
        if not np.all(np.isfinite(pts)):
            raise ValueError("atom coordinates must be finite")
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class GaussianMeasure:
    """Gaussian N(mean, cov) with symmetric positive-semidefinite covariance."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float).reshape(-1)
        cov = np.asarray(self.cov, dtype=float)
        d = mean.shape[0]
        if cov.shape != (d, d):
            raise ValueError(f"covariance must be {d}x{d}, got {cov.shape}")
        scale = max(abs(float(np.trace(cov))), np.max(np.abs(cov)), 1.0)
        if np.max(np.abs(cov - cov.T)) > PSD_RTOL * scale:
            raise ValueError("covariance is not symmetric")
        cov = 0.5 * (cov + cov.T)
        if np.min(np.linalg.eigvalsh(cov)) < -PSD_RTOL * scale:
            raise ValueError("covariance has a significantly negative eigenvalue")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def d(self) -> int:
        return self.mean.shape[0]


Measure = Union[EmpiricalMeasure, GaussianMeasure]


def _psd_factor(cov: np.ndarray) -> np.ndarray:
    """Matrix L with L L^T = cov; Cholesky when definite, eigen otherwise.

    Eigenvalues below -PSD_RTOL * trace scale signal a non-PSD input; smaller
    negative round-off is clipped to zero.
    """
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        w, v = np.linalg.eigh(cov)
        scale = max(abs(float(np.trace(cov))), 1.0)
        if w.min() < -PSD_RTOL * scale:
            raise ValueError("covariance factorization failed: matrix is not PSD")
        return v * np.sqrt(np.clip(w, 0.0, None))


def _frame_matrix(frame) -> np.ndarray:
    """Accept a Frame-like object or a raw (d, k) array with orthonormal columns."""
    mat = np.asarray(getattr(frame, "matrix", frame), dtype=float)
    if mat.ndim == 1:
        mat = mat[:, None]
    gram = mat.T @ mat
    if np.max(np.abs(gram - np.eye(mat.shape[1]))) > FRAME_TOL:
        raise ValueError("frame columns are not orthonormal")
    return mat


def sample(m: Measure, n: int, seed: int, task: int = 0) -> EmpiricalMeasure:
    """Draw ``n`` i.i.d. atoms from ``m``.

    Gaussian input is sampled through a PSD factor applied to standard
    normals; empirical input returns a bootstrap resample.  Deterministic
    given ``(seed, task, n)``.
    """
    if n < 1:
        raise ValueError("sample size must be >= 1")
    rng = stream(seed, task)
    if isinstance(m, GaussianMeasure):
        z = rng.standard_normal((n, m.d))
        return EmpiricalMeasure(m.mean + z @ _psd_factor(m.cov).T)
    idx = rng.integers(0, m.n, size=n)
    return EmpiricalMeasure(m.points[idx])


def project(m: Measure, frame) -> Measure:
    """Push ``m`` forward by x -> F^T x for an orthonormal frame F."""
    f = _frame_matrix(frame)
    if isinstance(m, GaussianMeasure):
        return GaussianMeasure(f.T @ m.mean, f.T @ m.cov @ f)
    return EmpiricalMeasure(m.points @ f)


def pushforward(m: EmpiricalMeasure, field) -> EmpiricalMeasure:
    """Replace each atom x_i by field(x_i); weights stay uniform."""
    if not isinstance(m, EmpiricalMeasure):
        raise TypeError("pushforward is defined for empirical measures only")
    values = np.asarray(field(m.points), dtype=float)
    if values.shape != m.points.shape:
        raise ValueError(f"field returned shape {values.shape}, expected {m.points.shape}")
    if not np.all(np.isfinite(values)):
        raise ValueError("field produced non-finite values on the support")
    return EmpiricalMeasure(values)


def gaussian_affine_image(g: GaussianMeasure, matrix: np.ndarray, offset: np.ndarray) -> GaussianMeasure:
    """Exact pushforward of a Gaussian by the affine map x -> A x + b."""
    a = np.asarray(matrix, dtype=float)
    b = np.asarray(offset, dtype=float).reshape(-1)
    return GaussianMeasure(a @ g.mean + b, a @ g.cov @ a.T)


# -- text serialization ------------------------------------------------------

def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_cloud(path, m: EmpiricalMeasure) -> None:
    """Comma-separated atoms, one per line, '#' header allowed."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"# point cloud: {m.n} atoms in R^{m.d}\n")
        for row in m.points:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def read_cloud(path) -> EmpiricalMeasure:
    rows = []
    with open(path, "r", encoding="ascii") as fh:
        for ln in fh:
            ln = ln.strip()
            if not ln or ln.startswith("#"):
                continue
            rows.append([float(tok) for tok in ln.split(",")])
    if not rows:
        raise ValueError(f"no atoms found in {path}")
    return EmpiricalMeasure(np.asarray(rows))


def write_gaussian(path, g: GaussianMeasure) -> None:
    """Key-value spec: a `mean` line and a `cov` block of d comma rows."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write("# gaussian measure\n")
        fh.write("mean = " + ",".join(_fmt(x) for x in g.mean) + "\n")
        fh.write("cov =\n")
        for row in g.cov:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def read_gaussian(path) -> GaussianMeasure:
    mean = None
    cov_rows: list[list[float]] = []
    in_cov = False
    with open(path, "r", encoding="ascii") as fh:
        for ln in fh:
            ln = ln.strip()
            if not ln or ln.startswith("#"):
                continue
            if ln.replace(" ", "").startswith("mean="):
                mean = [float(tok) for tok in ln.split("=", 1)[1].split(",")]
                in_cov = False
            elif ln.replace(" ", "").startswith("cov="):
                tail = ln.split("=", 1)[1].strip()
                in_cov = True
                if tail:
                    cov_rows.append([float(tok) for tok in tail.split(",")])
            elif in_cov:
                cov_rows.append([float(tok) for tok in ln.split(",")])
            else:
                raise ValueError(f"unrecognized line in gaussian spec: {ln!r}")
    if mean is None or not cov_rows:
        raise ValueError(f"gaussian spec {path} needs both `mean` and `cov`")
    return GaussianMeasure(np.asarray(mean), np.asarray(cov_rows))

"""Ridge defect, distance to the homothetic affine family, and gap ratios.

The ridge defect of a field u under a measure mu is the direction-averaged
conditional variance of theta . u(X) given theta . X.  It vanishes exactly on
maps x -> lam x + b, and the ratio of defect to squared distance from that
family is the spectral quantity the stability estimate runs on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import ot1d
from .chaos import conditional_variance_profile, spherical_quadratic_exact
from .fields import AffineField, PolyGradientField, TabulatedField
from .measures import EmpiricalMeasure, GaussianMeasure, Measure, gaussian_affine_image
from .slicing import DeficitReport, Frame, map_deficit

__all__ = [
    "AffineFit",
    "RidgeDefect",
    "StabilityCheck",
    "ZeroDenominatorError",
    "dist_to_affine",
    "ridge_defect",
    "spk_ratio",
    "stability_check",
    "default_bin_count",
]

RESIDUAL_FLOOR = 1e-10


class ZeroDenominatorError(ValueError):
    """The field is (numerically) homothetic affine, so the ratio is excluded."""


@dataclass(frozen=True)
class AffineFit:
    """Least-squares projection of a field onto {x -> lam x + b}."""

    lam: float
    offset: np.ndarray
    residual_sq: float


def _is_standard_gaussian(mu: GaussianMeasure) -> bool:
    return bool(
        np.allclose(mu.mean, 0.0, atol=1e-12)
        and np.allclose(mu.cov, np.eye(mu.d), atol=1e-12)
    )


def dist_to_affine(u, mu: Measure) -> AffineFit:
    """Best homothetic affine approximation of ``u`` in L2(mu).

    Uses the two-moment closed form: the optimal scalar is the covariance of
    X and u over the variance of X, the optimal offset recenters the means.
    Moments are exact for affine fields under Gaussians and for polynomial
    gradients under the standard Gaussian; empirical measures use sample
    averages.
    """
    if isinstance(mu, EmpiricalMeasure):
        vals = np.asarray(u(mu.points), dtype=float)
        ex = mu.points.mean(axis=0)
        eu = vals.mean(axis=0)
        xc = mu.points - ex
        denom = float(np.mean(np.sum(xc**2, axis=1)))
        lam = float(np.mean(np.sum(xc * (vals - eu), axis=1)) / denom) if denom > 0 else 0.0
        offset = eu - lam * ex
        residual = float(np.mean(np.sum((vals - lam * mu.points - offset) ** 2, axis=1)))
        return AffineFit(lam, offset, residual)
    if isinstance(mu, GaussianMeasure):
        if isinstance(u, AffineField):
            a, b = u.matrix, u.offset
            tr_sigma = float(np.trace(mu.cov))
            lam = float(np.trace(a @ mu.cov) / tr_sigma) if tr_sigma > 0 else 0.0
            shift = a - lam * np.eye(mu.d)
            offset = a @ mu.mean + b - lam * mu.mean
            residual = float(np.trace(shift @ mu.cov @ shift.T))
            return AffineFit(lam, offset, residual)
        if isinstance(u, PolyGradientField):
            if not _is_standard_gaussian(mu):
                raise ValueError(
                    "closed-form moments for polynomial gradients need the standard Gaussian"
                )
            offset = np.zeros(mu.d)
            lam = 0.0
            residual = 0.0
            for n, a in u.terms.items():
                if n == 1:
                    offset = offset + a.values  # grad of <A_1, :x:> is the constant A_1
                elif n == 2:
                    tr = a.partial_trace().values[0]
                    lam = 2.0 * tr / mu.d
                    residual += 4.0 * (a.norm_sq - tr**2 / mu.d)
                else:
                    residual += n * math.factorial(n) * a.norm_sq
            return AffineFit(lam, offset, float(residual))
        raise TypeError("tabulated fields need an empirical base measure")
    raise TypeError(f"unsupported measure type {type(mu).__name__}")


@dataclass(frozen=True)
class RidgeDefect:
    """Estimated ridge defect, with per-direction values when frames were used."""

    value: float
    per_direction: Optional[tuple] = None
    std_err: Optional[float] = None


def default_bin_count(n: int) -> int:
    return int(np.ceil(n ** (1.0 / 3.0)))


def _gaussian_affine_profile(u: AffineField, mu: GaussianMeasure, dirs: np.ndarray) -> np.ndarray:
    """Var(theta . u(X) | theta . X) per direction, jointly Gaussian case."""
    a_sig = u.matrix @ mu.cov
    var_u = np.einsum("bi,ij,bj->b", dirs, a_sig @ u.matrix, dirs)
    cov_xu = np.einsum("bi,ij,bj->b", dirs, a_sig, dirs)
    var_x = np.einsum("bi,ij,bj->b", dirs, mu.cov, dirs)
    out = var_u.copy()
    pos = var_x > 0
    out[pos] -= cov_xu[pos] ** 2 / var_x[pos]
    return np.clip(out, 0.0, None)


def _binned_profile(points: np.ndarray, values: np.ndarray, dirs: np.ndarray, k_bins: int) -> np.ndarray:
    """Quantile-bin conditional variance estimate per direction.

    Directions are processed in blocks so the (block, n) projection matrices
    stay within a modest memory budget.
    """
    n = points.shape[0]
    bounds = (np.arange(k_bins + 1) * n) // k_bins
    counts = np.diff(bounds).astype(float)
    out = np.empty(dirs.shape[0])
    block = max(1, (1 << 24) // max(n, 1))
    for s in range(0, dirs.shape[0], block):
        dblk = dirs[s : s + block]
        z = dblk @ points.T
        w = dblk @ values.T
        order = np.argsort(z, axis=1)
        w_sorted = np.take_along_axis(w, order, axis=1)
        sums = np.add.reduceat(w_sorted, bounds[:-1], axis=1)
        sumsq = np.add.reduceat(w_sorted * w_sorted, bounds[:-1], axis=1)
        out[s : s + dblk.shape[0]] = (sumsq - sums**2 / counts).sum(axis=1) / n
    return out


def _directions(frames: Sequence[Frame]) -> np.ndarray:
    dirs = np.stack([f.direction for f in frames])
    return dirs


def ridge_defect(
    u,
    mu: Measure,
    frames: Optional[Sequence[Frame]] = None,
    estimator: str = "closed_form",
    n_bins: Optional[int] = None,
) -> RidgeDefect:
    """Direction-averaged conditional variance of the projected field.

    estimator="closed_form"
        Exact per-direction conditional variances.  Without frames, the
        spherical average itself is exact: isotropic Gaussians with affine
        fields use the trace formula, the standard Gaussian with polynomial
        gradients uses the chaos decomposition and the spherical spectrum
        (degrees <= 4).  With frames, per-direction values are averaged.
    estimator="binned"
        Nonparametric: sort by theta . x, split into equal-count quantile
        bins, subtract bin means of theta . u.  Needs an empirical measure,
        a field evaluable on its atoms, and frames.  Positively biased but
        consistent; the bias direction is harmless for lower-bound checks.
    """
    if estimator == "closed_form":
        if isinstance(mu, GaussianMeasure) and isinstance(u, AffineField):
            if frames is None:
                diag = np.diag(mu.cov)
                iso = np.allclose(mu.cov, diag[0] * np.eye(mu.d), atol=1e-12 * max(1.0, diag[0]))
                if not iso:
                    raise ValueError("exact spherical average needs an isotropic covariance; pass frames")
                sigma_sq = float(diag[0])
                a = u.matrix
                tr_a = float(np.trace(a))
                tr_a2 = float(np.trace(a @ a))
                d = mu.d
                return RidgeDefect(sigma_sq * (d * tr_a2 - tr_a**2) / (d * (d + 2)))
            dirs = _directions(frames)
            prof = _gaussian_affine_profile(u, mu, dirs)
        elif isinstance(mu, GaussianMeasure) and isinstance(u, PolyGradientField):
            if not _is_standard_gaussian(mu):
                raise ValueError("chaos closed form needs the standard Gaussian")
            if frames is None:
                val = sum(
                    n * math.factorial(n) * (a.norm_sq / mu.d - spherical_quadratic_exact(a))
                    for n, a in u.terms.items()
                )
                return RidgeDefect(float(val))
            dirs = _directions(frames)
            prof = conditional_variance_profile(u, dirs)
        else:
            raise TypeError("closed_form needs a Gaussian measure with an affine or polynomial field")
    elif estimator == "binned":
        if frames is None:
            raise ValueError("the binned estimator needs frames")
        if not isinstance(mu, EmpiricalMeasure):
            raise TypeError("the binned estimator needs an empirical measure")
        values = np.asarray(u(mu.points), dtype=float)
        dirs = _directions(frames)
        prof = _binned_profile(mu.points, values, dirs, n_bins or default_bin_count(mu.n))
    else:
        raise ValueError(f"unknown estimator {estimator!r}")
    per_dir = tuple((f, float(q)) for f, q in zip(frames, prof))
    se = float(prof.std(ddof=1) / np.sqrt(prof.size)) if prof.size > 1 else 0.0
    return RidgeDefect(float(prof.mean()), per_dir, se)


def spk_ratio(
    u,
    mu: Measure,
    frames: Optional[Sequence[Frame]] = None,
    estimator: Optional[str] = None,
    n_bins: Optional[int] = None,
) -> float:
    """Ridge defect over squared distance to the homothetic affine family.

    Raises
    ------
    ZeroDenominatorError
        If the affine-fit residual is below 1e-10; such fields are omitted
        from ratio infima.
    """
    fit = dist_to_affine(u, mu)
    if fit.residual_sq <= RESIDUAL_FLOOR:
        raise ZeroDenominatorError(
            f"residual {fit.residual_sq:.3e} is below the exclusion floor"
        )
    if estimator is None:
        estimator = "binned" if isinstance(mu, EmpiricalMeasure) else "closed_form"
    rd = ridge_defect(u, mu, frames, estimator, n_bins)
    return rd.value / fit.residual_sq


@dataclass(frozen=True)
class StabilityCheck:
    lhs: float
    rhs: float
    lam: float
    holds: bool
    deficit: float
    mc_std_err: float


def stability_check(mu: Measure, T, frames: Sequence[Frame], kappa: float) -> StabilityCheck:
    """Verify dist^2(T, affine family) <= (Lambda / kappa) * deficit.

    ``Lambda`` is the largest Lipschitz constant of the projected monotone
    maps over the sampled directions, the deficit comes from the displacement
    decomposition, and the comparison allows 3 standard errors of Monte-Carlo
    slack on the right-hand side.
    """
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    report: DeficitReport = map_deficit(mu, T, frames)
    if report.k != 1:
        raise ValueError("stability check uses direction (k = 1) frames")
    lhs = dist_to_affine(T, mu).residual_sq
    dirs = _directions(frames)
    if isinstance(mu, GaussianMeasure):
        nu = gaussian_affine_image(mu, T.matrix, T.offset)
        var_mu = np.einsum("bi,ij,bj->b", dirs, mu.cov, dirs)
        var_nu = np.einsum("bi,ij,bj->b", dirs, nu.cov, dirs)
        if np.any(var_mu <= 0):
            raise ot1d.DegenerateSourceError("a projected source marginal is degenerate")
        lam = float(np.max(np.sqrt(var_nu / var_mu)))
    else:
        target = np.asarray(T(mu.points), dtype=float)
        maps = [
            ot1d.monotone_map(
                ot1d.Atoms1D.from_samples(mu.points @ th),
                ot1d.Atoms1D.from_samples(target @ th),
            )
            for th in dirs
        ]
        lam = ot1d.lipschitz_scale(maps)
    rhs = (lam / kappa) * report.deficit
    slack = (lam / kappa) * 3.0 * report.mc_std_err
    return StabilityCheck(
        lhs=float(lhs),
        rhs=float(rhs),
        lam=lam,
        holds=bool(lhs <= rhs + slack),
        deficit=report.deficit,
        mc_std_err=report.mc_std_err,
    )

"""Gaussian chaos machinery: spherical quadratic forms and their spectrum.

The quadratic form Q_n(A) = average of (A : theta^{(x) n})^2 over the unit
sphere is diagonal on the irreducible trace components of symmetric tensors;
its eigenvalues have an exact rational expression, which this module
evaluates exactly and cross-checks by Monte Carlo.  The same components give
the degree-3 field attaining the sharp Gaussian spectral-gap ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fields import PolyGradientField
from .rng import stream
from .tensors import (
    SymTensor,
    harmonic_components,
    hermite_table,
    identity_odot,
    index_multiplicities,
    sorted_multi_indices,
)

__all__ = [
    "spectrum_eigenvalue",
    "contract_sphere",
    "spherical_quadratic",
    "spherical_quadratic_exact",
    "SphericalQuadratic",
    "build_extremizer",
    "chaos_projection_check",
    "ChaosProjectionCheck",
    "gradient_norm_sq",
    "conditional_variance_profile",
]


def spectrum_eigenvalue(m: int, j: int, d: int) -> float:
    """Eigenvalue of Q_{m+2j} on the component Sym(I^j (x) trace-free m-tensor).

    Exact integer arithmetic:  (m+2j)! / (2^j j! prod_{i<m+j} (d + 2i)).
    """
    if m < 0 or j < 0 or d < 2:
        raise ValueError("need m >= 0, j >= 0, d >= 2")
    denom = 2**j * math.factorial(j) * math.prod(d + 2 * i for i in range(m + j))
    return math.factorial(m + 2 * j) / denom


def contract_sphere(a: SymTensor, theta: np.ndarray) -> float:
    """A : theta^{(x) n} for a unit vector theta."""
    theta = np.asarray(theta, dtype=float).reshape(-1)
    if abs(np.linalg.norm(theta) - 1.0) > 1e-10:
        raise ValueError("theta must be a unit vector")
    return float(a.contract_powers(theta))


@dataclass(frozen=True)
class SphericalQuadratic:
    value: float
    std_err: float


def spherical_quadratic(a: SymTensor, n_mc: int, seed: int, task: int = 0) -> SphericalQuadratic:
    """Monte-Carlo estimate of Q_n(A) over uniform sphere directions."""
    rng = stream(seed, task)
    g = rng.standard_normal((n_mc, a.d))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    sq = a.contract_powers(g) ** 2
    return SphericalQuadratic(float(sq.mean()), float(sq.std(ddof=1) / np.sqrt(n_mc)))


def spherical_quadratic_exact(a: SymTensor) -> float:
    """Exact Q_n(A) for degree <= 4 via the trace decomposition and eigenvalues."""
    return sum(
        spectrum_eigenvalue(m, j, a.d) * comp.norm_sq
        for m, j, comp in harmonic_components(a)
    )


def build_extremizer(d: int, v: np.ndarray) -> PolyGradientField:
    """Degree-3 potential whose gradient attains the sharp Gaussian ratio.

    The coefficient tensor is Sym(I (x) v), entrywise
    (delta_ij v_k + delta_ik v_j + delta_jk v_i) / 3.
    """
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.shape[0] != d:
        raise ValueError(f"direction must live in R^{d}")
    if not np.any(v != 0.0):
        raise ValueError("direction must be nonzero")
    a3 = identity_odot(SymTensor(d, 1, v))
    return PolyGradientField({3: a3})


def gradient_norm_sq(degree: int, a: SymTensor) -> float:
    """L2(gamma_d) norm squared of grad <A_n, :x^{(x) n}:>, equal to n n! |A_n|^2."""
    return degree * math.factorial(degree) * a.norm_sq


@dataclass(frozen=True)
class ChaosProjectionCheck:
    analytic: float
    empirical: float
    agree: bool
    coefficients: np.ndarray
    std_errs: np.ndarray


def chaos_projection_check(
    a: SymTensor, theta: np.ndarray, n_samples: int, seed: int
) -> ChaosProjectionCheck:
    """Empirically verify the conditional expectation of one chaos component.

    Regresses theta . grad psi_n onto He_0..He_{n-1}(theta . X) over Gaussian
    samples.  Agreement means the top Hermite coefficient is within 3 standard
    errors of ``n * (A : theta^{(x) n})`` and every lower one within 3 standard
    errors of zero.
    """
    n = a.n
    if n < 1:
        raise ValueError("need degree >= 1")
    theta = np.asarray(theta, dtype=float).reshape(-1)
    if abs(np.linalg.norm(theta) - 1.0) > 1e-10:
        raise ValueError("theta must be a unit vector")
    field = PolyGradientField({n: a})
    rng = stream(seed, 0)
    x = rng.standard_normal((n_samples, a.d))
    y = field(x) @ theta
    z = x @ theta
    design = hermite_table(z, n - 1).T  # (n_samples, n)
    coef, _, _, _ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    dof = n_samples - n
    sigma_sq = float(resid @ resid) / dof
    cov = sigma_sq * np.linalg.inv(design.T @ design)
    ses = np.sqrt(np.diag(cov))
    analytic = n * float(a.contract_powers(theta))
    ok = abs(coef[-1] - analytic) <= 3.0 * ses[-1]
    ok = ok and bool(np.all(np.abs(coef[:-1]) <= 3.0 * ses[:-1]))
    return ChaosProjectionCheck(analytic, float(coef[-1]), bool(ok), coef, ses)


def conditional_variance_profile(field: PolyGradientField, directions: np.ndarray) -> np.ndarray:
    """E[Var(theta . u(X) | theta . X)] under the standard Gaussian, per direction.

    For each chaos degree the projected component has squared norm
    n^2 (n-1)! |A_n(theta, ...)|^2 while its ridge part carries
    n n! (A_n : theta^{(x) n})^2; distinct degrees are orthogonal.
    """
    th = np.atleast_2d(np.asarray(directions, dtype=float))
    out = np.zeros(th.shape[0])
    for n, a in field.terms.items():
        slot = a.single_slot_matrix()  # (n_sub, d)
        mult = index_multiplicities(a.d, n - 1)
        contracted_norm_sq = (((th @ slot.T) ** 2) * mult).sum(axis=1)
        out += n * n * math.factorial(n - 1) * contracted_norm_sq
        out -= n * math.factorial(n) * a.contract_powers(th) ** 2
    return out

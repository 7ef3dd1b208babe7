"""Monte-Carlo checks of Grassmannian projection moments.

Haar-random k-planes have exactly computable low-order projection moments;
this module estimates them and the off-diagonal compression norm against
their closed-form targets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .slicing import haar_frame_stack

__all__ = [
    "MomentReport",
    "OffdiagonalNorm",
    "moment_targets",
    "projection_moments",
    "offdiagonal_norm",
    "write_moment_report",
]


def moment_targets(d: int, k: int) -> dict[str, float]:
    """Exact values of the four projection moments on G_{d,k}."""
    return {
        "p11": k / d,
        "p11_sq": k * (k + 2) / (d * (d + 2)),
        "p12_sq": k * (d - k) / (d * (d - 1) * (d + 2)),
        "p11_p22": k * ((d + 1) * k - 2) / (d * (d - 1) * (d + 2)),
    }


@dataclass(frozen=True)
class MomentReport:
    d: int
    k: int
    n_samples: int
    estimates: dict
    targets: dict

    def z_scores(self) -> dict[str, float]:
        out = {}
        for name, (val, se) in self.estimates.items():
            out[name] = (val - self.targets[name]) / se if se > 0 else float("nan")
        return out


def _mean_se(x: np.ndarray) -> tuple[float, float]:
    return float(x.mean()), float(x.std(ddof=1) / np.sqrt(x.size))


def projection_moments(d: int, k: int, n_samples: int, seed: int, task: int = 0) -> MomentReport:
    """Estimate E[p11], E[p11^2], E[p12^2], E[p11 p22] over Haar k-planes.

    ``k = d`` is allowed as a diagnostic: every projection is the identity and
    the targets degenerate accordingly.
    """
    if not 1 <= k <= d:
        raise ValueError(f"need 1 <= k <= d, got k={k}, d={d}")
    if d < 2:
        raise ValueError("need d >= 2 for the two-row moments")
    q = haar_frame_stack(d, k, n_samples, seed, task)
    p11 = np.sum(q[:, 0, :] ** 2, axis=1)
    p22 = np.sum(q[:, 1, :] ** 2, axis=1)
    p12 = np.sum(q[:, 0, :] * q[:, 1, :], axis=1)
    estimates = {
        "p11": _mean_se(p11),
        "p11_sq": _mean_se(p11**2),
        "p12_sq": _mean_se(p12**2),
        "p11_p22": _mean_se(p11 * p22),
    }
    return MomentReport(d, k, n_samples, estimates, moment_targets(d, k))


@dataclass(frozen=True)
class OffdiagonalNorm:
    estimate: float
    std_err: float
    target: float


def offdiagonal_norm(m, k: int, n_samples: int, seed: int, task: int = 0) -> OffdiagonalNorm:
    """Estimate the Haar average of |P M (I - P)|_HS^2 for symmetric M.

    The per-sample value is Tr(P M^2 P) - Tr(P M P M P); the closed-form
    target is k(d-k)/((d-1)(d+2)) times the trace-free part's squared norm.
    """
    if hasattr(m, "to_dense"):
        m = m.to_dense()
    m = np.asarray(m, dtype=float)
    d = m.shape[0]
    if m.shape != (d, d) or np.max(np.abs(m - m.T)) > 1e-10 * max(1.0, np.max(np.abs(m))):
        raise ValueError("M must be a symmetric matrix")
    if not 1 <= k <= d:
        raise ValueError(f"need 1 <= k <= d, got k={k}, d={d}")
    q = haar_frame_stack(d, k, n_samples, seed, task)
    m_sq = m @ m
    compressed = np.einsum("ndi,de,nej->nij", q, m, q)  # Q^T M Q per sample
    tr_msq = np.einsum("ndi,de,nei->n", q, m_sq, q)
    tr_inner = np.einsum("nij,nji->n", compressed, compressed)
    vals = tr_msq - tr_inner
    est, se = _mean_se(vals)
    trace_free_sq = float(np.trace(m_sq) - np.trace(m) ** 2 / d)
    target = k * (d - k) / ((d - 1) * (d + 2)) * trace_free_sq
    return OffdiagonalNorm(est, se, target)


def write_moment_report(path, report: MomentReport) -> None:
    """Rows of (name, estimate, std_err, target, z_score)."""
    z = report.z_scores()
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"# grassmann moments d={report.d} k={report.k} n={report.n_samples}\n")
        fh.write("name,estimate,std_err,target,z_score\n")
        for name, (val, se) in report.estimates.items():
            fh.write(
                f"{name},{val:.17g},{se:.17g},{report.targets[name]:.17g},{z[name]:.17g}\n"
            )

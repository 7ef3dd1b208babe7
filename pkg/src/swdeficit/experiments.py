"""Scripted end-to-end experiments with pass/fail verdicts.

Each runner checks one cluster of quantitative claims: rigidity of affine
maps, the sharp Gaussian spectral-gap constant, the anisotropic Gaussian
blow-up, Grassmannian deficits, and bounded-perturbation lower bounds.  All
randomness flows from the config seed through counter-based substreams, so a
given config reproduces its result files byte for byte.
"""

from __future__ import annotations

import dataclasses
import math
import os
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import plots
from .chaos import build_extremizer, spherical_quadratic
from .fields import AffineField, PolyGradientField, TabulatedField
from .measures import EmpiricalMeasure, GaussianMeasure, sample
from .ridge import dist_to_affine, ridge_defect, spk_ratio
from .rng import stream
from .slicing import circle_grid, map_deficit, sample_directions, sample_subspaces, sw2
from .tensors import SymTensor

__all__ = [
    "ExperimentConfig",
    "CaseResult",
    "ExperimentResult",
    "load_config",
    "write_config",
    "write_result_csv",
    "write_summary",
    "run_rigidity",
    "run_gaussian_sharpness",
    "run_counterexample",
    "run_grassmann_deficit",
    "run_perturbation_bound",
    "tilted_gaussian_sample",
    "gaussian_spk_constant",
]


def gaussian_spk_constant(d: int) -> float:
    """Sharp spectral-gap constant (d - 1) / (d (d + 2)) of the standard Gaussian."""
    return (d - 1) / (d * (d + 2))


@dataclass
class ExperimentConfig:
    """Shared knob set for all experiment runners; unused fields are ignored."""

    name: str = "experiment"
    d: int = 3
    seed: int = 0
    n_samples: int = 10_000
    n_directions: int = 500
    n_cases: int = 50
    dims: tuple = (2, 3, 5, 10)
    eps_grid: tuple = (0.1, 0.05, 0.01)
    delta_factors: tuple = (0.1, 0.03, 0.01)
    shear_deltas: tuple = (0.3,)
    quad_nodes: int = 1 << 16
    se_multiplier: float = 3.0
    strict_se_multiplier: float = 5.0
    rel_tol: float = 0.01
    abs_tol: float = 1e-12
    lip_constant: float = 1.0
    tilt: float = 0.3
    n_fields: int = 200
    n_mc: int = 1_000_000
    max_degree: int = 4
    k_values: tuple = (1, 2)
    out_dir: Optional[str] = None

    def __post_init__(self):
        if self.se_multiplier < 1.0:
            raise ValueError("se_multiplier must be >= 1")
        for grid_name in ("eps_grid", "delta_factors", "shear_deltas", "dims", "k_values"):
            if len(getattr(self, grid_name)) == 0:
                raise ValueError(f"{grid_name} must be nonempty")


_TUPLE_FIELDS = {"dims", "eps_grid", "delta_factors", "shear_deltas", "k_values"}
_FLOAT_FIELDS = {"se_multiplier", "strict_se_multiplier", "rel_tol", "abs_tol", "lip_constant", "tilt"}


def load_config(path, base: Optional[ExperimentConfig] = None) -> ExperimentConfig:
    """Read `key = value` lines ('#' comments, comma lists) over ``base`` defaults."""
    values = dataclasses.asdict(base) if base is not None else dataclasses.asdict(ExperimentConfig())
    valid = {f.name for f in dataclasses.fields(ExperimentConfig)}
    with open(path, "r", encoding="ascii") as fh:
        for ln in fh:
            ln = ln.strip()
            if not ln or ln.startswith("#"):
                continue
            key, _, raw = ln.partition("=")
            key = key.strip()
            raw = raw.strip()
            if key not in valid:
                raise ValueError(f"unknown config key {key!r}")
            if key in _TUPLE_FIELDS:
                toks = [t for t in raw.split(",") if t.strip()]
                caster = int if key in ("dims", "k_values") else float
                values[key] = tuple(caster(t) for t in toks)
            elif key in _FLOAT_FIELDS:
                values[key] = float(raw)
            elif key in ("name", "out_dir"):
                values[key] = raw
            else:
                values[key] = int(raw)
    return ExperimentConfig(**values)


def write_config(path, cfg: ExperimentConfig) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write("# experiment config\n")
        for f in dataclasses.fields(ExperimentConfig):
            val = getattr(cfg, f.name)
            if val is None:
                continue
            if isinstance(val, tuple):
                val = ",".join(str(v) for v in val)
            fh.write(f"{f.name} = {val}\n")


@dataclass(frozen=True)
class CaseResult:
    label: str
    value: float
    target: Optional[float]
    passed: bool
    note: str = ""


@dataclass(frozen=True)
class ExperimentResult:
    name: str
    cases: tuple

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    def summary_lines(self) -> list[str]:
        lines = [f"experiment: {self.name}"]
        for c in self.cases:
            verdict = "PASS" if c.passed else "FAIL"
            tgt = "" if c.target is None else f" target={c.target:.10g}"
            note = f"  [{c.note}]" if c.note else ""
            lines.append(f"  {verdict}  {c.label}: value={c.value:.10g}{tgt}{note}")
        lines.append(f"verdict: {'PASS' if self.passed else 'FAIL'}")
        return lines


def write_result_csv(path, result: ExperimentResult) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write("label,value,target,passed,note\n")
        for c in result.cases:
            tgt = "" if c.target is None else f"{c.target:.17g}"
            fh.write(f"{c.label},{c.value:.17g},{tgt},{int(c.passed)},{c.note}\n")


def write_summary(path, result: ExperimentResult) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(result.summary_lines()) + "\n")


def _emit(cfg: ExperimentConfig, result: ExperimentResult) -> ExperimentResult:
    if cfg.out_dir:
        os.makedirs(cfg.out_dir, exist_ok=True)
        write_result_csv(os.path.join(cfg.out_dir, f"{result.name}.csv"), result)
        write_summary(os.path.join(cfg.out_dir, f"{result.name}.txt"), result)
    return result


def _swap_matrix(d: int) -> np.ndarray:
    s = np.zeros((d, d))
    s[0, 1] = s[1, 0] = 1.0
    return s


# ---------------------------------------------------------------------------
# rigidity
# ---------------------------------------------------------------------------

def run_rigidity(cfg: ExperimentConfig) -> ExperimentResult:
    """Affine maps yield zero deficit (within error); shears yield positive deficit."""
    cases = []
    mult = cfg.se_multiplier

    ident_rep = map_deficit(
        GaussianMeasure(np.zeros(2), np.eye(2)),
        AffineField.identity(2),
        sample_directions(2, 64, cfg.seed, task=900),
    )
    cases.append(CaseResult("identity-deficit", ident_rep.deficit, 0.0, ident_rep.deficit == 0.0))

    for i in range(cfg.n_cases):
        rng = stream(cfg.seed, 1000 + i)
        d = int(rng.integers(2, 6))
        lam = abs(rng.normal(1.0, 0.5))
        b = rng.normal(size=d)
        mu = GaussianMeasure(np.zeros(d), np.eye(d))
        t_map = AffineField(lam * np.eye(d), b)
        frames = sample_directions(d, cfg.n_directions, cfg.seed, task=2000 + i)
        rep = map_deficit(mu, t_map, frames)
        gaps = np.array([g for _, g in rep.per_direction_gaps])
        scale = max(rep.w2_sq, 1.0)
        ok = abs(rep.deficit) <= mult * rep.mc_std_err and gaps.min() >= -1e-9 * scale
        cases.append(
            CaseResult(
                f"affine-closed-{i:02d}-d{d}",
                rep.deficit,
                0.0,
                bool(ok),
                note=f"{mult:g}se={mult * rep.mc_std_err:.3e}",
            )
        )

    for i in range(5):
        rng = stream(cfg.seed, 3000 + i)
        d = int(rng.integers(2, 6))
        lam = abs(rng.normal(1.0, 0.5))
        b = rng.normal(size=d)
        cloud = sample(GaussianMeasure(np.zeros(d), np.eye(d)), cfg.n_samples, cfg.seed, task=3100 + i)
        frames = sample_directions(d, cfg.n_directions, cfg.seed, task=3200 + i)
        rep = map_deficit(cloud, AffineField(lam * np.eye(d), b), frames)
        gaps = np.array([g for _, g in rep.per_direction_gaps])
        ok = abs(rep.deficit) <= mult * rep.mc_std_err and gaps.min() >= -1e-9 * max(rep.w2_sq, 1.0)
        cases.append(
            CaseResult(
                f"affine-sampled-{i}-d{d}",
                rep.deficit,
                0.0,
                bool(ok),
                note=f"{mult:g}se={mult * rep.mc_std_err:.3e}",
            )
        )

    for i in range(5):
        rng = stream(cfg.seed, 3500 + i)
        lam = abs(rng.normal(1.0, 0.5))
        b = rng.normal(size=4)
        mu = GaussianMeasure(np.zeros(4), np.eye(4))
        frames = sample_subspaces(4, 2, cfg.n_directions, cfg.seed, task=3600 + i)
        rep = map_deficit(mu, AffineField(lam * np.eye(4), b), frames)
        gaps = np.array([g for _, g in rep.per_direction_gaps])
        ok = abs(rep.deficit) <= mult * rep.mc_std_err and gaps.min() >= -1e-9 * max(rep.w2_sq, 1.0)
        cases.append(CaseResult(f"affine-grassmann-{i}", rep.deficit, 0.0, bool(ok)))

    for delta in cfg.shear_deltas:
        t_map = AffineField(np.eye(2) + delta * _swap_matrix(2), np.zeros(2))
        cloud = sample(GaussianMeasure(np.zeros(2), np.eye(2)), cfg.n_samples, cfg.seed, task=4000)
        frames = sample_directions(2, cfg.n_directions, cfg.seed, task=4001)
        rep = map_deficit(cloud, t_map, frames)
        ok = rep.deficit > cfg.strict_se_multiplier * rep.mc_std_err
        cases.append(
            CaseResult(
                f"shear-positive-delta{delta:g}",
                rep.deficit,
                None,
                bool(ok),
                note=f"{cfg.strict_se_multiplier:g}se={cfg.strict_se_multiplier * rep.mc_std_err:.3e}",
            )
        )
        grid_rep = map_deficit(GaussianMeasure(np.zeros(2), np.eye(2)), t_map, circle_grid(2048))
        cases.append(
            CaseResult(
                f"shear-quadrature-delta{delta:g}",
                grid_rep.deficit,
                None,
                bool(grid_rep.deficit > 1e-3 * delta**2),
                note="deterministic grid",
            )
        )

    return _emit(cfg, ExperimentResult("rigidity", tuple(cases)))


# ---------------------------------------------------------------------------
# gaussian sharpness
# ---------------------------------------------------------------------------

def _random_poly_field(d: int, max_degree: int, rng: np.random.Generator) -> PolyGradientField:
    degrees = [n for n in range(1, max_degree + 1) if rng.random() < 0.7]
    if not degrees:
        degrees = [int(rng.integers(2, max_degree + 1))]
    return PolyGradientField(
        {n: SymTensor.random(d, n, rng, scale=rng.uniform(0.3, 2.0)) for n in degrees}
    )


def run_gaussian_sharpness(cfg: ExperimentConfig) -> ExperimentResult:
    """Sharp constant (d-1)/(d(d+2)): attained by the degree-3 field, never undercut."""
    cases = []
    for d in cfg.dims:
        target = gaussian_spk_constant(d)
        mu = GaussianMeasure(np.zeros(d), np.eye(d))
        rng = stream(cfg.seed, 100 + d)

        a = rng.normal(size=(d, d))
        a = 0.5 * (a + a.T)
        a -= np.trace(a) / d * np.eye(d)
        ratio_tf = spk_ratio(AffineField(a, np.zeros(d)), mu)
        cases.append(
            CaseResult(
                f"trace-free-affine-d{d}",
                ratio_tf,
                1.0 / (d + 2),
                abs(ratio_tf - 1.0 / (d + 2)) <= 1e-12 / (d + 2),
            )
        )

        ext = build_extremizer(d, rng.normal(size=d))
        ratio_exact = spk_ratio(ext, mu)
        cases.append(
            CaseResult(
                f"extremizer-exact-d{d}",
                ratio_exact,
                target,
                abs(ratio_exact - target) <= 1e-12 * target,
            )
        )

        a3 = ext.terms[3]
        q_mc = spherical_quadratic(a3, cfg.n_mc, cfg.seed, task=200 + d)
        ratio_mc = 1.0 / d - q_mc.value / a3.norm_sq
        cases.append(
            CaseResult(
                f"extremizer-mc-d{d}",
                ratio_mc,
                target,
                abs(ratio_mc - target) <= cfg.rel_tol * target,
                note=f"mc se on ratio = {q_mc.std_err / a3.norm_sq:.2e}",
            )
        )

    d = 3
    target = gaussian_spk_constant(d)
    mu = GaussianMeasure(np.zeros(d), np.eye(d))
    rng_dirs = stream(cfg.seed, 300)
    thetas = rng_dirs.standard_normal((20_000, d))
    thetas /= np.linalg.norm(thetas, axis=1, keepdims=True)
    worst_exact = np.inf
    worst_margin = np.inf
    for i in range(cfg.n_fields):
        u = _random_poly_field(d, cfg.max_degree, stream(cfg.seed, 400 + i))
        fit = dist_to_affine(u, mu)
        exact = ridge_defect(u, mu).value / fit.residual_sq
        worst_exact = min(worst_exact, exact)
        # chaos formula with the spherical integral by shared-sample MC
        val = 0.0
        var = 0.0
        for n, t in u.terms.items():
            sq = t.contract_powers(thetas) ** 2
            w = n * math.factorial(n)
            val += w * (t.norm_sq / d - sq.mean())
            var += (w * sq.std(ddof=1) / np.sqrt(sq.size)) ** 2
        ratio = val / fit.residual_sq
        se = np.sqrt(var) / fit.residual_sq
        worst_margin = min(worst_margin, ratio - (target - cfg.se_multiplier * se))
    cases.append(
        CaseResult(
            f"random-fields-exact-min-d{d}",
            worst_exact,
            target,
            worst_exact >= target - 1e-10,
            note=f"{cfg.n_fields} fields, degrees <= {cfg.max_degree}",
        )
    )
    cases.append(
        CaseResult(
            f"random-fields-mc-margin-d{d}",
            worst_margin,
            None,
            worst_margin >= 0.0,
            note="min of ratio - (bound - 3 se)",
        )
    )
    return _emit(cfg, ExperimentResult("sharpness", tuple(cases)))


# ---------------------------------------------------------------------------
# anisotropic counterexample
# ---------------------------------------------------------------------------

def run_counterexample(cfg: ExperimentConfig) -> ExperimentResult:
    """Anisotropic Gaussians: ridge defect collapses while the distance does not."""
    cases = []
    grid = circle_grid(cfg.quad_nodes)
    swap = _swap_matrix(2)
    u = AffineField(swap, np.zeros(2))
    deficit_series = []
    blowup_series = []
    for eps in cfg.eps_grid:
        if not 0.0 < eps < 1.0:
            raise ValueError("eps grid must lie in (0, 1)")
        mu = GaussianMeasure(np.zeros(2), np.diag([eps**2, 1.0]))
        r_quad = ridge_defect(u, mu, frames=grid, estimator="closed_form").value
        cases.append(CaseResult(f"eps{eps:g}-ridge<=eps", r_quad, eps, r_quad <= eps))

        dist_sq = dist_to_affine(u, mu).residual_sq
        target = 1.0 + eps**2
        cases.append(
            CaseResult(
                f"eps{eps:g}-dist-sq",
                dist_sq,
                target,
                abs(dist_sq - target) <= cfg.abs_tol * target,
            )
        )

        zero_rep = map_deficit(mu, AffineField(np.eye(2), np.zeros(2)), circle_grid(256))
        cases.append(CaseResult(f"eps{eps:g}-delta0-deficit", zero_rep.deficit, 0.0, zero_rep.deficit == 0.0))

        deltas = sorted((f * eps for f in cfg.delta_factors), reverse=True)
        errors = []
        for delta in deltas:
            t_map = AffineField(np.eye(2) + delta * swap, np.zeros(2))
            rep = map_deficit(mu, t_map, grid)
            ratio = rep.deficit / delta**2
            errors.append(abs(ratio - r_quad))
            deficit_series.append((eps, delta, rep.deficit, ratio))

            slopes_ok, lip_obs = _counterexample_lipschitz(mu, t_map, grid, eps, delta, cfg.lip_constant)
            note = "" if delta < eps else "delta >= eps: outside asymptotic regime"
            cases.append(
                CaseResult(
                    f"eps{eps:g}-delta{delta:g}-lip",
                    lip_obs,
                    1.0 + cfg.lip_constant * delta / eps,
                    slopes_ok,
                    note=note,
                )
            )

            blowup = dist_to_affine(t_map, mu).residual_sq / rep.deficit
            bound = (1.0 + eps**2) / (2.0 * eps)
            cases.append(
                CaseResult(
                    f"eps{eps:g}-delta{delta:g}-blowup",
                    blowup,
                    bound,
                    blowup >= 0.98 * bound,
                )
            )
            if delta == deltas[-1]:
                blowup_series.append((eps, blowup / bound))

        second_var = deficit_series[-1][3]
        cases.append(
            CaseResult(
                f"eps{eps:g}-second-variation",
                second_var,
                r_quad,
                abs(second_var - r_quad) <= cfg.rel_tol * r_quad,
                note=f"delta={deltas[-1]:g}",
            )
        )
        richardson_ok = all(errors[i + 1] <= errors[i] * 1.05 for i in range(len(errors) - 1))
        cases.append(
            CaseResult(
                f"eps{eps:g}-richardson",
                errors[-1],
                None,
                richardson_ok,
                note="refinement errors nonincreasing across the delta grid",
            )
        )

    result = _emit(cfg, ExperimentResult("counterexample", tuple(cases)))
    if cfg.out_dir:
        series = []
        for eps in cfg.eps_grid:
            pts = [(dl, df) for (e, dl, df, _) in deficit_series if e == eps]
            series.append((f"eps={eps:g}", [p[0] for p in pts], [p[1] for p in pts]))
        plots.line_chart(
            os.path.join(cfg.out_dir, "deficit_vs_delta.svg"),
            series,
            title="sliced deficit vs shear size",
            xlabel="delta",
            ylabel="deficit",
            log_x=True,
            log_y=True,
        )
        xs = [e for e, _ in blowup_series]
        ys = [r for _, r in blowup_series]
        plots.line_chart(
            os.path.join(cfg.out_dir, "ratio_vs_eps.svg"),
            [("dist^2/deficit over (1+eps^2)/(2 eps)", xs, ys)],
            title="stability blow-up vs anisotropy",
            xlabel="eps",
            ylabel="observed / predicted",
            log_x=True,
        )
    return result


def _counterexample_lipschitz(mu, t_map, grid, eps, delta, lip_constant):
    dirs = np.stack([f.direction for f in grid])
    var_src = np.einsum("bi,ij,bj->b", dirs, mu.cov, dirs)
    tgt_cov = (t_map.matrix) @ mu.cov @ (t_map.matrix)
    var_tgt = np.einsum("bi,ij,bj->b", dirs, tgt_cov, dirs)
    lip_obs = float(np.max(np.sqrt(var_tgt / var_src)))
    return lip_obs <= 1.0 + lip_constant * delta / eps, lip_obs


# ---------------------------------------------------------------------------
# grassmannian deficit
# ---------------------------------------------------------------------------

def run_grassmann_deficit(cfg: ExperimentConfig) -> ExperimentResult:
    """Subspace-averaged deficits: nonnegative, zero for affine maps, positive for shears."""
    cases = []
    mult = cfg.se_multiplier
    for i in range(5):
        rng = stream(cfg.seed, 100 + i)
        d = 4
        k = 2
        mean_a, mean_b = rng.normal(size=d), rng.normal(size=d)
        cov_a = _random_spd(d, rng)
        cov_b = _random_spd(d, rng)
        frames = sample_subspaces(d, k, cfg.n_directions, cfg.seed, task=200 + i)
        rep = sw2(GaussianMeasure(mean_a, cov_a), GaussianMeasure(mean_b, cov_b), frames)
        ok = rep.deficit >= -mult * rep.mc_std_err
        cases.append(CaseResult(f"gaussian-pair-{i}-nonneg", rep.deficit, None, bool(ok)))

    for i in range(5):
        rng = stream(cfg.seed, 300 + i)
        lam = abs(rng.normal(1.0, 0.5))
        b = rng.normal(size=4)
        frames = sample_subspaces(4, 2, cfg.n_directions, cfg.seed, task=400 + i)
        rep = map_deficit(GaussianMeasure(np.zeros(4), np.eye(4)), AffineField(lam * np.eye(4), b), frames)
        ok = abs(rep.deficit) <= mult * rep.mc_std_err
        cases.append(CaseResult(f"affine-k2-{i}", rep.deficit, 0.0, bool(ok)))

    delta = cfg.shear_deltas[0]
    t_map = AffineField(np.eye(3) + delta * _swap_matrix(3), np.zeros(3))
    mu3 = GaussianMeasure(np.zeros(3), np.eye(3))
    k1_deficits = {}
    for k in cfg.k_values:
        frames = sample_subspaces(3, k, cfg.n_directions, cfg.seed, task=500 + k)
        rep = map_deficit(mu3, t_map, frames)
        ok = rep.deficit > cfg.strict_se_multiplier * rep.mc_std_err
        k1_deficits[k] = rep
        cases.append(
            CaseResult(
                f"shear-k{k}-positive",
                rep.deficit,
                None,
                bool(ok),
                note=f"{cfg.strict_se_multiplier:g}se={cfg.strict_se_multiplier * rep.mc_std_err:.3e}",
            )
        )

    if 1 in k1_deficits:
        dir_frames = sample_directions(3, cfg.n_directions, cfg.seed, task=600)
        rep_dir = map_deficit(mu3, t_map, dir_frames)
        rep_sub = k1_deficits[1]
        gap = abs(rep_dir.deficit - rep_sub.deficit)
        tol = mult * float(np.hypot(rep_dir.mc_std_err, rep_sub.mc_std_err))
        cases.append(
            CaseResult("k1-matches-directions", gap, 0.0, gap <= tol, note=f"tol={tol:.3e}")
        )

    return _emit(cfg, ExperimentResult("grassmann", tuple(cases)))


def _random_spd(d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(d, d))
    return g @ g.T / d + 0.5 * np.eye(d)


# ---------------------------------------------------------------------------
# bounded perturbations
# ---------------------------------------------------------------------------

def tilted_gaussian_sample(d: int, tilt: float, n: int, seed: int, task: int = 0) -> EmpiricalMeasure:
    """Exact draws from the Gaussian tilted by 1 + tilt * cos(x_1), |tilt| < 1.

    Rejection sampling against the Gaussian keeps atoms uniform-weight, which
    every downstream estimator assumes.
    """
    if not 0.0 <= tilt < 1.0:
        raise ValueError("tilt must lie in [0, 1)")
    rng = stream(seed, task)
    out = []
    have = 0
    while have < n:
        batch = max(2048, int(1.4 * (n - have)))
        x = rng.standard_normal((batch, d))
        accept = rng.random(batch) * (1.0 + tilt) <= 1.0 + tilt * np.cos(x[:, 0])
        x = x[accept]
        out.append(x)
        have += x.shape[0]
    return EmpiricalMeasure(np.concatenate(out)[:n])


def run_perturbation_bound(cfg: ExperimentConfig) -> ExperimentResult:
    """Density-band lower bound: ratios stay above (m/M) times the Gaussian constant."""
    cases = []
    d = cfg.d
    kappa_gauss = gaussian_spk_constant(d)
    fields = {"extremizer": build_extremizer(d, np.eye(d)[0])}
    for i in range(4):
        fields[f"random-{i}"] = _random_poly_field(d, cfg.max_degree, stream(cfg.seed, 700 + i))
    for tilt in (0.0, cfg.tilt):
        bound = (1.0 - tilt) / (1.0 + tilt) * kappa_gauss
        cloud = tilted_gaussian_sample(d, tilt, cfg.n_samples, cfg.seed, task=800)
        frames = sample_directions(d, cfg.n_directions, cfg.seed, task=801)
        for name, u in fields.items():
            tab = TabulatedField(cloud.points, u(cloud.points))
            fit = dist_to_affine(tab, cloud)
            rd = ridge_defect(tab, cloud, frames, estimator="binned")
            ratio = rd.value / fit.residual_sq
            se = rd.std_err / fit.residual_sq
            ok = ratio >= bound - cfg.se_multiplier * se
            cases.append(
                CaseResult(
                    f"tilt{tilt:g}-{name}",
                    ratio,
                    bound,
                    bool(ok),
                    note=f"3se={cfg.se_multiplier * se:.3e}",
                )
            )
    return _emit(cfg, ExperimentResult("perturbation", tuple(cases)))

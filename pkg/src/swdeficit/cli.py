"""Command-line front end.

Subcommands: sw2, deficit, ridge, spk, rigidity, sharpness, counterexample,
grassmann, moments, perturbation.  Exit codes: 0 success, 1 a checked claim
failed, 2 usage or input error.  Diagnostics go to stderr, summaries to
stdout, and identical invocations write identical files.
"""

from __future__ import annotations

import argparse
import os
import sys

__all__ = ["main", "dispatch"]


def _setup_threads() -> None:
    """Honor SWDEFICIT_THREADS as a cap for BLAS/OpenMP pools (set before numpy)."""
    cap = os.environ.get("SWDEFICIT_THREADS")
    if cap:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, cap)


def _load_measure(path):
    from .measures import read_cloud, read_gaussian

    if not os.path.exists(path):
        raise FileNotFoundError(f"measure file not found: {path}")
    with open(path, "r", encoding="ascii") as fh:
        for ln in fh:
            ln = ln.strip()
            if not ln or ln.startswith("#"):
                continue
            if ln.replace(" ", "").startswith(("mean=", "cov=")):
                return read_gaussian(path)
            return read_cloud(path)
    raise ValueError(f"measure file is empty: {path}")


def _frames(d: int, k: int, n: int, seed: int):
    from .slicing import sample_directions, sample_subspaces

    if k == 1:
        return sample_directions(d, n, seed)
    return sample_subspaces(d, k, n, seed)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swdeficit",
        description="Sliced Wasserstein deficits, ridge defects, and spectral-gap checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_pair(p):
        p.add_argument("--mu", required=True, help="source measure file (cloud or gaussian spec)")
        p.add_argument("--nu", help="target measure file")
        p.add_argument("--directions", type=int, default=500, help="number of frames to sample")
        p.add_argument("--k", type=int, default=1, help="projection dimension (1 = directions)")
        p.add_argument("--seed", type=int, required=True, help="master seed (mandatory)")

    p_sw2 = sub.add_parser("sw2", help="sliced squared transport cost of a pair")
    add_pair(p_sw2)
    p_sw2.add_argument("--out", help="write the full report to this file")

    p_def = sub.add_parser("deficit", help="deficit report for a pair or a map")
    add_pair(p_def)
    p_def.add_argument("--map", dest="map_path", help="field file: compare mu against its image")
    p_def.add_argument("--out", default="deficit_report.csv", help="report output path")

    for name, help_txt in (
        ("ridge", "ridge defect of a field under a measure"),
        ("spk", "ridge defect over squared distance to the homothetic affine family"),
    ):
        p = sub.add_parser(name, help=help_txt)
        p.add_argument("--field", required=True, help="field file (affine or poly-gradient)")
        p.add_argument("--mu", required=True, help="measure file")
        p.add_argument("--directions", type=int, default=0, help="frames for the direction average (0 = exact)")
        p.add_argument("--estimator", choices=("closed_form", "binned"), default="closed_form")
        p.add_argument("--samples", type=int, default=0, help="sample a Gaussian mu first (binned path)")
        p.add_argument("--seed", type=int, required=True, help="master seed (mandatory)")

    exp_specs = {
        "rigidity": "zero deficit for affine maps, positive for shears",
        "sharpness": "sharp Gaussian spectral-gap constant",
        "counterexample": "anisotropic Gaussian blow-up suite",
        "grassmann": "subspace-averaged deficit checks",
        "perturbation": "density-band lower bound for the gap ratio",
    }
    for name, help_txt in exp_specs.items():
        p = sub.add_parser(name, help=help_txt)
        p.add_argument("--config", help="experiment config file (key = value lines)")
        p.add_argument("--seed", type=int, default=None, help="master seed")
        p.add_argument("--d", type=int, default=None, help="ambient dimension")
        p.add_argument("--out", help="output directory for csv/summary/plots")
        p.add_argument("--directions", type=int, default=None)
        p.add_argument("--samples", type=int, default=None)
        if name == "sharpness":
            p.add_argument("--dims", help="comma list of dimensions, e.g. 2,3,5,10")
            p.add_argument("--fields", type=int, default=None, help="number of random fields")
        if name == "counterexample":
            p.add_argument("--eps", help="comma list of anisotropy values in (0,1)")
        if name == "perturbation":
            p.add_argument("--tilt", type=float, default=None, help="cosine tilt amplitude in [0,1)")

    p_m = sub.add_parser("moments", help="Grassmannian projection moments vs closed forms")
    p_m.add_argument("--d", type=int, required=True)
    p_m.add_argument("--k", type=int, required=True)
    p_m.add_argument("--samples", type=int, default=100_000)
    p_m.add_argument("--seed", type=int, required=True, help="master seed (mandatory)")
    p_m.add_argument("--out", help="write the moment table to this file")

    return parser


def _experiment_config(args, name: str):
    from .experiments import ExperimentConfig, load_config

    cfg = load_config(args.config) if args.config else ExperimentConfig()
    cfg.name = name
    if args.seed is not None:
        cfg.seed = args.seed
    elif name != "counterexample" and not args.config:
        raise ValueError(f"--seed is required for the stochastic subcommand {name!r}")
    if args.d is not None:
        cfg.d = args.d
    if args.out is not None:
        cfg.out_dir = args.out
    if args.directions is not None:
        cfg.n_directions = args.directions
    if args.samples is not None:
        cfg.n_samples = args.samples
    if getattr(args, "dims", None):
        cfg.dims = tuple(int(t) for t in args.dims.split(","))
    if getattr(args, "fields", None):
        cfg.n_fields = args.fields
    if getattr(args, "eps", None):
        cfg.eps_grid = tuple(float(t) for t in args.eps.split(","))
    if getattr(args, "tilt", None) is not None:
        cfg.tilt = args.tilt
    return cfg


def _run_experiment(args, name: str) -> int:
    from . import experiments

    runner = {
        "rigidity": experiments.run_rigidity,
        "sharpness": experiments.run_gaussian_sharpness,
        "counterexample": experiments.run_counterexample,
        "grassmann": experiments.run_grassmann_deficit,
        "perturbation": experiments.run_perturbation_bound,
    }[name]
    result = runner(_experiment_config(args, name))
    print("\n".join(result.summary_lines()))
    return 0 if result.passed else 1


def _cmd_sw2(args) -> int:
    from .slicing import sw2, write_report

    mu = _load_measure(args.mu)
    if args.nu is None:
        raise ValueError("sw2 needs --nu")
    nu = _load_measure(args.nu)
    report = sw2(mu, nu, _frames(mu.d, args.k, args.directions, args.seed), seed=args.seed)
    print(
        f"sw2_sq={report.sw2_sq:.10g} se={report.mc_std_err:.3g} "
        f"w2_sq={report.w2_sq:.10g} deficit={report.deficit:.10g}"
    )
    if args.out:
        write_report(args.out, report)
    return 0


def _cmd_deficit(args) -> int:
    from .fields import read_field
    from .slicing import map_deficit, sw2, write_report

    mu = _load_measure(args.mu)
    frames = _frames(mu.d, args.k, args.directions, args.seed)
    if args.map_path:
        report = map_deficit(mu, read_field(args.map_path), frames, seed=args.seed)
    else:
        if args.nu is None:
            raise ValueError("deficit needs --nu or --map")
        report = sw2(mu, _load_measure(args.nu), frames, seed=args.seed)
    print(
        f"deficit={report.deficit:.10g} se={report.mc_std_err:.3g} "
        f"w2_sq={report.w2_sq:.10g} sw2_sq={report.sw2_sq:.10g} frames={report.n_directions}"
    )
    write_report(args.out, report)
    return 0


def _ridge_inputs(args):
    from .fields import TabulatedField, read_field
    from .measures import GaussianMeasure, sample

    field = read_field(args.field)
    mu = _load_measure(args.mu)
    if args.estimator == "binned":
        if isinstance(mu, GaussianMeasure):
            if not args.samples:
                raise ValueError("binned estimator on a Gaussian mu needs --samples")
            mu = sample(mu, args.samples, args.seed, task=77)
        field = TabulatedField(mu.points, field(mu.points))
    frames = _frames(mu.d, 1, args.directions, args.seed) if args.directions else None
    return field, mu, frames


def _cmd_ridge(args) -> int:
    from .ridge import ridge_defect

    field, mu, frames = _ridge_inputs(args)
    rd = ridge_defect(field, mu, frames, estimator=args.estimator)
    se = f" se={rd.std_err:.3g}" if rd.std_err is not None else ""
    print(f"ridge_defect={rd.value:.10g}{se}")
    return 0


def _cmd_spk(args) -> int:
    from .ridge import ZeroDenominatorError, spk_ratio

    field, mu, frames = _ridge_inputs(args)
    try:
        ratio = spk_ratio(field, mu, frames, estimator=args.estimator)
    except ZeroDenominatorError:
        print("excluded: field is homothetic affine (zero denominator)")
        return 0
    print(f"spk_ratio={ratio:.10g}")
    return 0


def _cmd_moments(args) -> int:
    from .grassmoments import offdiagonal_norm, projection_moments, write_moment_report
    import numpy as np

    report = projection_moments(args.d, args.k, args.samples, args.seed)
    z = report.z_scores()
    for name, (val, se) in report.estimates.items():
        print(
            f"{name}: estimate={val:.6f} se={se:.2e} "
            f"target={report.targets[name]:.6f} z={z[name]:+.2f}"
        )
    m0 = np.zeros((args.d, args.d))
    m0[0, 0], m0[1, 1] = 1.0, -1.0
    od = offdiagonal_norm(m0 / np.sqrt(2.0), args.k, args.samples, args.seed, task=1)
    print(f"offdiagonal_norm: estimate={od.estimate:.6f} se={od.std_err:.2e} target={od.target:.6f}")
    if args.out:
        write_moment_report(args.out, report)
    ok = all(abs(v) <= 4.0 for v in z.values() if v == v)
    ok = ok and abs(od.estimate - od.target) <= 4.0 * od.std_err
    return 0 if ok else 1


def dispatch(argv) -> int:
    """Parse and run; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse uses 2 for usage errors, 0 for --help
        return int(exc.code or 0)
    handlers = {
        "sw2": _cmd_sw2,
        "deficit": _cmd_deficit,
        "ridge": _cmd_ridge,
        "spk": _cmd_spk,
        "moments": _cmd_moments,
    }
    try:
        if args.command in handlers:
            return handlers[args.command](args)
        return _run_experiment(args, args.command)
    except (ValueError, FileNotFoundError, TypeError) as exc:
        print(f"swdeficit {args.command}: {exc}", file=sys.stderr)
        return 2


def main(argv=None) -> int:
    _setup_threads()
    return dispatch(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    raise SystemExit(main())

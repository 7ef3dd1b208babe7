"""Sliced Wasserstein deficits, ridge defects, and sliced spectral-gap ratios.

The library compares probability measures through one-dimensional (and
k-dimensional) projections: it computes exact quadratic transport costs, the
deficit left by slicing, the ridge defect of vector fields, and the
Gaussian spectral-gap constants that control quantitative stability.
"""

from .assign import AssignmentResult, w2_exact_empirical, w2_gaussian
from .chaos import (
    build_extremizer,
    chaos_projection_check,
    contract_sphere,
    spectrum_eigenvalue,
    spherical_quadratic,
    spherical_quadratic_exact,
)
from .experiments import (
    ExperimentConfig,
    ExperimentResult,
    gaussian_spk_constant,
    run_counterexample,
    run_gaussian_sharpness,
    run_grassmann_deficit,
    run_perturbation_bound,
    run_rigidity,
)
from .fields import AffineField, PolyGradientField, TabulatedField, VectorField
from .grassmoments import offdiagonal_norm, projection_moments
from .measures import EmpiricalMeasure, GaussianMeasure, Measure, project, pushforward, sample
from .ot1d import (
    Atoms1D,
    DegenerateSourceError,
    Gaussian1D,
    fenchel_gap_bound_check,
    lipschitz_scale,
    monotone_map,
    w2_1d,
)
from .ridge import (
    AffineFit,
    ZeroDenominatorError,
    dist_to_affine,
    ridge_defect,
    spk_ratio,
    stability_check,
)
from .slicing import (
    DeficitReport,
    Frame,
    circle_grid,
    directional_gap,
    map_deficit,
    sample_directions,
    sample_subspaces,
    sw2,
)
from .tensors import SymTensor

__version__ = "0.1.0"

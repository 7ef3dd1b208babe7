"""Vector fields on R^d: affine gradients, polynomial gradients, tabulated values.

A ``PolyGradientField`` is the gradient of a polynomial written in the Wick
basis: psi(x) = sum_n <A_n, :x^{(x) n}:> with symmetric coefficient tensors,
so the field is u = grad psi with components obtained by single-slot
contraction of each A_n.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .tensors import SymTensor, sorted_multi_indices, wick_eval

__all__ = [
    "AffineField",
    "PolyGradientField",
    "TabulatedField",
    "VectorField",
    "write_field",
    "read_field",
]


@dataclass(frozen=True)
class AffineField:
    """u(x) = A x + b with symmetric A (so that u is a gradient field)."""

    matrix: np.ndarray
    offset: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.matrix, dtype=float)
        b = np.asarray(self.offset, dtype=float).reshape(-1)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] != b.shape[0]:
            raise ValueError(f"incompatible shapes {a.shape} and {b.shape}")
        scale = max(float(np.max(np.abs(a))), 1.0)
        if np.max(np.abs(a - a.T)) > 1e-10 * scale:
            raise ValueError("affine gradient fields need a symmetric matrix")
        object.__setattr__(self, "matrix", 0.5 * (a + a.T))
        object.__setattr__(self, "offset", b)

    @property
    def d(self) -> int:
        return self.offset.shape[0]

    def __call__(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        return pts @ self.matrix + self.offset

    @classmethod
    def identity(cls, d: int) -> "AffineField":
        return cls(np.eye(d), np.zeros(d))


class PolyGradientField:
    """Gradient of a Wick polynomial, one symmetric tensor per degree.

    ``terms`` maps degree n >= 1 of the potential to its coefficient tensor;
    the field component i is ``sum_n n * <A_n(e_i, ...), :x^{(x)(n-1)}:>``.
    """

    __slots__ = ("terms", "d", "_component_tensors")

    def __init__(self, terms) -> None:
        cleaned: dict[int, SymTensor] = {}
        for degree, tensor in dict(terms).items():
            if degree < 1:
                raise ValueError("potential terms must have degree >= 1")
            if not isinstance(tensor, SymTensor) or tensor.n != degree:
                raise ValueError(f"term of degree {degree} needs a matching SymTensor")
            cleaned[int(degree)] = tensor
        if not cleaned:
            raise ValueError("at least one term is required")
        dims = {t.d for t in cleaned.values()}
        if len(dims) != 1:
            raise ValueError("all terms must share the ambient dimension")
        self.terms = dict(sorted(cleaned.items()))
        self.d = dims.pop()
        basis = np.eye(self.d)
        self._component_tensors = {
            n: [a.contract_vector(basis[i]) for i in range(self.d)]
            for n, a in self.terms.items()
        }

    def __call__(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.zeros_like(pts)
        for n, comps in self._component_tensors.items():
            for i in range(self.d):
                out[:, i] += n * wick_eval(comps[i], pts)
        return out

    def potential(self, points) -> np.ndarray:
        """The scalar Wick polynomial psi whose gradient this field is."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.zeros(pts.shape[0])
        for n, a in self.terms.items():
            out += wick_eval(a, pts)
        return out

    def __repr__(self) -> str:
        degs = ", ".join(str(n) for n in self.terms)
        return f"PolyGradientField(d={self.d}, degrees=[{degs}])"


@dataclass(frozen=True)
class TabulatedField:
    """Field known only through its values at fixed sample points."""

    points: np.ndarray
    field_values: np.ndarray

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        vals = np.atleast_2d(np.asarray(self.field_values, dtype=float))
        if pts.shape != vals.shape:
            raise ValueError(f"points {pts.shape} and values {vals.shape} must align")
        if not (np.all(np.isfinite(pts)) and np.all(np.isfinite(vals))):
            raise ValueError("tabulated data must be finite")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "field_values", vals)

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def __call__(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape != self.points.shape or not np.array_equal(pts, self.points):
            raise ValueError("tabulated fields are only evaluable at their own sample points")
        return self.field_values


VectorField = Union[AffineField, PolyGradientField, TabulatedField]


def write_field(path, field: VectorField) -> None:
    """Affine: (d+1) x d block, A rows then b.  Poly-gradient: per-degree
    component lines in lexicographic sorted-multi-index order (values are the
    independent components; norms reapply multinomial multiplicities)."""
    with open(path, "w", encoding="ascii") as fh:
        if isinstance(field, AffineField):
            fh.write(f"# affine field on R^{field.d}: matrix rows then offset\n")
            for row in field.matrix:
                fh.write(",".join(f"{x:.17g}" for x in row) + "\n")
            fh.write(",".join(f"{x:.17g}" for x in field.offset) + "\n")
        elif isinstance(field, PolyGradientField):
            fh.write(f"# poly-gradient field on R^{field.d}\n")
            fh.write(f"d = {field.d}\n")
            for n, a in field.terms.items():
                fh.write(f"degree = {n}\n")
                fh.write(",".join(f"{x:.17g}" for x in a.values) + "\n")
        else:
            raise TypeError("tabulated fields are stored as two aligned point clouds")


def read_field(path) -> VectorField:
    with open(path, "r", encoding="ascii") as fh:
        first = fh.readline()
        body = [ln.strip() for ln in fh if ln.strip()]
    if "affine" in first:
        rows = [[float(t) for t in ln.split(",")] for ln in body]
        block = np.asarray(rows)
        return AffineField(block[:-1], block[-1])
    if "poly-gradient" in first:
        d = None
        terms: dict[int, SymTensor] = {}
        degree = None
        for ln in body:
            key = ln.replace(" ", "")
            if key.startswith("d="):
                d = int(key[2:])
            elif key.startswith("degree="):
                degree = int(key.split("=", 1)[1])
            else:
                if d is None or degree is None:
                    raise ValueError("malformed poly-gradient file")
                vals = np.asarray([float(t) for t in ln.split(",")])
                if vals.size != len(sorted_multi_indices(d, degree)):
                    raise ValueError(f"wrong component count for degree {degree}")
                terms[degree] = SymTensor(d, degree, vals)
                degree = None
        return PolyGradientField(terms)
    raise ValueError(f"unrecognized field file header: {first!r}")

"""Dense symmetric tensors on sorted multi-indices, plus Hermite/Wick evaluation.

A symmetric n-tensor on R^d is stored as one value per nondecreasing
multi-index (i_1 <= ... <= i_n), together with precomputed multinomial
multiplicities.  This keeps degree <= 6 tensors small up to d ~ 16 while
making Hilbert-Schmidt norms and contractions exact sums with multiplicity.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache

import numpy as np

__all__ = [
    "SymTensor",
    "sorted_multi_indices",
    "index_multiplicities",
    "identity_odot",
    "identity_power",
    "harmonic_components",
    "hermite_table",
    "wick_eval",
    "write_tensor",
    "read_tensor",
]


@lru_cache(maxsize=None)
def sorted_multi_indices(d: int, n: int) -> tuple[tuple[int, ...], ...]:
    """All nondecreasing multi-indices of length ``n`` over ``range(d)``."""
    return tuple(itertools.combinations_with_replacement(range(d), n))


@lru_cache(maxsize=None)
def _index_positions(d: int, n: int) -> dict[tuple[int, ...], int]:
    return {idx: p for p, idx in enumerate(sorted_multi_indices(d, n))}


@lru_cache(maxsize=None)
def _index_counts(d: int, n: int) -> tuple[tuple[tuple[int, int], ...], ...]:
    """Per multi-index, the distinct coordinates with their repeat counts."""
    out = []
    for idx in sorted_multi_indices(d, n):
        out.append(tuple((i, len(list(g))) for i, g in itertools.groupby(idx)))
    return tuple(out)


@lru_cache(maxsize=None)
def index_multiplicities(d: int, n: int) -> np.ndarray:
    """Number of distinct orderings of each sorted multi-index (read-only)."""
    mult = np.empty(len(sorted_multi_indices(d, n)))
    for p, counts in enumerate(_index_counts(d, n)):
        denom = math.prod(math.factorial(c) for _, c in counts)
        mult[p] = math.factorial(n) // denom
    mult.setflags(write=False)
    return mult


class SymTensor:
    """A symmetric ``n``-tensor on R^d.

    ``values[p]`` is the entry at ``sorted_multi_indices(d, n)[p]``; entries at
    permuted index tuples are equal by symmetry.  Instances are treated as
    immutable: all operations return new tensors.
    """

    __slots__ = ("d", "n", "values")

    def __init__(self, d: int, n: int, values) -> None:
        if d < 1 or n < 0:
            raise ValueError(f"invalid tensor shape d={d}, n={n}")
        values = np.asarray(values, dtype=float)
        expected = len(sorted_multi_indices(d, n))
        if values.shape != (expected,):
            raise ValueError(
                f"expected {expected} values for a degree-{n} tensor on R^{d}, "
                f"got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("tensor entries must be finite")
        self.d = d
        self.n = n
        self.values = values

    # -- constructors ------------------------------------------------------

    @classmethod
    def zeros(cls, d: int, n: int) -> "SymTensor":
        return cls(d, n, np.zeros(len(sorted_multi_indices(d, n))))

    @classmethod
    def identity(cls, d: int) -> "SymTensor":
        """The identity matrix as a degree-2 tensor."""
        vals = np.zeros(len(sorted_multi_indices(d, 2)))
        pos = _index_positions(d, 2)
        for i in range(d):
            vals[pos[(i, i)]] = 1.0
        return cls(d, 2, vals)

    @classmethod
    def from_dense(cls, arr: np.ndarray, rtol: float = 1e-10) -> "SymTensor":
        """Build from a dense array, checking symmetry to ``rtol``."""
        arr = np.asarray(arr, dtype=float)
        n = arr.ndim
        d = arr.shape[0] if n else 1
        if n and arr.shape != (d,) * n:
            raise ValueError(f"dense array must be hypercubic, got {arr.shape}")
        scale = float(np.max(np.abs(arr))) or 1.0
        indices = sorted_multi_indices(d, n)
        vals = np.empty(len(indices))
        for p, idx in enumerate(indices):
            entries = [arr[perm] for perm in set(itertools.permutations(idx))]
            if max(entries) - min(entries) > rtol * scale:
                raise ValueError(f"array is not symmetric at index {idx}")
            vals[p] = float(np.mean(entries))
        return cls(d, n, vals)

    @classmethod
    def random(cls, d: int, n: int, rng: np.random.Generator, scale: float = 1.0) -> "SymTensor":
        """Independent N(0, scale^2) entries per independent component."""
        return cls(d, n, rng.normal(0.0, scale, len(sorted_multi_indices(d, n))))

    # -- basic accessors ----------------------------------------------------

    def entry(self, idx) -> float:
        key = tuple(sorted(int(i) for i in idx))
        return float(self.values[_index_positions(self.d, self.n)[key]])

    def to_dense(self) -> np.ndarray:
        arr = np.zeros((self.d,) * self.n) if self.n else np.zeros(())
        if self.n == 0:
            return arr + self.values[0]
        for idx, v in zip(sorted_multi_indices(self.d, self.n), self.values):
            for perm in set(itertools.permutations(idx)):
                arr[perm] = v
        return arr

    @property
    def norm_sq(self) -> float:
        """Squared Hilbert-Schmidt norm (sum over all n-tuples with multiplicity)."""
        mult = index_multiplicities(self.d, self.n)
        return float(np.dot(mult, self.values**2))

    def inner(self, other: "SymTensor") -> float:
        self._check_compatible(other)
        mult = index_multiplicities(self.d, self.n)
        return float(np.dot(mult * self.values, other.values))

    # -- arithmetic ----------------------------------------------------------

    def _check_compatible(self, other: "SymTensor") -> None:
        if not isinstance(other, SymTensor) or other.d != self.d or other.n != self.n:
            raise ValueError("tensors must share dimension and degree")

    def __add__(self, other: "SymTensor") -> "SymTensor":
        self._check_compatible(other)
        return SymTensor(self.d, self.n, self.values + other.values)

    def __sub__(self, other: "SymTensor") -> "SymTensor":
        self._check_compatible(other)
        return SymTensor(self.d, self.n, self.values - other.values)

    def __mul__(self, c: float) -> "SymTensor":
        return SymTensor(self.d, self.n, self.values * float(c))

    __rmul__ = __mul__

    def __neg__(self) -> "SymTensor":
        return self * (-1.0)

    def __repr__(self) -> str:
        return f"SymTensor(d={self.d}, n={self.n}, {len(self.values)} components)"

    # -- contractions ---------------------------------------------------------

    def contract_powers(self, vectors: np.ndarray) -> np.ndarray:
        """Full contraction against ``v^{(x) n}`` for each row ``v`` of ``vectors``.

        Returns a length-N vector for input of shape (N, d); a scalar for a
        single vector of shape (d,).
        """
        v = np.asarray(vectors, dtype=float)
        single = v.ndim == 1
        if single:
            v = v[None, :]
        if v.shape[1] != self.d:
            raise ValueError(f"vectors must have {self.d} columns")
        if self.n == 0:
            out = np.full(v.shape[0], self.values[0])
            return float(out[0]) if single else out
        mult = index_multiplicities(self.d, self.n)
        out = np.zeros(v.shape[0])
        for idx, m, val in zip(sorted_multi_indices(self.d, self.n), mult, self.values):
            if val == 0.0:
                continue
            term = v[:, idx[0]].copy()
            for i in idx[1:]:
                term *= v[:, i]
            out += (m * val) * term
        return float(out[0]) if single else out

    def contract_vector(self, v: np.ndarray) -> "SymTensor":
        """Contract one slot against ``v``: the symmetric (n-1)-tensor A(v, ., ..., .)."""
        if self.n == 0:
            raise ValueError("cannot contract a degree-0 tensor")
        v = np.asarray(v, dtype=float)
        pos = _index_positions(self.d, self.n)
        sub = sorted_multi_indices(self.d, self.n - 1)
        vals = np.zeros(len(sub))
        for p, beta in enumerate(sub):
            acc = 0.0
            for i in range(self.d):
                if v[i] == 0.0:
                    continue
                acc += v[i] * self.values[pos[tuple(sorted((i,) + beta))]]
            vals[p] = acc
        return SymTensor(self.d, self.n - 1, vals)

    def single_slot_matrix(self) -> np.ndarray:
        """Matrix M with ``M[b, i] = A[(i,) + beta_b]`` over (n-1)-indices ``beta_b``.

        ``A.contract_vector(v).values == M @ v`` for every v, which lets
        direction sweeps of slot contractions run as one matrix product.
        """
        if self.n == 0:
            raise ValueError("degree-0 tensor has no slots")
        pos = _index_positions(self.d, self.n)
        sub = sorted_multi_indices(self.d, self.n - 1)
        M = np.empty((len(sub), self.d))
        for p, beta in enumerate(sub):
            for i in range(self.d):
                M[p, i] = self.values[pos[tuple(sorted((i,) + beta))]]
        return M

    def partial_trace(self) -> "SymTensor":
        """Contract one index pair: the (n-2)-tensor with entries sum_k A[(k,k)+beta]."""
        if self.n < 2:
            raise ValueError("partial trace needs degree >= 2")
        pos = _index_positions(self.d, self.n)
        sub = sorted_multi_indices(self.d, self.n - 2)
        vals = np.zeros(len(sub))
        for p, beta in enumerate(sub):
            vals[p] = sum(
                self.values[pos[tuple(sorted((k, k) + beta))]] for k in range(self.d)
            )
        return SymTensor(self.d, self.n - 2, vals)


def identity_odot(h: SymTensor) -> SymTensor:
    """Symmetrized product of the identity with ``h``: Sym(I (x) h), degree + 2.

    Normalized so that contracting against ``v^{(x)(n+2)}`` gives
    ``|v|^2 * (h : v^{(x) n})``; on the unit sphere the identity factor drops out.
    """
    d, m = h.d, h.n
    n = m + 2
    pos_h = _index_positions(d, m)
    indices = sorted_multi_indices(d, n)
    vals = np.zeros(len(indices))
    pair_positions = list(itertools.combinations(range(n), 2))
    for p, alpha in enumerate(indices):
        acc = 0.0
        for a, b in pair_positions:
            if alpha[a] != alpha[b]:
                continue
            rest = tuple(alpha[c] for c in range(n) if c != a and c != b)
            acc += h.values[pos_h[tuple(sorted(rest))]]
        vals[p] = 2.0 * acc / (n * (n - 1))
    return SymTensor(d, n, vals)


def identity_power(d: int, j: int) -> SymTensor:
    """The degree-2j tensor Sym(I (x) ... (x) I), contracting to |v|^{2j}."""
    t = SymTensor(d, 0, [1.0])
    for _ in range(j):
        t = identity_odot(t)
    return t


def harmonic_components(a: SymTensor) -> list[tuple[int, int, SymTensor]]:
    """Decompose a degree <= 4 symmetric tensor into irreducible trace parts.

    Returns ``(m, j, component)`` triples with ``component = Sym(I^j (x) h)``
    for a trace-free ``h`` of degree ``m = n - 2j``; the parts sum to ``a`` and
    are Hilbert-Schmidt orthogonal.  Degrees 5+ are not supported here (the
    Monte-Carlo spherical average covers them).
    """
    d, n = a.d, a.n
    if n <= 1:
        return [(n, 0, a)]
    if n == 2:
        tr = a.partial_trace().values[0]
        scalar = SymTensor(d, 0, [tr / d])
        c01 = identity_odot(scalar)
        return [(0, 1, c01), (2, 0, a - c01)]
    if n == 3:
        t = a.partial_trace()
        v = (3.0 / (d + 2)) * t
        c11 = identity_odot(v)
        return [(1, 1, c11), (3, 0, a - c11)]
    if n == 4:
        t = a.partial_trace()
        tr2 = t.partial_trace().values[0]
        s = 3.0 * tr2 / (d * (d + 2))
        c02 = s * identity_power(d, 2)
        # trace-free matrix part: pt(Sym(I (x) h)) = ((d+4)/6) h for trace-free h
        h2 = (6.0 / (d + 4)) * (t - (tr2 / d) * SymTensor.identity(d))
        c21 = identity_odot(h2)
        return [(0, 2, c02), (2, 1, c21), (4, 0, a - c21 - c02)]
    raise ValueError(f"harmonic decomposition implemented for degree <= 4, got {n}")


def hermite_table(x: np.ndarray, nmax: int) -> np.ndarray:
    """Probabilists' Hermite polynomials He_0..He_nmax evaluated at ``x``.

    Returns an array of shape ``(nmax + 1,) + x.shape`` built by the
    three-term recursion He_{k+1}(x) = x He_k(x) - k He_{k-1}(x).
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((nmax + 1,) + x.shape)
    out[0] = 1.0
    if nmax >= 1:
        out[1] = x
    for k in range(1, nmax):
        out[k + 1] = x * out[k] - k * out[k - 1]
    return out


def wick_eval(a: SymTensor, points: np.ndarray) -> np.ndarray:
    """Evaluate the Wick pairing <A, :x^{(x) n}:> at each row of ``points``.

    The Wick monomial at a multi-index factorizes over coordinates into
    probabilists' Hermite polynomials of the per-coordinate repeat counts.
    """
    pts = np.asarray(points, dtype=float)
    single = pts.ndim == 1
    if single:
        pts = pts[None, :]
    if pts.shape[1] != a.d:
        raise ValueError(f"points must have {a.d} columns")
    if a.n == 0:
        out = np.full(pts.shape[0], a.values[0])
        return float(out[0]) if single else out
    he = hermite_table(pts, a.n)
    mult = index_multiplicities(a.d, a.n)
    out = np.zeros(pts.shape[0])
    for counts, m, val in zip(_index_counts(a.d, a.n), mult, a.values):
        if val == 0.0:
            continue
        (i0, c0) = counts[0]
        term = he[c0][:, i0].copy()
        for i, c in counts[1:]:
            term *= he[c][:, i]
        out += (m * val) * term
    return float(out[0]) if single else out


def write_tensor(path, a: SymTensor) -> None:
    """Write header ``d n`` then one ``index : value`` line per sorted multi-index."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"# symmetric tensor\n{a.d} {a.n}\n")
        for idx, v in zip(sorted_multi_indices(a.d, a.n), a.values):
            key = " ".join(str(i) for i in idx)
            fh.write(f"{key} : {v:.17g}\n")


def read_tensor(path) -> SymTensor:
    with open(path, "r", encoding="ascii") as fh:
        lines = [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]
    d, n = (int(tok) for tok in lines[0].split())
    indices = sorted_multi_indices(d, n)
    if len(lines) - 1 != len(indices):
        raise ValueError(f"expected {len(indices)} component lines, got {len(lines) - 1}")
    vals = np.empty(len(indices))
    for ln in lines[1:]:
        key, _, val = ln.partition(":")
        idx = tuple(sorted(int(t) for t in key.split()))
        vals[_index_positions(d, n)[idx]] = float(val)
    return SymTensor(d, n, vals)

"""Symmetric tensor storage, contractions, and Wick evaluation."""

import itertools
import math

import numpy as np
import pytest

from swdeficit.rng import stream
from swdeficit.tensors import (
    SymTensor,
    harmonic_components,
    hermite_table,
    identity_odot,
    identity_power,
    index_multiplicities,
    read_tensor,
    sorted_multi_indices,
    wick_eval,
    write_tensor,
)


def dense_contract(arr, vec):
    out = arr
    for _ in range(arr.ndim):
        out = np.tensordot(out, vec, axes=([0], [0]))
    return float(out)


@pytest.mark.parametrize("d,n", [(2, 2), (3, 3), (4, 2), (3, 4), (5, 1), (2, 0)])
def test_multiplicities_cover_full_tensor(d, n):
    assert index_multiplicities(d, n).sum() == d**n


@pytest.mark.parametrize("d,n", [(2, 2), (3, 3), (4, 4)])
def test_norm_matches_dense(d, n):
    a = SymTensor.random(d, n, stream(1, n))
    dense = a.to_dense()
    assert a.norm_sq == pytest.approx(float(np.sum(dense**2)), rel=1e-12)


def test_from_dense_roundtrip():
    rng = stream(2, 0)
    raw = rng.normal(size=(3, 3, 3))
    sym = np.zeros_like(raw)
    for perm in itertools.permutations(range(3)):
        sym += np.transpose(raw, perm)
    sym /= 6.0
    a = SymTensor.from_dense(sym)
    np.testing.assert_allclose(a.to_dense(), sym, atol=1e-14)


def test_from_dense_rejects_asymmetric():
    with pytest.raises(ValueError, match="not symmetric"):
        SymTensor.from_dense(np.array([[0.0, 1.0], [0.0, 0.0]]))


@pytest.mark.parametrize("d,n", [(2, 2), (3, 3), (4, 4)])
def test_contract_powers_matches_dense(d, n):
    rng = stream(3, n)
    a = SymTensor.random(d, n, rng)
    dense = a.to_dense()
    for _ in range(4):
        v = rng.normal(size=d)
        assert a.contract_powers(v) == pytest.approx(dense_contract(dense, v), rel=1e-12)


def test_contract_vector_and_slot_matrix_agree():
    rng = stream(4, 0)
    a = SymTensor.random(3, 3, rng)
    v = rng.normal(size=3)
    contracted = a.contract_vector(v)
    np.testing.assert_allclose(a.single_slot_matrix() @ v, contracted.values, atol=1e-13)
    # against the dense contraction on one slot
    dense = np.tensordot(a.to_dense(), v, axes=([0], [0]))
    np.testing.assert_allclose(contracted.to_dense(), dense, atol=1e-13)


def test_partial_trace_matches_dense():
    a = SymTensor.random(4, 4, stream(5, 0))
    dense = a.to_dense()
    expected = np.einsum("kkij->ij", dense)
    np.testing.assert_allclose(a.partial_trace().to_dense(), expected, atol=1e-12)


def test_identity_odot_degree3_entries():
    # Sym(I (x) v) has entries (delta_ij v_k + delta_ik v_j + delta_jk v_i) / 3
    rng = stream(6, 0)
    d = 4
    v = rng.normal(size=d)
    t = identity_odot(SymTensor(d, 1, v))
    for idx in [(0, 0, 0), (0, 0, 1), (0, 1, 2), (1, 3, 3)]:
        i, j, k = idx
        expected = ((i == j) * v[k] + (i == k) * v[j] + (j == k) * v[i]) / 3.0
        assert t.entry(idx) == pytest.approx(expected, abs=1e-15)


def test_identity_odot_contraction_identity():
    rng = stream(7, 0)
    d = 3
    h = SymTensor.random(d, 2, rng)
    t = identity_odot(h)
    x = rng.normal(size=(6, d))
    lhs = t.contract_powers(x)
    rhs = np.sum(x**2, axis=1) * h.contract_powers(x)
    np.testing.assert_allclose(lhs, rhs, rtol=1e-12)


def test_identity_power_norm():
    # |Sym(I (x) I)|^2 = d (d + 2) / 3
    for d in (2, 3, 5):
        assert identity_power(d, 2).norm_sq == pytest.approx(d * (d + 2) / 3.0, rel=1e-12)


@pytest.mark.parametrize("d,n", [(3, 2), (3, 3), (4, 4), (2, 4)])
def test_harmonic_components_complete_and_orthogonal(d, n):
    a = SymTensor.random(d, n, stream(8, 10 * d + n))
    comps = harmonic_components(a)
    total = SymTensor.zeros(d, n)
    for _, _, c in comps:
        total = total + c
    np.testing.assert_allclose(total.values, a.values, atol=1e-12)
    norm_total = sum(c.norm_sq for _, _, c in comps)
    assert norm_total == pytest.approx(a.norm_sq, rel=1e-12)
    for (m1, j1, c1), (m2, j2, c2) in itertools.combinations(comps, 2):
        assert abs(c1.inner(c2)) < 1e-10 * max(1.0, c1.norm_sq, c2.norm_sq)


def test_harmonic_components_trace_free_parts():
    a = SymTensor.random(4, 4, stream(9, 0))
    parts = dict(((m, j), c) for m, j, c in harmonic_components(a))
    assert np.max(np.abs(parts[(4, 0)].partial_trace().values)) < 1e-12
    # the matrix inside the (2, 1) part is trace-free: its partial trace is
    # proportional to that matrix, so tracing twice gives zero
    assert abs(parts[(2, 1)].partial_trace().partial_trace().values[0]) < 1e-12


def test_symmetrized_product_norm_factors():
    # |Sym(I^j (x) H)|^2 / |H|^2 = m! 2^{2j} j! Gamma(m+j+d/2) / ((m+2j)! Gamma(m+d/2))
    from scipy.special import gammaln

    rng = stream(10, 0)
    d = 5
    for m, j in [(1, 1), (2, 1), (0, 2)]:
        if m == 0:
            h = SymTensor(d, 0, [1.3])
        else:
            raw = SymTensor.random(d, m, rng)
            h = dict(((mm, jj), c) for mm, jj, c in harmonic_components(raw))[(m, 0)]
        t = h
        for _ in range(j):
            t = identity_odot(t)
        factor = math.exp(
            gammaln(m + j + d / 2)
            - gammaln(m + d / 2)
            + math.log(math.factorial(m) * 2 ** (2 * j) * math.factorial(j))
            - math.lgamma(m + 2 * j + 1)
        )
        assert t.norm_sq == pytest.approx(factor * h.norm_sq, rel=1e-10)


def test_hermite_table_matches_numpy():
    from numpy.polynomial import hermite_e

    x = stream(11, 0).normal(size=50)
    table = hermite_table(x, 5)
    for k in range(6):
        coeffs = np.zeros(k + 1)
        coeffs[k] = 1.0
        np.testing.assert_allclose(table[k], hermite_e.hermeval(x, coeffs), rtol=1e-12)


def test_wick_degree2_closed_form():
    # :x_i x_j: = x_i x_j - delta_ij
    d = 3
    rng = stream(12, 0)
    pts = rng.normal(size=(20, d))
    for i in range(d):
        for j in range(i, d):
            vals = np.zeros(len(sorted_multi_indices(d, 2)))
            a = SymTensor(d, 2, vals)
            a.values[sorted_multi_indices(d, 2).index((i, j))] = 1.0
            mult = 1.0 if i == j else 2.0
            expected = mult * (pts[:, i] * pts[:, j] - (1.0 if i == j else 0.0))
            np.testing.assert_allclose(wick_eval(a, pts), expected, atol=1e-12)


@pytest.mark.parametrize("d,n", [(2, 1), (3, 2), (4, 3), (4, 4)])
def test_wick_matches_naive_hermite_products(d, n):
    # independent oracle: expand every ordered index tuple through hermite_e
    from collections import Counter

    from numpy.polynomial import hermite_e

    rng = stream(13, 10 * d + n)
    a = SymTensor.random(d, n, rng)
    pts = rng.normal(size=(10, d))
    expected = np.zeros(10)
    for idx in itertools.product(range(d), repeat=n):
        val = a.entry(idx)
        term = np.ones(10)
        for coord, count in Counter(idx).items():
            coeffs = np.zeros(count + 1)
            coeffs[count] = 1.0
            term = term * hermite_e.hermeval(pts[:, coord], coeffs)
        expected += val * term
    np.testing.assert_allclose(wick_eval(a, pts), expected, atol=1e-12 * max(1, np.abs(expected).max()))


def test_tensor_file_roundtrip(tmp_path):
    a = SymTensor.random(3, 3, stream(14, 0))
    path = tmp_path / "tensor.txt"
    write_tensor(path, a)
    b = read_tensor(path)
    assert b.d == a.d and b.n == a.n
    np.testing.assert_array_equal(a.values, b.values)

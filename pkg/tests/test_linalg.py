import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fimod import _kernels_py, kernels
from fimod import linalg as la
from fimod.scalars import GF, QQ

FIELDS = [QQ, GF(2), GF(3), GF(7)]


def random_matrix(F, rows, cols, seed, density=0.5):
    rng = np.random.default_rng(seed)
    vals = rng.integers(-2, 3, size=(rows, cols)) * (rng.random((rows, cols)) < density)
    return la.from_ints(F, vals)


@pytest.mark.parametrize("F", FIELDS, ids=str)
@given(st.integers(0, 7), st.integers(0, 7), st.integers(0, 10_000))
@settings(max_examples=40, deadline=None)
def test_rank_nullity(F, r, c, seed):
    A = random_matrix(F, r, c, seed)
    K = la.nullspace(F, A)
    assert K.shape[0] + la.rank(F, A) == c
    if K.shape[0] and r:
        assert la.is_zero(la.matmul(F, A, np.ascontiguousarray(K.T)))


@pytest.mark.parametrize("F", FIELDS, ids=str)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 10_000))
@settings(max_examples=30, deadline=None)
def test_rref_is_canonical(F, r, c, seed):
    A = random_matrix(F, r, c, seed)
    R, piv = la.rref(F, A)
    # row operations do not change the reduced form
    P = random_matrix(F, r, r, seed + 1, density=1.0)
    if la.rank(F, P) == r:
        R2, piv2 = la.rref(F, la.matmul(F, P, A))
        assert piv2 == piv and la.equal(R2, R)
    for i, j in enumerate(piv):
        assert R[i, j] == F.one
        assert sum(1 for x in R[:, j] if x != 0) == 1


@pytest.mark.parametrize("F", FIELDS, ids=str)
def test_inverse_and_solve(F):
    A = la.from_ints(F, [[2, 1], [1, 1]])
    Ai = la.inverse(F, A)
    assert la.equal(la.matmul(F, A, Ai), la.eye(F, 2))
    x = la.solve(F, A, la.from_ints(F, [1, 0]).reshape(-1))
    assert la.equal(la.matvec(F, A, x), la.from_ints(F, [1, 0]).reshape(-1))
    singular = la.from_ints(F, [[1, 1], [1, 1]])
    assert la.solve(F, singular, la.from_ints(F, [1, 0]).reshape(-1)) is None
    with pytest.raises(ZeroDivisionError):
        la.inverse(F, singular)


@pytest.mark.parametrize("F", FIELDS, ids=str)
def test_subspace_operations(F):
    a = la.span(F, 4, la.from_ints(F, [[1, 0, 0, 0], [0, 1, 0, 0]]))
    b = la.span(F, 4, la.from_ints(F, [[0, 1, 0, 0], [0, 0, 1, 0]]))
    assert la.subspace_sum(a, b).dim == 3
    assert la.intersect(a, b).dim == 1
    assert la.intersect(a, b).contains(la.from_ints(F, [0, 1, 0, 0]).reshape(-1))
    assert a.contains_subspace(la.intersect(a, b))


def test_large_prime_products_stay_exact():
    F = GF(2147483647)
    A = la.from_ints(F, np.full((3, 400), F.p - 1))
    prod = la.matmul(F, A, np.ascontiguousarray(A.T))
    assert int(prod[0, 0]) == 400 % F.p


@given(st.integers(1, 12), st.integers(1, 12), st.sampled_from([2, 3, 5, 101]), st.integers(0, 9999))
@settings(max_examples=60, deadline=None)
def test_compiled_and_python_kernels_agree(r, c, p, seed):
    if not kernels.compiled_available():
        pytest.skip("compiled kernel not built")
    from fimod import _kernels
    rng = np.random.default_rng(seed)
    A = np.ascontiguousarray(rng.integers(0, p, size=(r, c)), dtype=np.int64)
    a, b = A.copy(), A.copy()
    assert list(_kernels.rref_modp(a, p)) == list(_kernels_py.rref_modp(b, p))
    assert np.array_equal(a, b)
    a, b = A.copy(), A.copy()
    assert list(_kernels.echelon_modp(a, p)) == list(_kernels_py.echelon_modp(b, p))

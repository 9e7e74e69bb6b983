import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import uba_corpus
from ubacheck import generators
from ubacheck.graph import prune_unreachable_and_dead, sccs
from ubacheck.linalg import (
    POSITIVE,
    ZERO,
    LinalgError,
    SparseMatrix,
    null_vector,
    positivity_rank,
    power_iterate,
    scc_matrix,
    solve_absorbing,
)
from ubacheck.markov import uniform_chain
from ubacheck.product import build_product


def uniform_product(nba):
    return build_product(uniform_chain(nba.alphabet), nba)


def main_scc(nba):
    prod = uniform_product(nba)
    _, dag = prune_unreachable_and_dead(prod, sccs(prod))
    comp = max(dag.components, key=len)
    return prod, list(comp), scc_matrix(prod, comp)


def test_fig1_right_matrix():
    _, _, m = main_scc(generators.fig1_right())
    assert m.n == 4
    assert all(len(r) == 2 and all(w == 0.5 for _, w in r) for r in m.rows)


def test_single_node_matrix():
    m = SparseMatrix(1, (((0, 0.3),),))
    assert np.allclose(m.dense(), [[0.3]])


def test_ca2_matrix_spectral_radius():
    _, _, m = main_scc(generators.complete(2))
    rho = max(abs(np.linalg.eigvals(m.dense())))
    assert abs(rho - 1) < 1e-9
    assert positivity_rank(m)
    assert power_iterate(m).verdict == POSITIVE


def test_rank_examples():
    _, _, m = main_scc(generators.fig1_right())
    assert positivity_rank(m)
    _, _, m = main_scc(generators.nearly_complete(5))
    assert not positivity_rank(m)
    assert not positivity_rank(SparseMatrix(1, (((0, 0.5),),)))
    with pytest.raises(LinalgError):
        positivity_rank(SparseMatrix(0, ()))


def test_power_fig1_right():
    _, _, m = main_scc(generators.fig1_right())
    res = power_iterate(m)
    assert res.verdict == POSITIVE
    v = res.vector / res.vector.max()
    assert np.allclose(v, 1.0)
    assert res.iterations <= 5


def test_power_nca5_zero():
    _, _, m = main_scc(generators.nearly_complete(5))
    res = power_iterate(m, eps=1e-10)
    assert res.verdict == ZERO
    assert 30 <= res.iterations <= 80


def test_power_ca5_positive():
    _, _, m = main_scc(generators.complete(5))
    res = power_iterate(m, eps=1e-10)
    assert res.verdict == POSITIVE
    assert 150 <= res.iterations <= 300
    v = res.vector
    assert np.all(v > 0)
    assert np.max(np.abs(m @ v - v)) <= 1e-10 * np.max(np.abs(v))


def test_power_fallback_to_rank():
    _, _, m = main_scc(generators.complete(3))
    res = power_iterate(m, max_iter=3)
    assert res.verdict == POSITIVE and res.fallback
    _, _, m = main_scc(generators.nearly_complete(3))
    res = power_iterate(m, max_iter=2)
    assert res.verdict == ZERO and res.fallback


def _sccs_of_corpus():
    out = []
    for nba in uba_corpus(31, 40, n_max=12):
        prod = uniform_product(nba)
        _, dag = prune_unreachable_and_dead(prod, sccs(prod))
        for c, comp in enumerate(dag.components):
            if not dag.trivial[c] and dag.has_final[c]:
                out.append(scc_matrix(prod, comp))
    return out


SCC_MATRICES = _sccs_of_corpus()


def test_corpus_has_both_verdicts():
    verdicts = {positivity_rank(m) for m in SCC_MATRICES}
    assert verdicts == {True, False}


@pytest.mark.parametrize("m", SCC_MATRICES)
def test_methods_agree(m):
    res = power_iterate(m)
    assert (res.verdict == POSITIVE) == positivity_rank(m)
    if res.verdict == POSITIVE:
        v = res.vector
        assert np.all(v > 0)
        assert np.max(np.abs(m @ v - v)) <= 1e-10 * np.max(v)


@pytest.mark.parametrize("m", SCC_MATRICES[:20])
def test_iterates_never_grow(m):
    v = np.ones(m.n)
    for _ in range(50):
        w = 0.5 * (v + m @ v)
        assert w.max() <= v.max() + 1e-15
        v = w


def test_null_vector_is_eigenvector():
    _, _, m = main_scc(generators.complete(2))
    v = null_vector(m)
    assert abs(v.sum() - 1) < 1e-12
    assert np.allclose(m @ v, v, atol=1e-12)
    assert np.all(v > 0)


def test_solve_absorbing_examples():
    x, res, _ = solve_absorbing(SparseMatrix.from_dense([[0.0]]), [0.7])
    assert np.allclose(x, [0.7])
    a = SparseMatrix.from_dense([[0, 0.5], [0, 0]])
    x, res, _ = solve_absorbing(a, [0.25, 0.5])
    assert np.allclose(x, [0.5, 0.5]) and res <= 1e-12


@given(st.integers(1, 12), st.integers(0, 2**31 - 1))
def test_solve_absorbing_random(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.random((n, n)) * (rng.random((n, n)) < 0.4)
    a *= 0.9 / max(1.0, a.sum(axis=1).max())
    b = rng.random(n) * (1 - a.sum(axis=1))
    x, res, _ = solve_absorbing(SparseMatrix.from_dense(a), b)
    assert res <= 1e-12
    assert np.allclose(x, np.linalg.solve(np.eye(n) - a, b), atol=1e-10)
    assert np.all(x >= -1e-12) and np.all(x <= 1 + 1e-12)


def test_solve_absorbing_lu_fallback():
    # slowly converging chain forces the stall detector and the LU path
    n = 30
    a = np.zeros((n, n))
    for i in range(n):
        a[i, (i + 1) % n] = 0.9999999
    b = np.full(n, 1e-7)
    x, res, sweeps = solve_absorbing(SparseMatrix.from_dense(a), b, max_sweeps=5)
    assert res <= 1e-9 and sweeps == 5
    assert np.allclose(x, np.linalg.solve(np.eye(n) - a, b))

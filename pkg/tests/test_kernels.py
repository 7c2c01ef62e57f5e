import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from askls.errors import DataError, DimensionMismatch, KernelError
from askls.kernels import (DirectedGraph, GramBlock, KernelSpec, PrecomputedMatrix,
                           adjacency_kernel, build_gram, eval_rbf, eval_sne_row,
                           eval_t_row, kl_exp_kernel, kl_gaussian, kl_gaussian_matrix,
                           load_matrix_csv, save_matrix_csv, symmetrize)

from oracles import kl_quadrature, rbf_loop


# --- RBF ---

def test_rbf_identical_points():
    assert eval_rbf([1.0, -2.0, 3.0], [1.0, -2.0, 3.0], 0.3) == 1.0


def test_rbf_direct_formula():
    assert eval_rbf([0.0], [1.0], 1.0) == pytest.approx(math.exp(-1.0), abs=1e-15)
    assert eval_rbf([0.0], [1.0], 1.0) == pytest.approx(0.367879, abs=1e-6)


def test_rbf_matches_scalar_loop():
    rng = np.random.default_rng(3)
    for _ in range(20):
        u, v = rng.normal(size=5), rng.normal(size=5)
        assert abs(eval_rbf(u, v, 2.0) - rbf_loop(u, v, 2.0)) <= 1e-12


def test_rbf_exactly_symmetric():
    rng = np.random.default_rng(0)
    u, v = rng.normal(size=4), rng.normal(size=4)
    assert eval_rbf(u, v, 0.7) == eval_rbf(v, u, 0.7)


@pytest.mark.parametrize("sigma", [0.0, -1.0, float("nan")])
def test_rbf_rejects_bad_sigma(sigma):
    with pytest.raises(KernelError):
        eval_rbf([0.0], [1.0], sigma)


def test_rbf_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        eval_rbf([0.0, 1.0], [1.0], 1.0)


# --- SNE / T ---

def test_sne_single_reference():
    x = np.array([0.3, -1.2])
    assert eval_sne_row(x, [x], [x], 0.8) == pytest.approx([1.0])


def test_t_single_reference():
    x = np.array([0.3, -1.2])
    assert eval_t_row(x, [x], [x]) == pytest.approx([1.0])


def test_equidistant_reference_splits_evenly():
    x = np.zeros(2)
    ref = np.array([[1.0, 0.0], [0.0, -1.0]])
    assert eval_sne_row(x, ref, ref, 1.3) == pytest.approx([0.5, 0.5], abs=1e-15)
    assert eval_t_row(x, ref, ref) == pytest.approx([0.5, 0.5], abs=1e-15)


vectors = arrays(np.float64, (6, 3), elements=st.floats(-3, 3))


@settings(max_examples=50, deadline=None)
@given(ref=vectors, x=arrays(np.float64, 3, elements=st.floats(-3, 3)),
       sigma=st.floats(0.5, 5.0))
def test_rows_are_stochastic_over_reference(ref, x, sigma):
    assert abs(math.fsum(eval_sne_row(x, ref, ref, sigma)) - 1.0) <= 1e-10
    assert abs(math.fsum(eval_t_row(x, ref, ref)) - 1.0) <= 1e-10


def test_row_sum_random_inputs_tight():
    rng = np.random.default_rng(11)
    ref = rng.normal(size=(30, 4))
    for x in rng.normal(size=(10, 4)):
        assert abs(math.fsum(eval_sne_row(x, ref, ref, 1.5)) - 1.0) <= 1e-12
        assert abs(math.fsum(eval_t_row(x, ref, ref)) - 1.0) <= 1e-12


def test_sne_and_t_are_asymmetric():
    # x sits in a dense cluster, y is isolated, so normalizers differ
    ref = np.array([[0.0], [0.1], [0.2], [3.0]])
    x, y = ref[0], ref[3]
    kxy = eval_sne_row(x, [y], ref, 1.0)[0]
    kyx = eval_sne_row(y, [x], ref, 1.0)[0]
    assert kxy != pytest.approx(kyx, rel=1e-3)
    txy, tyx = eval_t_row(x, [y], ref)[0], eval_t_row(y, [x], ref)[0]
    assert txy != pytest.approx(tyx, rel=1e-3)


def test_sne_entries_in_unit_interval():
    rng = np.random.default_rng(1)
    ref = rng.normal(size=(8, 2))
    row = eval_sne_row(rng.normal(size=2), ref, ref, 1.0)
    assert np.all(row > 0) and np.all(row <= 1)


def test_sne_underflow_raises():
    ref = np.array([[1000.0, 0.0], [0.0, 1000.0]])
    with pytest.raises(KernelError, match="underflow"):
        eval_sne_row(np.zeros(2), ref, ref, 0.01)


def test_sne_empty_reference():
    with pytest.raises(KernelError):
        eval_sne_row(np.zeros(2), np.zeros((1, 2)), np.zeros((0, 2)), 1.0)


def test_sne_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        eval_sne_row(np.zeros(2), np.zeros((1, 3)), np.zeros((2, 2)), 1.0)


# --- KL ---

def test_kl_identical_is_zero():
    assert kl_gaussian(0.4, 2.0, 0.4, 2.0) == 0.0


def test_kl_unit_shift_matches_quadrature():
    assert kl_gaussian(0, 1, 1, 1) == pytest.approx(0.5, abs=1e-15)
    assert abs(kl_quadrature(0, 1, 1, 1) - 0.5) <= 1e-6


def test_kl_asymmetry_matches_quadrature():
    forward, backward = kl_gaussian(0, 1, 0, 4), kl_gaussian(0, 4, 0, 1)
    assert abs(forward - kl_quadrature(0, 1, 0, 4)) <= 1e-6
    assert abs(backward - kl_quadrature(0, 4, 0, 1)) <= 1e-6
    assert abs(forward - backward) > 0.1


def test_kl_rejects_nonpositive_variance():
    with pytest.raises(KernelError):
        kl_gaussian(0, 0.0, 0, 1)
    with pytest.raises(KernelError):
        kl_gaussian(0, 1, 0, -1)


def test_kl_matrix_agrees_with_scalar():
    mu, var = [0.0, 1.0, -0.5], [1.0, 0.5, 2.0]
    D = kl_gaussian_matrix(mu, var)
    for i in range(3):
        for j in range(3):
            assert D[i, j] == pytest.approx(kl_gaussian(mu[i], var[i], mu[j], var[j]), abs=1e-14)


def test_kl_exp_unit_diagonal():
    D = np.array([[0.0, 0.3, 2.0], [0.1, 0.0, 1.0], [4.0, 0.2, 0.0]])
    assert np.all(np.diag(kl_exp_kernel(D, 1.7).values) == 1.0)


def test_kl_exp_small_scale_tends_to_one():
    D = np.array([[0.0, 5.0], [9.0, 0.0]])
    assert np.allclose(kl_exp_kernel(D, 1e-14).values, 1.0, atol=1e-12)


def test_kl_exp_direct_values():
    K = kl_exp_kernel([[0.0, 2.0], [1.0, 0.0]], 0.5).values
    expected = [[1.0, math.exp(-1.0)], [math.exp(-0.5), 1.0]]
    assert np.allclose(K, expected, rtol=0, atol=1e-15)


def test_kl_exp_monotone():
    D = np.array([[0.5, 1.0], [2.0, 3.0]])
    assert np.all(kl_exp_kernel(D + 0.1, 1.0).values < kl_exp_kernel(D, 1.0).values)
    assert np.all(kl_exp_kernel(D, 2.0).values < kl_exp_kernel(D, 1.0).values)


@pytest.mark.parametrize("D", [[[0.0, -0.1], [0.0, 0.0]], [[0.0, np.inf], [0.0, 0.0]]])
def test_kl_exp_rejects_bad_divergence(D):
    with pytest.raises(KernelError):
        kl_exp_kernel(D, 1.0)


# --- adjacency ---

def test_empty_graph_zero_kernel():
    K = adjacency_kernel(DirectedGraph(3))
    assert np.array_equal(K.values, np.zeros((3, 3)))


def test_adjacency_orientation():
    g = DirectedGraph(2, [(1, 0)])
    assert np.array_equal(g.adjacency, [[0, 1], [0, 0]])
    assert np.array_equal(g.in_degree(), [1, 0])
    assert np.array_equal(adjacency_kernel(g).values, [[0, 1], [0, 0]])
    assert np.array_equal(adjacency_kernel(g, "none").values, [[0, 1], [0, 0]])


def test_adjacency_row_sums():
    rng = np.random.default_rng(5)
    edges = [tuple(e) for e in rng.integers(0, 12, size=(30, 2)) if e[0] != e[1]]
    g = DirectedGraph(12, edges)
    K = adjacency_kernel(g, "indegree").values
    sums = K.sum(axis=1)
    indeg = g.in_degree()
    assert np.allclose(sums[indeg > 0], 1.0, atol=1e-15)
    assert np.all(sums[indeg == 0] == 0.0)


def test_adjacency_is_asymmetric_witness():
    K = adjacency_kernel(DirectedGraph(3, [(0, 1), (1, 2), (2, 0), (0, 2)]))
    assert K.values[1, 0] != K.values[0, 1]


def test_graph_rejects_out_of_range():
    with pytest.raises(DataError):
        DirectedGraph(2, [(0, 2)])


def test_graph_no_implicit_self_loops():
    assert np.all(np.diag(DirectedGraph(4, [(0, 1), (2, 3)]).adjacency) == 0)
    assert DirectedGraph(2, [(1, 1)]).adjacency[1, 1] == 1


# --- symmetrize ---

def test_symmetrize_fixed_point():
    S = np.array([[2.0, 1.0], [1.0, 3.0]])
    assert np.array_equal(symmetrize(S).values, S)


def test_symmetrize_average_formula():
    assert np.array_equal(symmetrize([[0.0, 1.0], [0.0, 0.0]]).values, [[0, 0.5], [0.5, 0]])


def test_symmetrize_random_outputs_symmetric_and_psd():
    rng = np.random.default_rng(2)
    K = rng.normal(size=(7, 7))
    for mode in ("average", "gram"):
        S = symmetrize(K, mode).values
        assert np.max(np.abs(S - S.T)) <= 1e-12
    S = symmetrize(K, "gram").values
    assert np.linalg.eigvalsh(S).min() >= -1e-8
    avg = symmetrize(K).values
    assert np.array_equal(symmetrize(avg).values, avg)


def test_symmetrize_non_square():
    with pytest.raises(DimensionMismatch):
        symmetrize(np.ones((2, 3)))


# --- GramBlock / build_gram ---

def test_gram_block_rejects_nonfinite():
    with pytest.raises(KernelError):
        GramBlock([[1.0, np.nan]])


def test_gram_block_symmetry_query():
    assert GramBlock(np.eye(3)).is_symmetric()
    assert not GramBlock([[1.0, 0.0], [0.5, 1.0]]).is_symmetric()
    assert not GramBlock(np.ones((2, 3))).is_symmetric()


def test_build_gram_rbf_unit_diagonal():
    X = np.random.default_rng(0).normal(size=(6, 3))
    K = build_gram(KernelSpec.rbf(1.2), X, X)
    assert np.all(np.diag(K.values) == 1.0)


def test_build_gram_sne_row_stochastic():
    X = np.random.default_rng(0).normal(size=(9, 2))
    K = build_gram(KernelSpec.sne(0.9, reference_set=X), X, X)
    assert np.allclose(K.values.sum(axis=1), 1.0, atol=1e-12)
    assert not K.is_symmetric(1e-6)


def test_build_gram_requires_reference():
    X = np.zeros((2, 2))
    with pytest.raises(KernelError, match="reference"):
        build_gram(KernelSpec.sne(1.0), X, X)
    with pytest.raises(KernelError, match="reference"):
        build_gram(KernelSpec.t(), X, X)


def test_spec_invariants():
    with pytest.raises(KernelError):
        KernelSpec.rbf(0.0)
    with pytest.raises(KernelError):
        KernelSpec.sne(-1.0)
    with pytest.raises(KernelError):
        KernelSpec.kl_exp(np.zeros((2, 2)), a=0.0)
    bound = KernelSpec.t(reference_set=np.ones((3, 2)))
    assert bound.reference_set_id is not None


def test_precomputed_lookup_order_matters(tmp_path):
    M = PrecomputedMatrix(["a", "b", "c"], [[1.0, 2.0, 3.0], [4.0, 5.0, 6.0], [7.0, 8.0, 9.0]])
    spec = KernelSpec.precomputed(M)
    assert build_gram(spec, ["a"], ["b"]).values[0, 0] == 2.0
    assert build_gram(spec, ["b"], ["a"]).values[0, 0] == 4.0
    with pytest.raises(KernelError, match="not found"):
        build_gram(spec, ["z"], ["a"])


def test_precomputed_csv_round_trip(tmp_path):
    rng = np.random.default_rng(4)
    ids = ["n0", "n1", "n2", "n3"]
    V = rng.normal(size=(4, 4)) / 3.0
    path = tmp_path / "k.csv"
    save_matrix_csv(path, PrecomputedMatrix(ids, V))
    text = path.read_text().splitlines()
    assert text[0] == "id,n0,n1,n2,n3"
    M = load_matrix_csv(path)
    K = build_gram(KernelSpec.precomputed(M), ids, ids)
    assert np.array_equal(K.values, V)
    K2 = build_gram(KernelSpec.precomputed(M), ids[::-1], ids)
    assert np.array_equal(K2.values, V[::-1])


def test_matrix_csv_hand_fixture(tmp_path):
    path = tmp_path / "k.csv"
    path.write_text("id,x,y\nx,1,0.25\ny,0.5,1\n")
    M = load_matrix_csv(path)
    assert build_gram(KernelSpec.precomputed(M), ["x"], ["y"]).values[0, 0] == 0.25
    assert build_gram(KernelSpec.precomputed(M), ["y"], ["x"]).values[0, 0] == 0.5


def test_matrix_csv_bad_row(tmp_path):
    path = tmp_path / "k.csv"
    path.write_text("id,x,y\nx,1,oops\n")
    with pytest.raises(DataError, match=":2:"):
        load_matrix_csv(path)


def test_adjacency_spec_integer_ids():
    g = DirectedGraph(3, [(0, 1), (2, 1)])
    K = build_gram(KernelSpec.adjacency(g), [1], [0, 1, 2])
    assert np.allclose(K.values, [[0.5, 0.0, 0.5]])

"""Kernel evaluations between sample collections.

Kernels here are *not* assumed symmetric: ``K(u, v)`` puts ``u`` in the
source position and ``v`` in the target position, and a Gram block
``K(rows, cols)`` is generally different from the transpose of
``K(cols, rows)``.

Vector families (RBF, SNE, T) operate on 2-D arrays of samples. Matrix
families (precomputed kernels, exponentiated KL divergences, directed
adjacency) operate on sample ids that index a stored dense matrix, which is
how transductive problems are expressed.
"""
import csv
import hashlib
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property

import numpy as np
from scipy.spatial.distance import cdist

from .errors import DataError, DimensionMismatch, KernelError

__all__ = [
    "KernelFamily", "Preprocess", "SymmetrizeMode", "GramBlock",
    "DirectedGraph", "PrecomputedMatrix", "KernelSpec",
    "eval_rbf", "eval_sne_row", "eval_t_row", "rbf_gram", "sne_gram",
    "t_gram", "kl_gaussian", "kl_gaussian_matrix", "kl_exp_kernel",
    "adjacency_kernel", "symmetrize", "build_gram",
    "load_matrix_csv", "save_matrix_csv",
]


class KernelFamily(str, Enum):
    RBF = "rbf"
    SNE = "sne"
    T = "t"
    KL_EXP = "klexp"
    PRECOMPUTED = "precomputed"
    ADJACENCY = "adjacency"


class Preprocess(str, Enum):
    IN_DEGREE = "indegree"
    NONE = "none"


class SymmetrizeMode(str, Enum):
    AVERAGE = "average"
    GRAM_PRODUCT = "gram"


VECTOR_FAMILIES = frozenset({KernelFamily.RBF, KernelFamily.SNE, KernelFamily.T})
REFERENCE_FAMILIES = frozenset({KernelFamily.SNE, KernelFamily.T})


@dataclass(frozen=True, eq=False)
class GramBlock:
    """Rectangular matrix of kernel values ``K(rows, cols)``.

    ``values[i, j] = K(row_ids[i], col_ids[j])``. Symmetry is never assumed;
    use :meth:`is_symmetric` to query it.
    """

    values: np.ndarray
    row_ids: tuple = None
    col_ids: tuple = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2:
            raise DimensionMismatch(f"Gram block must be 2-D, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise KernelError("Gram block contains non-finite entries")
        object.__setattr__(self, "values", values)
        row_ids = tuple(range(values.shape[0])) if self.row_ids is None else tuple(self.row_ids)
        col_ids = tuple(range(values.shape[1])) if self.col_ids is None else tuple(self.col_ids)
        if len(row_ids) != values.shape[0] or len(col_ids) != values.shape[1]:
            raise DimensionMismatch("id lists do not match the Gram block shape")
        object.__setattr__(self, "row_ids", row_ids)
        object.__setattr__(self, "col_ids", col_ids)

    @property
    def rows(self):
        return self.values.shape[0]

    @property
    def cols(self):
        return self.values.shape[1]

    @property
    def shape(self):
        return self.values.shape

    @property
    def is_square(self):
        return self.rows == self.cols

    @property
    def T(self):
        return GramBlock(self.values.T.copy(), self.col_ids, self.row_ids)

    def is_symmetric(self, tol=1e-10):
        if not self.is_square:
            return False
        return bool(np.max(np.abs(self.values - self.values.T), initial=0.0) <= tol)


@dataclass(frozen=True, eq=False)
class DirectedGraph:
    """Directed graph on nodes ``0..node_count-1``.

    Edges are ordered ``(src, dst)`` pairs. The adjacency matrix follows the
    column-is-source convention: ``A[i, j] = 1`` exactly when ``j -> i``.
    """

    node_count: int
    edges: tuple = ()

    def __post_init__(self):
        n = int(self.node_count)
        if n < 0:
            raise DataError(f"node count must be nonnegative, got {n}")
        edges = set()
        for src, dst in self.edges:
            src, dst = int(src), int(dst)
            if not (0 <= src < n and 0 <= dst < n):
                raise DataError(f"edge {src}->{dst} out of range for {n} nodes")
            edges.add((src, dst))
        object.__setattr__(self, "node_count", n)
        object.__setattr__(self, "edges", tuple(sorted(edges)))

    @cached_property
    def adjacency(self):
        A = np.zeros((self.node_count, self.node_count))
        if self.edges:
            src, dst = np.array(self.edges).T
            A[dst, src] = 1.0
        return A

    def in_degree(self):
        return self.adjacency.sum(axis=1)


class PrecomputedMatrix:
    """Dense matrix indexed by sample ids (row id = source position).

    Ids are compared through ``str()`` so that integer node ids and ids read
    back from a CSV header refer to the same entries.
    """

    def __init__(self, ids, values, col_ids=None):
        values = np.array(values, dtype=float)
        if values.ndim != 2:
            raise DimensionMismatch("precomputed matrix must be 2-D")
        self.row_ids = tuple(ids)
        self.col_ids = self.row_ids if col_ids is None else tuple(col_ids)
        if values.shape != (len(self.row_ids), len(self.col_ids)):
            raise DimensionMismatch(
                f"matrix shape {values.shape} does not match "
                f"{len(self.row_ids)} row ids and {len(self.col_ids)} column ids")
        self.values = values
        self._row_index = _index_ids(self.row_ids)
        self._col_index = _index_ids(self.col_ids)

    @property
    def ids(self):
        return self.row_ids

    def __repr__(self):
        return f"PrecomputedMatrix(shape={self.values.shape})"

    def positions(self, ids, axis=0):
        index = self._row_index if axis == 0 else self._col_index
        try:
            return np.array([index[str(i)] for i in ids], dtype=int)
        except KeyError as exc:
            raise KernelError(f"id {exc.args[0]!r} not found in precomputed matrix") from None

    def block(self, row_ids, col_ids):
        r = self.positions(row_ids, axis=0)
        c = self.positions(col_ids, axis=1)
        return self.values[np.ix_(r, c)]


def _index_ids(ids):
    index = {}
    for pos, i in enumerate(ids):
        key = str(i)
        if key in index:
            raise DataError(f"duplicate id {key!r} in precomputed matrix")
        index[key] = pos
    return index


def _as_samples(X):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2:
        raise DimensionMismatch(f"samples must be a 2-D array, got shape {X.shape}")
    return X


def _check_sigma(sigma):
    if sigma is None or not np.isfinite(sigma) or sigma <= 0:
        raise KernelError(f"sigma must be a positive real, got {sigma!r}")


def _sq_dists(U, V):
    U, V = _as_samples(U), _as_samples(V)
    if U.shape[1] != V.shape[1]:
        raise DimensionMismatch(f"dimension mismatch: {U.shape[1]} vs {V.shape[1]}")
    return cdist(U, V, "sqeuclidean")


# --- vector kernels ---------------------------------------------------------

def eval_rbf(u, v, sigma):
    """``exp(-||u - v||^2 / sigma^2)``."""
    _check_sigma(sigma)
    u = np.asarray(u, dtype=float).ravel()
    v = np.asarray(v, dtype=float).ravel()
    if u.shape != v.shape:
        raise DimensionMismatch(f"dimension mismatch: {u.size} vs {v.size}")
    d = u - v
    return float(np.exp(-np.dot(d, d) / sigma**2))


def rbf_gram(U, V, sigma):
    _check_sigma(sigma)
    return np.exp(-_sq_dists(U, V) / sigma**2)


def _normalized_profile(profile, X, Y, reference_set):
    ref = _as_samples(reference_set)
    if ref.shape[0] == 0:
        raise KernelError("reference set is empty")
    num = profile(_sq_dists(X, Y))
    den = profile(_sq_dists(X, ref)).sum(axis=1)
    bad = np.flatnonzero(~(den > 0) | ~np.isfinite(den))
    if bad.size:
        bad = int(bad[0])
        raise KernelError(
            f"normalizing denominator underflowed to 0 for sample {bad}; "
            "the bandwidth is too small for this data")
    return num / den[:, None]


def sne_gram(X, Y, reference_set, sigma):
    """SNE kernel block: rows normalized over ``reference_set``.

    ``K[i, j] = exp(-||x_i - y_j||^2 / s^2) / sum_z exp(-||x_i - z||^2 / s^2)``
    """
    _check_sigma(sigma)
    return _normalized_profile(lambda d2: np.exp(-d2 / sigma**2), X, Y, reference_set)


def t_gram(X, Y, reference_set):
    """Student-t kernel block, ``(1 + d^2)^-1`` normalized over ``reference_set``."""
    return _normalized_profile(lambda d2: 1.0 / (1.0 + d2), X, Y, reference_set)


def eval_sne_row(x, targets, reference_set, sigma):
    x = np.asarray(x, dtype=float).ravel()
    return sne_gram(x[None, :], targets, reference_set, sigma)[0]


def eval_t_row(x, targets, reference_set):
    x = np.asarray(x, dtype=float).ravel()
    return t_gram(x[None, :], targets, reference_set)[0]


# --- divergence kernels -----------------------------------------------------

def kl_gaussian(mu0, var0, mu1, var1):
    """KL(N(mu0, var0) || N(mu1, var1)) for univariate Gaussians."""
    if not (var0 > 0 and var1 > 0):
        raise KernelError(f"variances must be positive, got {var0!r} and {var1!r}")
    return float(0.5 * np.log(var1 / var0) + (var0 + (mu0 - mu1) ** 2) / (2.0 * var1) - 0.5)


def kl_gaussian_matrix(means, variances, col_means=None, col_variances=None):
    """Pairwise ``D[i, j] = KL(P_i || Q_j)`` between univariate Gaussians."""
    mu0 = np.asarray(means, dtype=float)[:, None]
    v0 = np.asarray(variances, dtype=float)[:, None]
    mu1 = np.asarray(means if col_means is None else col_means, dtype=float)[None, :]
    v1 = np.asarray(variances if col_variances is None else col_variances, dtype=float)[None, :]
    if np.any(v0 <= 0) or np.any(v1 <= 0):
        raise KernelError("variances must be positive")
    D = 0.5 * np.log(v1 / v0) + (v0 + (mu0 - mu1) ** 2) / (2.0 * v1) - 0.5
    # rounding can push KL(P||P) slightly below zero
    return np.maximum(D, 0.0)


def kl_exp_kernel(D, a, row_ids=None, col_ids=None):
    """Exponentiated divergence kernel ``K = exp(-a * D)``."""
    if a is None or not np.isfinite(a) or a <= 0:
        raise KernelError(f"scale a must be a positive real, got {a!r}")
    D = np.asarray(D, dtype=float)
    if not np.all(np.isfinite(D)):
        raise KernelError("divergence matrix has non-finite entries")
    if np.any(D < 0):
        raise KernelError("divergence matrix has negative entries")
    return GramBlock(np.exp(-a * D), row_ids, col_ids)


# --- graph kernels ----------------------------------------------------------

def adjacency_kernel(graph, preprocess=Preprocess.IN_DEGREE):
    """Directed adjacency as a kernel, optionally divided by in-degree.

    With ``Preprocess.IN_DEGREE`` row ``i`` is divided by ``max(d_i, 1)``
    where ``d_i = sum_j A[i, j]``; rows of nodes without in-edges stay zero.
    """
    preprocess = Preprocess(preprocess)
    A = graph.adjacency
    if preprocess is Preprocess.IN_DEGREE:
        d = A.sum(axis=1)
        K = A / np.maximum(d, 1.0)[:, None]
    else:
        K = A.copy()
    ids = tuple(range(graph.node_count))
    return GramBlock(K, ids, ids)


def symmetrize(K, mode=SymmetrizeMode.AVERAGE):
    """Symmetric surrogate of a square kernel: ``(K + K^T)/2`` or ``K^T K``."""
    mode = SymmetrizeMode(mode)
    if not isinstance(K, GramBlock):
        K = GramBlock(K)
    if not K.is_square:
        raise DimensionMismatch(f"symmetrize needs a square matrix, got {K.shape}")
    V = K.values
    if mode is SymmetrizeMode.AVERAGE:
        S = (V + V.T) / 2.0
    else:
        S = V.T @ V
        S = (S + S.T) / 2.0
    return GramBlock(S, K.row_ids, K.col_ids)


# --- declarative specs ------------------------------------------------------

def reference_id(X):
    """Content hash identifying a reference set."""
    X = np.ascontiguousarray(X, dtype=float)
    h = hashlib.sha1(str(X.shape).encode())
    h.update(X.tobytes())
    return h.hexdigest()[:16]


@dataclass(frozen=True, eq=False)
class KernelSpec:
    """Declarative kernel description.

    Use the classmethod constructors (:meth:`rbf`, :meth:`sne`, ...) rather
    than the raw fields. SNE and T specs must be bound to a reference set
    (:meth:`bind_reference`) before they can be evaluated; fitting a model
    does this with the training samples.
    """

    family: KernelFamily
    sigma: float = None
    a: float = None
    reference_set: np.ndarray = field(default=None, repr=False)
    reference_set_id: str = None
    matrix: PrecomputedMatrix = field(default=None, repr=False)
    matrix_source: str = None
    graph: DirectedGraph = field(default=None, repr=False)
    preprocess: Preprocess = Preprocess.IN_DEGREE

    def __post_init__(self):
        fam = KernelFamily(self.family)
        object.__setattr__(self, "family", fam)
        object.__setattr__(self, "preprocess", Preprocess(self.preprocess))
        if fam in (KernelFamily.RBF, KernelFamily.SNE):
            _check_sigma(self.sigma)
        if fam is KernelFamily.KL_EXP:
            if self.a is None or not np.isfinite(self.a) or self.a <= 0:
                raise KernelError(f"scale a must be a positive real, got {self.a!r}")
        if fam in (KernelFamily.KL_EXP, KernelFamily.PRECOMPUTED) and self.matrix is None:
            raise KernelError(f"{fam.value} kernel needs a precomputed matrix")
        if fam is KernelFamily.KL_EXP:
            D = self.matrix.values
            if not np.all(np.isfinite(D)) or np.any(D < 0):
                raise KernelError("divergence matrix must be finite and nonnegative")
        if fam is KernelFamily.ADJACENCY and self.graph is None:
            raise KernelError("adjacency kernel needs a graph")
        if self.reference_set is not None:
            ref = _as_samples(self.reference_set)
            ref.setflags(write=False)
            object.__setattr__(self, "reference_set", ref)
            if self.reference_set_id is None:
                object.__setattr__(self, "reference_set_id", reference_id(ref))

    @classmethod
    def rbf(cls, sigma):
        return cls(KernelFamily.RBF, sigma=sigma)

    @classmethod
    def sne(cls, sigma, reference_set=None):
        return cls(KernelFamily.SNE, sigma=sigma, reference_set=reference_set)

    @classmethod
    def t(cls, reference_set=None):
        return cls(KernelFamily.T, reference_set=reference_set)

    @classmethod
    def kl_exp(cls, divergences, a, source=None):
        if not isinstance(divergences, PrecomputedMatrix):
            D = np.asarray(divergences, dtype=float)
            divergences = PrecomputedMatrix(range(D.shape[0]), D)
        return cls(KernelFamily.KL_EXP, a=a, matrix=divergences, matrix_source=source)

    @classmethod
    def precomputed(cls, matrix, source=None):
        if not isinstance(matrix, PrecomputedMatrix):
            V = np.asarray(matrix, dtype=float)
            matrix = PrecomputedMatrix(range(V.shape[0]), V)
        return cls(KernelFamily.PRECOMPUTED, matrix=matrix, matrix_source=source)

    @classmethod
    def adjacency(cls, graph, preprocess=Preprocess.IN_DEGREE, source=None):
        return cls(KernelFamily.ADJACENCY, graph=graph, preprocess=preprocess,
                   matrix_source=source)

    @property
    def uses_vectors(self):
        return self.family in VECTOR_FAMILIES

    @property
    def param_name(self):
        """Name of the tunable kernel hyperparameter, or None."""
        if self.family in (KernelFamily.RBF, KernelFamily.SNE):
            return "sigma"
        if self.family is KernelFamily.KL_EXP:
            return "a"
        return None

    @property
    def param(self):
        name = self.param_name
        return None if name is None else getattr(self, name)

    def with_param(self, value):
        name = self.param_name
        if name is None:
            if value is not None:
                raise KernelError(f"{self.family.value} kernel has no tunable parameter")
            return self
        return replace(self, **{name: value})

    def bind_reference(self, X):
        """Return a copy whose SNE/T denominators use ``X``; no-op otherwise."""
        if self.family not in REFERENCE_FAMILIES:
            return self
        return replace(self, reference_set=X, reference_set_id=None)

    @cached_property
    def _graph_matrix(self):
        K = adjacency_kernel(self.graph, self.preprocess)
        return PrecomputedMatrix(K.row_ids, K.values)

    def to_dict(self):
        """Hyperparameters only; matrices are referenced by ``matrix_source``."""
        d = {"family": self.family.value}
        if self.sigma is not None:
            d["sigma"] = float(self.sigma)
        if self.a is not None:
            d["a"] = float(self.a)
        if self.reference_set_id is not None:
            d["reference_set_id"] = self.reference_set_id
        if self.matrix_source is not None:
            d["matrix_source"] = str(self.matrix_source)
        if self.family is KernelFamily.ADJACENCY:
            d["preprocess"] = self.preprocess.value
        return d


def build_gram(spec, rows, cols):
    """Evaluate ``spec`` on every (row, col) pair.

    ``rows``/``cols`` are 2-D sample arrays for the vector families and
    sequences of ids for the matrix families. Entry ``(i, j)`` is
    ``K(rows[i], cols[j])``; order matters.
    """
    fam = spec.family
    if fam in VECTOR_FAMILIES:
        if fam is KernelFamily.RBF:
            return GramBlock(rbf_gram(rows, cols, spec.sigma))
        if spec.reference_set is None:
            raise KernelError(f"{fam.value} kernel is not bound to a reference set")
        if fam is KernelFamily.SNE:
            return GramBlock(sne_gram(rows, cols, spec.reference_set, spec.sigma))
        return GramBlock(t_gram(rows, cols, spec.reference_set))

    rows, cols = list(np.asarray(rows).ravel()), list(np.asarray(cols).ravel())
    if fam is KernelFamily.PRECOMPUTED:
        return GramBlock(spec.matrix.block(rows, cols), rows, cols)
    if fam is KernelFamily.KL_EXP:
        return kl_exp_kernel(spec.matrix.block(rows, cols), spec.a, rows, cols)
    return GramBlock(spec._graph_matrix.block(rows, cols), rows, cols)


# --- matrix files -----------------------------------------------------------

def load_matrix_csv(path):
    """Read a dense id-labelled matrix.

    The first row holds column ids (its first cell is ignored), the first
    column holds row ids, and the body is the matrix. Row ids take the
    source (first) argument of the kernel.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty matrix file") from None
        col_ids = [c.strip() for c in header[1:]]
        row_ids, body = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(col_ids) + 1:
                raise DataError(
                    f"{path}:{lineno}: expected {len(col_ids) + 1} fields, got {len(row)}")
            try:
                body.append([float(c) for c in row[1:]])
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from None
            row_ids.append(row[0].strip())
    if not body:
        raise DataError(f"{path}: matrix has no rows")
    return PrecomputedMatrix(row_ids, np.array(body), col_ids)


def save_matrix_csv(path, matrix):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", *matrix.col_ids])
        for rid, row in zip(matrix.row_ids, matrix.values):
            writer.writerow([rid, *(repr(float(v)) for v in row)])

"""Small synthetic problems used by the tests and demo scripts."""
import numpy as np

from .data import LabeledDataset
from .kernels import DirectedGraph, PrecomputedMatrix, kl_gaussian_matrix


def direction_graph(n_per_class=50, n_hubs=4, hub_degree=2, seed=0):
    """Directed graph whose node classes differ only in edge direction.

    Nodes ``0..n_hubs-1`` are hubs. Every class +1 node sends edges to
    ``hub_degree`` random hubs; every class -1 node receives edges from
    ``hub_degree`` random hubs. After ``(A + A^T)/2`` both classes look
    alike: each node is joined to a random set of hubs with the same weight.

    Returns ``(graph, labels, hubs)``; hubs get alternating labels.
    """
    rng = np.random.default_rng(seed)
    pos = np.arange(n_hubs, n_hubs + n_per_class)
    neg = np.arange(n_hubs + n_per_class, n_hubs + 2 * n_per_class)
    edges = []
    for i in pos:
        edges += [(int(i), int(h)) for h in rng.choice(n_hubs, hub_degree, replace=False)]
    for i in neg:
        edges += [(int(h), int(i)) for h in rng.choice(n_hubs, hub_degree, replace=False)]
    n = n_hubs + 2 * n_per_class
    labels = np.empty(n, dtype=int)
    labels[:n_hubs] = np.where(np.arange(n_hubs) % 2 == 0, 1, -1)
    labels[pos] = 1
    labels[neg] = -1
    return DirectedGraph(n, tuple(edges)), labels, np.arange(n_hubs)


def blobs(n_per_class=20, centers=((0.0, 0.0), (4.0, 0.0)), scale=0.5, seed=0):
    """Isotropic Gaussian blobs; class ``c`` is centred on ``centers[c]``."""
    rng = np.random.default_rng(seed)
    centers = np.asarray(centers, dtype=float)
    X = np.concatenate([c + scale * rng.standard_normal((n_per_class, centers.shape[1]))
                        for c in centers])
    y = np.repeat(np.arange(len(centers)), n_per_class)
    return LabeledDataset(X, y)


def gaussian_kl_problem(n_per_class=30, seed=0):
    """Samples that are univariate Gaussians, with a KL divergence matrix.

    Class 0 distributions are narrow, class 1 wide, all with overlapping
    means, so the divergence direction carries the class information.
    Returns ``(dataset_of_ids, PrecomputedMatrix of divergences)``.
    """
    rng = np.random.default_rng(seed)
    means = rng.uniform(-1.0, 1.0, 2 * n_per_class)
    variances = np.concatenate([rng.uniform(0.2, 0.6, n_per_class),
                                rng.uniform(1.0, 3.0, n_per_class)])
    D = kl_gaussian_matrix(means, variances)
    ids = [f"s{i}" for i in range(2 * n_per_class)]
    y = np.repeat([0, 1], n_per_class)
    return LabeledDataset(np.array(ids), y, ids=ids), PrecomputedMatrix(ids, D)

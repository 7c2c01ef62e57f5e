"""Model files.

A model file is a single JSON document::

    {
      "format": "askls-model", "version": 1,
      "method": "askls" | "lssvm",
      "classes": [...],            # classes[1] is +1 for binary models
      "kind": "binary" | "ovr",
      "merge": "avg" | "source" | "target",
      "kernel": {"family": ..., "sigma": ..., "a": ..., "preprocess": ...,
                 "matrix_source": path?, "matrix": {...}?, "graph": {...}?},
      "train": {"ids": [...], "samples": [[...], ...] | [id, ...]},
      "standardizer": {"mean": [...], "scale": [...]} | null,
      "models": [{"y": [...], "gamma": g, "b1", "b2", "alpha", "beta",
                  "residual", "rcond"}, ...]      # lssvm: "b", "alpha"
    }

Floats are written with ``repr`` precision, so loading reproduces
predictions bit for bit. SNE/T reference sets are the stored training
samples. Precomputed matrices and graphs are stored inline unless the kernel
refers to a ``matrix_source`` file, which is then re-read on load.
"""
import json

import numpy as np

from .data import Standardizer, load_edge_list
from .dualsolver import DualSolution, LsSvmSolution
from .errors import DataError
from .kernels import (DirectedGraph, KernelFamily, KernelSpec, PrecomputedMatrix,
                      load_matrix_csv)
from .model import AskLsModel, LsSvmModel
from .multiclass import BinaryClassifier, OvrModel

__all__ = ["save_model", "load_model", "dumps_model", "loads_model"]

FORMAT = "askls-model"
VERSION = 1


def _floats(a):
    return [float(v) for v in np.asarray(a, dtype=float).ravel()]


def _ids(a):
    return [v.item() if isinstance(v, np.generic) else v for v in np.asarray(a).tolist()]


def _kernel_to_dict(spec):
    d = spec.to_dict()
    d.pop("reference_set_id", None)
    if spec.matrix_source is None:
        if spec.matrix is not None:
            m = spec.matrix
            d["matrix"] = {"row_ids": list(map(str, m.row_ids)),
                           "col_ids": list(map(str, m.col_ids)),
                           "values": [_floats(r) for r in m.values]}
        if spec.graph is not None:
            d["graph"] = {"node_count": spec.graph.node_count,
                          "edges": [list(e) for e in spec.graph.edges]}
    return d


def _kernel_from_dict(d, train_samples):
    fam = KernelFamily(d["family"])
    source = d.get("matrix_source")
    if fam is KernelFamily.RBF:
        return KernelSpec.rbf(d["sigma"])
    if fam is KernelFamily.SNE:
        return KernelSpec.sne(d["sigma"], reference_set=train_samples)
    if fam is KernelFamily.T:
        return KernelSpec.t(reference_set=train_samples)
    if fam is KernelFamily.ADJACENCY:
        if "graph" in d:
            graph = DirectedGraph(d["graph"]["node_count"], tuple(map(tuple, d["graph"]["edges"])))
        else:
            graph = load_edge_list(source)
        return KernelSpec.adjacency(graph, d.get("preprocess", "indegree"), source=source)
    if "matrix" in d:
        m = d["matrix"]
        matrix = PrecomputedMatrix(m["row_ids"], np.array(m["values"], dtype=float), m["col_ids"])
    else:
        matrix = load_matrix_csv(source)
    if fam is KernelFamily.KL_EXP:
        return KernelSpec.kl_exp(matrix, d["a"], source=source)
    return KernelSpec.precomputed(matrix, source=source)


def _solution_to_dict(model):
    s = model.solution
    d = {"y": _floats(model.y), "gamma": float(s.gamma),
         "residual": float(s.residual), "rcond": float(s.rcond)}
    if isinstance(model, AskLsModel):
        d.update(b1=float(s.b1), b2=float(s.b2), alpha=_floats(s.alpha), beta=_floats(s.beta))
    else:
        d.update(b=float(s.b), alpha=_floats(s.alpha))
    return d


def dumps_model(clf, standardizer=None, config=None):
    models = clf.models
    first = models[0]
    method = "askls" if isinstance(first, AskLsModel) else "lssvm"
    train = first.train
    doc = {
        "format": FORMAT, "version": VERSION,
        "method": method,
        "kind": "binary" if isinstance(clf, BinaryClassifier) else "ovr",
        "classes": _ids(clf.classes),
        "merge": first.merge.value if method == "askls" else None,
        "kernel": _kernel_to_dict(first.spec),
        "train": {"samples": ([_floats(r) for r in train] if train.ndim == 2 else _ids(train))},
        "standardizer": None if standardizer is None else {
            "mean": _floats(standardizer.mean), "scale": _floats(standardizer.scale)},
        "models": [_solution_to_dict(m) for m in models],
    }
    if config is not None:
        doc["config"] = config
    return json.dumps(doc, indent=1, sort_keys=False)


def loads_model(text):
    doc = json.loads(text)
    if doc.get("format") != FORMAT:
        raise DataError("not an askls model file")
    if doc.get("version") != VERSION:
        raise DataError(f"unsupported model file version {doc.get('version')}")
    raw = doc["train"]["samples"]
    train = np.array(raw, dtype=float) if raw and isinstance(raw[0], list) else np.array(raw)
    spec = _kernel_from_dict(doc["kernel"], train if train.ndim == 2 else None)
    models = []
    for m in doc["models"]:
        y = np.array(m["y"], dtype=float)
        if doc["method"] == "askls":
            sol = DualSolution(m["b1"], m["b2"], np.array(m["alpha"]), np.array(m["beta"]),
                               m["gamma"], m["residual"], m["rcond"])
            models.append(AskLsModel(train, y, spec, sol, doc["merge"]))
        else:
            sol = LsSvmSolution(m["b"], np.array(m["alpha"]), m["gamma"], m["residual"], m["rcond"])
            models.append(LsSvmModel(train, y, spec, sol))
    classes = tuple(doc["classes"])
    if doc["kind"] == "binary":
        clf = BinaryClassifier(classes, models[0])
    else:
        clf = OvrModel(classes, tuple(models))
    st = doc.get("standardizer")
    standardizer = None if st is None else Standardizer(np.array(st["mean"]), np.array(st["scale"]))
    return clf, standardizer, doc.get("config")


def save_model(path, clf, standardizer=None, config=None):
    with open(path, "w") as fh:
        fh.write(dumps_model(clf, standardizer, config))


def load_model(path):
    """Return ``(classifier, standardizer_or_None, config_or_None)``."""
    with open(path) as fh:
        return loads_model(fh.read())

"""Dataset loading, splitting, standardization and cross-validation."""
import csv
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import AskLsError, ConfigError, DataError
from .kernels import DirectedGraph
from .model import MergeStrategy
from .multiclass import Method, accuracy, fit_classifier, micro_macro_f1

__all__ = [
    "LabeledDataset", "load_csv", "load_features", "write_csv", "load_labels", "split",
    "Standardizer", "standardize", "stratified_folds", "CvGrid", "CvResult",
    "cross_validate", "write_cv_csv", "load_edge_list",
]


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    """Feature vectors (2-D ``samples``) or node/sample ids (1-D) with labels."""

    samples: np.ndarray
    labels: np.ndarray
    ids: tuple = None
    feature_names: tuple = ()

    def __post_init__(self):
        samples = np.asarray(self.samples)
        labels = np.asarray(self.labels)
        if labels.ndim != 1 or labels.size == 0:
            raise DataError("labels must be a nonempty 1-D array")
        if samples.shape[0] != labels.size:
            raise DataError(f"{samples.shape[0]} samples but {labels.size} labels")
        ids = tuple(range(labels.size)) if self.ids is None else tuple(self.ids)
        if len(ids) != labels.size:
            raise DataError("one id per sample required")
        if len(set(map(str, ids))) != len(ids):
            raise DataError("sample ids must be unique")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "ids", ids)

    def __len__(self):
        return self.labels.size

    @property
    def feature_dim(self):
        return self.samples.shape[1] if self.samples.ndim == 2 else 0

    @property
    def classes(self):
        return tuple(np.unique(self.labels).tolist())

    def subset(self, index):
        index = np.asarray(index, dtype=int)
        return replace(self, samples=self.samples[index], labels=self.labels[index],
                       ids=tuple(self.ids[i] for i in index))


def _parse_label(text, where):
    try:
        value = float(text)
    except ValueError:
        raise DataError(f"{where}: label {text!r} is not numeric") from None
    if not value.is_integer():
        raise DataError(f"{where}: label {text!r} is not an integer")
    return int(value)


def load_csv(path, label_column):
    """Read a tabular CSV with a header row.

    ``label_column`` names the label column (a 0-based column index is also
    accepted). All other columns must be numeric features. Row order is kept.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        if label_column in header:
            li = header.index(label_column)
        elif str(label_column).isdigit() and int(label_column) < len(header):
            li = int(label_column)
        else:
            raise DataError(f"{path}: label column {label_column!r} not found")
        feats, labels = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise DataError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
            labels.append(_parse_label(row[li].strip(), f"{path}:{lineno}"))
            try:
                feats.append([float(c) for i, c in enumerate(row) if i != li])
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: non-numeric feature ({exc})") from None
    if not labels:
        raise DataError(f"{path}: no data rows")
    names = tuple(h for i, h in enumerate(header) if i != li)
    X = np.array(feats, dtype=float).reshape(len(labels), len(names))
    return LabeledDataset(X, np.array(labels), feature_names=names)


def load_features(path, label_column=None):
    """Feature matrix of a CSV that may or may not carry a label column.

    Returns ``(dataset_or_None, X)``; the dataset is only built when the
    label column is present.
    """
    with open(path, newline="") as fh:
        header = [h.strip() for h in next(csv.reader(fh), [])]
    if not header:
        raise DataError(f"{path}: empty file")
    if label_column is not None and label_column in header:
        ds = load_csv(path, label_column)
        return ds, ds.samples
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                rows.append([float(c) for c in row])
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: non-numeric feature ({exc})") from None
    if not rows:
        raise DataError(f"{path}: no data rows")
    return None, np.array(rows, dtype=float)


def write_csv(path, ds, label_column="label"):
    names = ds.feature_names or tuple(f"x{i}" for i in range(ds.feature_dim))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([*names, label_column])
        for x, lab in zip(ds.samples, ds.labels):
            w.writerow([*(repr(float(v)) for v in x), int(lab)])


def load_labels(path, id_type=str):
    """Read an ``id,label`` CSV (header row required) for transductive data.

    The returned dataset's samples are the ids themselves.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        ids, labels = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) < 2:
                raise DataError(f"{path}:{lineno}: expected 'id,label', got {row!r}")
            try:
                ids.append(id_type(row[0].strip()))
            except ValueError:
                raise DataError(f"{path}:{lineno}: bad id {row[0]!r}") from None
            labels.append(_parse_label(row[1].strip(), f"{path}:{lineno}"))
    if not ids:
        raise DataError(f"{path}: no data rows")
    return LabeledDataset(np.array(ids), np.array(labels), ids=ids)


def split(ds, train_fraction, seed):
    """Stratified random train/test split, deterministic in ``seed``.

    Every class keeps at least one sample on each side.
    """
    if not 0 < train_fraction < 1:
        raise ConfigError(f"train fraction must be in (0, 1), got {train_fraction}")
    rng = np.random.default_rng(seed)
    train_idx = []
    for c in np.unique(ds.labels):
        idx = np.flatnonzero(ds.labels == c)
        if idx.size < 2:
            raise DataError(f"class {c} has {idx.size} sample(s); cannot stratify")
        n_train = min(max(int(round(train_fraction * idx.size)), 1), idx.size - 1)
        train_idx.extend(rng.permutation(idx)[:n_train].tolist())
    mask = np.zeros(len(ds), dtype=bool)
    mask[train_idx] = True
    return ds.subset(np.flatnonzero(mask)), ds.subset(np.flatnonzero(~mask))


@dataclass(frozen=True)
class Standardizer:
    mean: np.ndarray
    scale: np.ndarray

    def transform(self, X):
        return (np.asarray(X, dtype=float) - self.mean) / self.scale

    def apply(self, ds):
        return replace(ds, samples=self.transform(ds.samples))


def standardize(train, test=None):
    """Zero-mean/unit-variance per feature, statistics from ``train`` only.

    Constant features are left unchanged.
    """
    if train.feature_dim == 0:
        raise DataError("standardize needs feature vectors")
    X = train.samples.astype(float)
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    const = std == 0
    t = Standardizer(np.where(const, 0.0, mean), np.where(const, 1.0, std))
    return t.apply(train), (None if test is None else t.apply(test)), t


def stratified_folds(labels, k, seed):
    """Fold number in ``0..k-1`` for every sample, stratified by class."""
    labels = np.asarray(labels)
    classes, counts = np.unique(labels, return_counts=True)
    if k < 2:
        raise ConfigError(f"need at least 2 folds, got {k}")
    if k > counts.min():
        raise DataError(
            f"{k} folds but class {classes[counts.argmin()]} has only {counts.min()} samples")
    rng = np.random.default_rng(seed)
    folds = np.empty(labels.size, dtype=int)
    offset = 0
    for c in classes:
        idx = rng.permutation(np.flatnonzero(labels == c))
        folds[idx] = (np.arange(idx.size) + offset) % k
        # rotate so leftover samples of successive classes land in different folds
        offset += idx.size
    return folds


@dataclass(frozen=True)
class CvGrid:
    gammas: tuple
    params: tuple = (None,)
    folds: int = 10
    seed: int = 0

    def __post_init__(self):
        gammas = tuple(float(g) for g in self.gammas)
        params = tuple(None if p is None else float(p) for p in self.params)
        if not gammas or not params:
            raise ConfigError("CV grid must be nonempty")
        if any(not g > 0 for g in gammas):
            raise ConfigError("gamma values must be positive")
        if self.folds < 2:
            raise ConfigError(f"need at least 2 folds, got {self.folds}")
        object.__setattr__(self, "gammas", gammas)
        object.__setattr__(self, "params", params)


@dataclass
class CvResult:
    best_gamma: float
    best_param: float
    best_score: float
    table: list = field(default_factory=list)  # (gamma, param, fold, score, error)

    def cell_means(self):
        cells = {}
        for gamma, param, _, score, _ in self.table:
            cells.setdefault((gamma, param), []).append(score)
        return {k: float(np.mean(v)) for k, v in cells.items()}


def _score(metric, pred, truth, classes):
    if metric == "accuracy":
        return accuracy(pred, truth)
    micro, macro = micro_macro_f1(pred, truth, classes)
    if metric == "micro_f1":
        return micro
    if metric == "macro_f1":
        return macro
    raise ConfigError(f"unknown metric {metric!r}")


def cross_validate(train, grid, spec_template, metric="accuracy",
                   method=Method.ASKLS, merge=MergeStrategy.AVERAGE):
    """Exhaustive grid search with stratified k-fold validation.

    Every (gamma, kernel parameter) cell is scored by its mean validation
    metric. A fold whose fit fails scores ``-inf`` and its error message is
    kept in the table. Ties go to the smaller gamma, then the smaller
    kernel parameter.
    """
    if grid.folds > len(train):
        raise ConfigError(f"{grid.folds} folds for {len(train)} samples")
    folds = stratified_folds(train.labels, grid.folds, grid.seed)
    classes = train.classes
    table = []
    for gamma in grid.gammas:
        for param in grid.params:
            spec = spec_template.with_param(param)
            for k in range(grid.folds):
                tr, va = train.subset(np.flatnonzero(folds != k)), train.subset(np.flatnonzero(folds == k))
                try:
                    clf = fit_classifier(tr.samples, tr.labels, spec, gamma, method, merge)
                    score = _score(metric, clf.predict(va.samples), va.labels, classes)
                    error = ""
                except AskLsError as exc:
                    score, error = -math.inf, f"{type(exc).__name__}: {exc}"
                table.append((gamma, param, k, score, error))
    means = CvResult(0.0, None, 0.0, table).cell_means()
    key = lambda cell: (-means[cell], cell[0], -math.inf if cell[1] is None else cell[1])
    best = min(means, key=key)
    return CvResult(best[0], best[1], means[best], table)


def write_cv_csv(path, result):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["gamma", "param", "fold", "score", "error"])
        for gamma, param, k, score, error in result.table:
            w.writerow([repr(gamma), "" if param is None else repr(param), k, repr(score), error])


def load_edge_list(path):
    """Read a directed edge list.

    One ``src dst`` pair per line (0-based ids, whitespace separated) adds
    the edge ``src -> dst``, i.e. sets ``A[dst, src] = 1``. A ``#nodes N``
    line fixes the node count; other ``#`` lines are comments. Without the
    directive the node count is one more than the largest id.
    """
    declared, edges = None, []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split()
                if parts and parts[0] == "nodes":
                    if len(parts) != 2 or not parts[1].isdigit():
                        raise DataError(f"{path}:{lineno}: malformed directive {line!r}")
                    declared = int(parts[1])
                continue
            parts = line.split()
            if len(parts) != 2 or not all(p.isdigit() for p in parts):
                raise DataError(f"{path}:{lineno}: malformed edge line {line!r}")
            edges.append((int(parts[0]), int(parts[1]), lineno))
    if declared is None:
        declared = 1 + max((max(s, d) for s, d, _ in edges), default=-1)
    for s, d, lineno in edges:
        if s >= declared or d >= declared:
            raise DataError(f"{path}:{lineno}: node id out of range for {declared} nodes")
    return DirectedGraph(declared, tuple((s, d) for s, d, _ in edges))

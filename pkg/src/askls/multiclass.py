"""One-vs-rest reduction and classification metrics."""
import csv
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import AskLsError, DataError, DimensionMismatch
from .model import MergeStrategy, fit, fit_lssvm

__all__ = [
    "Method", "OvrModel", "BinaryClassifier", "fit_ovr", "predict_ovr",
    "fit_classifier", "confusion_counts", "micro_macro_f1", "accuracy",
    "TrialResult", "EvalReport", "evaluate", "format_table", "write_report_csv",
]


class Method(str, Enum):
    ASKLS = "askls"
    LSSVM = "lssvm"


def _fit_binary(train, y, spec, gamma, method, merge):
    if Method(method) is Method.ASKLS:
        return fit(train, y, spec, gamma, merge)
    return fit_lssvm(train, y, spec, gamma)


@dataclass(frozen=True, eq=False)
class OvrModel:
    """One binary model per class: that class is +1, all others -1."""

    classes: tuple
    models: tuple

    def decision_matrix(self, test):
        return np.column_stack([m.decision_function(test) for m in self.models])

    def predict(self, test):
        # argmax returns the first maximum, i.e. ties go to the lowest class index
        idx = np.argmax(self.decision_matrix(test), axis=1)
        return np.asarray(self.classes)[idx]


@dataclass(frozen=True, eq=False)
class BinaryClassifier:
    """A single binary model; ``classes[1]`` is the +1 class."""

    classes: tuple
    model: object

    @property
    def models(self):
        return (self.model,)

    def predict(self, test):
        pos = self.model.predict(test) > 0
        return np.where(pos, self.classes[1], self.classes[0])


def fit_ovr(train, labels, spec, gamma, method=Method.ASKLS, merge=MergeStrategy.AVERAGE):
    labels = np.asarray(labels)
    classes = tuple(np.unique(labels).tolist())
    if len(classes) < 2:
        raise DataError(f"one-vs-rest needs at least 2 classes, got {len(classes)}")
    models = []
    for c in classes:
        y = np.where(labels == c, 1.0, -1.0)
        models.append(_fit_binary(train, y, spec, gamma, method, merge))
    return OvrModel(classes, tuple(models))


def predict_ovr(ovr, test):
    return ovr.predict(test)


def fit_classifier(train, labels, spec, gamma, method=Method.ASKLS,
                   merge=MergeStrategy.AVERAGE):
    """Binary model for two classes, one-vs-rest otherwise."""
    labels = np.asarray(labels)
    classes = tuple(np.unique(labels).tolist())
    if len(classes) == 2:
        y = np.where(labels == classes[1], 1.0, -1.0)
        return BinaryClassifier(classes, _fit_binary(train, y, spec, gamma, method, merge))
    return fit_ovr(train, labels, spec, gamma, method, merge)


# --- metrics ----------------------------------------------------------------

def confusion_counts(pred, truth, classes=None):
    """Per-class (tp, fp, fn) arrays and the class list they refer to."""
    pred, truth = np.asarray(pred), np.asarray(truth)
    if pred.shape != truth.shape:
        raise DimensionMismatch(f"{pred.size} predictions for {truth.size} labels")
    if pred.size == 0:
        raise DataError("cannot score an empty prediction")
    if classes is None:
        classes = np.unique(np.concatenate([pred, truth]))
    classes = list(classes)
    tp = np.array([np.sum((pred == c) & (truth == c)) for c in classes], dtype=float)
    fp = np.array([np.sum((pred == c) & (truth != c)) for c in classes], dtype=float)
    fn = np.array([np.sum((pred != c) & (truth == c)) for c in classes], dtype=float)
    return tp, fp, fn, classes


def _f1(tp, fp, fn):
    den = 2 * tp + fp + fn
    return np.divide(2 * tp, den, out=np.zeros_like(tp), where=den > 0)


def micro_macro_f1(pred, truth, classes=None):
    """Micro-F1 from pooled counts and macro-F1 as the mean per-class F1.

    Classes are those passed in ``classes`` (e.g. the model's class list) or,
    by default, every label seen in ``pred`` or ``truth``. A class with no
    predicted and no true members scores F1 = 0.
    """
    tp, fp, fn, _ = confusion_counts(pred, truth, classes)
    micro = float(_f1(np.array([tp.sum()]), np.array([fp.sum()]), np.array([fn.sum()]))[0])
    macro = float(np.mean(_f1(tp, fp, fn)))
    return micro, macro


def accuracy(pred, truth):
    pred, truth = np.asarray(pred), np.asarray(truth)
    if pred.shape != truth.shape:
        raise DimensionMismatch(f"{pred.size} predictions for {truth.size} labels")
    return float(np.mean(pred == truth))


@dataclass
class TrialResult:
    micro_f1: float
    macro_f1: float
    accuracy: float
    precision: dict = field(default_factory=dict)
    recall: dict = field(default_factory=dict)


def evaluate(pred, truth, classes=None):
    """Score one trial; checks that micro-F1 equals accuracy."""
    tp, fp, fn, classes = confusion_counts(pred, truth, classes)
    micro, macro = micro_macro_f1(pred, truth, classes)
    acc = accuracy(pred, truth)
    if set(np.unique(pred)) <= set(classes) and abs(micro - acc) > 1e-12:
        raise AskLsError(f"micro-F1 {micro} differs from accuracy {acc}")
    prec = np.divide(tp, tp + fp, out=np.zeros_like(tp), where=(tp + fp) > 0)
    rec = np.divide(tp, tp + fn, out=np.zeros_like(tp), where=(tp + fn) > 0)
    return TrialResult(micro, macro, acc,
                       dict(zip(classes, prec.tolist())), dict(zip(classes, rec.tolist())))


@dataclass
class EvalReport:
    """Metrics of one method over repeated trials."""

    name: str
    trials: list = field(default_factory=list)

    def add(self, result):
        self.trials.append(result)

    def _values(self, metric):
        return np.array([getattr(t, metric) for t in self.trials], dtype=float)

    def mean(self, metric):
        return float(np.mean(self._values(metric)))

    def std(self, metric):
        return float(np.std(self._values(metric)))

    @property
    def micro_f1(self):
        return self.mean("micro_f1")

    @property
    def macro_f1(self):
        return self.mean("macro_f1")

    @property
    def accuracy(self):
        return self.mean("accuracy")

    def cell(self, metric, digits=3):
        return f"{self.mean(metric):.{digits}f}±{self.std(metric):.{digits}f}"


METRICS = (("micro_f1", "Micro-F1"), ("macro_f1", "Macro-F1"), ("accuracy", "Accuracy"))


def format_table(reports, metrics=METRICS, digits=3):
    """Aligned text table with one column per report, cells as mean±std."""
    header = ["Metric", *(r.name for r in reports)]
    rows = [[label, *(r.cell(key, digits) for r in reports)] for key, label in metrics]
    widths = [max(len(str(row[i])) for row in [header, *rows]) for i in range(len(header))]
    line = lambda row: "  ".join(str(c).ljust(w) for c, w in zip(row, widths)).rstrip()
    rule = "-" * len(line(header))
    return "\n".join([rule, line(header), rule, *map(line, rows), rule]) + "\n"


def write_report_csv(path, reports):
    """One row per (method, trial) plus ``mean`` and ``std`` summary rows."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["method", "trial", "micro_f1", "macro_f1", "accuracy"])
        for r in reports:
            for i, t in enumerate(r.trials):
                w.writerow([r.name, i, repr(t.micro_f1), repr(t.macro_f1), repr(t.accuracy)])
            for stat in ("mean", "std"):
                f = getattr(r, stat)
                w.writerow([r.name, stat, *(repr(f(k)) for k, _ in METRICS)])

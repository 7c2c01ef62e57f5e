"""Binary classifiers built on the dual solvers.

:func:`fit` trains the asymmetric-kernel LS-SVM and yields two
discriminants, evaluated with the test point in either kernel argument::

    f_s(x) = sum_j K(x, x_j) beta_j y_j + b1     (source view)
    f_t(x) = sum_j K(x_j, x) alpha_j y_j + b2    (target view)

which are merged into one decision value (score averaging by default).
:func:`fit_lssvm` is the classical LS-SVM baseline for symmetric kernels.
"""
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .dualsolver import DualSolution, LsSvmSolution, solve_askls, solve_lssvm
from .kernels import build_gram

__all__ = [
    "MergeStrategy", "DecisionScores", "AskLsModel", "LsSvmModel",
    "fit", "fit_lssvm", "decision_scores", "predict", "sign_labels",
]


class MergeStrategy(str, Enum):
    AVERAGE = "avg"
    SOURCE = "source"
    TARGET = "target"


def sign_labels(f):
    """Map decision values to +/-1 with ``sign(0) = +1``."""
    return np.where(np.asarray(f) >= 0, 1, -1)


def merge_scores(f_s, f_t, merge):
    merge = MergeStrategy(merge)
    if merge is MergeStrategy.AVERAGE:
        return (f_s + f_t) / 2.0
    if merge is MergeStrategy.SOURCE:
        return f_s.copy()
    return f_t.copy()


@dataclass(frozen=True, eq=False)
class DecisionScores:
    f_s: np.ndarray
    f_t: np.ndarray
    f_merged: np.ndarray

    @property
    def labels(self):
        return sign_labels(self.f_merged)


def _frozen(a):
    a = np.array(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class AskLsModel:
    """Fitted asymmetric-kernel LS-SVM. Immutable once built.

    ``train`` holds the training samples (2-D array) or ids (1-D) and
    ``spec`` is the kernel spec with any SNE/T reference set bound to them.
    """

    train: np.ndarray
    y: np.ndarray
    spec: object
    solution: DualSolution
    merge: MergeStrategy = MergeStrategy.AVERAGE

    def __post_init__(self):
        object.__setattr__(self, "train", _frozen(self.train))
        object.__setattr__(self, "y", _frozen(self.y))
        object.__setattr__(self, "merge", MergeStrategy(self.merge))

    @property
    def gamma(self):
        return self.solution.gamma

    def decision_scores(self, test):
        sol = self.solution
        # source view: test point in the first kernel argument
        K_row = build_gram(self.spec, test, self.train).values
        # target view: test point in the second kernel argument
        K_col = build_gram(self.spec, self.train, test).values
        f_s = K_row @ (sol.beta * self.y) + sol.b1
        f_t = K_col.T @ (sol.alpha * self.y) + sol.b2
        return DecisionScores(f_s, f_t, merge_scores(f_s, f_t, self.merge))

    def decision_function(self, test):
        return self.decision_scores(test).f_merged

    def predict(self, test):
        return sign_labels(self.decision_function(test))


@dataclass(frozen=True, eq=False)
class LsSvmModel:
    """Fitted classical LS-SVM, ``f(x) = sum_j K(x, x_j) alpha_j y_j + b``."""

    train: np.ndarray
    y: np.ndarray
    spec: object
    solution: LsSvmSolution

    def __post_init__(self):
        object.__setattr__(self, "train", _frozen(self.train))
        object.__setattr__(self, "y", _frozen(self.y))

    @property
    def gamma(self):
        return self.solution.gamma

    def decision_scores(self, test):
        K_row = build_gram(self.spec, test, self.train).values
        f = K_row @ (self.solution.alpha * self.y) + self.solution.b
        return DecisionScores(f, f.copy(), f.copy())

    def decision_function(self, test):
        return self.decision_scores(test).f_merged

    def predict(self, test):
        return sign_labels(self.decision_function(test))


def fit(train, y, spec, gamma, merge=MergeStrategy.AVERAGE):
    """Fit the asymmetric-kernel LS-SVM on samples ``train`` with +/-1 labels ``y``."""
    train = np.asarray(train)
    spec = spec.bind_reference(train) if spec.uses_vectors else spec
    K = build_gram(spec, train, train)
    sol = solve_askls(K, y, gamma)
    return AskLsModel(train, np.asarray(y, dtype=float), spec, sol, merge)


def fit_lssvm(train, y, spec, gamma):
    train = np.asarray(train)
    spec = spec.bind_reference(train) if spec.uses_vectors else spec
    K = build_gram(spec, train, train)
    sol = solve_lssvm(K, y, gamma)
    return LsSvmModel(train, np.asarray(y, dtype=float), spec, sol)


def decision_scores(model, test):
    return model.decision_scores(test)


def predict(model, test):
    return model.predict(test)

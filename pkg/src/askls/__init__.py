"""Least-squares SVM classification with asymmetric kernels."""
from .dualsolver import (DualSolution, LsSvmSolution, build_h, solve_askls,
                         solve_lssvm, transpose_swap_check)
from .errors import (AskLsError, AsymmetricInput, ConfigError, DataError,
                     KernelError, NumericalError, SingleClassLabels, SingularSystem)
from .kernels import (DirectedGraph, GramBlock, KernelFamily, KernelSpec,
                      PrecomputedMatrix, Preprocess, SymmetrizeMode,
                      adjacency_kernel, build_gram, kl_exp_kernel, kl_gaussian_matrix,
                      rbf_gram, sne_gram, symmetrize, t_gram)
from .model import (AskLsModel, DecisionScores, LsSvmModel, MergeStrategy,
                    decision_scores, fit, fit_lssvm, predict)
from .multiclass import (EvalReport, OvrModel, accuracy, evaluate, fit_classifier,
                         fit_ovr, micro_macro_f1, predict_ovr)

__version__ = "0.1.0"

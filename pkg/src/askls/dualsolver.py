"""Dual linear systems of the asymmetric-kernel and classical LS-SVM.

For labels ``y`` and a (possibly asymmetric) kernel matrix ``K`` with
``H[i, j] = y_i K[i, j] y_j``, the asymmetric-kernel LS-SVM dual is the
``(2m+2)``-dimensional system::

    [ 0  0  y^T   0   ] [b1]   [0]
    [ 0  0  0     y^T ] [b2] = [0]
    [ y  0  I/g   H   ] [a ]   [1]
    [ 0  y  H^T   I/g ] [be]   [1]

The classical LS-SVM dual is the ``(m+1)`` system
``[[0, y^T], [y, I/g + H]] [b; a] = [0; 1]``.

Both are solved with a dense LU factorization with partial pivoting.

The asymmetric system is factorized in sum/difference coordinates
``c = b1 + b2``, ``e = b1 - b2``, ``s = alpha + beta``, ``d = alpha - beta``
(an orthogonal change of variables, so conditioning is unchanged)::

    [ 0  0  y^T        0         ] [c]   [0]
    [ 0  0  0          y^T       ] [e] = [0]
    [ y  0  I/g + S    -N        ] [s]   [2]
    [ 0  y  N          I/g - S   ] [d]   [0]

with ``S = (H + H^T)/2`` and ``N = (H - H^T)/2``. For a symmetric kernel
``N`` is exactly zero, the difference block has a zero right-hand side and
``alpha = beta``, ``b1 = b2`` hold to the last bit instead of up to
rounding amplified by ``I/g - S``. Residuals are always measured on the
system in its original ``(b1, b2, alpha, beta)`` form.
"""
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.linalg import lapack

from .errors import (AsymmetricInput, DimensionMismatch, ResidualTooLarge,
                     SingleClassLabels, SingularSystem)
from .kernels import GramBlock

__all__ = [
    "RESIDUAL_TOL", "HMatrix", "DualSolution", "LsSvmSolution",
    "check_labels", "build_h", "assemble_askls_system", "assemble_lssvm_system",
    "solve_askls", "solve_lssvm", "kkt_residuals", "transpose_swap_check",
]

RESIDUAL_TOL = 1e-10
# reciprocal condition numbers below this are treated as singular
RCOND_MIN = np.finfo(float).eps


def _values(K):
    return K.values if isinstance(K, GramBlock) else np.asarray(K, dtype=float)


def check_labels(y):
    """Validate a +/-1 label vector with both classes present."""
    y = np.asarray(y, dtype=float).ravel()
    if y.size < 2:
        raise SingleClassLabels(f"need at least 2 samples, got {y.size}")
    if not np.all((y == 1.0) | (y == -1.0)):
        raise SingleClassLabels("labels must be +1 or -1")
    if np.all(y == y[0]):
        raise SingleClassLabels("both classes must be present in the labels")
    return y


@dataclass(frozen=True, eq=False)
class HMatrix:
    """Label-conjugated kernel ``H = diag(y) K diag(y)`` and its sources."""

    values: np.ndarray
    kernel: GramBlock
    y: np.ndarray

    def is_symmetric(self, tol=1e-10):
        return bool(np.max(np.abs(self.values - self.values.T), initial=0.0) <= tol)


def build_h(K, y):
    if not isinstance(K, GramBlock):
        K = GramBlock(K)
    y = np.asarray(y, dtype=float).ravel()
    if not K.is_square:
        raise DimensionMismatch(f"kernel matrix must be square, got {K.shape}")
    if K.rows != y.size:
        raise DimensionMismatch(f"kernel is {K.rows}x{K.cols} but there are {y.size} labels")
    return HMatrix(y[:, None] * K.values * y[None, :], K, y)


def assemble_askls_system(H, y, gamma):
    """System matrix and right-hand side, unknowns ordered (b1, b2, alpha, beta)."""
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma!r}")
    Hv = H.values if isinstance(H, HMatrix) else np.asarray(H, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    m = y.size
    if Hv.shape != (m, m):
        raise DimensionMismatch(f"H has shape {Hv.shape}, expected {(m, m)}")
    n = 2 * m + 2
    A = np.zeros((n, n))
    a, b = slice(2, m + 2), slice(m + 2, n)
    A[0, a] = y
    A[1, b] = y
    A[a, 0] = y
    A[b, 1] = y
    A[a, a] = np.eye(m) / gamma
    A[a, b] = Hv
    A[b, a] = Hv.T
    A[b, b] = np.eye(m) / gamma
    rhs = np.concatenate([[0.0, 0.0], np.ones(2 * m)])
    return A, rhs


def assemble_lssvm_system(H, y, gamma):
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma!r}")
    Hv = H.values if isinstance(H, HMatrix) else np.asarray(H, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    m = y.size
    A = np.zeros((m + 1, m + 1))
    A[0, 1:] = y
    A[1:, 0] = y
    A[1:, 1:] = np.eye(m) / gamma + Hv
    rhs = np.concatenate([[0.0], np.ones(m)])
    return A, rhs


def _split_system(H, y, gamma):
    """The asymmetric dual in (b1+b2, b1-b2, alpha+beta, alpha-beta) unknowns."""
    Hv = H.values if isinstance(H, HMatrix) else np.asarray(H, dtype=float)
    m = y.size
    S = (Hv + Hv.T) / 2.0
    N = (Hv - Hv.T) / 2.0
    n = 2 * m + 2
    A = np.zeros((n, n))
    p, q = slice(2, m + 2), slice(m + 2, n)
    A[0, p] = y
    A[1, q] = y
    A[p, 0] = y
    A[q, 1] = y
    A[p, p] = np.eye(m) / gamma + S
    A[p, q] = -N
    A[q, p] = N
    A[q, q] = np.eye(m) / gamma - S
    rhs = np.concatenate([[0.0, 0.0], np.full(m, 2.0), np.zeros(m)])
    return A, rhs


def _dense_solve(A, rhs, check=None):
    """LU solve with a condition check and a residual check.

    ``check`` optionally maps the solution to ``(A0, x0, rhs0)``, the system
    the residual is measured on. Returns ``(x, relative_residual, rcond)``.
    """
    with warnings.catch_warnings():
        # exact zero pivots are reported below as SingularSystem
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(A, check_finite=True)
    anorm = np.linalg.norm(A, 1)
    if np.any(np.diag(lu) == 0.0):
        rcond = 0.0
    else:
        rcond, info = lapack.dgecon(lu, anorm, norm="1")
    if not rcond > RCOND_MIN:
        raise SingularSystem(
            f"dual system is singular (reciprocal condition estimate {rcond:.3g})", rcond)
    x = scipy.linalg.lu_solve((lu, piv), rhs)
    A0, x0, rhs0 = (A, x, rhs) if check is None else check(x)
    residual = float(np.linalg.norm(A0 @ x0 - rhs0) / np.linalg.norm(rhs0))
    if residual > RESIDUAL_TOL:
        raise ResidualTooLarge(
            f"relative residual {residual:.3g} exceeds {RESIDUAL_TOL:g} "
            f"(reciprocal condition estimate {rcond:.3g})", residual)
    return x, residual, float(rcond)


@dataclass(frozen=True, eq=False)
class DualSolution:
    """Solution ``(b1, b2, alpha, beta)`` of the asymmetric dual system.

    ``alpha`` weights the source-side constraints (errors ``e = alpha/gamma``),
    ``beta`` the target-side ones (``h = beta/gamma``).
    """

    b1: float
    b2: float
    alpha: np.ndarray
    beta: np.ndarray
    gamma: float
    residual: float
    rcond: float = float("nan")

    def swapped(self):
        """The solution of the transposed-kernel problem."""
        return DualSolution(self.b2, self.b1, self.beta, self.alpha,
                            self.gamma, self.residual, self.rcond)


@dataclass(frozen=True, eq=False)
class LsSvmSolution:
    b: float
    alpha: np.ndarray
    gamma: float
    residual: float
    rcond: float = float("nan")


def solve_askls(K, y, gamma):
    """Solve the asymmetric-kernel LS-SVM dual for a square kernel matrix.

    Parameters
    ----------
    K : GramBlock or array, shape (m, m)
        Training kernel matrix, ``K[i, j] = K(x_i, x_j)``.
    y : array, shape (m,)
        Labels in {+1, -1}; both classes must be present.
    gamma : float
        Regularization constant, > 0.

    Returns
    -------
    DualSolution

    Raises
    ------
    SingularSystem
        If the system matrix is numerically singular.
    ResidualTooLarge
        If the computed solution misses the relative residual tolerance.
    """
    y = check_labels(y)
    H = build_h(K, y)
    A, rhs = assemble_askls_system(H, y, gamma)
    m = y.size

    def unsplit(z):
        c, e, s, d = z[0], z[1], z[2:m + 2], z[m + 2:]
        return np.concatenate([[(c + e) / 2.0, (c - e) / 2.0], (s + d) / 2.0, (s - d) / 2.0])

    As, rhs_s = _split_system(H, y, gamma)
    z, residual, rcond = _dense_solve(As, rhs_s, check=lambda z: (A, unsplit(z), rhs))
    x = unsplit(z)
    return DualSolution(
        b1=float(x[0]), b2=float(x[1]),
        alpha=x[2:m + 2].copy(), beta=x[m + 2:].copy(),
        gamma=float(gamma), residual=residual, rcond=rcond)


def solve_lssvm(K, y, gamma, sym_tol=1e-10):
    """Solve the classical LS-SVM dual; ``K`` must be symmetric."""
    y = check_labels(y)
    H = build_h(K, y)
    if not H.kernel.is_symmetric(sym_tol):
        raise AsymmetricInput(
            "classical LS-SVM needs a symmetric kernel; symmetrize it explicitly")
    A, rhs = assemble_lssvm_system(H, y, gamma)
    x, residual, rcond = _dense_solve(A, rhs)
    return LsSvmSolution(b=float(x[0]), alpha=x[1:].copy(), gamma=float(gamma),
                         residual=residual, rcond=rcond)


def kkt_residuals(K, y, sol):
    """Stationarity residuals of the source and target constraint rows.

    ``r_s[i] = 1 - alpha_i/g - y_i b1 - y_i sum_j beta_j y_j K[i, j]``
    ``r_t[i] = 1 - beta_i/g - y_i b2 - y_i sum_j alpha_j y_j K[j, i]``
    """
    Kv = _values(K)
    y = np.asarray(y, dtype=float).ravel()
    g = sol.gamma
    r_s = 1.0 - sol.alpha / g - y * sol.b1 - y * (Kv @ (sol.beta * y))
    r_t = 1.0 - sol.beta / g - y * sol.b2 - y * (Kv.T @ (sol.alpha * y))
    return r_s, r_t


def transpose_swap_check(K, y, gamma, tol=1e-8):
    """True if solving on ``K^T`` swaps (b1, alpha) with (b2, beta)."""
    Kv = _values(K)
    s = solve_askls(Kv, y, gamma)
    t = solve_askls(Kv.T.copy(), y, gamma)
    return bool(
        abs(t.b1 - s.b2) <= tol and abs(t.b2 - s.b1) <= tol
        and np.max(np.abs(t.alpha - s.beta)) <= tol
        and np.max(np.abs(t.beta - s.alpha)) <= tol)

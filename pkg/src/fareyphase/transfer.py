"""Truncated transfer matrix of the interval map and its leading eigenvalue.

The operator acts on Taylor coefficients about x = 1.  Row i, column j of
the stored matrix is the coefficient of u^j in

    2^(-a) (1 - u/2)^(-a) (1 + (1-u)^i),      a = 2*beta + i,

which is the closed form of the defining double-binomial expression (the
alternating signs fold into the binomial identities).  The compiled kernel
evaluates it through stable product recurrences with dynamic base-2
rescaling; `_reference_entry` keeps the literal double sum as a slow
cross-check and as the fallback for beta < 0, where the recurrence seeds
can hit zero denominators.

Two independent eigenvalue routes are exposed: power iteration on the
transposed matrix, and the ratio of consecutive per-depth partition sums.
Agreement of the two is the main correctness oracle for both.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ConvergenceError
from .partition import knauf_profile

MAX_DIM = 4096


def gen_binomial(a: float, b: int) -> float:
    """Generalized binomial coefficient: product form, C(a, b) = 0 for b < 0."""
    if b < 0:
        return 0.0
    out = 1.0
    for i in range(b):
        out *= (a - i) / (i + 1)
    return out


@dataclass(frozen=True)
class TransferMatrix:
    beta: float
    dim: int
    entries: np.ndarray  # (dim, dim), row i column j


@dataclass(frozen=True)
class SpectralResult:
    beta: float
    dim: int
    lambda_: float
    eigvec: np.ndarray  # Taylor coefficients a_m, unit norm, a_0 > 0
    residual: float
    iterations: int
    truncation_uncertainty: float | None = None


def _reference_entry(beta: float, i: int, j: int) -> float:
    # literal double-binomial form; numerically naive on purpose
    a = -2.0 * beta - i
    bracket = gen_binomial(a, j)
    for s in range(min(i, j) + 1):
        bracket += 2.0 ** s * gen_binomial(float(i), s) * gen_binomial(a, j - s)
    return (-1.0) ** j * 2.0 ** (-2.0 * beta - i - j) * bracket


def build_matrix(beta: float, M: int) -> TransferMatrix:
    """Dense M x M truncation of the coefficient-space operator."""
    if not 2 <= M <= MAX_DIM:
        raise ValueError(f"truncation dimension must be in [2, {MAX_DIM}], got {M}")
    beta = float(beta)
    if beta >= 0.0:
        entries = _kernels.transfer_matrix_entries(beta, M)
    else:
        entries = np.empty((M, M))
        for i in range(M):
            for j in range(M):
                entries[i, j] = _reference_entry(beta, i, j)
    return TransferMatrix(beta, M, entries)


def leading_eigen(
    matrix: TransferMatrix, tol: float = 1e-10, max_iter: int = 100_000
) -> SpectralResult:
    """Leading eigenvalue and eigenvector of the transposed matrix by power
    iteration from a uniform positive start.

    lambda is the Rayleigh quotient; convergence means the residual
    ||A^T v - lambda v|| on the unit-norm iterate fell below tol.
    """
    beta = matrix.beta
    if not 0.0 < beta < 1.0:
        raise ValueError(f"spectral range is 0 < beta < 1, got {beta}")
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    ent = matrix.entries
    m = matrix.dim
    v = np.full(m, 1.0 / math.sqrt(m))
    residual = math.inf
    for it in range(1, max_iter + 1):
        w = v @ ent  # (A^T v)_j = sum_i v_i A_ij
        lam = float(v @ w)
        residual = float(np.linalg.norm(w - lam * v))
        if residual <= tol:
            if v[0] < 0.0:
                v = -v
            return SpectralResult(beta, m, lam, v, residual, it)
        norm_w = float(np.linalg.norm(w))
        if norm_w == 0.0 or not math.isfinite(norm_w):
            raise ConvergenceError(
                f"iterate degenerated at step {it} (norm {norm_w})", residual
            )
        v = w / norm_w
    raise ConvergenceError(
        f"power iteration did not reach tol={tol} within {max_iter} steps "
        f"(beta={beta}, M={m})",
        residual,
    )


def eigen_with_uncertainty(
    beta: float, M: int, tol: float = 1e-10, max_iter: int = 100_000
) -> SpectralResult:
    """leading_eigen at M plus a truncation-uncertainty estimate
    |lambda(M) - lambda(M/2)| attached to the result."""
    res = leading_eigen(build_matrix(beta, M), tol, max_iter)
    if M < 4:
        return res
    half = leading_eigen(build_matrix(beta, M // 2), tol, max_iter)
    return dataclasses.replace(
        res, truncation_uncertainty=abs(res.lambda_ - half.lambda_)
    )


def lambda_from_ratio(beta: float, k: int, threads: int = 1) -> float:
    """Ratio of consecutive per-depth partition sums at exponent 2*beta —
    the matrix-free eigenvalue estimate.

    beta = 0 is allowed as a counting diagnostic (the ratio is exactly 2).
    """
    if not 0.0 <= beta < 1.0:
        raise ValueError(f"ratio route needs 0 <= beta < 1, got {beta}")
    if k < 3:
        raise ValueError(f"ratio route needs k >= 3, got {k}")
    prof = knauf_profile(k, 2.0 * beta, threads)
    return float(prof[k] / prof[k - 1])


def iterate_functional(
    beta: float, M: int, steps: int, start: np.ndarray
) -> np.ndarray:
    """Trajectory of repeated transposed-matrix applications, row 0 = start.

    Iterates are deliberately left unnormalized so successive norm ratios
    estimate the leading eigenvalue; see norm_ratios.
    """
    if not 0.0 < beta < 1.0:
        raise ValueError(f"spectral range is 0 < beta < 1, got {beta}")
    if steps < 0:
        raise ValueError("steps must be >= 0")
    start = np.asarray(start, dtype=np.float64)
    if start.ndim != 1 or start.shape[0] != M:
        raise ValueError(f"start vector must have length M={M}")
    if start.min() < 0.0 or not start.any():
        raise ValueError("start must be nonnegative and not identically zero")
    ent = build_matrix(beta, M).entries
    traj = np.empty((steps + 1, M))
    traj[0] = start
    v = start.copy()
    for i in range(1, steps + 1):
        v = v @ ent
        traj[i] = v
    return traj


def norm_ratios(trajectory: np.ndarray) -> np.ndarray:
    """Per-step L2 norm ratios of an iterate trajectory."""
    norms = np.linalg.norm(trajectory, axis=1)
    return norms[1:] / norms[:-1]


def eigenfunction_eval(result: SpectralResult, x: float) -> float:
    """Evaluate the truncated Taylor series sum a_m (1-x)^m at x in [0,1]."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"eigenfunction domain is [0, 1], got {x}")
    u = 1.0 - x
    acc = 0.0
    for a in result.eigvec[::-1]:
        acc = acc * u + a
    return float(acc)


def fixed_point_residual(result: SpectralResult, xs) -> float:
    """Max relative defect of the eigen equation
    lambda phi(x) = (1+x)^(-2 beta) [phi(x/(1+x)) + phi(1/(1+x))]
    over the sample points."""
    lam = result.lambda_
    tb = 2.0 * result.beta
    worst = 0.0
    for x in xs:
        lhs = lam * eigenfunction_eval(result, x)
        rhs = (1.0 + x) ** -tb * (
            eigenfunction_eval(result, x / (1.0 + x))
            + eigenfunction_eval(result, 1.0 / (1.0 + x))
        )
        worst = max(worst, abs(lhs - rhs) / abs(lhs))
    return worst

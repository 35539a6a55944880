"""Orthonormal polynomials on the real line.

Recurrence coefficients from a measure (Stieltjes procedure), evaluation,
the Christoffel-Darboux kernel, Gaussian quadrature nodes/weights, the
zero-counting and CD measures, rank-one perturbed spectral measures, and
the real Prufer phase.

Conventions: the three-term recurrence is
``a_{n+1} p_{n+1}(x) = (x - b_{n+1}) p_n(x) - a_n p_{n-1}(x)`` with
``p_0 = 1`` and positive leading coefficients ``kappa_n = 1/(a_1...a_n)``,
so ``a_n = kappa_{n-1}/kappa_n``.  The length-m coefficient record stores
``b_1..b_m`` and ``a_1..a_{m-1}``; its leading n-by-n block has the zeros
of p_n as eigenvalues.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import ConvergenceError, SpecError
from .measures import (
    AtomicMeasure,
    MeasureSpec,
    is_circle,
    quadrature_rule,
    require_degree,
)
from .numerics import TridiagonalSymmetric, symtridiag_eigen, unwrap_phase_adaptive

__all__ = [
    "JacobiData",
    "PolyValues",
    "jacobi_from_measure",
    "eval_orthonormal",
    "eval_table",
    "cd_kernel_diag",
    "zeros_and_weights",
    "zero_counting_moment",
    "zero_counting_moment_trace",
    "cd_measure_moment",
    "perturbed_spectral_measure",
    "real_prufer_phase",
]


@dataclass(frozen=True, eq=False)
class JacobiData:
    """Recurrence coefficients b_1..b_m (diagonal) and a_1..a_{m-1} > 0."""

    b: np.ndarray
    a: np.ndarray

    def __post_init__(self):
        b = np.atleast_1d(np.asarray(self.b, dtype=float))
        a = np.asarray(self.a, dtype=float)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "a", a)
        if len(a) != max(len(b) - 1, 0):
            raise ValueError("need exactly one fewer off-diagonal than diagonal entries")
        if len(a) and not np.all(a > 0):
            raise ValueError("off-diagonal coefficients must be strictly positive")

    @property
    def m(self) -> int:
        return len(self.b)

    def block(self, n: int) -> TridiagonalSymmetric:
        """Leading n-by-n block of the Jacobi matrix."""
        if not 1 <= n <= self.m:
            raise ValueError(f"block size {n} outside 1..{self.m}")
        return TridiagonalSymmetric(diag=self.b[:n], offdiag=self.a[: n - 1])

    def kappas(self, n: int) -> np.ndarray:
        """Leading coefficients kappa_0..kappa_n = 1/(a_1...a_j)."""
        if n > self.m - 1:
            raise ValueError(f"kappa_{n} needs a_1..a_{n}, only {self.m - 1} stored")
        return np.concatenate(([1.0], 1.0 / np.cumprod(self.a[:n])))


@dataclass(frozen=True, eq=False)
class PolyValues:
    """Orthonormal polynomial values p_0(x)..p_n(x) at a single point."""

    x: float
    values: np.ndarray
    kappas: np.ndarray


def eval_table(j: JacobiData, x, n: int) -> np.ndarray:
    """Values p_0..p_n on an array of points; shape (n+1, len(x))."""
    if n > j.m - 1 and n != 0:
        raise ValueError(f"p_{n} needs coefficients through index {n}, have {j.m}")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    table = np.empty((n + 1, len(x)))
    table[0] = 1.0
    if n >= 1:
        table[1] = (x - j.b[0]) / j.a[0]
    for i in range(1, n):
        table[i + 1] = ((x - j.b[i]) * table[i] - j.a[i - 1] * table[i - 1]) / j.a[i]
    return table


def eval_orthonormal(j: JacobiData, x: float, n: int) -> PolyValues:
    """p_0(x)..p_n(x) together with the leading coefficients."""
    vals = eval_table(j, np.array([x]), n)[:, 0]
    return PolyValues(x=float(x), values=vals, kappas=j.kappas(n))


def cd_kernel_diag(j: JacobiData, x, n: int):
    """Diagonal Christoffel-Darboux kernel: sum of p_i(x)^2 for i <= n.

    At least 1 everywhere and nondecreasing in n.  Accepts scalars or
    arrays.
    """
    scalar = np.isscalar(x)
    table = eval_table(j, np.atleast_1d(x), n)
    k = (table**2).sum(axis=0)
    return float(k[0]) if scalar else k


def jacobi_from_measure(
    spec: MeasureSpec, m: int, *, tol: Tolerances = DEFAULT_TOL
) -> JacobiData:
    """Recurrence coefficients b_1..b_m, a_1..a_{m-1} by the Stieltjes
    procedure against the spec's quadrature backend.

    Iterates the recurrence on the quadrature nodes, taking each b as a
    Rayleigh quotient and each a as the norm of the residual, with full
    reorthogonalization against the stored polynomial values for
    stability.  Finite-atom measures admit m up to their atom count.
    """
    if is_circle(spec):
        raise SpecError("jacobi_from_measure needs a real-line measure")
    require_degree(spec, m - 1)
    rule = quadrature_rule(spec, degree=2 * m + 2, tol=tol)
    x = np.asarray(rule.nodes, dtype=float)
    w = rule.weights
    b = np.empty(m)
    a = np.empty(max(m - 1, 0))
    table = np.empty((m, len(x)))
    table[0] = 1.0
    prev = np.zeros_like(x)
    for jdx in range(m):
        p = table[jdx]
        b[jdx] = float((w * x * p * p).sum())
        if jdx == m - 1:
            break
        resid = (x - b[jdx]) * p - (a[jdx - 1] * prev if jdx > 0 else 0.0)
        # two-pass reorthogonalization keeps the discrete Lanczos clean
        for _ in range(2):
            overlaps = (w * resid) @ table[: jdx + 1].T
            resid = resid - overlaps @ table[: jdx + 1]
        norm = np.sqrt(float((w * resid * resid).sum()))
        if not norm > tol.offdiag_floor:
            raise ConvergenceError(
                f"off-diagonal coefficient a_{jdx + 1} lost positivity; "
                "quadrature resolution too low for this degree",
                index=jdx + 1,
            )
        a[jdx] = norm
        table[jdx + 1] = resid / norm
        prev = p
    return JacobiData(b=b, a=a)


def zeros_and_weights(
    j: JacobiData, n: int, *, tol: Tolerances = DEFAULT_TOL
) -> AtomicMeasure:
    """Gaussian rule of order n: zeros of p_n with Christoffel weights.

    Nodes are the eigenvalues of the leading n-by-n block; weights are the
    squared first eigenvector components, which equal 1/K_{n-1}(x, x) and
    sum to one.
    """
    evals, weights = symtridiag_eigen(j.block(n), tol=tol)
    return AtomicMeasure(nodes=evals, weights=weights)


def zero_counting_moment(j: JacobiData, n: int, k: int, *, tol: Tolerances = DEFAULT_TOL) -> float:
    """k-th moment of the uniform measure on the zeros of p_n."""
    evals, _ = symtridiag_eigen(j.block(n), tol=tol)
    return float(np.mean(evals**k))


def zero_counting_moment_trace(j: JacobiData, n: int, k: int) -> float:
    """Same moment through the independent trace channel: tr(J_n^k)/n."""
    dense = j.block(n).dense()
    power = np.linalg.matrix_power(dense, k) if k > 0 else np.eye(n)
    return float(np.trace(power) / n)


def cd_measure_moment(
    spec: MeasureSpec, j: JacobiData, n: int, k: int, *, tol: Tolerances = DEFAULT_TOL
) -> float:
    """k-th moment of the CD probability measure K_n(x,x)/(n+1) d(mu)."""
    rule = quadrature_rule(spec, degree=2 * n + k, tol=tol)
    x = np.asarray(rule.nodes, dtype=float)
    kern = cd_kernel_diag(j, x, n)
    return float((rule.weights * x**k * kern).sum() / (n + 1))


def perturbed_spectral_measure(
    j: JacobiData, n: int, lam: float, *, tol: Tolerances = DEFAULT_TOL
) -> AtomicMeasure:
    """Spectral measure (with respect to e_1) of the n-by-n block with
    ``lam`` added to its last diagonal entry.

    Atoms are the perturbed eigenvalues; the weight at each atom equals
    1/K_{n-1}(x, x).  lam = 0 reduces to ``zeros_and_weights``.
    """
    block = j.block(n)
    diag = np.array(block.diag)
    diag[-1] += lam
    perturbed = TridiagonalSymmetric(diag=diag, offdiag=block.offdiag)
    evals, weights = symtridiag_eigen(perturbed, tol=tol)
    return AtomicMeasure(nodes=evals, weights=weights)


def real_prufer_phase(
    j: JacobiData,
    n: int,
    grid,
    *,
    tol: Tolerances = DEFAULT_TOL,
) -> np.ndarray:
    """Continuous phase with tan(theta_n(x)) = a_n p_n(x) / p_{n-1}(x).

    Tracked as the argument of the nonvanishing curve
    ``p_{n-1}(x) + i a_n p_n(x)`` (adjacent orthonormal polynomials share
    no zero), bisecting the grid where branch tracking needs it.  The
    value at the first grid point is anchored in (-pi/2, pi/2]; the phase
    is strictly increasing and gains pi across every zero of p_n.
    """
    if n < 1:
        raise ValueError("phase needs n >= 1")
    grid = np.asarray(grid, dtype=float)
    if len(grid) < 2 or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing with at least two points")

    def curve(x):
        table = eval_table(j, x, n)
        return table[n - 1] + 1j * j.a[n - 1] * table[n]

    theta = unwrap_phase_adaptive(curve, grid, max_depth=tol.phase_refine_depth)
    # shift by a multiple of pi so the anchor lands in (-pi/2, pi/2]
    shift = np.pi * np.ceil((theta[0] - np.pi / 2) / np.pi - 1e-15)
    return theta - shift

"""Self-contained numeric kernels.

Symmetric tridiagonal eigensolver with first-component accumulation,
Aberth-Ehrlich simultaneous root finding, Newton power sums, periodic and
tangent-substitution quadrature, and continuous phase unwrapping.  Double
precision throughout; all functions are pure.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import (
    ConvergenceError,
    GridTooCoarseError,
    IntegrationError,
    RootFindingError,
)

__all__ = [
    "TridiagonalSymmetric",
    "ComplexPolynomial",
    "QuadratureRule",
    "symtridiag_eigen",
    "aberth_roots",
    "newton_power_sums",
    "periodic_quadrature",
    "gauss_legendre",
    "realline_rule",
    "realline_quadrature",
    "unwrap_phase",
    "unwrap_phase_adaptive",
]

_EPS = np.finfo(float).eps


@dataclass(frozen=True, eq=False)
class TridiagonalSymmetric:
    """Irreducible symmetric tridiagonal matrix (strictly positive off-diagonal)."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        diag = np.asarray(self.diag, dtype=float)
        offdiag = np.asarray(self.offdiag, dtype=float)
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "offdiag", offdiag)
        if diag.ndim != 1 or offdiag.ndim != 1:
            raise ValueError("diag and offdiag must be one-dimensional")
        if len(offdiag) != max(len(diag) - 1, 0):
            raise ValueError("offdiag must have length len(diag) - 1")
        if len(diag) == 0:
            raise ValueError("empty matrix")
        if len(offdiag) and not np.all(offdiag > 0):
            raise ValueError("offdiag entries must be strictly positive")

    @property
    def n(self) -> int:
        return len(self.diag)

    def dense(self) -> np.ndarray:
        m = np.diag(self.diag)
        if len(self.offdiag):
            m += np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)
        return m


@dataclass(frozen=True, eq=False)
class ComplexPolynomial:
    """Polynomial with complex coefficients, constant term first.

    Trailing zero coefficients are trimmed on construction, so ``degree``
    is the index of the last nonzero coefficient.
    """

    coefficients: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coefficients, dtype=complex))
        nz = np.flatnonzero(np.abs(c) > 0)
        if len(nz) == 0:
            raise ValueError("zero polynomial has no defined degree")
        object.__setattr__(self, "coefficients", c[: nz[-1] + 1])

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def leading(self) -> complex:
        return complex(self.coefficients[-1])

    def __call__(self, z):
        return _horner(self.coefficients, np.asarray(z, dtype=complex))

    def derivative(self) -> "ComplexPolynomial":
        if self.degree == 0:
            raise ValueError("derivative of a constant is the zero polynomial")
        c = self.coefficients
        return ComplexPolynomial(c[1:] * np.arange(1, len(c)))

    def monic(self) -> "ComplexPolynomial":
        return ComplexPolynomial(self.coefficients / self.coefficients[-1])


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Nodes and positive weights with a domain tag.

    ``domain`` is one of ``"periodic"`` (nodes are angles on [0, 2pi)),
    ``"interval"`` or ``"real-line"`` (nodes are reals; ``scale`` records
    the tangent-map scale used to build a real-line rule).
    """

    nodes: np.ndarray
    weights: np.ndarray
    domain: str = "interval"
    scale: float = 1.0

    def __post_init__(self):
        nodes = np.atleast_1d(np.asarray(self.nodes))
        weights = np.atleast_1d(np.asarray(self.weights, dtype=float))
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        if len(nodes) < 1 or len(nodes) != len(weights):
            raise ValueError("need at least one node and matching weights")
        if not np.all(weights > 0):
            raise ValueError("weights must be positive")
        if self.domain not in ("periodic", "interval", "real-line"):
            raise ValueError(f"unknown domain tag {self.domain!r}")
        if self.scale <= 0:
            raise ValueError("scale must be positive")

    def integrate(self, f: Callable) -> complex | float:
        vals = np.asarray(f(self.nodes))
        return (self.weights * vals).sum()


def _horner(c: np.ndarray, z: np.ndarray) -> np.ndarray:
    p = np.zeros_like(z)
    for cj in c[::-1]:
        p = p * z + cj
    return p


def _horner2(c: np.ndarray, z: np.ndarray):
    """Value and derivative in one pass."""
    p = np.zeros_like(z)
    dp = np.zeros_like(z)
    for cj in c[::-1]:
        dp = dp * z + p
        p = p * z + cj
    return p, dp


# ---------------------------------------------------------------------------
# symmetric tridiagonal eigensolver
# ---------------------------------------------------------------------------

def symtridiag_eigen(
    t: TridiagonalSymmetric, *, tol: Tolerances = DEFAULT_TOL
) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and squared first eigenvector components.

    Implicit-shift QL specialized to symmetric tridiagonal matrices,
    accumulating only the first row of the eigenvector matrix (all that
    spectral-measure weights require).  Returns eigenvalues in ascending
    order; the squared first components sum to one.

    Raises ConvergenceError naming the eigenvalue index if a QL sweep
    budget is exhausted (does not happen for well-formed input).
    """
    d = np.array(t.diag, dtype=float)
    n = len(d)
    z = np.zeros(n)
    z[0] = 1.0
    if n == 1:
        return d, z
    e = np.concatenate((np.asarray(t.offdiag, dtype=float), [0.0]))

    for l in range(n):
        sweeps = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= _EPS * dd:
                    break
                m += 1
            if m == l:
                break
            sweeps += 1
            if sweeps > tol.eig_sweep_cap:
                raise ConvergenceError(
                    f"QL iteration did not converge for eigenvalue index {l}",
                    index=l,
                )
            # Wilkinson-style implicit shift from the leading 2x2 block.
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = np.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + np.copysign(r, g))
            s = c = 1.0
            p = 0.0
            underflow = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = np.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    # recover from underflow: deflate and restart the sweep
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                # rotate the tracked first row of the eigenvector matrix
                f = z[i + 1]
                z[i + 1] = s * z[i] + c * f
                z[i] = c * z[i] - s * f
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0

    order = np.argsort(d, kind="stable")
    return d[order], z[order] ** 2


# ---------------------------------------------------------------------------
# polynomial roots
# ---------------------------------------------------------------------------

def _initial_radii(c: np.ndarray) -> np.ndarray:
    """Per-root modulus estimates from the upper convex hull of (j, log|c_j|).

    The classical single-circle start (radius one plus the largest
    coefficient ratio) stalls and overflows for high degrees, so initial
    points are spread over the Newton-polygon radii instead.
    """
    d = len(c) - 1
    idx = np.flatnonzero(np.abs(c) > 0)
    logs = np.log(np.abs(c[idx]))
    hull: list[tuple[int, float]] = []
    for j, y in zip(idx, logs):
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (j - x1) <= (y - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append((int(j), float(y)))
    radii = np.empty(d)
    for (x1, y1), (x2, y2) in zip(hull[:-1], hull[1:]):
        radii[x1:x2] = np.exp((y1 - y2) / (x2 - x1))
    return radii


def _scaled_residual(c: np.ndarray, z: np.ndarray) -> np.ndarray:
    """|p(z)| / (|leading| * max(1, |z|)^deg), safe against overflow.

    For |z| > 1 the reversed polynomial q(u) = u^d p(1/u) is evaluated at
    u = 1/z, which keeps every intermediate bounded.
    """
    d = len(c) - 1
    res = np.empty(len(z))
    big = np.abs(z) > 1.0
    lead = np.abs(c[-1])
    if (~big).any():
        res[~big] = np.abs(_horner(c, z[~big])) / lead
    if big.any():
        res[big] = np.abs(_horner(c[::-1], 1.0 / z[big])) / lead
    return res


def aberth_roots(
    p: ComplexPolynomial, *, tol: Tolerances = DEFAULT_TOL
) -> np.ndarray:
    """All roots of ``p`` (with multiplicity), nondecreasing modulus order.

    Aberth-Ehrlich simultaneous third-order iteration.  Exact roots at the
    origin are split off first.  Newton corrections are computed through
    the reversed polynomial for points outside the unit circle so that
    arbitrarily large iterates never overflow.  Clusters tighter than
    ``tol.aberth_cluster`` whose members did not individually converge are
    collapsed to their centroid (a genuinely multiple root).

    Raises RootFindingError carrying the best iterate when the scaled
    residual never reaches ``tol.aberth_target``.
    """
    c = p.coefficients
    if p.degree < 1:
        raise ValueError("degree must be at least 1")
    k0 = int(np.argmax(np.abs(c) > 0))  # multiplicity of the root at 0
    c = c[k0:]
    d = len(c) - 1
    origin = np.zeros(k0, dtype=complex)
    if d == 0:
        return origin

    q = c[::-1]
    radii = _initial_radii(c)
    angles = 2.0 * np.pi * np.arange(d) / d + 0.7 / d + 0.3
    z = radii * np.exp(1j * angles)

    best_z = z.copy()
    best_res = np.inf
    stalled = 0
    for _ in range(tol.aberth_sweep_cap):
        w = np.empty(d, dtype=complex)
        big = np.abs(z) > 1.0
        if (~big).any():
            val, der = _horner2(c, z[~big])
            w[~big] = val / der
        if big.any():
            u = 1.0 / z[big]
            qv, dqv = _horner2(q, u)
            # p'(z) = z^(d-1) * (d q(u) - u q'(u))
            w[big] = z[big] * qv / (d * qv - u * dqv)
        res = _scaled_residual(c, z).max()
        if res < best_res:
            if res < 0.5 * best_res:
                stalled = 0
            best_res = res
            best_z = z.copy()
        else:
            stalled += 1
        if res < tol.aberth_stop:
            break
        if stalled > tol.aberth_stall and best_res < tol.aberth_target:
            break  # rounding floor reached, good enough
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        repulse = (1.0 / diff).sum(axis=1) - 1.0
        corr = w / (1.0 - w * repulse)
        corr[~np.isfinite(corr)] = 0.0
        z = z - corr

    z = best_z
    res = _scaled_residual(c, z)
    if res.max() > tol.aberth_target:
        raise RootFindingError(
            f"root iteration stalled at scaled residual {res.max():.3e}",
            best=np.concatenate((origin, z)),
            residual=float(res.max()),
        )
    z = _merge_clusters(c, z, res, tol)
    roots = np.concatenate((origin, z))
    order = np.lexsort((np.angle(roots), np.abs(roots)))
    return roots[order]


def _merge_clusters(c, z, res, tol: Tolerances) -> np.ndarray:
    """Collapse unconverged clusters to centroids (multiple-root repair)."""
    d = len(z)
    if d == 1:
        return z
    unmerged = res <= tol.aberth_stop
    visited = np.zeros(d, dtype=bool)
    out = []
    for i in range(d):
        if visited[i]:
            continue
        group = [i]
        visited[i] = True
        for j in range(i + 1, d):
            if not visited[j] and abs(z[j] - z[i]) < tol.aberth_cluster:
                group.append(j)
                visited[j] = True
        if len(group) == 1 or unmerged[group].all():
            # individually converged points this close are genuinely distinct
            out.extend(z[g] for g in group)
            continue
        centroid = z[group].mean()
        if _scaled_residual(c, np.array([centroid]))[0] <= max(res[group].max(), tol.aberth_target):
            out.extend([centroid] * len(group))
        else:
            out.extend(z[g] for g in group)
    return np.array(out, dtype=complex)


def newton_power_sums(p: ComplexPolynomial, k_max: int) -> np.ndarray:
    """Power sums s_k = sum_j z_j^k of the roots, k = 1..k_max.

    Computed from the coefficients alone via Newton's identities, so this
    is an independent cross-check channel for any root finder.  Requires a
    monic polynomial.
    """
    c = p.coefficients
    if abs(c[-1] - 1.0) > 1e-12:
        raise ValueError("polynomial must be monic")
    d = len(c) - 1
    if d < 1:
        raise ValueError("degree must be at least 1")
    a = c  # a[j] multiplies z^j, a[d] = 1
    s = np.zeros(k_max, dtype=complex)
    for k in range(1, k_max + 1):
        acc = -k * a[d - k] if k <= d else 0.0 + 0j
        for i in range(1, min(k, d + 1)):
            acc -= a[d - i] * s[k - i - 1]
        s[k - 1] = acc
    return s


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------

def periodic_quadrature(samples: Sequence[complex]) -> complex:
    """Mean of samples on a uniform grid over [0, 2pi), i.e. the integral
    against d(theta)/2pi.

    The trapezoid rule on a periodic grid, exact for trigonometric
    polynomials of degree below the sample count.
    """
    samples = np.asarray(samples)
    if len(samples) < 2:
        raise ValueError("need at least two samples")
    return complex(samples.mean())


@functools.lru_cache(maxsize=64)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Cached Gauss-Legendre nodes/weights on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def realline_rule(node_count: int, scale: float) -> QuadratureRule:
    """Quadrature rule for integrals over the whole real line.

    Substitutes x = scale * tan(u) on u in (-pi/2, pi/2) and applies
    Gauss-Legendre in u; weights include the Jacobian, so
    ``sum(w * f(x))`` approximates the integral of f dx.
    """
    if node_count < 1:
        raise ValueError("node_count must be positive")
    if scale <= 0:
        raise ValueError("scale must be positive")
    u, w = gauss_legendre(node_count)
    u = 0.5 * np.pi * u
    x = scale * np.tan(u)
    jac = 0.5 * np.pi * scale / np.cos(u) ** 2
    return QuadratureRule(nodes=x, weights=w * jac, domain="real-line", scale=scale)


def realline_quadrature(f: Callable, node_count: int, scale: float) -> float:
    """One-shot tangent-substitution integral of ``f`` over the real line.

    ``f`` must decay at least like x^-2; a NaN or infinity returned by the
    integrand raises IntegrationError naming the offending node.
    """
    rule = realline_rule(node_count, scale)
    vals = np.asarray(f(rule.nodes), dtype=float)
    bad = ~np.isfinite(vals)
    if bad.any():
        node = float(rule.nodes[bad][0])
        raise IntegrationError(
            f"integrand not finite at x = {node!r}", node=node
        )
    return float((rule.weights * vals).sum())


# ---------------------------------------------------------------------------
# phase unwrapping
# ---------------------------------------------------------------------------

def unwrap_phase(values: Sequence[complex]) -> np.ndarray:
    """Continuous argument along a path of nonvanishing complex samples.

    Output starts in [0, 2pi) and changes by less than pi between
    consecutive entries.  A step whose wrapped magnitude reaches pi cannot
    be disambiguated and raises GridTooCoarseError naming the index.
    """
    values = np.asarray(values, dtype=complex)
    if np.any(values == 0):
        idx = int(np.flatnonzero(values == 0)[0])
        raise ValueError(f"sample {idx} vanishes; argument undefined")
    raw = np.angle(values)
    steps = np.diff(raw)
    wrapped = (steps + np.pi) % (2.0 * np.pi) - np.pi
    jump = np.abs(wrapped) >= np.pi - 1e-9
    if jump.any():
        idx = int(np.flatnonzero(jump)[0]) + 1
        raise GridTooCoarseError(
            f"argument jump of about pi between samples {idx - 1} and {idx}",
            index=idx,
        )
    start = raw[0] % (2.0 * np.pi)
    return np.concatenate(([start], start + np.cumsum(wrapped)))


def unwrap_phase_adaptive(
    fn: Callable[[np.ndarray], np.ndarray],
    grid: np.ndarray,
    *,
    max_depth: int = 24,
) -> np.ndarray:
    """Continuous argument of ``fn`` along ``grid`` with local refinement.

    Whenever two adjacent samples are too far apart in argument, the
    interval is bisected (recursively, up to ``max_depth``) using fresh
    evaluations of ``fn``; returned phases live on the original grid.
    """
    grid = np.asarray(grid, dtype=float)
    vals = np.asarray(fn(grid), dtype=complex)
    if np.any(vals == 0):
        idx = int(np.flatnonzero(vals == 0)[0])
        raise ValueError(f"function vanishes at grid point {idx}")
    raw = np.angle(vals)

    def step(x0, v0, x1, v1, depth, i) -> float:
        d = np.angle(v1) - np.angle(v0)
        w = (d + np.pi) % (2.0 * np.pi) - np.pi
        if abs(w) < np.pi - 1e-6:
            return w
        if depth >= max_depth:
            raise GridTooCoarseError(
                f"phase refinement exhausted between grid points {i - 1} and {i}",
                index=i,
            )
        xm = 0.5 * (x0 + x1)
        vm = complex(np.asarray(fn(np.array([xm])), dtype=complex)[0])
        if vm == 0:
            raise ValueError(f"function vanishes at refined point {xm!r}")
        return step(x0, v0, xm, vm, depth + 1, i) + step(xm, vm, x1, v1, depth + 1, i)

    out = np.empty(len(grid))
    out[0] = raw[0] % (2.0 * np.pi)
    for i in range(1, len(grid)):
        out[i] = out[i - 1] + step(grid[i - 1], vals[i - 1], grid[i], vals[i], 0, i)
    return out

"""Approximating and transformed measures.

The Bernstein-Szego measure on the circle, the second-kind measure on the
real line (density 1/(pi (a_{n+1}^2 p_{n+1}^2 + p_n^2))), the Cauchy
average of rank-one-perturbed spectral measures (which reproduces the
second-kind measure), sharp-cutoff tail integrals, outlier detection, the
Christoffel ratio bound, and balayage of an atomic measure onto a circle.

Sharp cutoffs are never smoothed: windowed integrals split the domain at
the exact window edges (and, for the Cauchy average, at the exact
perturbation values where an atom crosses an edge), so every quadrature
piece sees a smooth integrand.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import IntegrationError, InvariantViolation
from .measures import AtomicMeasure
from .numerics import gauss_legendre
from .opuc import VerblunskyData, szego_table
from .oprl import (
    JacobiData,
    cd_kernel_diag,
    eval_table,
    perturbed_spectral_measure,
)

__all__ = [
    "CutoffWindow",
    "SecondKindSpec",
    "bernstein_szego_moment",
    "second_kind_density",
    "second_kind_integral",
    "lambda_rule",
    "cauchy_average",
    "cauchy_average_table",
    "outlier_point",
    "christoffel_ratio",
    "tail_integral",
    "balayage_circle_moment",
    "balayage_moments_quadrature",
    "balayage_circle_moment_quadrature",
]


@dataclass(frozen=True)
class CutoffWindow:
    """Sharp indicator window [-M-1, M+1] for a measure supported in [-M, M]."""

    M: float

    def __post_init__(self):
        if self.M <= 0:
            raise ValueError("support bound M must be positive")

    @property
    def edge(self) -> float:
        return self.M + 1.0

    def indicator(self, x) -> np.ndarray:
        return (np.abs(np.asarray(x)) <= self.edge).astype(float)


@dataclass(frozen=True, eq=False)
class SecondKindSpec:
    """Second-kind measure of index n; needs coefficients through a_{n+1}."""

    jacobi: JacobiData
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("index must be nonnegative")
        if self.jacobi.m < self.n + 2:
            raise ValueError(
                f"second-kind measure of index {self.n} needs coefficients "
                f"through {self.n + 2}, have {self.jacobi.m}"
            )


def bernstein_szego_moment(
    v: VerblunskyData, n: int, k: int, *, tol: Tolerances = DEFAULT_TOL
) -> complex:
    """k-th moment (k >= 0) of the measure d(theta)/(2 pi |p_{n+1}|^2).

    A probability measure whose first n moments match the underlying
    measure's.  Evaluated by the doubling trapezoid backend shared with
    the CircleVerblunsky measure variant.
    """
    from .measures import CircleVerblunsky, quadrature_rule

    if k < 0:
        raise ValueError("moments are defined for k >= 0; conjugate for k < 0")
    bs = CircleVerblunsky(alpha=np.asarray(v.alpha[: n + 1], dtype=complex))
    rule = quadrature_rule(bs, degree=max(k, 1), tol=tol)
    return complex((rule.weights * rule.nodes**k).sum())


def second_kind_density(s: SecondKindSpec) -> Callable:
    """Density x -> 1/(pi (a_{n+1}^2 p_{n+1}(x)^2 + p_n(x)^2))."""
    j, n = s.jacobi, s.n

    def density(x):
        table = eval_table(j, np.atleast_1d(np.asarray(x, dtype=float)), n + 1)
        return 1.0 / (np.pi * (j.a[n] ** 2 * table[n + 1] ** 2 + table[n] ** 2))

    return density


def _gersh_bound(j: JacobiData) -> float:
    """Gershgorin bound on the support of any spectral measure of J."""
    a = np.concatenate(([0.0], j.a, [0.0]))
    return float(np.max(np.abs(j.b) + a[:-1] + a[1:]))


def _piece_integral(g: Callable, pieces, m: int) -> float:
    total = 0.0
    for lo, hi in pieces:
        x, w = gauss_legendre(m)
        u = 0.5 * (lo + hi) + 0.5 * (hi - lo) * x
        vals = np.asarray(g(u), dtype=float)
        if not np.all(np.isfinite(vals)):
            bad = u[~np.isfinite(vals)][0]
            raise IntegrationError(f"integrand not finite near u = {bad!r}", node=float(bad))
        total += 0.5 * (hi - lo) * float((w * vals).sum())
    return total


def _doubling_integral(g: Callable, pieces, tol: Tolerances, start: int) -> float:
    m = start
    val = _piece_integral(g, pieces, m)
    while m < tol.realline_cap:
        val2 = _piece_integral(g, pieces, 2 * m)
        if abs(val2 - val) <= tol.realline_tol * max(1.0, abs(val2)):
            return val2
        m, val = 2 * m, val2
    raise IntegrationError(
        f"quadrature failed to settle below {tol.realline_cap} nodes per piece "
        "(divergent or too-rough integrand)"
    )


def second_kind_integral(
    s: SecondKindSpec,
    f: Callable,
    *,
    window: CutoffWindow | None = None,
    scale: float | None = None,
    tol: Tolerances = DEFAULT_TOL,
) -> float:
    """Integral of f against the second-kind measure of index n.

    Uses x = scale * tan(u) with Gauss-Legendre in u, doubling the node
    count until two resolutions agree.  With a window the integration is
    restricted to [-M-1, M+1] exactly (the cutoff is never sampled across
    its jump).  Unwindowed integrands must grow slower than degree 2n + 2;
    a divergent integral fails the doubling loop.
    """
    density = second_kind_density(s)
    if scale is None:
        m_like = window.M if window is not None else _gersh_bound(s.jacobi)
        scale = max(1.0, m_like + 1.0)

    def g(u):
        x = scale * np.tan(u)
        jac = scale / np.cos(u) ** 2
        return np.asarray(f(x), dtype=float) * density(x) * jac

    if window is None:
        pieces = [(-np.pi / 2, 0.0), (0.0, np.pi / 2)]
    else:
        ub = np.arctan(window.edge / scale)
        pieces = [(-ub, 0.0), (0.0, ub)]
    start = max(tol.realline_nodes, 8 * (s.n + 2))
    return _doubling_integral(g, pieces, tol, start)


def lambda_rule(node_count: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights for averaging against d(lambda)/(pi (1 + lambda^2)).

    The substitution lambda = tan(v) turns the Cauchy weight into the
    constant 1/pi on (-pi/2, pi/2); returns (lambda nodes, weights).
    """
    x, w = gauss_legendre(node_count)
    v = 0.5 * np.pi * x
    return np.tan(v), w * 0.5


def _crossing_angles(j: JacobiData, n: int, window: CutoffWindow) -> list[float]:
    """v-values where an atom of the perturbed measure crosses a window edge.

    An atom of the (n+1)-block measure sits at x exactly when
    a_{n+1} p_{n+1}(x) = lambda p_n(x), so each edge w = +-(M+1)
    contributes the single crossing lambda* = a_{n+1} p_{n+1}(w)/p_n(w).
    """
    edges = np.array([-window.edge, window.edge])
    table = eval_table(j, edges, n + 1)
    lam_star = j.a[n] * table[n + 1] / table[n]
    return sorted(float(np.arctan(ls)) for ls in lam_star)


def cauchy_average_table(
    j: JacobiData,
    n: int,
    fs: Sequence[Callable],
    *,
    window: CutoffWindow | None = None,
    lam_rule: tuple[np.ndarray, np.ndarray] | None = None,
    tol: Tolerances = DEFAULT_TOL,
) -> np.ndarray:
    """Cauchy averages of several integrands in one eigenvalue sweep.

    Computes, for each f, the average over lambda (with Cauchy weight) of
    the integral of f against the spectral measure of the perturbed
    (n+1)-block.  With a window the lambda line is split at the exact
    crossing values and the window indicator is applied to the atoms, so
    each piece is smooth; node counts double until the results settle.
    """
    if n < 0 or j.m < n + 2:
        raise ValueError("average needs coefficients through index n + 2")
    if window is None:
        vbreaks: list[float] = []
    else:
        vbreaks = _crossing_angles(j, n, window)
    cuts = [-np.pi / 2] + vbreaks + [np.pi / 2]
    pieces = [(lo, hi) for lo, hi in zip(cuts[:-1], cuts[1:]) if hi - lo > 1e-15]

    base = len(lam_rule[0]) if lam_rule is not None else tol.lambda_nodes

    def sweep(m: int) -> np.ndarray:
        out = np.zeros(len(fs))
        x, w = gauss_legendre(m)
        for lo, hi in pieces:
            v = 0.5 * (lo + hi) + 0.5 * (hi - lo) * x
            half = 0.5 * (hi - lo)
            for vi, wi in zip(v, w):
                lam = np.tan(vi)
                am = perturbed_spectral_measure(j, n + 1, lam, tol=tol)
                atoms, wts = am.nodes, am.weights
                if window is not None:
                    keep = np.abs(atoms) <= window.edge
                    atoms, wts = atoms[keep], wts[keep]
                for idx, f in enumerate(fs):
                    out[idx] += half * wi / np.pi * float((wts * np.asarray(f(atoms))).sum())
        return out

    m = base
    vals = sweep(m)
    while m < 4096:
        vals2 = sweep(2 * m)
        if np.all(np.abs(vals2 - vals) <= tol.lambda_tol * np.maximum(1.0, np.abs(vals2))):
            return vals2
        m, vals = 2 * m, vals2
    raise IntegrationError("Cauchy average failed to settle (check integrand growth)")


def cauchy_average(
    j: JacobiData,
    n: int,
    f: Callable,
    lam_rule: tuple[np.ndarray, np.ndarray] | None = None,
    *,
    window: CutoffWindow | None = None,
    tol: Tolerances = DEFAULT_TOL,
) -> float:
    """Cauchy-weighted lambda average of integrals against the perturbed
    spectral measures; equals the second-kind integral of f."""
    return float(
        cauchy_average_table(j, n, [f], window=window, lam_rule=lam_rule, tol=tol)[0]
    )


def outlier_point(
    j: JacobiData,
    n: int,
    lam: float,
    window: CutoffWindow,
    *,
    tol: Tolerances = DEFAULT_TOL,
) -> float | None:
    """The unique atom of the perturbed (n+1)-block measure outside the
    window, if any.

    Interlacing with the zeros of p_n allows at most one such atom; a
    second one signals a wrong support bound and raises
    InvariantViolation.
    """
    am = perturbed_spectral_measure(j, n + 1, lam, tol=tol)
    outside = np.abs(am.nodes) > window.edge
    count = int(outside.sum())
    if count > 1:
        raise InvariantViolation(
            f"{count} atoms outside the window at lambda = {lam!r}; "
            "support bound M is too small"
        )
    if count == 0:
        return None
    return float(am.nodes[outside][0])


def christoffel_ratio(
    j: JacobiData, n: int, k: int, x: float, window: CutoffWindow
) -> tuple[float, float, bool]:
    """CD-kernel ratio K_{n-k}(x,x)/K_n(x,x) against the bound (M/|x|)^{2k}.

    The variational bound holds for every |x| > M (multiply the minimizing
    polynomial by (t/x)^k).  Returns (ratio, bound, ok).
    """
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    if abs(x) <= window.M:
        raise ValueError("ratio bound needs |x| > M")
    ratio = cd_kernel_diag(j, x, n - k) / cd_kernel_diag(j, x, n)
    bound = (window.M / abs(x)) ** (2 * k)
    return float(ratio), float(bound), bool(ratio <= bound + 1e-12)


def tail_integral(
    j: JacobiData,
    n: int,
    k: int,
    window: CutoffWindow,
    *,
    scale: float | None = None,
    tol: Tolerances = DEFAULT_TOL,
) -> float:
    """Integral of x^k K_{n-k}(x, x) over |x| > M+1 against the
    second-kind measure of index n.

    The integrand has polynomial degree 2n - k against a denominator of
    degree 2n + 2, so the tails converge; the quadrature runs on the two
    outer tangent-map pieces only.
    """
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    s = SecondKindSpec(jacobi=j, n=n)
    density = second_kind_density(s)
    if scale is None:
        scale = max(1.0, window.edge)

    def g(u):
        x = scale * np.tan(u)
        jac = scale / np.cos(u) ** 2
        return x**k * cd_kernel_diag(j, x, n - k) * density(x) * jac

    ub = np.arctan(window.edge / scale)
    pieces = [(-np.pi / 2, -ub), (ub, np.pi / 2)]
    start = max(tol.realline_nodes, 8 * (n + 2))
    return _doubling_integral(g, pieces, tol, start)


def balayage_circle_moment(am: AtomicMeasure, radius: float, k: int) -> complex:
    """k-th moment (k >= 0) of the sweep of an atomic measure inside the
    disk of the given radius onto its boundary circle.

    Harmonic measure reproduces z^k at each atom, so the swept moment is
    the plain weighted power sum; total mass is preserved.
    """
    if k < 0:
        raise ValueError("swept moments are defined for k >= 0")
    nodes = np.asarray(am.nodes, dtype=complex)
    if np.abs(nodes).max() >= radius:
        raise InvariantViolation("atoms must lie strictly inside the circle")
    return complex((am.weights * nodes**k).sum())


def balayage_moments_quadrature(
    am: AtomicMeasure, radius: float, ks: Sequence[int], *, tol: Tolerances = DEFAULT_TOL
) -> np.ndarray:
    """Independent channel for several moments at once: integrate
    (R e^{i theta})^k against the summed Poisson densities of the atoms,
    doubling the grid until every requested moment is stable."""
    nodes = np.asarray(am.nodes, dtype=complex)
    if np.abs(nodes).max() >= radius:
        raise InvariantViolation("atoms must lie strictly inside the circle")
    ks = list(ks)

    def values(m: int) -> np.ndarray:
        theta = 2.0 * np.pi * np.arange(m) / m
        w = radius * np.exp(1j * theta)
        dens = np.zeros(m)
        for zj, wj in zip(nodes, am.weights):
            dens += wj * (radius**2 - abs(zj) ** 2) / np.abs(w - zj) ** 2
        return np.array([np.mean(w**k * dens) for k in ks], dtype=complex)

    m = 1024
    val = values(m)
    while m < tol.resolution_cap:
        val2 = values(2 * m)
        if np.all(np.abs(val2 - val) <= tol.doubling_tol * np.maximum(1.0, np.abs(val2))):
            return val2
        m, val = 2 * m, val2
    raise IntegrationError("balayage quadrature failed to settle")


def balayage_circle_moment_quadrature(
    am: AtomicMeasure, radius: float, k: int, *, tol: Tolerances = DEFAULT_TOL
) -> complex:
    """Single-moment convenience wrapper around the vector channel."""
    return complex(balayage_moments_quadrature(am, radius, [k], tol=tol)[0])

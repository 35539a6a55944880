"""Orthonormal polynomials on the unit circle.

Verblunsky coefficients and the Szego recursion, reversed polynomials,
zeros, the circle CD kernel, the CD-measure and swept zero-counting
moments, and the circle Prufer phase with both of its derivative
identities (Poisson sum over the zeros; CD kernel over the squared
modulus).

The recursion convention is fixed in ``_szego``:
``Phi_{j+1} = z Phi_j - conj(alpha_j) Phi*_j`` with
``p_j = kappa_j Phi_j``, ``kappa_{j+1} = kappa_j / sqrt(1 - |alpha_j|^2)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _szego
from .config import DEFAULT_TOL, Tolerances
from .errors import InvariantViolation, SpecError
from .measures import (
    CircleAtoms,
    CircleVerblunsky,
    CircleWeighted,
    MeasureSpec,
    is_circle,
    moment_vector,
    quadrature_rule,
    require_degree,
)
from .numerics import ComplexPolynomial, aberth_roots, unwrap_phase_adaptive

__all__ = [
    "VerblunskyData",
    "CirclePolyValues",
    "verblunsky_from_measure",
    "eval_szego",
    "szego_table",
    "cd_kernel_diag_circle",
    "monic_coefficients",
    "orthonormal_coefficients",
    "opuc_zeros",
    "cd_measure_moment_circle",
    "balayage_zero_moment",
    "poisson_sum",
    "circle_prufer_phase",
    "prufer_identity_residuals",
]


@dataclass(frozen=True, eq=False)
class VerblunskyData:
    """Verblunsky coefficients alpha_0..alpha_{m-1}, all strictly inside
    the unit disk.  Entries beyond the stored length count as zero."""

    alpha: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "alpha", _szego.validate_alpha(self.alpha))

    @property
    def m(self) -> int:
        return len(self.alpha)

    def kappas(self, n: int) -> np.ndarray:
        """Leading coefficients kappa_0..kappa_n of the orthonormal family."""
        return _szego.kappas(self.alpha, n)


@dataclass(frozen=True, eq=False)
class CirclePolyValues:
    """Values p_j(z) and reversed p*_j(z) for j = 0..n at one point.

    On the unit circle |p_n| = |p*_n|, so p_{n+1}/p*_{n+1} is unimodular.
    """

    z: complex
    values: np.ndarray
    reversed_values: np.ndarray


def verblunsky_from_measure(
    spec: MeasureSpec, m: int, *, tol: Tolerances = DEFAULT_TOL
) -> VerblunskyData:
    """Verblunsky coefficients alpha_0..alpha_{m-1} of a circle measure.

    Runs the Levinson recursion on the trigonometric moments.  A
    CircleVerblunsky spec short-circuits to its stored coefficients
    (zero-padded), which is exact.  Finite-atom measures support only
    m < atom count; beyond that a reflection coefficient reaches the unit
    circle and a SpecError names it.
    """
    if not is_circle(spec):
        raise SpecError("verblunsky_from_measure needs a circle measure")
    if isinstance(spec, CircleVerblunsky):
        alpha = np.asarray(spec.alpha, dtype=complex)
        if m <= len(alpha):
            return VerblunskyData(alpha=alpha[:m])
        return VerblunskyData(alpha=np.concatenate([alpha, np.zeros(m - len(alpha), complex)]))
    if isinstance(spec, CircleWeighted) and spec.family == "uniform":
        return VerblunskyData(alpha=np.zeros(m, dtype=complex))
    require_degree(spec, m)
    mv = moment_vector(spec, m, tol=tol)
    c = np.conj(np.asarray(mv.values))  # c_k = conj(moment(k))
    return VerblunskyData(alpha=_szego.alpha_from_moments(c, m, tol=tol))


def szego_table(v: VerblunskyData, z, n: int):
    """Orthonormal values p_j(z), p*_j(z) for j <= n over an array of z."""
    return _szego.orthonormal_table(v.alpha, z, n)


def eval_szego(v: VerblunskyData, z: complex, n: int) -> CirclePolyValues:
    p, ps = szego_table(v, np.array([z], dtype=complex), n)
    return CirclePolyValues(z=complex(z), values=p[:, 0], reversed_values=ps[:, 0])


def cd_kernel_diag_circle(v: VerblunskyData, theta, n: int):
    """Diagonal CD kernel on the circle: sum of |p_j(e^{i theta})|^2, j <= n."""
    scalar = np.isscalar(theta)
    z = np.exp(1j * np.atleast_1d(np.asarray(theta, dtype=float)))
    p, _ = szego_table(v, z, n)
    k = (np.abs(p) ** 2).sum(axis=0)
    return float(k[0]) if scalar else k


def monic_coefficients(v: VerblunskyData, n: int) -> ComplexPolynomial:
    """Monic polynomial Phi_n in the coefficient basis."""
    return ComplexPolynomial(_szego.monic_coefficients(v.alpha, n))


def orthonormal_coefficients(v: VerblunskyData, n: int) -> ComplexPolynomial:
    """Orthonormal polynomial p_n = kappa_n Phi_n in the coefficient basis."""
    kap = v.kappas(n)[n]
    return ComplexPolynomial(kap * _szego.monic_coefficients(v.alpha, n))


def opuc_zeros(
    v: VerblunskyData, n: int, *, tol: Tolerances = DEFAULT_TOL
) -> np.ndarray:
    """Zeros of p_n, all strictly inside the open unit disk.

    Found by Aberth iteration on the monic coefficients (the kappa
    normalization cancels).  A zero on or outside the circle contradicts
    the theory and raises InvariantViolation.
    """
    if n < 1:
        raise ValueError("zeros need n >= 1")
    roots = aberth_roots(monic_coefficients(v, n), tol=tol)
    mods = np.abs(roots)
    if mods.max() >= 1.0:
        raise InvariantViolation(
            f"zero of modulus {mods.max()!r} on or outside the unit circle; "
            "numerical breakdown"
        )
    return roots


def cd_measure_moment_circle(
    spec: MeasureSpec, v: VerblunskyData, n: int, k: int, *, tol: Tolerances = DEFAULT_TOL
) -> complex:
    """k-th moment of the CD probability measure K_n(z,z)/(n+1) d(mu)."""
    rule = quadrature_rule(spec, degree=n + abs(k), tol=tol)
    z = np.asarray(rule.nodes, dtype=complex)
    p, _ = szego_table(v, z, n)
    kern = (np.abs(p) ** 2).sum(axis=0)
    return complex((rule.weights * z**k * kern).sum() / (n + 1))


def balayage_zero_moment(zeros: Sequence[complex], k: int) -> complex:
    """k-th moment (k >= 0) of the zero-counting measure swept onto the
    unit circle.

    The sweep replaces each atom inside the disk by its harmonic measure
    on the circle; z^k is holomorphic, so the Poisson integral reproduces
    the atom value and the swept moment is the plain mean power sum.
    """
    zeros = np.asarray(zeros, dtype=complex)
    if len(zeros) == 0:
        raise ValueError("need at least one zero")
    if np.abs(zeros).max() >= 1.0:
        raise InvariantViolation("zeros must lie strictly inside the unit disk")
    if k < 0:
        raise ValueError("swept moments are defined for k >= 0")
    return complex(np.mean(zeros**k))


def poisson_sum(zeros: Sequence[complex], theta) -> np.ndarray:
    """Sum over zeros of the Poisson kernel (1 - |z_j|^2)/|e^{i theta} - z_j|^2.

    This is 2 pi times the density (with respect to d(theta)) of the sum
    of the harmonic measures of the zeros; dividing by the zero count
    gives the swept zero-counting density against d(theta)/2pi.
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    w = np.exp(1j * theta)
    zeros = np.asarray(zeros, dtype=complex)
    out = np.zeros_like(theta)
    for zj in zeros:
        out += (1.0 - abs(zj) ** 2) / np.abs(w - zj) ** 2
    return out


def circle_prufer_phase(
    v: VerblunskyData,
    n: int,
    grid=None,
    *,
    tol: Tolerances = DEFAULT_TOL,
) -> tuple[np.ndarray, np.ndarray]:
    """Continuous phase eta with e^{i eta(theta)} = p_{n+1}/p*_{n+1}.

    Returns (grid, eta).  The ratio is a Blaschke product of degree n+1,
    so eta is strictly increasing and gains exactly 2 pi (n+1) over a full
    turn; the value at theta = 0 starts in [0, 2pi).  When no grid is
    given, a uniform grid on [0, 2pi] is doubled from ``tol.phase_grid``
    until branch tracking succeeds.
    """
    def ratio(theta):
        z = np.exp(1j * np.asarray(theta, dtype=float))
        p, ps = szego_table(v, z, n + 1)
        return p[n + 1] / ps[n + 1]

    if grid is not None:
        grid = np.asarray(grid, dtype=float)
        return grid, unwrap_phase_adaptive(ratio, grid, max_depth=tol.phase_refine_depth)

    points = tol.phase_grid
    while True:
        grid = np.linspace(0.0, 2.0 * np.pi, points + 1)
        try:
            eta = unwrap_phase_adaptive(ratio, grid, max_depth=tol.phase_refine_depth)
            return grid, eta
        except Exception:
            if points >= tol.phase_grid_cap:
                raise
            points *= 2


def prufer_identity_residuals(
    v: VerblunskyData,
    spec: MeasureSpec | None,
    n: int,
    grid_points: int = 1 << 14,
    *,
    tol: Tolerances = DEFAULT_TOL,
) -> tuple[float, float]:
    """Max-norm residuals of the two phase-derivative identities.

    r1 compares the finite-difference derivative of eta against the
    Poisson kernel sum over the zeros of p_{n+1}; r2 compares it against
    K_n(z, z)/|p_{n+1}(z)|^2.  A centered second-order stencil is used, so
    both residuals shrink by about 4 per grid doubling until the identity
    error floor is reached.  ``spec`` is accepted for symmetry with the
    measure-driven API and only sanity-checked.
    """
    if spec is not None and not is_circle(spec):
        raise SpecError("phase identities live on the circle")
    grid = np.linspace(0.0, 2.0 * np.pi, grid_points + 1)
    _, eta = circle_prufer_phase(v, n, grid, tol=tol)
    h = grid[1] - grid[0]
    deriv = (eta[2:] - eta[:-2]) / (2.0 * h)
    inner = grid[1:-1]

    zeros = opuc_zeros(v, n + 1, tol=tol)
    r1 = float(np.abs(deriv - poisson_sum(zeros, inner)).max())

    z = np.exp(1j * inner)
    p, _ = szego_table(v, z, n + 1)
    kernel = (np.abs(p[: n + 1]) ** 2).sum(axis=0)
    r2 = float(np.abs(deriv - kernel / np.abs(p[n + 1]) ** 2).max())
    return r1, r2

"""Low-level Szego recursion kernels shared by the circle modules.

Conventions, fixed once for the whole library:

* monic recursion      Phi_{j+1}(z) = z Phi_j(z) - conj(alpha_j) Phi*_j(z)
                       Phi*_{j+1}(z) = Phi*_j(z) - alpha_j z Phi_j(z)
* reversed polynomial  Phi*_j(z) = z^j conj(Phi_j(1/conj(z)))
* leading coefficients kappa_{j+1} = kappa_j / sqrt(1 - |alpha_j|^2), kappa_0 = 1,
  so the orthonormal polynomials are p_j = kappa_j Phi_j.
* trigonometric moments c_k = integral of exp(-i k theta) d(mu), c_0 = 1.

With these, ``alpha_from_moments`` (a Levinson-type recursion on the
Toeplitz system) and ``moments_from_alpha`` are exact inverses.
"""

from __future__ import annotations

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import SpecError


def validate_alpha(alpha, *, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    alpha = np.atleast_1d(np.asarray(alpha, dtype=complex))
    if alpha.ndim != 1:
        raise SpecError("alpha must be a one-dimensional sequence")
    mods = np.abs(alpha)
    if len(alpha) and mods.max() >= 1.0 - tol.verblunsky_margin:
        j = int(np.argmax(mods))
        raise SpecError(f"|alpha_{j}| = {mods[j]!r} is not strictly inside the unit disk")
    return alpha


def kappas(alpha: np.ndarray, n: int) -> np.ndarray:
    """kappa_0 .. kappa_n (alpha is zero-padded beyond its length)."""
    kap = np.ones(n + 1)
    m = len(alpha)
    for j in range(n):
        rho = np.sqrt(1.0 - abs(alpha[j]) ** 2) if j < m else 1.0
        kap[j + 1] = kap[j] / rho
    return kap


def _alpha_padded(alpha: np.ndarray, j: int) -> complex:
    return alpha[j] if j < len(alpha) else 0.0 + 0j


def orthonormal_table(alpha: np.ndarray, z: np.ndarray, n: int):
    """Values p_j(z) and p*_j(z) for j = 0..n, vectorized over z.

    Returns two arrays of shape (n+1, len(z)).  alpha entries beyond the
    stored length count as zero (the measure is then of Bernstein-Szego
    type and the recursion simply multiplies by z).
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    p = np.empty((n + 1, len(z)), dtype=complex)
    ps = np.empty_like(p)
    p[0] = 1.0
    ps[0] = 1.0
    for j in range(n):
        aj = _alpha_padded(alpha, j)
        rho = np.sqrt(1.0 - abs(aj) ** 2)
        p[j + 1] = (z * p[j] - np.conj(aj) * ps[j]) / rho
        ps[j + 1] = (ps[j] - aj * z * p[j]) / rho
    return p, ps


def orthonormal_coefficient_table(alpha: np.ndarray, n: int) -> list[np.ndarray]:
    """Ascending coefficient vectors of p_0..p_n (kappa-normalized)."""
    rows = [np.array([1.0 + 0j])]
    a = np.array([1.0 + 0j])
    kap = 1.0
    for j in range(n):
        aj = _alpha_padded(alpha, j)
        shifted = np.concatenate(([0.0 + 0j], a))
        reversed_conj = np.concatenate((np.conj(a[::-1]), [0.0 + 0j]))
        a = shifted - np.conj(aj) * reversed_conj
        kap /= np.sqrt(1.0 - abs(aj) ** 2)
        rows.append(kap * a)
    return rows


def kernel_laurent(alpha: np.ndarray, n: int) -> np.ndarray:
    """Laurent coefficients of the diagonal CD kernel on the circle.

    K_n(e^{i t}, e^{i t}) = sum_{l=-n}^{n} gamma_l e^{i l t}; returns gamma
    indexed by l + n.  Each |p_j|^2 contributes the autocorrelation of its
    coefficient vector, so the result is exact up to rounding and avoids
    quadrature entirely (important when a zero sits close to the circle
    and 1/|p|^2 spikes beyond any fixed grid's resolution).
    """
    gamma = np.zeros(2 * n + 1, dtype=complex)
    for b in orthonormal_coefficient_table(alpha, n):
        long = len(b) - 1
        auto = np.convolve(b, np.conj(b)[::-1])  # auto[k] = gamma_{k - long}
        gamma[n - long : n + long + 1] += auto
    return gamma


def monic_coefficients(alpha: np.ndarray, n: int) -> np.ndarray:
    """Ascending coefficients of the monic polynomial Phi_n (length n+1)."""
    a = np.array([1.0 + 0j])
    for j in range(n):
        aj = _alpha_padded(alpha, j)
        shifted = np.concatenate(([0.0 + 0j], a))
        reversed_conj = np.concatenate((np.conj(a[::-1]), [0.0 + 0j]))
        a = shifted - np.conj(aj) * reversed_conj
    return a


def moments_from_alpha(alpha: np.ndarray, k_max: int) -> np.ndarray:
    """Trigonometric moments c_0..c_{k_max} of the measure encoded by alpha.

    c_k is read off the orthogonality of Phi_k against 1:
    c_k = -sum_{j<k} conj(a_j^{(k)}) c_j where a^{(k)} are the monic
    coefficients.  Exact up to rounding, no quadrature involved.
    """
    c = np.zeros(k_max + 1, dtype=complex)
    c[0] = 1.0
    a = np.array([1.0 + 0j])
    for k in range(1, k_max + 1):
        aj = _alpha_padded(alpha, k - 1)
        shifted = np.concatenate(([0.0 + 0j], a))
        reversed_conj = np.concatenate((np.conj(a[::-1]), [0.0 + 0j]))
        a = shifted - np.conj(aj) * reversed_conj
        c[k] = -np.sum(np.conj(a[:k]) * c[:k])
    return c


def alpha_from_moments(
    c: np.ndarray, m: int, *, tol: Tolerances = DEFAULT_TOL
) -> np.ndarray:
    """Levinson recursion: alpha_0..alpha_{m-1} from moments c_0..c_m.

    Raises SpecError naming the index when a reflection coefficient leaves
    the open unit disk (moment sequence not strictly positive definite, or
    a finite-atom measure exhausted).
    """
    c = np.asarray(c, dtype=complex)
    if len(c) < m + 1:
        raise ValueError(f"need moments through order {m}, got {len(c) - 1}")
    if abs(c[0] - 1.0) > 1e-9:
        raise SpecError("c_0 must be 1 (probability measure)")
    alpha = np.empty(m, dtype=complex)
    a = np.array([1.0 + 0j])
    energy = float(c[0].real)
    for n in range(m):
        an = np.sum(np.conj(a) * c[1 : n + 2]) / energy
        if abs(an) >= 1.0 - tol.verblunsky_margin:
            raise SpecError(
                f"reflection coefficient {n} has modulus {abs(an)!r}; "
                "measure cannot support this polynomial degree"
            )
        alpha[n] = an
        shifted = np.concatenate(([0.0 + 0j], a))
        reversed_conj = np.concatenate((np.conj(a[::-1]), [0.0 + 0j]))
        a = shifted - np.conj(an) * reversed_conj
        energy *= 1.0 - abs(an) ** 2
    return alpha

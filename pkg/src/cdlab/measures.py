"""Measure data model: specifications, moments, inner products.

A measure specification is one of five immutable variants (two on the real
line, three on the unit circle), each a probability measure.  Every
variant can hand out a quadrature backend: nodes and positive weights such
that ``sum(w * f(node))`` integrates f against the measure.  For circle
measures the nodes are points z on the unit circle and moments follow the
convention ``moment(spec, k) = integral of z^k d(mu)``; the internally
stored trigonometric moments are ``c_k = integral of exp(-i k theta) d(mu)
= conj(moment(k))``.

Specifications serialize to a JSON document with a ``type`` discriminator;
complex entries are stored as ``[re, im]`` pairs and the round trip is
bit-exact.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from . import _szego
from .config import DEFAULT_TOL, Tolerances
from .errors import DegreeCapError, IntegrationError, SpecError
from .numerics import (
    QuadratureRule,
    TridiagonalSymmetric,
    gauss_legendre,
    symtridiag_eigen,
)

__all__ = [
    "RealAtoms",
    "RealWeighted",
    "CircleAtoms",
    "CircleWeighted",
    "CircleVerblunsky",
    "MeasureSpec",
    "AtomicMeasure",
    "MomentVector",
    "is_circle",
    "support_radius",
    "quadrature_rule",
    "moment",
    "moment_vector",
    "inner_product",
    "to_json",
    "from_json",
    "spec_hash",
]

_MASS_TOL = 1e-12
REAL_FAMILIES = ("chebyshev-first-kind", "legendre-uniform", "jacobi")
CIRCLE_FAMILIES = ("uniform", "poly-trig")


def _as_tuple(values, kind=float) -> tuple:
    return tuple(kind(v) for v in np.atleast_1d(values))


def _check_weights(weights) -> None:
    w = np.asarray(weights, dtype=float)
    if len(w) == 0 or not np.all(w > 0):
        raise SpecError("weights must be positive")
    if abs(w.sum() - 1.0) > _MASS_TOL:
        raise SpecError(f"weights sum to {w.sum()!r}, not 1")


@dataclass(frozen=True)
class RealAtoms:
    """Finitely many atoms on the real line."""

    nodes: tuple
    weights: tuple

    def __init__(self, nodes, weights):
        object.__setattr__(self, "nodes", _as_tuple(nodes))
        object.__setattr__(self, "weights", _as_tuple(weights))
        if len(self.nodes) != len(self.weights):
            raise SpecError("nodes and weights must have equal length")
        _check_weights(self.weights)
        if len(set(self.nodes)) != len(self.nodes):
            raise SpecError("atom nodes must be distinct")


@dataclass(frozen=True)
class RealWeighted:
    """Named weight family on a compact interval, normalized to mass 1.

    Families: ``chebyshev-first-kind`` (weight 1/sqrt(1 - t^2)),
    ``legendre-uniform`` (constant weight), ``jacobi`` (weight
    (1-t)^a (1+t)^b with parameters a, b > -1), each transplanted
    affinely from [-1, 1] to the given interval.
    """

    interval: tuple
    family: str
    parameters: tuple = ()
    resolution: int | None = None

    def __init__(self, interval, family, parameters=(), resolution=None):
        lo, hi = (float(interval[0]), float(interval[1]))
        if not lo < hi:
            raise SpecError("interval must satisfy lo < hi")
        if family not in REAL_FAMILIES:
            raise SpecError(f"unknown real weight family {family!r}")
        params = _as_tuple(parameters) if parameters else ()
        if family == "jacobi":
            if len(params) != 2:
                raise SpecError("jacobi family needs parameters (a, b)")
            if params[0] <= -1 or params[1] <= -1:
                raise SpecError("jacobi parameters must exceed -1")
        elif params:
            raise SpecError(f"family {family!r} takes no parameters")
        object.__setattr__(self, "interval", (lo, hi))
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "parameters", params)
        object.__setattr__(self, "resolution", None if resolution is None else int(resolution))


@dataclass(frozen=True)
class CircleAtoms:
    """Finitely many atoms exp(i * angle) on the unit circle."""

    angles: tuple
    weights: tuple

    def __init__(self, angles, weights):
        ang = _as_tuple(angles)
        if any(not 0 <= a < 2 * math.pi for a in ang):
            raise SpecError("angles must lie in [0, 2pi)")
        object.__setattr__(self, "angles", ang)
        object.__setattr__(self, "weights", _as_tuple(weights))
        if len(self.angles) != len(self.weights):
            raise SpecError("angles and weights must have equal length")
        _check_weights(self.weights)
        if len(set(self.angles)) != len(self.angles):
            raise SpecError("atom angles must be distinct")


@dataclass(frozen=True)
class CircleWeighted:
    """Weight w(theta) d(theta)/2pi on the circle.

    ``uniform`` is normalized arclength.  ``poly-trig`` takes Fourier
    coefficients (w_0, w_1, ..., w_p) meaning
    w(theta) = w_0 + 2 Re sum_{j>=1} w_j exp(i j theta); w_0 must be 1
    (unit mass) and w must be nonnegative.
    """

    family: str
    coefficients: tuple = ()
    resolution: int | None = None

    def __init__(self, family, coefficients=(), resolution=None):
        if family not in CIRCLE_FAMILIES:
            raise SpecError(f"unknown circle weight family {family!r}")
        coeffs = tuple(complex(c) for c in coefficients)
        if family == "uniform":
            if coeffs:
                raise SpecError("uniform family takes no coefficients")
        else:
            if not coeffs:
                raise SpecError("poly-trig family needs coefficients")
            if abs(coeffs[0] - 1.0) > _MASS_TOL:
                raise SpecError("leading coefficient w_0 must be 1 (unit mass)")
            grid = np.linspace(0.0, 2 * np.pi, max(512, 16 * len(coeffs)), endpoint=False)
            if _trig_weight(coeffs, grid).min() < -1e-12:
                raise SpecError("poly-trig weight must be nonnegative")
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "resolution", None if resolution is None else int(resolution))


@dataclass(frozen=True)
class CircleVerblunsky:
    """Measure encoded by finitely many Verblunsky coefficients.

    Coefficients beyond the stored list count as zero, so this is the
    Bernstein-Szego measure of the final index: an analytic weight
    1/|p_m|^2 with p_m built from the stored coefficients.
    """

    alpha: tuple
    resolution: int | None = None

    def __init__(self, alpha, resolution=None):
        arr = _szego.validate_alpha([complex(a) for a in np.atleast_1d(np.asarray(alpha))])
        object.__setattr__(self, "alpha", tuple(complex(a) for a in arr))
        object.__setattr__(self, "resolution", None if resolution is None else int(resolution))


MeasureSpec = Union[RealAtoms, RealWeighted, CircleAtoms, CircleWeighted, CircleVerblunsky]


@dataclass(frozen=True, eq=False)
class AtomicMeasure:
    """Finitely many (node, weight) pairs; nodes may be real or complex."""

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        nodes = np.atleast_1d(np.asarray(self.nodes))
        weights = np.atleast_1d(np.asarray(self.weights, dtype=float))
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        if len(nodes) != len(weights):
            raise ValueError("nodes and weights must have equal length")
        if not np.all(weights > 0):
            raise ValueError("weights must be positive")

    @property
    def total(self) -> float:
        return float(self.weights.sum())

    def power_sum_mean(self, k: int) -> complex:
        """Weighted mean of node^k, i.e. the k-th moment divided by the mass."""
        return complex((self.weights * self.nodes**k).sum() / self.total)


@dataclass(frozen=True)
class MomentVector:
    """Moments m_0..m_{k_max} with m_0 = 1 and |m_k| <= N^k."""

    k_max: int
    values: tuple

    def __init__(self, k_max, values):
        values = tuple(complex(v) for v in values)
        if len(values) != k_max + 1:
            raise SpecError("need exactly k_max + 1 moment values")
        if abs(values[0] - 1.0) > 1e-9:
            raise SpecError("m_0 must equal 1")
        object.__setattr__(self, "k_max", int(k_max))
        object.__setattr__(self, "values", values)

    def __getitem__(self, k: int) -> complex:
        return self.values[k]


def is_circle(spec: MeasureSpec) -> bool:
    return isinstance(spec, (CircleAtoms, CircleWeighted, CircleVerblunsky))


def support_radius(spec: MeasureSpec) -> float:
    """Largest modulus in the support of the measure."""
    if isinstance(spec, RealAtoms):
        return float(np.abs(np.asarray(spec.nodes)).max())
    if isinstance(spec, RealWeighted):
        lo, hi = spec.interval
        return max(abs(lo), abs(hi))
    if is_circle(spec):
        return 1.0
    raise TypeError(f"not a measure spec: {spec!r}")


def atom_budget(spec: MeasureSpec) -> int | None:
    """Largest orthonormal polynomial degree a finite-atom measure supports.

    d atoms give a d-dimensional L2 space: p_0..p_{d-1} exist, p_d is the
    zero vector, so the budget is d - 1.
    """
    if isinstance(spec, RealAtoms):
        return len(spec.nodes) - 1
    if isinstance(spec, CircleAtoms):
        return len(spec.angles) - 1
    return None


def _trig_weight(coeffs, theta):
    w = np.full_like(np.asarray(theta, dtype=float), float(np.real(coeffs[0])))
    for j in range(1, len(coeffs)):
        w += 2.0 * (coeffs[j] * np.exp(1j * j * np.asarray(theta))).real
    return w


def _chebyshev_rule(m: int) -> tuple[np.ndarray, np.ndarray]:
    i = np.arange(1, m + 1)
    nodes = np.cos((2 * i - 1) * np.pi / (2 * m))
    return nodes, np.full(m, 1.0 / m)


def _jacobi_rule(m: int, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    """Gauss rule for the normalized Jacobi weight via its known recurrence."""
    diag = np.empty(m)
    diag[0] = (b - a) / (a + b + 2.0)
    beta = np.empty(max(m - 1, 0))
    for k in range(1, m):
        if k == 1:
            beta[0] = 4.0 * (a + 1) * (b + 1) / ((a + b + 2) ** 2 * (a + b + 3))
        else:
            s = 2.0 * k + a + b
            beta[k - 1] = 4.0 * k * (k + a) * (k + b) * (k + a + b) / (s**2 * (s + 1) * (s - 1))
        diag[k] = (b**2 - a**2) / ((2.0 * k + a + b) * (2.0 * k + a + b + 2.0))
    t = TridiagonalSymmetric(diag=diag, offdiag=np.sqrt(beta))
    return symtridiag_eigen(t)


_RULE_CACHE: dict = {}


def quadrature_rule(
    spec: MeasureSpec, *, degree: int = 0, tol: Tolerances = DEFAULT_TOL
) -> QuadratureRule:
    """Quadrature backend integrating exactly (or to ``tol.doubling_tol``)
    every polynomial the caller will use, up to the given degree.

    For real measures the degree counts powers of x; for circle measures
    it counts the trigonometric degree of the integrand.
    """
    key = (spec, int(degree))
    hit = _RULE_CACHE.get(key)
    if hit is not None:
        return hit
    rule = _build_rule(spec, int(degree), tol)
    _RULE_CACHE[key] = rule
    return rule


def _build_rule(spec: MeasureSpec, degree: int, tol: Tolerances) -> QuadratureRule:
    if isinstance(spec, RealAtoms):
        return QuadratureRule(
            nodes=np.asarray(spec.nodes), weights=np.asarray(spec.weights), domain="interval"
        )
    if isinstance(spec, CircleAtoms):
        return QuadratureRule(
            nodes=np.exp(1j * np.asarray(spec.angles)),
            weights=np.asarray(spec.weights),
            domain="periodic",
        )
    if isinstance(spec, RealWeighted):
        need = max((degree + 2) // 2, 1)
        if spec.family == "chebyshev-first-kind":
            m = max(spec.resolution or tol.interval_nodes, need)
            nodes, weights = _chebyshev_rule(m)
        elif spec.family == "legendre-uniform":
            m = max(spec.resolution or tol.interval_nodes, need)
            nodes, weights = gauss_legendre(m)
            weights = weights / 2.0
        else:
            m = max(spec.resolution or tol.jacobi_nodes, need)
            nodes, weights = _jacobi_rule(m, *spec.parameters)
        lo, hi = spec.interval
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        return QuadratureRule(nodes=mid + half * nodes, weights=weights, domain="interval")
    if isinstance(spec, CircleWeighted):
        if spec.family == "uniform":
            m = max(spec.resolution or 16, degree + 1, 2)
            theta = 2 * np.pi * np.arange(m) / m
            return QuadratureRule(
                nodes=np.exp(1j * theta), weights=np.full(m, 1.0 / m), domain="periodic"
            )
        p = len(spec.coefficients) - 1
        m = max(spec.resolution or tol.circle_nodes, degree + p + 1)
        theta = 2 * np.pi * np.arange(m) / m
        w = _trig_weight(spec.coefficients, theta) / m
        keep = w > 0  # weight may touch zero at isolated points
        return QuadratureRule(nodes=np.exp(1j * theta[keep]), weights=w[keep], domain="periodic")
    if isinstance(spec, CircleVerblunsky):
        return _verblunsky_rule(spec, degree, tol)
    raise TypeError(f"not a measure spec: {spec!r}")


def _verblunsky_rule(spec: CircleVerblunsky, degree: int, tol: Tolerances) -> QuadratureRule:
    """Trapezoid rule on the Bernstein-Szego weight, doubled until the
    highest requested moment is stable."""
    alpha = np.asarray(spec.alpha)
    deg_p = len(alpha)

    def rule_at(m: int):
        theta = 2 * np.pi * np.arange(m) / m
        z = np.exp(1j * theta)
        p, _ = _szego.orthonormal_table(alpha, z, deg_p)
        w = 1.0 / (np.abs(p[deg_p]) ** 2 * m)
        return z, w

    k_check = max(degree, 1)
    m = max(spec.resolution or tol.circle_nodes, 4 * (degree + deg_p + 1))
    z, w = rule_at(m)
    val = (w * z**k_check).sum()
    settled = False
    while m < tol.resolution_cap:
        z2, w2 = rule_at(2 * m)
        val2 = (w2 * z2**k_check).sum()
        if abs(val2 - val) <= tol.doubling_tol and abs(w2.sum() - 1.0) < 1e-12:
            z, w, settled = z2, w2, True
            break
        m, z, w, val = 2 * m, z2, w2, val2
    if not settled:
        raise IntegrationError(
            f"Bernstein-Szego quadrature did not settle below {tol.resolution_cap} nodes"
        )
    w = w / w.sum()  # absorb the (tiny) residual trapezoid mass defect
    return QuadratureRule(nodes=z, weights=w, domain="periodic")


def moment(spec: MeasureSpec, k: int, *, tol: Tolerances = DEFAULT_TOL) -> complex:
    """k-th moment: integral of x^k (real) or z^k (circle), k >= 0.

    k = 0 returns exactly 1.  Closed forms are used wherever the variant
    admits one (atom sums, trig coefficients, the Verblunsky moment
    recursion); only the weighted interval families integrate numerically,
    with a rule that is exact for the requested degree.
    """
    if k < 0:
        raise ValueError("moments are defined for k >= 0; use conjugation for k < 0")
    if k == 0:
        return 1.0 + 0j
    if isinstance(spec, RealAtoms):
        return complex(np.sum(np.asarray(spec.weights) * np.asarray(spec.nodes) ** k))
    if isinstance(spec, CircleAtoms):
        z = np.exp(1j * np.asarray(spec.angles))
        return complex(np.sum(np.asarray(spec.weights) * z**k))
    if isinstance(spec, CircleWeighted):
        if spec.family == "uniform":
            return 0j
        coeffs = spec.coefficients
        return complex(np.conj(coeffs[k])) if k < len(coeffs) else 0j
    if isinstance(spec, CircleVerblunsky):
        c = _szego.moments_from_alpha(np.asarray(spec.alpha), k)
        return complex(np.conj(c[k]))
    if isinstance(spec, RealWeighted):
        rule = quadrature_rule(spec, degree=k, tol=tol)
        return complex((rule.weights * rule.nodes**k).sum())
    raise TypeError(f"not a measure spec: {spec!r}")


def moment_row(spec: MeasureSpec, k_max: int, *, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Moments m_0..m_{k_max} as an array, computed in one pass.

    Equivalent to calling ``moment`` for each k; circle variants use their
    closed forms (one recursion run for Verblunsky data).
    """
    if isinstance(spec, CircleVerblunsky):
        c = _szego.moments_from_alpha(np.asarray(spec.alpha), k_max)
        return np.conj(c)
    if isinstance(spec, (RealAtoms, CircleAtoms)):
        if isinstance(spec, RealAtoms):
            nodes = np.asarray(spec.nodes, dtype=complex)
        else:
            nodes = np.exp(1j * np.asarray(spec.angles))
        w = np.asarray(spec.weights)
        out = np.array([(w * nodes**k).sum() for k in range(k_max + 1)])
        out[0] = 1.0
        return out
    return np.array([moment(spec, k, tol=tol) for k in range(k_max + 1)])


def moment_vector(spec: MeasureSpec, k_max: int, *, tol: Tolerances = DEFAULT_TOL) -> MomentVector:
    values = [moment(spec, k, tol=tol) for k in range(k_max + 1)]
    bound = support_radius(spec)
    for k, v in enumerate(values):
        if abs(v) > bound**k * (1.0 + 1e-9) + 1e-12:
            raise SpecError(f"moment {k} exceeds the support bound {bound}^{k}")
    return MomentVector(k_max, values)


def _eval_on(f: Callable, nodes: np.ndarray) -> np.ndarray:
    vals = np.asarray(f(nodes))
    if vals.shape != nodes.shape:
        vals = np.array([f(x) for x in nodes])
    return vals


def inner_product(
    spec: MeasureSpec, f: Callable, g: Callable, *, degree: int = 0, tol: Tolerances = DEFAULT_TOL
) -> complex:
    """L2(mu) inner product conj(f) * g; conjugate-symmetric in (f, g).

    ``degree`` bounds the polynomial degree of the product when known, so
    the backend can guarantee exactness.
    """
    rule = quadrature_rule(spec, degree=degree, tol=tol)
    fv = _eval_on(f, rule.nodes)
    gv = _eval_on(g, rule.nodes)
    return complex((rule.weights * np.conj(fv) * gv).sum())


def require_degree(spec: MeasureSpec, degree: int) -> None:
    """Raise DegreeCapError when a finite-atom measure cannot supply
    orthonormal polynomials of the given degree."""
    cap = atom_budget(spec)
    if cap is not None and degree > cap:
        raise DegreeCapError(
            f"measure supports polynomial degree at most {cap}, requested {degree}"
        )


# ---------------------------------------------------------------------------
# JSON serialization (bit-exact round trip)
# ---------------------------------------------------------------------------

def _c2pair(c: complex) -> list:
    return [c.real, c.imag]


def _pair2c(p) -> complex:
    if not isinstance(p, (list, tuple)) or len(p) != 2:
        raise SpecError(f"expected [re, im] pair, got {p!r}")
    return complex(float(p[0]), float(p[1]))


def to_json_dict(spec: MeasureSpec) -> dict:
    if isinstance(spec, RealAtoms):
        return {"type": "real_atoms", "nodes": list(spec.nodes), "weights": list(spec.weights)}
    if isinstance(spec, RealWeighted):
        out = {
            "type": "real_weighted",
            "interval": list(spec.interval),
            "family": spec.family,
        }
        if spec.parameters:
            out["parameters"] = list(spec.parameters)
        if spec.resolution is not None:
            out["resolution"] = spec.resolution
        return out
    if isinstance(spec, CircleAtoms):
        return {"type": "circle_atoms", "angles": list(spec.angles), "weights": list(spec.weights)}
    if isinstance(spec, CircleWeighted):
        out = {"type": "circle_weighted", "family": spec.family}
        if spec.coefficients:
            out["coefficients"] = [_c2pair(c) for c in spec.coefficients]
        if spec.resolution is not None:
            out["resolution"] = spec.resolution
        return out
    if isinstance(spec, CircleVerblunsky):
        out = {"type": "circle_verblunsky", "alpha": [_c2pair(c) for c in spec.alpha]}
        if spec.resolution is not None:
            out["resolution"] = spec.resolution
        return out
    raise TypeError(f"not a measure spec: {spec!r}")


_ALLOWED_KEYS = {
    "real_atoms": {"type", "nodes", "weights"},
    "real_weighted": {"type", "interval", "family", "parameters", "resolution"},
    "circle_atoms": {"type", "angles", "weights"},
    "circle_weighted": {"type", "family", "coefficients", "resolution"},
    "circle_verblunsky": {"type", "alpha", "resolution"},
}


def from_json_dict(doc: dict) -> MeasureSpec:
    if not isinstance(doc, dict) or "type" not in doc:
        raise SpecError("measure document must be an object with a 'type' key")
    kind = doc["type"]
    allowed = _ALLOWED_KEYS.get(kind)
    if allowed is None:
        raise SpecError(f"unknown measure type {kind!r}")
    extra = set(doc) - allowed
    if extra:
        raise SpecError(f"unknown key {sorted(extra)[0]!r} in measure document")
    if kind == "real_atoms":
        return RealAtoms(doc["nodes"], doc["weights"])
    if kind == "real_weighted":
        return RealWeighted(
            doc["interval"],
            doc["family"],
            doc.get("parameters", ()),
            doc.get("resolution"),
        )
    if kind == "circle_atoms":
        return CircleAtoms(doc["angles"], doc["weights"])
    if kind == "circle_weighted":
        coeffs = [_pair2c(p) for p in doc.get("coefficients", [])]
        return CircleWeighted(doc["family"], coeffs, doc.get("resolution"))
    return CircleVerblunsky(
        [_pair2c(p) for p in doc["alpha"]], doc.get("resolution")
    )


def to_json(spec: MeasureSpec) -> str:
    return json.dumps(to_json_dict(spec), sort_keys=True)


def from_json(text: str) -> MeasureSpec:
    return from_json_dict(json.loads(text))


def spec_hash(spec: MeasureSpec) -> str:
    return hashlib.sha256(to_json(spec).encode()).hexdigest()[:16]

"""Built-in example checks behind ``cdlab selftest``.

Quick closed-form cases from every module; one line per check.  Intended
as a release gate and smoke test, not a replacement for the pytest suite.
"""

from __future__ import annotations

import numpy as np


def run() -> int:
    checks: list[tuple[str, bool]] = []

    def check(name: str, ok: bool) -> None:
        checks.append((name, bool(ok)))
        print(f"{'ok  ' if ok else 'FAIL'} {name}")

    from .numerics import (
        ComplexPolynomial,
        TridiagonalSymmetric,
        aberth_roots,
        newton_power_sums,
        periodic_quadrature,
        realline_quadrature,
        symtridiag_eigen,
        unwrap_phase,
    )

    ev, w = symtridiag_eigen(TridiagonalSymmetric(diag=[0.0, 0.0], offdiag=[1.0]))
    check("eigen: 2x2 exchange", np.allclose(ev, [-1, 1]) and np.allclose(w, [0.5, 0.5]))
    ev, w = symtridiag_eigen(TridiagonalSymmetric(diag=[0.3], offdiag=[]))
    check("eigen: 1x1", np.allclose(ev, [0.3]) and np.allclose(w, [1.0]))

    roots = aberth_roots(ComplexPolynomial([1, 0, 1]))
    check("aberth: z^2 + 1", np.allclose(sorted(roots.imag), [-1, 1], atol=1e-12))
    check("aberth: z^3 triple origin", np.allclose(aberth_roots(ComplexPolynomial([0, 0, 0, 1])), 0))
    check("aberth: z + 1/2", np.allclose(aberth_roots(ComplexPolynomial([0.5, 1])), [-0.5]))

    s = newton_power_sums(ComplexPolynomial([-1, 0, 1]), 2)
    check("newton: z^2 - 1", np.allclose(s, [0, 2]))
    s = newton_power_sums(ComplexPolynomial([2, -3, 1]), 3)
    check("newton: roots 1, 2", np.allclose(s, [3, 5, 9]))

    theta = 2 * np.pi * np.arange(64) / 64
    check("periodic: constant", abs(periodic_quadrature(np.ones(64)) - 1) < 1e-15)
    check("periodic: first harmonic", abs(periodic_quadrature(np.exp(1j * theta))) < 1e-14)
    check(
        "periodic: |1 + z|^2",
        abs(periodic_quadrature(np.abs(1 + np.exp(1j * theta)) ** 2) - 2) < 1e-13,
    )

    cauchy = lambda x: 1.0 / (np.pi * (1 + x**2))
    check("realline: Cauchy mass", abs(realline_quadrature(cauchy, 64, 1.0) - 1) < 1e-10)
    odd = lambda x: x / (np.pi * (1 + x**2) ** 2)
    check("realline: odd integrand", abs(realline_quadrature(odd, 64, 1.0)) < 1e-14)

    grid = np.linspace(0, 2 * np.pi, 128)
    ramp = unwrap_phase(np.exp(1j * grid))
    check("unwrap: single winding", abs(ramp[-1] - ramp[0] - 2 * np.pi) < 1e-12)
    check("unwrap: constant", np.allclose(unwrap_phase(np.ones(16)), 0))
    ramp2 = unwrap_phase(np.exp(2j * grid))
    check("unwrap: double winding", abs(ramp2[-1] - ramp2[0] - 4 * np.pi) < 1e-12)

    from .measures import (
        CircleWeighted,
        RealAtoms,
        RealWeighted,
        moment,
        support_radius,
    )

    uniform = CircleWeighted(family="uniform")
    pm1 = RealAtoms(nodes=[-1.0, 1.0], weights=[0.5, 0.5])
    cheb23 = RealWeighted(interval=(-2.0, 3.0), family="chebyshev-first-kind")
    check("support: uniform circle", support_radius(uniform) == 1.0)
    check("support: atoms at +-1", support_radius(pm1) == 1.0)
    check("support: chebyshev on [-2, 3]", support_radius(cheb23) == 3.0)
    check("moment: k = 0", moment(pm1, 0) == 1.0)
    check("moment: uniform k = 1", moment(uniform, 1) == 0.0)
    cheb = RealWeighted(interval=(-1.0, 1.0), family="chebyshev-first-kind")
    check("moment: chebyshev k = 2", abs(moment(cheb, 2) - 0.5) < 1e-13)

    from .oprl import (
        jacobi_from_measure,
        perturbed_spectral_measure,
        zeros_and_weights,
    )

    j = jacobi_from_measure(cheb, 4)
    check(
        "stieltjes: chebyshev coefficients",
        np.allclose(j.b, 0, atol=1e-13)
        and np.allclose(j.a, [1 / np.sqrt(2), 0.5, 0.5], atol=1e-13),
    )
    rule = zeros_and_weights(j, 1)
    check("gauss: n = 1 rule", np.allclose(rule.nodes, [0], atol=1e-14) and np.allclose(rule.weights, [1]))
    single = jacobi_from_measure(pm1, 2)
    am = perturbed_spectral_measure(single, 1, 0.7)
    check("perturbed: 1x1 shift", np.allclose(am.nodes, [0.7]) and np.allclose(am.weights, [1]))
    am0 = perturbed_spectral_measure(j, 3, 0.0)
    base = zeros_and_weights(j, 3)
    check(
        "perturbed: lambda = 0 reduction",
        np.allclose(am0.nodes, base.nodes) and np.allclose(am0.weights, base.weights),
    )
    am2 = perturbed_spectral_measure(j, 2, 1.0)
    target = np.sort([(1 - np.sqrt(3)) / 2, (1 + np.sqrt(3)) / 2])
    check("perturbed: 2x2 closed form", np.allclose(am2.nodes, target, atol=1e-13))

    from .opuc import (
        VerblunskyData,
        cd_kernel_diag_circle,
        circle_prufer_phase,
        monic_coefficients,
        opuc_zeros,
    )

    free = VerblunskyData(alpha=np.zeros(6, complex))
    coeffs = monic_coefficients(free, 4).coefficients
    check(
        "szego: free coefficients are z^n",
        abs(coeffs[-1] - 1) < 1e-15 and np.allclose(coeffs[:-1], 0),
    )
    check("szego: free kernel n + 1", abs(cd_kernel_diag_circle(free, 0.3, 4) - 5) < 1e-12)
    check("szego: free zeros at origin", np.allclose(opuc_zeros(free, 3), 0))
    _, eta = circle_prufer_phase(free, 2, np.linspace(0, 2 * np.pi, 257))
    check("prufer: free winding", abs((eta[-1] - eta[0]) - 2 * np.pi * 3) < 1e-10)

    half = VerblunskyData(alpha=np.array([-0.5 + 0j]))
    vals = __import__("cdlab.opuc", fromlist=["eval_szego"]).eval_szego(half, 1.0 + 0j, 1)
    check(
        "szego: alpha = -1/2 values",
        abs(vals.values[1] - (1.5 * 2 / np.sqrt(3))) < 1e-14
        and abs(vals.reversed_values[1] - (1.5 * 2 / np.sqrt(3))) < 1e-14,
    )

    from .approx import (
        CutoffWindow,
        SecondKindSpec,
        balayage_circle_moment,
        christoffel_ratio,
        outlier_point,
        second_kind_integral,
    )
    from .measures import AtomicMeasure

    w1 = CutoffWindow(M=1.0)
    check("outlier: lambda = 0 absent", outlier_point(j, 2, 0.0, w1) is None)
    ratio, bound, ok = christoffel_ratio(j, 2, 0, 2.0, w1)
    check("christoffel: k = 0", ratio == 1.0 and bound == 1.0 and ok)
    origin = AtomicMeasure(nodes=[0.0 + 0j], weights=[1.0])
    check("balayage: point mass at 0", balayage_circle_moment(origin, 1.0, 2) == 0)
    check("balayage: mass preserved", balayage_circle_moment(origin, 1.0, 0) == 1.0)
    athalf = AtomicMeasure(nodes=[0.5 + 0j], weights=[1.0])
    check("balayage: atom at 1/2", balayage_circle_moment(athalf, 2.0, 1) == 0.5)
    s = SecondKindSpec(jacobi=jacobi_from_measure(cheb, 3), n=0)
    check("second kind: rho_0 mass", abs(second_kind_integral(s, lambda x: np.ones_like(x)) - 1) < 1e-9)

    from .harness import random_measure, verify_circle

    r1 = random_measure("circle", 5, 0)
    r2 = random_measure("circle", 5, 0)
    check("random: deterministic", r1 == r2)
    check("random: coefficients bounded", max(abs(a) for a in r1.alpha) <= 0.5)
    report = verify_circle(uniform, [4, 9], [0, 1, 2])
    gaps = [r.gap for r in report.rows]
    check("verify: uniform gaps vanish", report.all_ok and max(gaps) < 1e-12)

    failures = sum(1 for _, ok in checks if not ok)
    print(f"selftest: {len(checks) - failures}/{len(checks)} checks passed")
    return 0 if failures == 0 else 2

"""Command-line front end.

Subcommands: verify-circle, verify-real, zeros, prufer, rho,
bernstein-szego, corollary, selftest.  Every numeric result is also
written as CSV (plus a JSON manifest that can be fed back through
``--config`` to reproduce the run byte for byte).

Exit codes: 0 when every row/check is ok, 2 when any bound or identity is
violated, 1 on usage or configuration errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import CdLabError, ConfigError
from . import measures
from .measures import (
    CircleWeighted,
    RealWeighted,
    from_json_dict,
    is_circle,
    moment,
    to_json_dict,
)
from .harness import (
    corollary_check,
    random_measure,
    report_to_csv,
    verify_circle,
    verify_real,
    write_manifest,
)
from . import selftest as _selftest

OUT_ENV = "CDLAB_OUT"
DEFAULT_OUT = "cdlab-out"


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on usage errors; the contract here
    reserves 2 for bound violations, so remap to 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def parse_int_set(text) -> list[int]:
    """'4..100', '4..100..2', '1,2,5', plain ints, or explicit lists."""
    if isinstance(text, int):
        return [text]
    if isinstance(text, (list, tuple)):
        return sorted({int(v) for v in text})
    if isinstance(text, dict):
        extra = set(text) - {"start", "stop", "step"}
        if extra:
            raise ConfigError(f"unknown range key {sorted(extra)[0]!r}", key=sorted(extra)[0])
        return list(range(int(text["start"]), int(text["stop"]) + 1, int(text.get("step", 1))))
    text = str(text).strip()
    if "," in text:
        return sorted({int(p) for p in text.split(",") if p.strip()})
    if ".." in text:
        parts = text.split("..")
        if len(parts) == 2:
            start, stop, step = int(parts[0]), int(parts[1]), 1
        elif len(parts) == 3:
            start, stop, step = (int(p) for p in parts)
        else:
            raise ConfigError(f"cannot parse range {text!r}")
        if step < 1 or stop < start:
            raise ConfigError(f"empty or backwards range {text!r}")
        return list(range(start, stop + 1, step))
    return [int(text)]


_CONFIG_KEYS = {
    "command", "measure", "measure_path", "fixture", "random",
    "n", "k", "ell", "radius", "seed", "grid_points", "tolerances", "out",
}


def load_config(path: str) -> dict:
    """Strict JSON run configuration; also accepts a previously written
    manifest (whose resolved config is reused verbatim)."""
    try:
        doc = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}")
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    if doc.get("schema") == "cdlab.manifest.v1":
        doc = doc.get("config", {})
    extra = set(doc) - _CONFIG_KEYS
    if extra:
        key = sorted(extra)[0]
        raise ConfigError(f"unknown config key {key!r}", key=key)
    if "random" in doc:
        rnd = doc["random"]
        bad = set(rnd) - {"kind", "size"}
        if bad:
            raise ConfigError(f"unknown random key {sorted(bad)[0]!r}")
    return doc


def _resolve_measure(args, config) -> measures.MeasureSpec:
    sources = [
        args.uniform, args.chebyshev, args.legendre,
        args.measure, args.random_verblunsky, args.random_atoms,
    ]
    given = sum(1 for s in sources if s)
    if given > 1:
        raise ConfigError("give exactly one measure source")
    if args.uniform:
        return CircleWeighted(family="uniform")
    if args.chebyshev:
        return RealWeighted(interval=(-1.0, 1.0), family="chebyshev-first-kind")
    if args.legendre:
        return RealWeighted(interval=(-1.0, 1.0), family="legendre-uniform")
    if args.measure:
        return measures.from_json(Path(args.measure).read_text())
    seed = args.seed if args.seed is not None else config.get("seed", 0)
    if args.random_verblunsky:
        return random_measure("circle", int(args.random_verblunsky), int(seed))
    if args.random_atoms:
        return random_measure("real", int(args.random_atoms), int(seed))
    # fall back to the config file
    if "measure" in config:
        return from_json_dict(config["measure"])
    if "measure_path" in config:
        return measures.from_json(Path(config["measure_path"]).read_text())
    if "fixture" in config:
        fixtures = {
            "uniform": CircleWeighted(family="uniform"),
            "chebyshev": RealWeighted(interval=(-1.0, 1.0), family="chebyshev-first-kind"),
            "legendre": RealWeighted(interval=(-1.0, 1.0), family="legendre-uniform"),
        }
        if config["fixture"] not in fixtures:
            raise ConfigError(f"unknown fixture {config['fixture']!r}", key="fixture")
        return fixtures[config["fixture"]]
    if "random" in config:
        rnd = config["random"]
        return random_measure(rnd["kind"], int(rnd["size"]), int(config.get("seed", 0)))
    raise ConfigError("no measure given (flag, --measure file, or config)")


def _resolve(args, name, config, default=None):
    flag = getattr(args, name, None)
    if flag is not None:
        return flag
    return config.get(name, default)


def _single_int(value, what: str) -> int:
    vals = parse_int_set(value)
    if len(vals) != 1:
        raise ConfigError(f"{what} must be a single integer, got {value!r}")
    return vals[0]


def _out_dir(args, config) -> Path:
    out = _resolve(args, "out", config) or os.environ.get(OUT_ENV) or DEFAULT_OUT
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _tolerances(config) -> Tolerances:
    overrides = config.get("tolerances", {})
    try:
        return DEFAULT_TOL.replace(**overrides)
    except KeyError as exc:
        raise ConfigError(f"unknown tolerance key {exc.args[0]}", key=str(exc.args[0]))


def _write(out: Path, stem: str, csv_text: str, manifest: str) -> None:
    (out / f"{stem}.csv").write_text(csv_text)
    (out / f"{stem}.manifest.json").write_text(manifest)


def _rows_csv(schema: str, header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    buf.write(f"# schema: {schema}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def _manifest_for(command: str, spec, config_used: dict, tol: Tolerances, extra=None) -> str:
    doc = {
        "schema": "cdlab.manifest.v1",
        "config": config_used,
        "metadata": {
            "command": command,
            "spec": to_json_dict(spec),
            "spec_hash": measures.spec_hash(spec),
            "tolerances": tol.asdict(),
        },
    }
    if extra:
        doc["metadata"].update(extra)
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _fmt(x: float) -> str:
    return repr(float(x))


# ---------------------------------------------------------------------------
# subcommand implementations
# ---------------------------------------------------------------------------

def _cmd_verify(args, config, circle: bool) -> int:
    spec = _resolve_measure(args, config)
    tol = _tolerances(config)
    n_set = parse_int_set(_resolve(args, "n", config, "10..50"))
    k_set = parse_int_set(_resolve(args, "k", config, "0..4"))
    seed = _resolve(args, "seed", config)
    out = _out_dir(args, config)
    command = "verify-circle" if circle else "verify-real"
    config_used = {
        "command": command,
        "measure": to_json_dict(spec),
        "n": n_set,
        "k": k_set,
        "seed": seed,
        "tolerances": config.get("tolerances", {}),
        "out": str(out),
    }
    if circle:
        report = verify_circle(spec, n_set, k_set, tol=tol, seed=seed)
        rate_ok = True
    else:
        report, _fits = verify_real(spec, n_set, k_set, tol=tol, seed=seed)
        rate_ok = report.metadata.get("rate_ok", True)
    stem = command.replace("-", "_")
    _write(out, stem, report_to_csv(report), write_manifest(report, config_used))
    fails = report.failures()
    print(f"{command}: {len(report.rows)} rows, {len(fails)} failures -> {out / (stem + '.csv')}")
    for row in fails[:10]:
        print(f"  FAIL n={row.n} k={row.k} gap={row.gap!r} bound={row.bound!r} {row.note}")
    if not rate_ok:
        print("  FAIL decay-rate fit slope above -0.8")
    return 0 if report.all_ok and rate_ok else 2


def _cmd_zeros(args, config) -> int:
    spec = _resolve_measure(args, config)
    tol = _tolerances(config)
    n = _single_int(_resolve(args, "n", config, 8), "zeros degree")
    out = _out_dir(args, config)
    if is_circle(spec):
        from .opuc import opuc_zeros, verblunsky_from_measure

        v = verblunsky_from_measure(spec, n, tol=tol)
        zeros = opuc_zeros(v, n, tol=tol)
        rows = [[i, _fmt(z.real), _fmt(z.imag), _fmt(1.0 / n)] for i, z in enumerate(zeros)]
    else:
        from .oprl import jacobi_from_measure, zeros_and_weights

        j = jacobi_from_measure(spec, n + 1, tol=tol)
        rule = zeros_and_weights(j, n, tol=tol)
        rows = [
            [i, _fmt(x), _fmt(0.0), _fmt(w)]
            for i, (x, w) in enumerate(zip(rule.nodes, rule.weights))
        ]
    config_used = {"command": "zeros", "measure": to_json_dict(spec), "n": n, "out": str(out)}
    csv_text = _rows_csv("cdlab.zeros.v1", ["index", "re", "im", "weight"], rows)
    _write(out, "zeros", csv_text, _manifest_for("zeros", spec, config_used, tol))
    print(f"zeros: degree {n}, {len(rows)} zeros -> {out / 'zeros.csv'}")
    return 0


def _cmd_prufer(args, config) -> int:
    spec = _resolve_measure(args, config)
    tol = _tolerances(config)
    n = _single_int(_resolve(args, "n", config, 8), "phase index")
    grid_points = int(_resolve(args, "grid_points", config, 1 << 14))
    out = _out_dir(args, config)
    config_used = {
        "command": "prufer", "measure": to_json_dict(spec), "n": n,
        "grid_points": grid_points, "out": str(out),
    }
    if is_circle(spec):
        from .opuc import (
            circle_prufer_phase,
            opuc_zeros,
            poisson_sum,
            prufer_identity_residuals,
            szego_table,
            verblunsky_from_measure,
        )

        v = verblunsky_from_measure(spec, n + 1, tol=tol)
        grid = np.linspace(0.0, 2.0 * np.pi, grid_points + 1)
        _, eta = circle_prufer_phase(v, n, grid, tol=tol)
        winding = eta[-1] - eta[0]
        r1, r2 = prufer_identity_residuals(v, spec, n, grid_points, tol=tol)
        h = grid[1] - grid[0]
        deriv = (eta[2:] - eta[:-2]) / (2 * h)
        inner = grid[1:-1]
        zeros = opuc_zeros(v, n + 1, tol=tol)
        poisson = poisson_sum(zeros, inner)
        z = np.exp(1j * inner)
        p, _ = szego_table(v, z, n + 1)
        kern = (np.abs(p[: n + 1]) ** 2).sum(axis=0) / np.abs(p[n + 1]) ** 2
        rows = [
            [_fmt(t), _fmt(e), _fmt(d), _fmt(ps), _fmt(kr)]
            for t, e, d, ps, kr in zip(inner, eta[1:-1], deriv, poisson, kern)
        ]
        csv_text = _rows_csv(
            "cdlab.prufer-circle.v1",
            ["theta", "eta", "deta", "poisson_sum", "kernel_ratio"],
            rows,
        )
        ok = (
            r1 <= 1e-5 and r2 <= 1e-5
            and abs(winding - 2 * np.pi * (n + 1)) <= 1e-8
        )
        extra = {"r1": r1, "r2": r2, "winding": winding, "ok": ok}
        print(f"prufer: winding {winding!r} (target {2 * np.pi * (n + 1)!r}), r1={r1:.3e}, r2={r2:.3e}")
    else:
        from .approx import SecondKindSpec, second_kind_density
        from .oprl import cd_kernel_diag, jacobi_from_measure, real_prufer_phase
        from .measures import support_radius

        j = jacobi_from_measure(spec, n + 3, tol=tol)
        m_bound = support_radius(spec)
        grid = np.linspace(-(m_bound + 1.0), m_bound + 1.0, grid_points + 1)
        theta = real_prufer_phase(j, n + 1, grid, tol=tol)
        h = grid[1] - grid[0]
        deriv = (theta[2:] - theta[:-2]) / (2 * h) / np.pi
        inner = grid[1:-1]
        dens = second_kind_density(SecondKindSpec(jacobi=j, n=n))(inner)
        kern = cd_kernel_diag(j, inner, n)
        resid = float(np.abs(deriv - kern * dens).max())
        rows = [
            [_fmt(x), _fmt(t), _fmt(d), _fmt(kd)]
            for x, t, d, kd in zip(inner, theta[1:-1], deriv, kern * dens)
        ]
        csv_text = _rows_csv(
            "cdlab.prufer-real.v1",
            ["x", "theta", "dtheta_over_pi", "kernel_times_density"],
            rows,
        )
        ok = resid <= 1e-5
        extra = {"residual": resid, "ok": ok}
        print(f"prufer: phase-derivative identity residual {resid:.3e}")
    _write(out, "prufer", csv_text, _manifest_for("prufer", spec, config_used, tol, extra))
    return 0 if ok else 2


def _cmd_rho(args, config) -> int:
    from .approx import SecondKindSpec, second_kind_integral
    from .oprl import jacobi_from_measure

    spec = _resolve_measure(args, config)
    if is_circle(spec):
        raise ConfigError("rho needs a real-line measure")
    tol = _tolerances(config)
    n = _single_int(_resolve(args, "n", config, 5), "second-kind index")
    ells = parse_int_set(_resolve(args, "ell", config, f"0..{2 * n}"))
    out = _out_dir(args, config)
    j = jacobi_from_measure(spec, n + 2, tol=tol)
    s = SecondKindSpec(jacobi=j, n=n)
    rows = []
    all_ok = True
    for ell in ells:
        if ell > 2 * n:
            raise ConfigError(f"moment order {ell} exceeds the matching range 2n = {2 * n}")
        val = second_kind_integral(s, lambda x, e=ell: x**e, tol=tol)
        ref = float(np.real(moment(spec, ell, tol=tol)))
        diff = abs(val - ref)
        ok = diff <= 1e-8 * max(1.0, abs(ref))
        all_ok &= ok
        rows.append([ell, _fmt(val), _fmt(ref), _fmt(diff), str(ok).lower()])
    config_used = {
        "command": "rho", "measure": to_json_dict(spec), "n": n, "ell": ells,
        "out": str(out),
    }
    csv_text = _rows_csv(
        "cdlab.rho.v1", ["ell", "rho_moment", "mu_moment", "diff", "ok"], rows
    )
    _write(out, "rho", csv_text, _manifest_for("rho", spec, config_used, tol))
    print(f"rho: index {n}, moments through {max(ells)}, ok={all_ok}")
    return 0 if all_ok else 2


def _cmd_bernstein_szego(args, config) -> int:
    from .approx import bernstein_szego_moment
    from .opuc import verblunsky_from_measure

    spec = _resolve_measure(args, config)
    if not is_circle(spec):
        raise ConfigError("bernstein-szego needs a circle measure")
    tol = _tolerances(config)
    n = _single_int(_resolve(args, "n", config, 8), "Bernstein-Szego index")
    k_set = parse_int_set(_resolve(args, "k", config, f"0..{n}"))
    out = _out_dir(args, config)
    v = verblunsky_from_measure(spec, n + 1, tol=tol)
    rows = []
    all_ok = True
    for k in k_set:
        bs = bernstein_szego_moment(v, n, k, tol=tol)
        ref = moment(spec, k, tol=tol)
        diff = abs(bs - ref)
        ok = diff <= 1e-9 if k <= n else True  # matching is only promised through n
        all_ok &= ok
        rows.append(
            [k, _fmt(bs.real), _fmt(bs.imag), _fmt(ref.real), _fmt(ref.imag),
             _fmt(diff), str(ok).lower()]
        )
    config_used = {
        "command": "bernstein-szego", "measure": to_json_dict(spec), "n": n,
        "k": k_set, "out": str(out),
    }
    csv_text = _rows_csv(
        "cdlab.bernstein-szego.v1",
        ["k", "bs_re", "bs_im", "mu_re", "mu_im", "diff", "ok"],
        rows,
    )
    _write(out, "bernstein_szego", csv_text, _manifest_for("bernstein-szego", spec, config_used, tol))
    print(f"bernstein-szego: index {n}, k through {max(k_set)}, ok={all_ok}")
    return 0 if all_ok else 2


def _cmd_corollary(args, config) -> int:
    spec = _resolve_measure(args, config)
    tol = _tolerances(config)
    n_set = parse_int_set(_resolve(args, "n", config, "5..20..5"))
    k_set = parse_int_set(_resolve(args, "k", config, "0..4"))
    radius = float(_resolve(args, "radius", config, 2.0))
    seed = _resolve(args, "seed", config)
    out = _out_dir(args, config)
    report = corollary_check(spec, n_set, radius, k_set, tol=tol, seed=seed)
    config_used = {
        "command": "corollary", "measure": to_json_dict(spec), "n": n_set,
        "k": k_set, "radius": radius, "seed": seed, "out": str(out),
    }
    _write(out, "corollary", report_to_csv(report), write_manifest(report, config_used))
    fails = report.failures()
    print(f"corollary: {len(report.rows)} rows, {len(fails)} failures")
    return 0 if report.all_ok else 2


# ---------------------------------------------------------------------------
# argument wiring
# ---------------------------------------------------------------------------

def _add_measure_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--uniform", action="store_true", help="uniform (arclength) circle measure")
    p.add_argument("--chebyshev", action="store_true", help="Chebyshev weight on [-1, 1]")
    p.add_argument("--legendre", action="store_true", help="uniform weight on [-1, 1]")
    p.add_argument("--measure", help="path to a measure JSON document")
    p.add_argument("--random-verblunsky", type=int, metavar="SIZE",
                   help="seeded random Verblunsky coefficients, |alpha| <= 0.5")
    p.add_argument("--random-atoms", type=int, metavar="SIZE",
                   help="seeded random atoms on [-1, 1]")
    p.add_argument("--seed", type=int, help="seed for random measures")
    p.add_argument("--out", help=f"output directory (or ${OUT_ENV})")
    p.add_argument("--config", help="JSON run config (flags override it)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cdlab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    for name, helptext in [
        ("verify-circle", "moment discrepancy vs the exact 2k/(n+1) bound"),
        ("verify-real", "moment discrepancy vs a measured C/(n+1) envelope"),
    ]:
        p = sub.add_parser(name, help=helptext)
        _add_measure_flags(p)
        p.add_argument("--n", help="degrees, e.g. 10..200 or 10,20,50")
        p.add_argument("--k", help="moment orders, e.g. 1..8")

    p = sub.add_parser("zeros", help="zeros of p_n (with Gaussian weights on the line)")
    _add_measure_flags(p)
    p.add_argument("--n", help="polynomial degree")

    p = sub.add_parser("prufer", help="Prufer phase and its derivative identities")
    _add_measure_flags(p)
    p.add_argument("--n", help="phase index (uses p_{n+1})")
    p.add_argument("--grid-points", dest="grid_points", type=int, help="uniform grid size")

    p = sub.add_parser("rho", help="second-kind measure moments vs the measure's moments")
    _add_measure_flags(p)
    p.add_argument("--n", help="second-kind index")
    p.add_argument("--ell", help="moment orders, at most 2n")

    p = sub.add_parser("bernstein-szego", help="Bernstein-Szego moment matching")
    _add_measure_flags(p)
    p.add_argument("--n", help="Bernstein-Szego index")
    p.add_argument("--k", help="moment orders")

    p = sub.add_parser("corollary", help="balayage onto |z| = R preserves the moment gap")
    _add_measure_flags(p)
    p.add_argument("--n", help="degrees")
    p.add_argument("--k", help="moment orders")
    p.add_argument("--radius", type=float, help="balayage circle radius (> support bound)")

    sub.add_parser("selftest", help="run the built-in example checks")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "selftest":
            return _selftest.run()
        config = load_config(args.config) if getattr(args, "config", None) else {}
        if config.get("command") not in (None, args.command):
            raise ConfigError(
                f"config is for {config['command']!r}, invoked {args.command!r}",
                key="command",
            )
        if args.command == "verify-circle":
            return _cmd_verify(args, config, circle=True)
        if args.command == "verify-real":
            return _cmd_verify(args, config, circle=False)
        if args.command == "zeros":
            return _cmd_zeros(args, config)
        if args.command == "prufer":
            return _cmd_prufer(args, config)
        if args.command == "rho":
            return _cmd_rho(args, config)
        if args.command == "bernstein-szego":
            return _cmd_bernstein_szego(args, config)
        if args.command == "corollary":
            return _cmd_corollary(args, config)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"cdlab: config error: {exc}", file=sys.stderr)
        return 1
    except CdLabError as exc:
        print(f"cdlab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"cdlab: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())

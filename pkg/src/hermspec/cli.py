"""Command-line front end: transforms, evolutions, norms, fits, and verification.

Subcommands: eval, transform, project, evolve, norm, kappa, fit-kappa,
strichartz, sharpness, mehler-check, verify, plot.

Exit codes: 0 on success, 1 on usage or validation errors, 2 when a
verification-style check fails.  Every output file embeds a metadata header
(artifact version, config hash, seed, grid parameters) sufficient to
reproduce the run; nothing time- or host-dependent is ever written, so equal
invocations produce byte-identical files.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import math
import sys
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

import numpy as np

from . import __version__
from .hermite import GridSpec, default_grid, hermite_eval_single, phi_eval
from .propagator import (
    SingularTimeError,
    calibrate_phase,
    evolve_eigen,
    evolve_kernel,
    kernel_grid,
)
from .spaces import lp_norm, sobolev_norm, triebel_norm
from .svgplot import svg_loglog
from .transform import (
    SpectralField,
    analyze,
    kernel_phi_k,
    mehler_closed_form,
    project,
    synthesize,
)
from .verify import (
    CHECKS,
    ExcludedExponentError,
    ExperimentConfig,
    fit_exponent,
    geometric_k_range,
    kappa_p,
    kappa_pq,
    projection_norm_1d,
    random_band_limited,
    run_suite,
    sharpness_probe,
    strichartz_ratio,
)

logger = logging.getLogger("hermspec.cli")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CHECK_FAILED = 2


class _Parser(argparse.ArgumentParser):
    """argparse variant that exits with code 1 on usage errors (not 2)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _parse_extended(text: str) -> float:
    if text.lower() in ("inf", "infinity"):
        return math.inf
    return float(text)


def _parse_mu(text: str) -> Tuple[int, ...]:
    try:
        mu = tuple(int(part) for part in text.split(","))
    except ValueError:
        raise ValueError(f"malformed multi-index {text!r}; expected e.g. '1,0'") from None
    if not mu or any(m < 0 for m in mu):
        raise ValueError(f"multi-index entries must be non-negative integers, got {text!r}")
    return mu


def _parse_point(text: str) -> Tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(","))
    except ValueError:
        raise ValueError(f"malformed point {text!r}; expected e.g. '0.0,2.0'") from None


def _parse_k_range(text: str) -> List[int]:
    if ":" in text:
        lo, hi = text.split(":", 1)
        return geometric_k_range(int(lo), int(hi))
    ks = sorted({int(part) for part in text.split(",")})
    if len(ks) < 3:
        raise ValueError("k range must contain at least 3 values (or use lo:hi)")
    return ks


def _args_digest(args: argparse.Namespace) -> str:
    # file paths are excluded: equal runs must hash equal wherever they are written
    skip = {"func", "input", "output", "config"}
    payload = {
        k: (str(v) if isinstance(v, float) and math.isinf(v) else v)
        for k, v in sorted(vars(args).items())
        if k not in skip and isinstance(v, (int, float, str, bool, type(None), list, tuple))
    }
    return hashlib.sha256(json.dumps(payload, sort_keys=True, default=str).encode()).hexdigest()


def _meta(args: argparse.Namespace, grid: GridSpec | None = None) -> List[Tuple[str, str]]:
    meta = [
        ("artifact", f"hermspec {__version__}"),
        ("command", args.command),
        ("config_sha256", _args_digest(args)),
    ]
    seed = getattr(args, "seed", None)
    if seed is not None:
        meta.append(("seed", str(seed)))
    if grid is not None:
        meta.append(
            (
                "grid",
                f"dim={grid.dim} half_width={grid.half_width!r} "
                f"points_per_dim={grid.points_per_dim} time_points={grid.time_points}",
            )
        )
    return meta


def _emit(text: str, output: str | None) -> None:
    if output is None or output == "-":
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)


def _emit_json(payload: dict, args: argparse.Namespace, grid: GridSpec | None = None) -> None:
    body = {"meta": dict(_meta(args, grid)), **payload}
    _emit(json.dumps(body, indent=2) + "\n", getattr(args, "output", None))


def _emit_csv(rows: Sequence[Tuple], header: Sequence[str], args, grid=None) -> None:
    lines = [f"# {k}: {v}" for k, v in _meta(args, grid)]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(format(v, ".17g") if isinstance(v, float) else str(v) for v in row))
    _emit("\n".join(lines) + "\n", getattr(args, "output", None))


def _grid_from_args(args, cutoff: int, d: int) -> GridSpec:
    grid = default_grid(cutoff, d, box_scale=getattr(args, "box_scale", 1.0),
                        time_points=getattr(args, "time_points", None))
    n = getattr(args, "grid_n", None)
    if n is not None:
        grid = GridSpec(d, grid.half_width, n, grid.time_points)
    return grid


def _emit_field(field: SpectralField, extra: dict, args, grid=None) -> None:
    """Field files are the plain {dim, cutoff, coeffs} object plus metadata keys."""
    _emit_json({**extra, **field.to_json_dict()}, args, grid)


def _load_field(path: str) -> SpectralField:
    try:
        payload = json.loads(Path(path).read_text())
        return SpectralField.from_json_dict(payload)
    except FileNotFoundError:
        raise ValueError(f"field file not found: {path}") from None
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ValueError(f"malformed field file {path}: {exc}") from None


# -- subcommand implementations ----------------------------------------------


def cmd_eval(args) -> int:
    if (args.k is None) == (args.mu is None):
        raise ValueError("pass exactly one of --k/--x or --mu/--point")
    if args.k is not None:
        if args.x is None:
            raise ValueError("--k requires --x")
        value = float(hermite_eval_single(args.k, args.x))
    else:
        mu = _parse_mu(args.mu)
        if args.point is None:
            raise ValueError("--mu requires --point")
        point = _parse_point(args.point)
        if len(point) != len(mu):
            raise ValueError(f"point has {len(point)} entries but multi-index has {len(mu)}")
        value = float(phi_eval(mu, np.array(point)))
    print(format(value, ".17g"))
    return EXIT_OK


def cmd_transform(args) -> int:
    if (args.mu is None) == (not args.random):
        raise ValueError("pass exactly one of --mu or --random")
    if args.mu is not None:
        mu = _parse_mu(args.mu)
        cutoff = args.cutoff if args.cutoff is not None else sum(mu)
        field = SpectralField.basis(mu, cutoff=cutoff)
    else:
        if args.cutoff is None:
            raise ValueError("--random requires --cutoff")
        field = random_band_limited(args.cutoff, args.d, args.seed)
    _emit_field(field, {}, args)
    return EXIT_OK


def cmd_project(args) -> int:
    field = _load_field(args.input)
    projected = project(field, args.k)
    _emit_field(projected, {}, args)
    return EXIT_OK


def cmd_evolve(args) -> int:
    field = _load_field(args.input)
    eigen = evolve_eigen(field, args.t)
    if args.method == "eigen":
        _emit_field(eigen, {"method": "eigen", "t": args.t}, args)
        return EXIT_OK

    grid = kernel_grid(field.cutoff, field.dim, args.t, box_scale=args.box_scale)
    if args.grid_n is not None:
        grid = GridSpec(field.dim, grid.half_width, args.grid_n, grid.time_points)
    convention = calibrate_phase(args.t, field.dim)
    evolved = evolve_kernel(synthesize(field, grid), args.t)
    via_kernel = analyze(evolved, field.cutoff)
    diff = np.linalg.norm(via_kernel.coeffs - eigen.coeffs)
    rel = float(diff / max(field.l2_norm(), 1e-300))
    logger.info(json.dumps({"event": "evolve_cross_check", "t": args.t,
                            "relative_l2_difference": rel}))
    result = eigen if args.method == "both" else via_kernel
    extra = {
        "method": args.method,
        "t": args.t,
        "calibration_phase": [convention.global_phase.real, convention.global_phase.imag],
        "eigen_vs_kernel_l2": rel,
    }
    _emit_field(result, extra, args, grid)
    return EXIT_OK


def cmd_norm(args) -> int:
    field = _load_field(args.input)
    grid = _grid_from_args(args, field.cutoff, field.dim)
    if args.kind == "lp":
        value = lp_norm(synthesize(field, grid), args.p)
    elif args.kind == "sobolev":
        if args.s is None:
            raise ValueError("--kind sobolev requires --s")
        value = sobolev_norm(field, args.s)
    else:
        if args.s is None:
            raise ValueError("--kind triebel requires --s (the smoothness order r)")
        value = triebel_norm(field, args.s, args.p, args.q, grid)
    _emit_json({"kind": args.kind, "p": str(args.p), "q": str(args.q), "s": args.s,
                "norm": value}, args, grid)
    return EXIT_OK


def cmd_kappa(args) -> int:
    if args.q is None:
        value = kappa_p(args.p, args.d)
        payload = {"d": args.d, "p": str(args.p), "kappa_p": value}
    else:
        value = kappa_pq(args.p, args.q, args.d)
        payload = {"d": args.d, "p": str(args.p), "q": str(args.q), "kappa_pq": value}
    _emit_json(payload, args)
    return EXIT_OK


def cmd_fit_kappa(args) -> int:
    if args.d != 1:
        raise ValueError(
            "empirical exponent fits are supported for d=1 only, where the eigenspaces "
            "are one-dimensional and the operator norm is exactly a single-function norm"
        )
    reference = kappa_p(args.p, args.d)  # may raise ExcludedExponentError -> exit 1
    ks = _parse_k_range(args.k)
    rows = []
    for k in ks:
        v = projection_norm_1d(k, args.p)
        rows.append((k, v, math.log(k), math.log(v)))
    fit = fit_exponent([(k, v) for k, v, _, _ in rows])
    summary = {
        "p": str(args.p),
        "slope": fit.slope,
        "intercept": fit.intercept,
        "r_squared": fit.r_squared,
        "kappa_reference": reference,
        "deviation": fit.slope - reference,
        "tolerance": args.tol,
    }
    if args.format == "csv":
        _emit_csv(rows, ("k", "value", "log_k", "log_value"), args)
    elif args.format == "svg":
        meta = _meta(args)
        text = svg_loglog([(k, v) for k, v, _, _ in rows], fit.slope, fit.intercept,
                          title=f"projection norm fit, p={args.p}", metadata=meta)
        _emit(text, args.output)
    else:
        _emit_json({"points": [list(r) for r in rows], "fit": summary}, args)
    print(
        f"fit-kappa: p={args.p} slope={fit.slope:.6f} reference={reference:.6f} "
        f"deviation={fit.slope - reference:+.6f}",
        file=sys.stderr,
    )
    if args.check and abs(fit.slope - reference) > args.tol:
        print(f"fit-kappa: |slope - kappa| exceeds tolerance {args.tol}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_OK


def cmd_strichartz(args) -> int:
    s = args.s if args.s is not None else kappa_pq(args.p, args.q, args.d)
    field = random_band_limited(args.cutoff, args.d, args.seed)
    grid = _grid_from_args(args, args.cutoff, args.d)
    ratio = strichartz_ratio(field, args.p, args.q, s, grid, args.time_points)
    _emit_json({"d": args.d, "cutoff": args.cutoff, "p": str(args.p), "q": str(args.q),
                "s": s, "ratio": ratio}, args, grid)
    return EXIT_OK


def cmd_sharpness(args) -> int:
    s = args.s if args.s is not None else kappa_pq(args.p, args.q, args.d)
    ks = _parse_k_range(args.k)
    fit = sharpness_probe(ks, args.p, args.q, s, args.d, args.seed)
    expected = kappa_pq(args.p, 2.0, args.d) - s if args.q == 2.0 else None
    rows = [
        (lam, math.exp(fit.intercept + fit.slope * math.log(lam)))
        for lam in fit.k_values
    ]
    summary = {
        "d": args.d, "p": str(args.p), "q": str(args.q), "s": s,
        "slope": fit.slope, "r_squared": fit.r_squared,
        "expected_slope": expected,
        "abscissa": "eigenvalue 2k+d",
    }
    if args.format == "csv":
        _emit_csv([(lam, v, math.log(lam), math.log(v)) for lam, v in rows],
                  ("k", "value", "log_k", "log_value"), args)
    else:
        _emit_json({"fit": summary}, args)
    print(f"sharpness: slope={fit.slope:+.5f} expected={expected}", file=sys.stderr)
    if args.check and expected is not None and abs(fit.slope - expected) > args.tol:
        return EXIT_CHECK_FAILED
    return EXIT_OK


def cmd_mehler_check(args) -> int:
    rng = np.random.default_rng(args.seed)
    worst = 0.0
    for _ in range(args.trials):
        omega = float(rng.uniform(-args.omega, args.omega))
        x = rng.uniform(-2.0, 2.0, size=args.d)
        y = rng.uniform(-2.0, 2.0, size=args.d)
        series = sum(omega**j * kernel_phi_k(j, x, y, args.d) for j in range(args.terms + 1))
        closed = mehler_closed_form(omega, x, y, args.d)
        worst = max(worst, abs(series - closed) / abs(closed))
    _emit_json({"d": args.d, "terms": args.terms, "trials": args.trials,
                "omega_max": args.omega, "max_relative_error": worst}, args)
    if args.check and worst > 1e-8:
        return EXIT_CHECK_FAILED
    return EXIT_OK


def _read_config_file(path: str) -> Dict[str, str]:
    out: Dict[str, str] = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValueError(f"cannot read config file {path}: {exc}") from None
    for i, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{i}: expected 'key = value', got {line!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


_CONFIG_FIELDS = {
    "d": int, "cutoff": int, "seed": int, "ensemble": int, "trials": int,
    "k_min": int, "k_max": int, "grid_n": int, "time_points": int,
    "p": _parse_extended, "q": float, "s": float, "box_scale": float,
    "half_width": float,
}


def _build_config(args) -> ExperimentConfig:
    settings: Dict[str, object] = {}
    if args.config:
        raw = _read_config_file(args.config)
        for key, value in raw.items():
            if key not in _CONFIG_FIELDS:
                raise ValueError(f"unknown config key {key!r}; valid: {sorted(_CONFIG_FIELDS)}")
            try:
                settings[key] = _CONFIG_FIELDS[key](value)
            except ValueError:
                raise ValueError(f"config key {key!r} has malformed value {value!r}") from None
    # CLI overrides beat the file, which beats the defaults
    for key in _CONFIG_FIELDS:
        cli_val = getattr(args, key, None)
        if cli_val is not None:
            settings[key] = cli_val
    return ExperimentConfig(**settings)


def cmd_verify(args) -> int:
    cfg = _build_config(args)
    only = None
    if args.only:
        only = [name.strip() for name in args.only.split(",")]
    report = run_suite(cfg, only=only)
    text = report.to_json()
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    for check in report.checks:
        print(f"[{'PASS' if check.passed else 'FAIL'}] {check.name}", file=sys.stderr)
    return EXIT_OK if report.overall_pass else EXIT_CHECK_FAILED


def cmd_plot(args) -> int:
    try:
        text = Path(args.input).read_text()
    except OSError as exc:
        raise ValueError(f"cannot read CSV file {args.input}: {exc}") from None
    points = []
    header_seen = False
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if not header_seen:
            cols = [c.strip().lower() for c in line.split(",")]
            if "k" not in cols or "value" not in cols:
                raise ValueError("CSV must have a header line with 'k' and 'value' columns")
            k_col, v_col = cols.index("k"), cols.index("value")
            header_seen = True
            continue
        parts = line.split(",")
        try:
            points.append((float(parts[k_col]), float(parts[v_col])))
        except (ValueError, IndexError):
            raise ValueError(f"malformed CSV row: {line!r}") from None
    if not points:
        raise ValueError("CSV contains no data rows")
    slope = intercept = None
    if len(points) >= 3:
        fit = fit_exponent([(int(round(k)), v) for k, v in points])
        slope, intercept = fit.slope, fit.intercept
    meta = _meta(args) + [("input_sha256", hashlib.sha256(text.encode()).hexdigest())]
    svg = svg_loglog(points, slope, intercept, title=Path(args.input).stem, metadata=meta)
    _emit(svg, args.output)
    return EXIT_OK


# -- parser wiring ------------------------------------------------------------


def _add_common(sub, *names):
    if "d" in names:
        sub.add_argument("--d", type=int, default=1, help="spatial dimension")
    if "cutoff" in names:
        sub.add_argument("--cutoff", type=int, default=None, help="spectral cutoff K")
    if "p" in names:
        sub.add_argument("--p", type=_parse_extended, default=math.inf,
                         help="spatial exponent (number or 'inf')")
    if "q" in names:
        sub.add_argument("--q", type=float, default=2.0, help="time exponent")
    if "s" in names:
        sub.add_argument("--s", type=float, default=None, help="smoothness order")
    if "t" in names:
        sub.add_argument("--t", type=float, required=True, help="evolution time")
    if "grid" in names:
        sub.add_argument("--grid-n", type=int, default=None, help="grid points per dimension")
        sub.add_argument("--box-scale", type=float, default=1.0,
                         help="multiplier on the auto-sized box half-width")
        sub.add_argument("--time-points", type=int, default=None, help="time grid size")
    if "seed" in names:
        sub.add_argument("--seed", type=int, default=20240901, help="random seed")
    if "output" in names:
        sub.add_argument("--output", default=None, help="output path (default stdout)")
    if "format" in names:
        sub.add_argument("--format", choices=("json", "csv", "svg"), default="csv")
    if "check" in names:
        sub.add_argument("--check", action="store_true",
                         help="exit 2 when the result misses its reference")


def build_parser() -> _Parser:
    parser = _Parser(prog="hermspec", description=__doc__)
    parser.add_argument("--version", action="version", version=f"hermspec {__version__}")
    parser.add_argument("--verbose", action="store_true", help="debug-level logging")
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("eval", help="evaluate h_k(x) or a tensor eigenfunction")
    sub.add_argument("--k", type=int, default=None)
    sub.add_argument("--x", type=float, default=None)
    sub.add_argument("--mu", default=None, help="multi-index, e.g. '1,0'")
    sub.add_argument("--point", default=None, help="point, e.g. '0.0,2.0'")
    sub.set_defaults(func=cmd_eval)

    sub = subs.add_parser("transform", help="build a coefficient field and write it as JSON")
    sub.add_argument("--mu", default=None, help="unit coefficient on this multi-index")
    sub.add_argument("--random", action="store_true", help="seeded random unit-norm field")
    _add_common(sub, "d", "cutoff", "seed", "output")
    sub.set_defaults(func=cmd_transform)

    sub = subs.add_parser("project", help="spectral projection of a field file")
    sub.add_argument("--input", required=True)
    sub.add_argument("--k", type=int, required=True, help="eigenspace degree")
    _add_common(sub, "output")
    sub.set_defaults(func=cmd_project)

    sub = subs.add_parser("evolve", help="propagate a field file")
    sub.add_argument("--input", required=True)
    sub.add_argument("--method", choices=("eigen", "kernel", "both"), default="eigen")
    _add_common(sub, "t", "grid", "output")
    sub.set_defaults(func=cmd_evolve)

    sub = subs.add_parser("norm", help="norms of a field file")
    sub.add_argument("--input", required=True)
    sub.add_argument("--kind", choices=("lp", "sobolev", "triebel"), default="lp")
    _add_common(sub, "p", "q", "s", "grid", "output")
    sub.set_defaults(func=cmd_norm)

    sub = subs.add_parser("kappa", help="sharp exponent table lookup")
    _add_common(sub, "d", "p", "output")
    sub.add_argument("--q", type=float, default=None, help="also add the time-exponent shift")
    sub.set_defaults(func=cmd_kappa)

    sub = subs.add_parser("fit-kappa", help="empirical projection-norm exponent fit (d=1)")
    _add_common(sub, "d", "p", "output", "format", "check")
    sub.add_argument("--k", default="64:1024", help="degree range lo:hi or comma list")
    sub.add_argument("--tol", type=float, default=0.03, help="|slope-kappa| tolerance for --check")
    sub.set_defaults(func=cmd_fit_kappa)

    sub = subs.add_parser("strichartz", help="space-time/smoothness ratio for a random field")
    _add_common(sub, "d", "cutoff", "p", "q", "s", "grid", "seed", "output")
    sub.set_defaults(func=cmd_strichartz, cutoff_default=16)

    sub = subs.add_parser("sharpness", help="ratio growth under eigenspace concentration")
    _add_common(sub, "d", "p", "q", "s", "seed", "output", "format", "check")
    sub.add_argument("--k", default="64:512", help="degree range lo:hi or comma list")
    sub.add_argument("--tol", type=float, default=0.03)
    sub.set_defaults(func=cmd_sharpness)

    sub = subs.add_parser("mehler-check", help="generating-series vs closed-form check")
    _add_common(sub, "d", "seed", "output", "check")
    sub.add_argument("--omega", type=float, default=0.5, help="|omega| bound for samples")
    sub.add_argument("--terms", type=int, default=60)
    sub.add_argument("--trials", type=int, default=20)
    sub.set_defaults(func=cmd_mehler_check)

    sub = subs.add_parser("verify", help="run the verification suite")
    sub.add_argument("--config", default=None, help="flat key=value config file")
    sub.add_argument("--only", default=None,
                     help=f"comma-separated check names; available: {','.join(CHECKS)}")
    sub.add_argument("--output", default=None, help="report path (default stdout)")
    # every knob defaults to None here so precedence is CLI > file > defaults
    sub.add_argument("--d", type=int, default=None)
    sub.add_argument("--cutoff", type=int, default=None)
    sub.add_argument("--seed", type=int, default=None)
    sub.add_argument("--grid-n", type=int, default=None, dest="grid_n")
    sub.add_argument("--box-scale", type=float, default=None, dest="box_scale")
    sub.add_argument("--time-points", type=int, default=None, dest="time_points")
    sub.add_argument("--p", type=_parse_extended, default=None)
    sub.add_argument("--q", type=float, default=None)
    sub.add_argument("--s", type=float, default=None)
    sub.add_argument("--half-width", type=float, default=None, dest="half_width")
    sub.add_argument("--ensemble", type=int, default=None)
    sub.add_argument("--trials", type=int, default=None)
    sub.add_argument("--k-min", type=int, default=None, dest="k_min")
    sub.add_argument("--k-max", type=int, default=None, dest="k_max")
    sub.set_defaults(func=cmd_verify)

    sub = subs.add_parser("plot", help="log-log SVG scatter from a k,value CSV")
    sub.add_argument("--input", required=True)
    _add_common(sub, "output")
    sub.set_defaults(func=cmd_plot)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(message)s",
    )
    if args.command == "strichartz" and args.cutoff is None:
        args.cutoff = 16
    try:
        return args.func(args)
    except (ValueError, ExcludedExponentError, SingularTimeError) as exc:
        print(f"hermspec {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

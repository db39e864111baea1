"""Command-line entry point.

One subcommand per analysis; every run writes a manifest next to its
outputs recording the inputs, parameters, and artifact version, and a
rerun from that manifest reproduces byte-identical files.  Tables are
CSV, verdicts are JSON, and numbers are serialized with 15 significant
digits.

Exit codes: 0 success, 2 configuration or validation failure, 3 analysis
error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

from . import __version__
from .approximation import Target, approximants, approximation_exponent_profile
from .corpus import CORPUS, corpus_path, export_corpus
from .dimension import (
    dimension_equation,
    evaluate_pressure,
    reciprocal_sum_audit,
    solve_dimension,
)
from .elliptic import Curve, ECPoint, canonical_height, neron_count
from .enumeration import (
    audit_exactness,
    curve_intersection_probe,
    enumerate_system,
    is_member,
    replay_certificate,
)
from .errors import ArithFractalError, ConfigError
from .growth import counting_function, fit_growth_exponent, geometric_grid, lemma_bound_check
from .heights import projective_census, schanuel_prediction, size_of
from .polynomials import parse_polynomial, parse_rational
from .spaces import (
    FractalSystem,
    load_system,
    parse_point,
    validate_system,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ANALYSIS = 3


def fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.15g}"
    return str(value)


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _write_manifest(out_dir: Path, subcommand: str, params: dict, outputs: list[str]) -> Path:
    manifest = {
        "artifact": "arithfractal",
        "version": __version__,
        "subcommand": subcommand,
        "parameters": params,
        "outputs": outputs,
        "deterministic": True,
    }
    path = out_dir / f"{subcommand}_manifest.json"
    _write_json(path, manifest)
    return path


def _load(path_text: str) -> FractalSystem:
    path = Path(path_text)
    if not path.exists():
        raise ConfigError(f"MissingFile: {path}")
    system = load_system(path)
    violations = validate_system(system)
    if violations:
        lines = "; ".join(f"{v.code} at {v.where} {v.index}: {v.message}" for v in violations)
        raise ConfigError(f"system fails validation: {lines}")
    return system


def _parse_curve(text: str) -> Curve:
    parts = [p for p in text.replace(";", ",").split(",") if p.strip()]
    if len(parts) != 5:
        raise ConfigError(f"curve must be a1,a2,a3,a4,a6: {text!r}")
    return Curve.from_coefficients([parse_rational(p) for p in parts])


def _parse_ec_point(text: str, curve: Curve) -> ECPoint:
    point = parse_point(text, "ec", curve)
    curve.require(point)
    return point


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _cmd_dim(args, out_dir: Path) -> int:
    system = _load(args.system)
    spec = dimension_equation(system, args.convention)
    result = solve_dimension(spec, args.tol)
    print(f"system: {system.label or args.system}")
    print(f"convention: {spec.convention}")
    print(f"weights: [{', '.join(fmt(w) for w in spec.weights)}]")
    print(f"s = {fmt(result.s)}")
    print(f"residual = {fmt(result.residual)} (tol {fmt(args.tol)}, {result.iterations} iterations)")
    payload = {
        "label": system.label,
        "convention": spec.convention,
        "weights": [fmt(w) for w in spec.weights],
        "s": fmt(result.s),
        "residual": fmt(result.residual),
        "iterations": result.iterations,
    }
    if system.space == "int":
        audit = reciprocal_sum_audit(system, args.tol)
        ok = "holds" if audit.s_at_most_one else "violated"
        print(
            f"reciprocal audit: sum(1/|a_i|) = {audit.reciprocal_sum} "
            f"= {fmt(float(audit.reciprocal_sum))}; dimension bound s <= 1 {ok}"
        )
        payload["reciprocal_sum"] = str(audit.reciprocal_sum)
        payload["s_at_most_one"] = audit.s_at_most_one
    _write_json(out_dir / "dim.json", payload)
    _write_manifest(
        out_dir,
        "dim",
        {"system": args.system, "tol": args.tol, "convention": args.convention},
        ["dim.json"],
    )
    return EXIT_OK


def _cmd_enumerate(args, out_dir: Path) -> int:
    system = _load(args.system)
    bag = enumerate_system(system, args.bound, args.max_points)
    out = Path(args.out) if args.out else out_dir / "points.csv"
    rows = [
        [str(e.point), e.size.raw, e.size.log_size, e.depth] for e in bag.entries
    ]
    _write_csv(out, ["point", "size", "log_size", "depth"], rows)
    print(f"{len(bag)} points up to size {bag.bound} (truncated: {bag.truncated})")
    print(f"wrote {out}")
    _write_manifest(
        out_dir,
        "enumerate",
        {
            "system": args.system,
            "bound": args.bound,
            "max_points": args.max_points,
            "out": str(out),
        },
        [str(out)],
    )
    return EXIT_OK


def _cmd_member(args, out_dir: Path) -> int:
    system = _load(args.system)
    point = parse_point(args.point, system.space, system.curve)
    result = is_member(system, point, args.depth_limit)
    if result.member:
        if result.via_fallback:
            print(f"{args.point}: member (decided by enumeration fallback)")
        else:
            replay = replay_certificate(system, result)
            print(f"{args.point}: member")
            print(f"certificate: seed {result.seed}, map path {list(result.path)}")
            print(f"replay check: {replay} == {point}: {replay == point}")
    else:
        print(f"{args.point}: not a member")
    _write_manifest(
        out_dir,
        "member",
        {"system": args.system, "point": args.point, "depth_limit": args.depth_limit},
        [],
    )
    return EXIT_OK


def _cmd_audit(args, out_dir: Path) -> int:
    system = _load(args.system)
    report = audit_exactness(system, args.bound, args.window)
    payload = {
        "label": system.label,
        "bound": report.bound,
        "window": report.window,
        "total_points": report.total_points,
        "covered_count": report.covered_count,
        "overlap_count": report.overlap_count,
        "uncovered_count": report.uncovered_count,
        "exact": report.exact,
        "overlaps": [
            {
                "point": str(rec.point),
                "witnesses": [[i, str(q)] for i, q in rec.witnesses],
            }
            for rec in report.overlaps[:50]
        ],
        "uncovered_sample": [str(p) for p in report.uncovered[:50]],
        "seed_coverage": [
            {"seed": str(s.seed), "is_image": s.is_image} for s in report.seed_coverage
        ],
    }
    out = out_dir / "audit.json"
    _write_json(out, payload)
    print(
        f"audit[{report.window}] bound {report.bound}: {report.total_points} points, "
        f"{report.overlap_count} overlaps, {report.uncovered_count} uncovered "
        f"-> {'exact' if report.exact else 'NOT exact'}"
    )
    print(f"wrote {out}")
    _write_manifest(
        out_dir,
        "audit",
        {"system": args.system, "bound": args.bound, "window": args.window},
        ["audit.json"],
    )
    return EXIT_OK


def _default_grid(system: FractalSystem, bag) -> list[float]:
    if bag.size_kind == "height":
        top = bag.max_log_bound()
        return geometric_grid(math.log(2), top, 2.0)
    if system.space == "gauss":
        return geometric_grid(4, bag.bound, 2.0)
    return geometric_grid(10, bag.bound, 10.0)


def _parse_grid(text: str, system: FractalSystem, bag) -> list[float]:
    if text == "auto":
        return _default_grid(system, bag)
    if text.startswith("geometric:"):
        factor = float(text.split(":", 1)[1])
        if bag.size_kind == "height":
            return geometric_grid(math.log(2), bag.max_log_bound(), factor)
        start = 4 if system.space == "gauss" else factor
        return geometric_grid(start, bag.bound, factor)
    return [float(p) for p in text.split(",") if p.strip()]


def _cmd_growth(args, out_dir: Path) -> int:
    system = _load(args.system)
    bag = enumerate_system(system, args.bound, args.max_points)
    grid = _parse_grid(args.grid, system, bag)
    table = counting_function(bag, grid)
    verdict: dict = {
        "label": system.label,
        "size_kind": table.size_kind,
        "points": len(bag),
    }
    lemma_exponents: list[tuple[str, float, str]] = []
    if args.check_lemmas:
        spec = dimension_equation(system)
        s_dim = solve_dimension(spec, args.tol).s
        gap_text = args.check_lemmas.replace("sdim", "").replace("±", "+-").strip()
        gap = float(gap_text.lstrip("+-")) if gap_text else 0.05
        lemma_exponents = [
            ("upper", s_dim + gap, "bounded"),
            ("lower", s_dim - gap, "bounded"),
            ("upper", s_dim - gap, "unbounded"),
        ]
        verdict["dimension"] = fmt(s_dim)
        checks = []
        for direction, s, expect in lemma_exponents:
            v = lemma_bound_check(table, s, direction)
            checks.append(
                {
                    "direction": direction,
                    "s": fmt(s),
                    "pressure": fmt(evaluate_pressure(spec, s)),
                    "bounded": v.bounded,
                    "expected": expect,
                    "tail_ratio": fmt(v.tail_ratio),
                    "tail_slope": fmt(v.monotone_tail_ratio),
                }
            )
        verdict["lemma_checks"] = checks
    if args.fit:
        fit = fit_growth_exponent(table)
        verdict["fit"] = {
            "exponent": fmt(fit.exponent),
            "intercept": fmt(fit.intercept),
            "rmse": fmt(fit.rmse),
            "window": [fmt(fit.window[0]), fmt(fit.window[1])],
            "points_used": fit.points_used,
        }
        print(f"fitted exponent: {fmt(fit.exponent)} (rmse {fmt(fit.rmse)})")

    header = ["x", "N"]
    probe_values = sorted({s for _, s, _ in lemma_exponents})
    for s in probe_values:
        header.append(f"h_s={fmt(s)}")
    rows = []
    for x, n in zip(table.grid, table.counts):
        row = [x, n]
        for s in probe_values:
            row.append(n * x**-s if x > 0 else "")
        rows.append(row)
    out = Path(args.out) if args.out else out_dir / "growth.csv"
    _write_csv(out, header, rows)
    _write_json(out_dir / "growth_verdict.json", verdict)
    print(json.dumps(verdict, indent=2, sort_keys=True))
    _write_manifest(
        out_dir,
        "growth",
        {
            "system": args.system,
            "bound": args.bound,
            "grid": args.grid,
            "fit": args.fit,
            "check_lemmas": args.check_lemmas,
            "tol": args.tol,
            "max_points": args.max_points,
            "out": str(out),
        },
        [str(out), "growth_verdict.json"],
    )
    return EXIT_OK


def _cmd_census(args, out_dir: Path) -> int:
    count = projective_census(args.n, args.bound, args.threads)
    if args.compare_schanuel:
        prediction = schanuel_prediction(args.n, args.bound)
        ratio = count / prediction
        row = [args.bound, count, prediction, ratio]
        print(
            f"census(n={args.n}, x={args.bound}) = {count}; "
            f"prediction {fmt(prediction)}; ratio {fmt(ratio)}"
        )
    else:
        row = [args.bound, count, "", ""]
        print(f"census(n={args.n}, x={args.bound}) = {count}")
    out = Path(args.out) if args.out else out_dir / "census.csv"
    _write_csv(out, ["bound", "count", "prediction", "ratio"], [row])
    _write_manifest(
        out_dir,
        "census",
        {
            "n": args.n,
            "bound": args.bound,
            "compare_schanuel": args.compare_schanuel,
            "threads": args.threads,
            "out": str(out),
        },
        [str(out)],
    )
    return EXIT_OK


def _infer_space(text: str) -> str:
    s = text.strip()
    if s.endswith("i") and not s.endswith("inf"):
        return "gauss"
    if ":" in s:
        return "projq"
    if "," in s:
        return "affq"
    return "int"


def _cmd_height(args, out_dir: Path) -> int:
    space = args.space or _infer_space(args.point)
    point = parse_point(args.point, space)
    size = size_of(point)
    print(f"point: {point} (space {space})")
    print(f"size: {size.raw}")
    print(f"log size: {fmt(size.log_size)}")
    _write_manifest(
        out_dir, "height", {"point": args.point, "space": space}, []
    )
    return EXIT_OK


def _cmd_approx(args, out_dir: Path) -> int:
    system = _load(args.system)
    bag = enumerate_system(system, args.bound, args.max_points)
    target = Target.parse(args.target, system.space)
    result = approximants(bag, target, args.delta, args.C)
    profile = approximation_exponent_profile(bag, target)
    out = Path(args.out) if args.out else out_dir / "hits.csv"
    rows = [
        [str(r.point), r.h, r.d, r.exponent if r.exponent is not None else ""]
        for r in result.hits
    ]
    _write_csv(out, ["point", "h", "d", "exponent"], rows)
    top_half_hits = sum(result.decile_counts[5:])
    stabilized = top_half_hits == 0
    print(f"{len(result.hits)} hits for d <= C*exp(-delta*h) (exact hits: {len(result.exact_hits)})")
    print(f"hit counts per height decile: {list(result.decile_counts)}")
    print(
        f"stabilization verdict: {'stabilized' if stabilized else 'NOT stabilized'} "
        f"({top_half_hits} hits in the top half of the height range)"
    )
    print(f"exponent profile: max {fmt(profile.max_exponent)}, tail {fmt(profile.tail_exponent)}")
    _write_json(
        out_dir / "approx_verdict.json",
        {
            "label": system.label,
            "target": args.target,
            "delta": args.delta,
            "C": args.C,
            "hits": len(result.hits),
            "decile_counts": list(result.decile_counts),
            "stabilized": stabilized,
            "max_exponent": fmt(profile.max_exponent),
            "tail_exponent": fmt(profile.tail_exponent),
        },
    )
    _write_manifest(
        out_dir,
        "approx",
        {
            "system": args.system,
            "target": args.target,
            "delta": args.delta,
            "C": args.C,
            "bound": args.bound,
            "max_points": args.max_points,
            "out": str(out),
        },
        [str(out), "approx_verdict.json"],
    )
    return EXIT_OK


def _cmd_intersect(args, out_dir: Path) -> int:
    system = _load(args.system)
    if system.space != "affq":
        raise ConfigError("intersect expects an affine rational system")
    nvars = system.maps[0].nvars()
    curve = parse_polynomial(args.curve, nvars)
    bounds = [int(float(b)) for b in args.bounds.split(",") if b.strip()]
    probe = curve_intersection_probe(system, curve, bounds)
    out = Path(args.out) if args.out else out_dir / "intersect.csv"
    rows = [[b, c] for b, c in zip(probe.bounds, probe.counts)]
    _write_csv(out, ["bound", "count"], rows)
    final = ", ".join(str(p) for p in probe.hits_per_bound[-1]) or "(none)"
    print(f"curve: {curve}")
    print(f"counts per bound: {list(probe.counts)}")
    print(f"intersection at top bound: {final}")
    print(f"stabilized: {probe.stabilized}")
    _write_manifest(
        out_dir,
        "intersect",
        {"system": args.system, "curve": args.curve, "bounds": args.bounds, "out": str(out)},
        [str(out)],
    )
    return EXIT_OK


def _cmd_ec(args, out_dir: Path) -> int:
    curve = _parse_curve(args.curve)
    if args.ec_command == "height":
        if not args.point:
            raise ConfigError("ec height needs --point")
        point = _parse_ec_point(args.point, curve)
        result = canonical_height(curve, point, args.tol)
        print(f"curve: {curve}")
        print(f"point: {point}")
        if result.torsion:
            print("torsion point: canonical height 0")
        else:
            print(f"canonical height: {fmt(result.value)} (after {result.doublings} doublings)")
        _write_manifest(
            out_dir,
            "ec",
            {"ec_command": "height", "curve": args.curve, "point": args.point, "tol": args.tol},
            [],
        )
        return EXIT_OK
    if args.ec_command == "neron":
        if not args.gen or not args.grid:
            raise ConfigError("ec neron needs --gen and --grid")
        generator = _parse_ec_point(args.gen, curve)
        torsion = []
        if args.torsion:
            for chunk in args.torsion.split(";"):
                if chunk.strip():
                    torsion.append(_parse_ec_point(chunk, curve))
        grid = [float(x) for x in args.grid.split(",") if x.strip()]
        result = neron_count(curve, generator, torsion, grid, args.tol)
        out = Path(args.out) if args.out else out_dir / "neron.csv"
        rows = [[x, n] for x, n in zip(result.table.grid, result.table.counts)]
        _write_csv(out, ["x", "count"], rows)
        print(f"generator height: {fmt(result.generator_height)}")
        print(f"fitted exponent: {fmt(result.fit.exponent)} (rmse {fmt(result.fit.rmse)})")
        print(f"spot-check max delta: {fmt(result.spot_check_max_delta)}")
        _write_manifest(
            out_dir,
            "ec",
            {
                "ec_command": "neron",
                "curve": args.curve,
                "gen": args.gen,
                "torsion": args.torsion,
                "grid": args.grid,
                "tol": args.tol,
                "out": str(out),
            },
            [str(out)],
        )
        return EXIT_OK
    raise ConfigError(f"unknown ec subcommand {args.ec_command!r}")


def _cmd_corpus(args, out_dir: Path) -> int:
    if args.name:
        print(corpus_path(args.name))
        return EXIT_OK
    if args.export:
        written = export_corpus(args.export)
        for path in written:
            print(f"wrote {path}")
        return EXIT_OK
    header = f"{'name':<18} {'space':<6} {'maps':<4} {'dimension':<18} {'exact':<6} description"
    print(header)
    print("-" * len(header))
    from .corpus import load_corpus_system

    for entry in CORPUS:
        system = load_corpus_system(entry.name)
        dim_text = fmt(entry.expected_dimension) if entry.expected_dimension is not None else "-"
        exact_text = {True: "yes", False: "no", None: "-"}[entry.exact]
        print(
            f"{entry.name:<18} {entry.space:<6} {len(system.maps):<4} "
            f"{dim_text:<18} {exact_text:<6} {entry.description}"
        )
    return EXIT_OK


_POSITIONAL_PARAMS = {
    "dim": ("system",),
    "enumerate": ("system",),
    "member": ("system", "point"),
    "audit": ("system",),
    "growth": ("system",),
    "census": (),
    "height": ("point",),
    "approx": ("system",),
    "intersect": ("system",),
    "ec": ("ec_command",),
    "corpus": ("name",),
}

_GLOBAL_PARAMS = ("tol", "threads")


def _cmd_rerun(args, out_dir: Path) -> int:
    manifest_path = Path(args.manifest)
    if not manifest_path.exists():
        raise ConfigError(f"MissingFile: {manifest_path}")
    manifest = json.loads(manifest_path.read_text())
    sub = manifest["subcommand"]
    params = dict(manifest["parameters"])
    if sub not in _POSITIONAL_PARAMS:
        raise ConfigError(f"manifest names unknown subcommand {sub!r}")
    argv = ["--out-dir", str(out_dir)]
    for key in _GLOBAL_PARAMS:
        if key in params and params[key] is not None:
            argv.extend(["--" + key, str(params.pop(key))])
    argv.append(sub)
    for key in _POSITIONAL_PARAMS[sub]:
        value = params.pop(key, None)
        if value is not None:
            argv.append(str(value))
    for key, value in params.items():
        if value is None or value is False or value == "":
            continue
        if key == "out":
            # Rebase recorded output files into the rerun directory so a
            # replay never clobbers the original run.
            value = str(out_dir / Path(value).name)
        flag = "--" + key.replace("_", "-")
        if value is True:
            argv.append(flag)
        else:
            argv.extend([flag, str(value)])
    return main(argv)


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="arithfractal",
        description="Self-similar fractals in arithmetic: enumeration, dimension, heights.",
    )
    parser.add_argument("--out-dir", default=".", help="directory for outputs and manifests")
    parser.add_argument("--threads", type=int, default=1, help="worker count for partitionable scans")
    parser.add_argument("--tol", type=float, default=1e-12, help="numeric tolerance")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dim", help="solve the dimension equation of a system")
    p.add_argument("system")
    p.add_argument("--convention", choices=("norm", "abs"), default="norm")

    p = sub.add_parser("enumerate", help="enumerate the forward orbit up to a size bound")
    p.add_argument("system")
    p.add_argument("--bound", type=float, required=True)
    p.add_argument("--max-points", type=int, default=10_000_000)
    p.add_argument("--out")

    p = sub.add_parser("member", help="decide membership with a certificate")
    p.add_argument("system")
    p.add_argument("point")
    p.add_argument("--depth-limit", type=int, default=10_000)

    p = sub.add_parser("audit", help="audit the fractal equation on a bounded window")
    p.add_argument("system")
    p.add_argument("--bound", type=float, required=True)
    p.add_argument("--window", choices=("orbit", "ambient"), default="orbit")

    p = sub.add_parser("growth", help="counting function, growth fit, lemma checks")
    p.add_argument("system")
    p.add_argument("--bound", type=float, required=True)
    p.add_argument("--grid", default="auto")
    p.add_argument("--fit", action="store_true")
    p.add_argument("--check-lemmas", default="")
    p.add_argument("--max-points", type=int, default=10_000_000)
    p.add_argument("--out")

    p = sub.add_parser("census", help="exact count of projective rational points")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--bound", type=float, required=True)
    p.add_argument("--compare-schanuel", action="store_true")
    p.add_argument("--out")

    p = sub.add_parser("height", help="size and log height of a point")
    p.add_argument("point")
    p.add_argument("--space", choices=("int", "gauss", "affq", "projq"))

    p = sub.add_parser("approx", help="approximation records against a target")
    p.add_argument("system")
    p.add_argument("--target", required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--bound", type=float, required=True)
    p.add_argument("--max-points", type=int, default=10_000_000)
    p.add_argument("--out")

    p = sub.add_parser("intersect", help="exact curve intersection probe")
    p.add_argument("system")
    p.add_argument("--curve", required=True)
    p.add_argument("--bounds", required=True)
    p.add_argument("--out")

    p = sub.add_parser("ec", help="elliptic curve heights and counting")
    p.add_argument("ec_command", choices=("height", "neron"))
    p.add_argument("--curve", required=True)
    p.add_argument("--point")
    p.add_argument("--gen")
    p.add_argument("--torsion", default="")
    p.add_argument("--grid", default="")
    p.add_argument("--out")

    p = sub.add_parser("corpus", help="list bundled systems or export them")
    p.add_argument("name", nargs="?", help="print the path of one bundled system")
    p.add_argument("--export", help="write all bundled systems to a directory")

    p = sub.add_parser("rerun", help="re-execute a run from its manifest")
    p.add_argument("manifest")

    return parser


_HANDLERS = {
    "dim": _cmd_dim,
    "enumerate": _cmd_enumerate,
    "member": _cmd_member,
    "audit": _cmd_audit,
    "growth": _cmd_growth,
    "census": _cmd_census,
    "height": _cmd_height,
    "approx": _cmd_approx,
    "intersect": _cmd_intersect,
    "ec": _cmd_ec,
    "corpus": _cmd_corpus,
    "rerun": _cmd_rerun,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    handler = _HANDLERS[args.command]
    try:
        return handler(args, out_dir)
    except ConfigError as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ArithFractalError as exc:
        print(f"error[{type(exc).__name__}.{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

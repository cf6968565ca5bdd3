"""Command-line entry points: classify, fiber-scan, ephemeral-test, catalog.

Exit codes: 0 success, 2 validation or parse error, 3 failed
Morse-connectivity cross-check.  All randomness is seeded (default 0) and
reports are written atomically by a single writer.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from importlib import resources

import numpy as np

from . import __version__
from .classifier import SystemSpec, classify_point, fiber_verdicts
from .errors import EphemeraError, NotProper, ParseError, UnknownName
from .family import FamilySystem, PolarPoint, taylor_at_support
from .fiberlab import MIN_RESOLUTION, connectivity_report
from .jets import chart_jet, ephemeral_zero_set_test, vanishes_below_order_mod_phi
from .serial import (
    connectivity_csv_rows,
    connectivity_to_json,
    load_system_spec,
    point_to_json,
    report_to_json,
)

CATALOG_NAMES = ("ex1_zN", "ex2_pq", "family_11m1", "family_21m1")


def _catalog_bytes(name: str) -> bytes:
    if name not in CATALOG_NAMES:
        raise UnknownName(f"no catalog entry named {name!r}")
    return resources.files("ephemera").joinpath("data").joinpath(f"{name}.json").read_bytes()


def resolve_spec_path(path_or_name: str):
    """A path on disk, or a shipped catalog name."""
    if os.path.exists(path_or_name):
        with open(path_or_name, "rb") as fh:
            raw = fh.read()
        return raw, path_or_name
    base = os.path.splitext(os.path.basename(path_or_name))[0]
    if base in CATALOG_NAMES:
        return _catalog_bytes(base), base
    raise ParseError(f"{path_or_name} is neither a file nor a catalog name")


def _load(path_or_name: str):
    import hashlib

    raw, label = resolve_spec_path(path_or_name)
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{label} is not valid JSON: {exc}") from exc
    system, points, data = load_system_spec(data)
    return system, points, data, hashlib.sha256(raw).hexdigest(), label


def _atomic_write(path: str, text: str) -> None:
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _emit(bundle: dict, out: str | None) -> None:
    text = json.dumps(bundle, indent=2) + "\n"
    if out:
        _atomic_write(out, text)
    else:
        sys.stdout.write(text)


def _bundle(args, input_hash: str, label: str, started: float) -> dict:
    return {
        "tool": "ephemera",
        "version": __version__,
        "command": args.command,
        "input": label,
        "input_sha256": input_hash,
        "seed": getattr(args, "seed", 0),
        "timing_seconds": time.perf_counter() - started,
    }


def _system_of(obj) -> SystemSpec:
    return obj.system if isinstance(obj, FamilySystem) else obj


def _points_for(system, listed, args):
    points = list(listed)
    if getattr(args, "point_index", None) is not None:
        if not (0 <= args.point_index < len(points)):
            raise ParseError(
                f"point index {args.point_index} out of range (have {len(points)})"
            )
        points = [points[args.point_index]]
    if not points:
        # default probe: the origin of the slice or of the ambient space
        spec = _system_of(system)
        points = [PolarPoint(r=(0.0,) * spec.coords, theta=(0.0,) * spec.coords)]
    return points


def cmd_classify(args) -> int:
    started = time.perf_counter()
    system, listed, _, digest, label = _load(args.spec)
    points = _points_for(system, listed, args)
    spec = _system_of(system)
    reports = [classify_point(spec, w.to_complex()) for w in points]
    bundle = _bundle(args, digest, label, started)
    bundle["reports"] = [report_to_json(r) for r in reports]
    bundle["fiber_verdict"] = None
    if isinstance(system, FamilySystem) and reports:
        verdict = fiber_verdicts(reports)
        bundle["fiber_verdict"] = {
            "connectivity_expected": verdict.connectivity_expected,
            "obstruction": verdict.obstruction,
            "genericity_ok": verdict.genericity_ok,
        }
    bundle["timing_seconds"] = time.perf_counter() - started
    _emit(bundle, args.out)
    return 0


def cmd_ephemeral_test(args) -> int:
    started = time.perf_counter()
    system, listed, _, digest, label = _load(args.spec)
    points = _points_for(system, listed, args)
    spec = _system_of(system)
    results = []
    for w in points:
        entry: dict = {"point": point_to_json(w)}
        if isinstance(system, FamilySystem):
            data = taylor_at_support(system, w)
        else:
            support = sorted(w.support)
            from .jets import slice_restriction

            xi_r = spec.xi.restrict(support)
            data = slice_restriction(
                spec.g, w.to_complex(), support, xi_r, max_degree=xi_r.degree_N
            ).without_constant()
        degree = data.xi.degree_N
        entry["support_degree"] = degree
        if degree < 2:
            entry["ephemeral"] = False
            entry["reason"] = "support degree below 2"
        else:
            vanishes = vanishes_below_order_mod_phi(data, degree)
            entry["vanishes_below_degree"] = vanishes
            if vanishes:
                jet = chart_jet(data)
                entry["jet"] = {"A": jet.A, "B": jet.B, "D": jet.D, "degree": degree}
                entry["ephemeral"] = ephemeral_zero_set_test(jet)
                entry["marginal"] = jet.is_marginal()
            else:
                entry["ephemeral"] = False
        results.append(entry)
    bundle = _bundle(args, digest, label, started)
    bundle["ephemeral_tests"] = results
    bundle["timing_seconds"] = time.perf_counter() - started
    _emit(bundle, args.out)
    return 0


def _parse_axis(text: str):
    lo, hi, count = text.split(":")
    return np.linspace(float(lo), float(hi), int(count))


def cmd_fiber_scan(args) -> int:
    started = time.perf_counter()
    system, _, _, digest, label = _load(args.spec)
    if not isinstance(system, FamilySystem):
        raise ParseError("fiber-scan needs a family spec (kind = \"family\")")
    resolution = args.resolution
    if resolution < MIN_RESOLUTION:
        print(
            f"warning: resolution {resolution} below minimum, clamped to {MIN_RESOLUTION}",
            file=sys.stderr,
        )
        resolution = MIN_RESOLUTION
    axes = [_parse_axis(part) for part in args.beta_grid.split(",")]
    if len(axes) != system.weights.torus_dim:
        raise ParseError(
            f"beta grid needs {system.weights.torus_dim} axes, got {len(axes)}"
        )
    betas = [tuple(float(v) for v in combo) for combo in _product(axes)]
    workers = int(os.environ.get("EPHEMERA_THREADS", "1") or "1")
    report = connectivity_report(
        system,
        betas,
        c_count=args.c_grid,
        resolution=resolution,
        synthetic_check=not args.no_synthetic_check,
        max_workers=max(workers, 1),
    )
    bundle = _bundle(args, digest, label, started)
    bundle["connectivity"] = connectivity_to_json(report)
    bundle["timing_seconds"] = time.perf_counter() - started
    _emit(bundle, args.out)
    if args.csv:
        buf = io.StringIO()
        writer = csv.writer(buf, quoting=csv.QUOTE_MINIMAL, lineterminator="\r\n")
        writer.writerows(connectivity_csv_rows(report))
        _atomic_write(args.csv, buf.getvalue())
    return 0 if report.all_consistent else 3


def _product(axes):
    if not axes:
        yield ()
        return
    for head in axes[0]:
        for rest in _product(axes[1:]):
            yield (head,) + rest


def cmd_catalog(args) -> int:
    if args.action == "list":
        for name in CATALOG_NAMES:
            data = json.loads(_catalog_bytes(name))
            print(f"{name}: {data['description']}")
        return 0
    data = json.loads(_catalog_bytes(args.name))
    if args.json:
        print(json.dumps(data, indent=2))
    else:
        print(f"name: {data['name']}")
        print(f"kind: {data['kind']}")
        if "weights" in data:
            print(f"weights: {data['weights']}")
        if "xi" in data:
            print(f"xi: {data['xi']}")
        print(f"description: {data['description']}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ephemera",
        description=(
            "Classify singular points and verify fiber connectivity for "
            "integrable systems extending complexity-one torus actions"
        ),
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the JSON report here (default stdout)")
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument(
        "--tolerance-scale",
        type=float,
        default=1.0,
        help="multiply numeric decision tolerances by this factor",
    )

    p = sub.add_parser("classify", parents=[common], help="classify listed points")
    p.add_argument("spec", help="spec file path or catalog name")
    p.add_argument("--point-index", type=int, help="classify only this listed point")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser(
        "ephemeral-test", parents=[common], help="run the chart zero-set predicate"
    )
    p.add_argument("spec", help="spec file path or catalog name")
    p.add_argument("--point-index", type=int)
    p.set_defaults(func=cmd_ephemeral_test)

    p = sub.add_parser(
        "fiber-scan", parents=[common], help="Morse/connectivity scan over a beta grid"
    )
    p.add_argument("spec", help="family spec file path or catalog name")
    p.add_argument(
        "--beta-grid",
        default="0.8:2.4:5,0.8:2.4:5",
        help="comma-separated axes lo:hi:count (default 0.8:2.4:5 per axis)",
    )
    p.add_argument("--c-grid", type=int, default=21, help="levels per chart")
    p.add_argument("--resolution", type=int, default=512)
    p.add_argument("--csv", help="also write the flat CSV table here")
    p.add_argument(
        "--no-synthetic-check",
        action="store_true",
        help="skip the injected saddle-profile control row",
    )
    p.set_defaults(func=cmd_fiber_scan)

    p = sub.add_parser("catalog", help="list or show shipped example systems")
    p.add_argument("action", choices=["list", "show"])
    p.add_argument("name", nargs="?", help="catalog entry name (for show)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_catalog)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "catalog" and args.action == "show" and not args.name:
        parser.error("catalog show needs a name")
    if getattr(args, "tolerance_scale", 1.0) != 1.0:
        from . import config

        config.set_tolerance_scale(args.tolerance_scale)
    try:
        return args.func(args)
    except (ParseError, UnknownName, NotProper, EphemeraError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())

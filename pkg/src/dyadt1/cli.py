"""Command-line front end.

Subcommands: gen-weight, gen-op, haar-check, certify, carleson, stopping-tree,
norm, sweep. Exit codes: 0 all checks passed, 1 a check failed (the failing
invariant is named in the report), 2 input/parameter error. Reports are
canonical JSON (sorted keys, 17-significant-digit floats), so identical seeds
and inputs reproduce byte-identical files.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import regression
from .carleson import (
    CarlesonInstance,
    build_stopping_tree,
    carleson_from_operator,
    cet1_testing_constant,
    cet2_testing_constant,
    embedding_sharp_constant,
    find_lambda_star,
    stopping_decay,
)
from .certifier import certify
from .errors import BadParams, DyadT1Error
from .haar import build_system, weighted_norm
from .operators import (
    BandOperator,
    is_band,
    is_well_localized,
    make_counterexample,
    make_dyadic_shift,
    make_haar_multiplier,
    make_random_band,
    operator_norm,
)
from .presets import PRESETS, default_workers, run_sweep
from .reporting import canonical_csv, canonical_json, write_text
from .tree import DyadicInterval
from .weights import Characteristics, WeightGrid, generate_weight

MAX_DEPTH = 10
MAX_DIM = 8


def _emit(args, report: dict) -> None:
    text = canonical_json(report)
    if args.out:
        write_text(args.out, text)
    else:
        sys.stdout.write(text)


def _load_json(path: str) -> dict:
    import json

    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except (OSError, ValueError) as exc:
        raise BadParams(f"cannot read {path}: {exc}") from exc


def _load_weight(path: str) -> WeightGrid:
    weight = WeightGrid.from_json(_load_json(path))
    _check_caps(weight.d, weight.depth)
    return weight


def _load_operator(path: str) -> BandOperator:
    op = BandOperator.from_json(_load_json(path))
    _check_caps(op.d, op.depth)
    return op


def _check_caps(d: int, depth: int) -> None:
    if not 1 <= depth <= MAX_DEPTH:
        raise BadParams(f"depth must be in [1, {MAX_DEPTH}], got {depth}")
    if not 1 <= d <= MAX_DIM:
        raise BadParams(f"dim must be in [1, {MAX_DIM}], got {d}")


def cmd_gen_weight(args) -> int:
    _check_caps(args.dim, args.depth)
    params = {}
    if args.t is not None:
        params["t"] = args.t
    if args.angle_scale is not None:
        params["angle_scale"] = args.angle_scale
    if args.exponent is not None:
        params["exponent"] = args.exponent
    weight = generate_weight(args.kind, args.dim, args.depth, params, seed=args.seed)
    _emit(args, weight.to_json())
    return 0


def cmd_gen_op(args) -> int:
    _check_caps(args.dim, args.depth)
    if args.kind == "multiplier":
        rng = np.random.default_rng(args.seed)
        from .tree import TreeConfig

        symbols = {
            (interval, i): float(rng.uniform(-2.0, 2.0))
            for interval in TreeConfig(args.depth).internal()
            for i in range(args.dim)
        }
        op = make_haar_multiplier(args.dim, args.depth, symbols, root_symbol=1.0)
    elif args.kind == "identity":
        op = make_haar_multiplier(args.dim, args.depth, 1.0, root_symbol=1.0)
    elif args.kind == "shift":
        op = make_dyadic_shift(args.dim, args.depth, args.coeff_left, args.coeff_right)
    elif args.kind == "random":
        op = make_random_band(args.dim, args.depth, args.radius, seed=args.seed)
    elif args.kind == "counterexample":
        base = DyadicInterval(args.base_level, args.base_index)
        op = make_counterexample(args.dim, args.depth, base, lambda k: 1.0 + 0.5 * k.index)
    else:  # pragma: no cover - argparse restricts choices
        raise BadParams(f"unknown operator kind {args.kind}")
    _emit(args, op.to_json())
    return 0


def cmd_haar_check(args) -> int:
    weight = _load_weight(args.weight)
    system = build_system(weight)
    gram_dev = float(np.max(np.abs(system.gram() - np.eye(system.dim))))
    certificate = system.haar_bound_certificate()
    rng = np.random.default_rng(args.seed)
    rt_max = 0.0
    for _ in range(args.samples):
        f = rng.standard_normal((weight.config.n_leaves, weight.d))
        back = system.synthesize(system.analyze(f))
        rt_max = max(rt_max, weighted_norm(weight, f - back) / weighted_norm(weight, f))
    failures = []
    if gram_dev > 1e-9:
        failures.append({"check": "orthonormality", "value": gram_dev, "tolerance": 1e-9})
    if certificate > np.sqrt(weight.d) + 1e-9:
        failures.append({"check": "haar-bound", "value": certificate,
                         "tolerance": float(np.sqrt(weight.d)) + 1e-9})
    if rt_max > 1e-8:
        failures.append({"check": "roundtrip", "value": rt_max, "tolerance": 1e-8})
    report = {
        "command": "haar-check",
        "d": weight.d,
        "depth": weight.depth,
        "gram_max_dev": gram_dev,
        "haar_bound_certificate": certificate,
        "roundtrip_max_rel": rt_max,
        "failures": failures,
        "passed": not failures,
    }
    if args.export:
        write_text(args.export, canonical_json(system.to_json()))
    _emit(args, report)
    return 0 if not failures else 1


def cmd_norm(args) -> int:
    op = _load_operator(args.op)
    weight_w = _load_weight(args.weight_w)
    weight_v = _load_weight(args.weight_v)
    radius = op.radius if args.radius is None else args.radius
    norm = operator_norm(op, weight_w, weight_v)
    band = is_band(op, radius)
    wl = is_well_localized(op, weight_w, weight_v, radius)
    failures = []
    if not band:
        failures.append({"check": "band-radius", "value": radius})
    if not wl.passed:
        failures.append({"check": "well-localized", "value": wl.worst_violation,
                         "tolerance": 1e-12 * wl.scale})
    report = {
        "command": "norm",
        "d": op.d,
        "depth": op.depth,
        "radius": radius,
        "operator_norm": norm,
        "is_band": band,
        "well_localized": wl.to_json(),
        "failures": failures,
        "passed": not failures,
    }
    _emit(args, report)
    return 0 if not failures else 1


def cmd_certify(args) -> int:
    op = _load_operator(args.op)
    weight_w = _load_weight(args.weight_w)
    weight_v = _load_weight(args.weight_v)
    radius = op.radius if args.radius is None else args.radius
    c_cfg = regression.k_reg(op.d) if args.c_cfg is None else args.c_cfg
    report_obj = certify(
        op, weight_w, weight_v, radius,
        c_cfg=c_cfg, n_samples=args.samples, seed=args.seed,
    )
    # paraproduct lemma check on this instance (vanishing + agreement blocks)
    from .certifier import build_paraproduct
    from .operators import matrix_form

    pi = build_paraproduct(op, weight_w, weight_v, radius)
    mf = matrix_form(op, weight_w, weight_v)
    sys_w = build_system(weight_w)
    sys_v = build_system(weight_v)
    vanish, agree = 0.0, 0.0
    for src in weight_w.config.internal():
        col = sys_w.offset(src, 0)
        for dst in weight_v.config.internal():
            row = sys_v.offset(dst, 0)
            block = pi[row : row + op.d, col : col + op.d]
            if dst.level <= src.level + radius:
                vanish = max(vanish, float(np.max(np.abs(block))))
            else:
                tblock = mf[row : row + op.d, col : col + op.d]
                agree = max(agree, float(np.max(np.abs(block - tblock))))
    failures = []
    if not report_obj.necessity_ok:
        failures.append({"check": "necessity", "value": report_obj.measured_norm})
    if vanish > 1e-10:
        failures.append({"check": "paraproduct-vanishing", "value": vanish, "tolerance": 1e-10})
    if agree > 1e-9:
        failures.append({"check": "paraproduct-agreement", "value": agree, "tolerance": 1e-9})
    report = report_obj.to_json()
    report["command"] = "certify"
    report["paraproduct"] = {"vanish_max": vanish, "agree_max": agree}
    report["failures"] = failures
    report["passed"] = not failures
    _emit(args, report)
    return 0 if not failures else 1


def cmd_carleson(args) -> int:
    weight = _load_weight(args.weight)
    if args.instance:
        instance = CarlesonInstance.from_json(_load_json(args.instance))
    elif args.from_op:
        op = _load_operator(args.from_op)
        radius = op.radius if args.radius is None else args.radius
        instance = carleson_from_operator(
            op, weight, _load_weight(args.weight_v) if args.weight_v else weight, radius
        )
    else:
        raise BadParams("carleson needs --instance or --from-op")
    instance.require_match(weight)
    cet1 = cet1_testing_constant(instance, weight)
    cet2 = cet2_testing_constant(instance, weight)
    sharp = embedding_sharp_constant(instance, weight)
    char = Characteristics.compute(weight, n_samples=args.samples, seed=args.seed)
    bound = regression.k_reg(weight.d) * cet2 * char.r2_lower * char.a2
    failures = []
    if sharp > bound and cet2 > 0:
        failures.append({"check": "matrix-carleson-bound", "value": sharp, "tolerance": bound})
    report = {
        "command": "carleson",
        "d": weight.d,
        "depth": weight.depth,
        "cet1": cet1,
        "cet2": cet2,
        "embedding_sharp": sharp,
        "characteristics": char.to_json(weight.d),
        "k_reg": regression.k_reg(weight.d),
        "failures": failures,
        "passed": not failures,
    }
    _emit(args, report)
    return 0 if not failures else 1


def cmd_stopping_tree(args) -> int:
    weight = _load_weight(args.weight)
    root = DyadicInterval(0, 0)
    failures = []
    if args.lam is not None:
        tree = build_stopping_tree(weight, root, args.lam)
        decay = stopping_decay(tree)
        lam, mult = args.lam, None
        decay_ok = all(val <= 2.0 ** -(j - 1) for j, val in enumerate(decay, start=1))
        if not decay_ok:
            failures.append({"check": "stopping-decay", "value": decay})
    else:
        lam, mult = find_lambda_star(weight)
        tree = build_stopping_tree(weight, root, lam)
        decay = stopping_decay(tree)
    report = {
        "command": "stopping-tree",
        "d": weight.d,
        "depth": weight.depth,
        "lambda": lam,
        "multiplier": mult,
        "generations": [[i.as_json() for i in gen] for gen in tree.generations],
        "generation_measures": tree.generation_measures(),
        "relative_decay": decay,
        "failures": failures,
        "passed": not failures,
    }
    _emit(args, report)
    return 0 if not failures else 1


def cmd_sweep(args) -> int:
    names = list(PRESETS) if args.preset == "all" else [args.preset]
    seeds = None
    if args.seeds:
        lo, _, hi = args.seeds.partition("..")
        seeds = list(range(int(lo), int(hi) + 1)) if hi else [int(lo)]
    reports = {name: run_sweep(name, seeds=seeds, workers=args.workers) for name in names}
    passed = all(rep["passed"] for rep in reports.values())
    if args.format == "csv":
        rows = []
        for name, rep in reports.items():
            for row in rep["rows"]:
                rows.append({"preset": name, **row})
        fieldnames = ["preset"] + sorted({k for row in rows for k in row} - {"preset"})
        text = canonical_csv(rows, fieldnames)
        if args.out:
            write_text(args.out, text)
        else:
            sys.stdout.write(text)
    else:
        _emit(args, {"command": "sweep", "passed": passed, "presets": reports})
    return 0 if passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dyadt1",
        description="Matrix-weighted Haar bases, band operators and T1 certification "
        "on finite dyadic trees.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out=True):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--samples", type=int, default=16)
        if out:
            p.add_argument("--out", help="write the JSON report here (default stdout)")

    p = sub.add_parser("gen-weight", help="generate a weight file")
    p.add_argument("--kind", default="random_a2",
                   choices=["identity", "scalar_power", "rotating_diagonal", "random_a2"])
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--t", type=float, default=None, help="eccentricity (>= 1)")
    p.add_argument("--angle-scale", type=float, default=None)
    p.add_argument("--exponent", type=float, default=None)
    common(p)
    p.set_defaults(fn=cmd_gen_weight)

    p = sub.add_parser("gen-op", help="generate an operator file")
    p.add_argument("--kind", default="random",
                   choices=["multiplier", "identity", "shift", "random", "counterexample"])
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--radius", type=int, default=1)
    p.add_argument("--coeff-left", type=float, default=1.0)
    p.add_argument("--coeff-right", type=float, default=-1.0)
    p.add_argument("--base-level", type=int, default=2)
    p.add_argument("--base-index", type=int, default=0)
    common(p)
    p.set_defaults(fn=cmd_gen_op)

    p = sub.add_parser("haar-check", help="orthonormality/completeness/bound checks")
    p.add_argument("--weight", required=True)
    p.add_argument("--export", help="also export the adapted system as JSON")
    common(p)
    p.set_defaults(fn=cmd_haar_check)

    p = sub.add_parser("norm", help="operator norm plus band/well-localized checks")
    p.add_argument("--op", required=True)
    p.add_argument("--weight-w", required=True)
    p.add_argument("--weight-v", required=True)
    p.add_argument("--radius", type=int, default=None)
    common(p)
    p.set_defaults(fn=cmd_norm)

    p = sub.add_parser("certify", help="testing constants, bounds and report")
    p.add_argument("--op", required=True)
    p.add_argument("--weight-w", required=True)
    p.add_argument("--weight-v", required=True)
    p.add_argument("--radius", type=int, default=None)
    p.add_argument("--c-cfg", type=float, default=None,
                   help="stand-in for the dimensional constant (default: frozen K_reg)")
    common(p)
    p.set_defaults(fn=cmd_certify)

    p = sub.add_parser("carleson", help="embedding constants for a sequence")
    p.add_argument("--weight", required=True)
    p.add_argument("--instance", help="Carleson instance JSON")
    p.add_argument("--from-op", help="extract the sequence from this operator")
    p.add_argument("--weight-v", help="dual weight when extracting from an operator")
    p.add_argument("--radius", type=int, default=None)
    common(p)
    p.set_defaults(fn=cmd_carleson)

    p = sub.add_parser("stopping-tree", help="stopping generations and decay")
    p.add_argument("--weight", required=True)
    p.add_argument("--lambda", dest="lam", type=float, default=None,
                   help="jump threshold; omit to search 4 d a2 .. 64 d a2")
    common(p)
    p.set_defaults(fn=cmd_stopping_tree)

    p = sub.add_parser("sweep", help="run acceptance presets over seed ranges")
    p.add_argument("--preset", default="all", choices=["all"] + sorted(PRESETS))
    p.add_argument("--seeds", help="range as a..b (inclusive) or a single seed")
    p.add_argument("--workers", type=int, default=default_workers())
    p.add_argument("--format", default="json", choices=["json", "csv"])
    p.add_argument("--out")
    p.set_defaults(fn=cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except DyadT1Error as exc:
        sys.stderr.write(canonical_json({"error": str(exc), "exit": 2}))
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Exit codes: 0 ok, 2 usage or bad parameters, 3 numerical failure,
4 certificate fails the static audit, 5 sampled points left uncovered.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from . import io as pio
from .engine import EngineConfig, run_cover, verify_certificate_static
from .geometry import GeometryError
from .instances import AdversarialParams, gen_adversarial, gen_parallel, gen_random
from .measure import verify_cover
from .sweep import SweepConfigError, fitted_exponents, rows_to_csv, run_sweep

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_STATIC, EXIT_UNCOVERED = 0, 2, 3, 4, 5


def _fail(msg, code=EXIT_USAGE):
    print(f"plankcover: error: {msg}", file=sys.stderr)
    return code


def _write(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def cmd_gen(args) -> int:
    try:
        if args.generator == "random":
            inst = gen_random(args.k, args.eps, args.seed)
        elif args.generator == "parallel":
            inst = gen_parallel(args.k, args.eps, tuple(args.normal))
        else:
            inst = gen_adversarial(AdversarialParams(
                epsilon=args.eps, cap_angle=args.cap, separation_factor=args.sep,
                seed=args.seed, max_rejections=args.max_rejections,
            ))
    except GeometryError as exc:
        return _fail(exc)
    _write(pio.dumps(pio.instance_to_dict(inst)) + "\n", args.out)
    return EXIT_OK


def _load_pair(args):
    inst = pio.load_instance(args.instance)
    cert = pio.load_certificate(args.certificate)
    return inst, cert


def cmd_cover(args) -> int:
    try:
        inst = pio.load_instance(args.instance)
        cfg = EngineConfig(
            mode=args.mode, tol_support=args.tol_support, tol_empty=args.tol_empty,
            max_planks=args.max_planks, record_volumes=args.record_volumes,
            volume_samples=args.samples, volume_seed=args.seed,
        )
    except (OSError, ValueError, KeyError) as exc:
        return _fail(exc)
    cert = run_cover(inst, cfg)
    _write(pio.dumps(pio.certificate_to_dict(cert)) + "\n", args.out)
    if cert.error:
        return _fail(cert.error, EXIT_NUMERIC)
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        inst, cert = _load_pair(args)
    except (OSError, ValueError, KeyError) as exc:
        return _fail(exc)
    reasons: list[str] = []
    if not verify_certificate_static(inst, cert, reasons):
        for r in reasons:
            print(r, file=sys.stderr)
        print("static: fail")
        return EXIT_STATIC
    frac = verify_cover(inst, cert, args.samples, args.seed)
    print("static: ok")
    print(f"uncovered_fraction: {frac!r}")
    return EXIT_OK if frac == 0 else EXIT_UNCOVERED


def cmd_sweep(args) -> int:
    try:
        config = json.loads(Path(args.config).read_text())
        rows = run_sweep(config, workers=args.workers, timing=not args.no_timing)
    except (OSError, ValueError, SweepConfigError, KeyError) as exc:
        return _fail(exc)
    text = rows_to_csv(rows)
    _write(text, args.out)
    fits = fitted_exponents(rows)
    summary = {
        "exponents": fits,
        "failures": [{"epsilon": r.epsilon, "seed": r.seed, "generator": r.generator, "error": r.error}
                     for r in rows if r.error],
    }
    summary_text = pio.dumps(summary) + "\n"
    if args.out not in (None, "-"):
        Path(str(args.out) + ".exponents.json").write_text(summary_text)
    for f in fits:
        print(f"slope {f['generator']}/{f['mode']}: {f['slope']:.4f}", file=sys.stderr)
    return EXIT_OK


def cmd_export_obj(args) -> int:
    try:
        inst, cert = _load_pair(args)
    except (OSError, ValueError, KeyError) as exc:
        return _fail(exc)
    if sorted(cert.ordering) != list(range(len(inst))) or any(
        pp.normal != inst.planks[cert.ordering[i]].normal for i, pp in enumerate(cert.placements)
    ):
        return _fail("certificate does not match instance")
    _write(pio.obj_text(cert), args.out)
    return EXIT_OK


def _positive_float(s):
    v = float(s)
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {s!r}")
    return v


def _positive_int(s):
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {s!r}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="plankcover", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an instance file")
    gsub = g.add_subparsers(dest="generator", required=True)
    for name in ("random", "parallel", "adversarial"):
        q = gsub.add_parser(name)
        q.add_argument("--eps", type=_positive_float, required=True)
        q.add_argument("--out", default="-")
        if name != "adversarial":
            q.add_argument("--k", type=_positive_int, required=True)
        if name != "parallel":
            q.add_argument("--seed", type=int, default=0)
        if name == "parallel":
            q.add_argument("--normal", type=float, nargs=3, default=[0.0, 0.0, 1.0])
        if name == "adversarial":
            q.add_argument("--cap", type=_positive_float, default=math.pi / 6)
            q.add_argument("--sep", type=_positive_float, default=2.0)
            q.add_argument("--max-rejections", type=_positive_int, default=10_000)
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("cover", help="place the planks of an instance")
    c.add_argument("instance")
    c.add_argument("--mode", choices=("chunked", "fixed_order"), default="chunked")
    c.add_argument("--tol-support", type=_positive_float, default=1e-9)
    c.add_argument("--tol-empty", type=_positive_float, default=1e-9)
    c.add_argument("--max-planks", type=_positive_int, default=None)
    c.add_argument("--record-volumes", action="store_true")
    c.add_argument("--samples", type=_positive_int, default=20_000, help="Monte Carlo samples per recorded volume")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out", default="-")
    c.set_defaults(func=cmd_cover)

    v = sub.add_parser("verify", help="audit a certificate and sample the uncovered fraction")
    v.add_argument("instance")
    v.add_argument("certificate")
    v.add_argument("--samples", type=_positive_int, default=1_000_000)
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("sweep", help="run an epsilon sweep from a JSON config")
    s.add_argument("config")
    s.add_argument("--out", default="-")
    s.add_argument("--workers", type=_positive_int, default=1)
    s.add_argument("--no-timing", action="store_true", help="write wall_time_s as 0 for byte-stable output")
    s.set_defaults(func=cmd_sweep)

    o = sub.add_parser("export-obj", help="write placed slab boundaries as OBJ")
    o.add_argument("instance")
    o.add_argument("certificate")
    o.add_argument("--out", default="-")
    o.set_defaults(func=cmd_export_obj)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

"""Exponent sweeps: run the generate/cover/verify pipeline over an epsilon
grid and fit log(planks_used) against log(1/epsilon).
"""
from __future__ import annotations

import csv
import io
import math
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .engine import EngineConfig, run_cover
from .instances import AdversarialParams, gen_adversarial, gen_parallel, gen_random
from .measure import verify_cover

CSV_HEADER = ["epsilon", "k_supplied", "planks_used", "covered", "mode", "seed", "wall_time_s"]
GENERATORS = ("random", "parallel", "adversarial")

_K_RULE = re.compile(
    r"^\s*ceil\(\s*(?P<c>[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s*\*\s*eps\s*\^\s*\(\s*-\s*"
    r"(?P<p>[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s*\)\s*\)\s*$"
)


class SweepConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SweepRow:
    epsilon: float
    k_supplied: int
    planks_used: int
    covered: bool
    mode: str
    seed: int
    wall_time_s: float
    generator: str = ""
    error: str | None = None

    def csv_fields(self):
        return [repr(float(self.epsilon)), str(self.k_supplied), str(self.planks_used),
                "true" if self.covered else "false", self.mode, str(self.seed), repr(float(self.wall_time_s))]


def parse_k_rule(rule: str):
    """Turn ``"ceil(c * eps^(-p))"`` into a function of epsilon."""
    m = _K_RULE.match(rule)
    if not m:
        raise SweepConfigError(f"k_rule must look like 'ceil(c * eps^(-p))', got {rule!r}")
    c, p = float(m["c"]), float(m["p"])

    def k_of(eps):
        # the guard keeps exact products such as 2 * 0.1**-1 from rounding up
        return max(1, math.ceil(c * eps ** (-p) - 1e-9))

    return k_of


def _groups(config: dict):
    base = {k: v for k, v in config.items() if k != "groups"}
    groups = config.get("groups") or [{}]
    out = []
    for g in groups:
        merged = {**base, **g}
        eps = merged.get("epsilons")
        if not eps:
            raise SweepConfigError("epsilon grid is empty")
        if any(not (e > 0) for e in eps):
            raise SweepConfigError("epsilons must be positive")
        gen = merged.get("generator")
        if gen not in GENERATORS:
            raise SweepConfigError(f"generator must be one of {GENERATORS}")
        mode = merged.get("mode", "chunked" if gen != "adversarial" else "fixed_order")
        if mode not in ("chunked", "fixed_order"):
            raise SweepConfigError(f"unknown mode {mode!r}")
        if gen != "adversarial":
            parse_k_rule(merged.get("k_rule", ""))
        merged["mode"] = mode
        merged.setdefault("seeds", [0])
        out.append(merged)
    return out


def cells(config: dict):
    """All (group, epsilon, seed) cells of a config, in a fixed order."""
    out = []
    for g in _groups(config):
        for eps in g["epsilons"]:
            for seed in g["seeds"]:
                out.append((g, float(eps), int(seed)))
    return out


def make_instance(group: dict, eps: float, seed: int):
    gen = group["generator"]
    params = group.get("params", {})
    if gen == "adversarial":
        return gen_adversarial(AdversarialParams(
            epsilon=eps,
            cap_angle=params.get("cap_angle", math.pi / 6),
            separation_factor=params.get("separation_factor", 2.0),
            seed=seed,
            max_rejections=params.get("max_rejections", 10_000),
        ))
    k = parse_k_rule(group["k_rule"])(eps)
    if gen == "random":
        return gen_random(k, eps, seed)
    return gen_parallel(k, eps, params.get("normal", (0.0, 0.0, 1.0)))


def run_cell(group: dict, eps: float, seed: int, timing: bool = True) -> SweepRow:
    t0 = time.perf_counter()
    k = 0
    try:
        inst = make_instance(group, eps, seed)
        k = len(inst)
        cfg = EngineConfig(
            mode=group["mode"],
            tol_support=group.get("tol_support", 1e-9),
            tol_empty=group.get("tol_empty", 1e-9),
            max_planks=group.get("max_planks"),
        )
        cert = run_cover(inst, cfg)
        covered = cert.covered
        error = cert.error
        if covered:
            frac = verify_cover(inst, cert, group.get("verify_samples", 100_000), seed)
            if frac > 0:
                covered = False
                error = f"uncovered fraction {frac} after claimed cover"
        row_used = cert.planks_used
    except Exception as exc:  # per-cell failures are recorded, the sweep goes on
        covered, row_used, error = False, 0, f"{type(exc).__name__}: {exc}"
    wall = time.perf_counter() - t0 if timing else 0.0
    return SweepRow(eps, k, row_used, covered, group["mode"], seed, wall, group["generator"], error)


def _run_cell_star(args):
    return run_cell(*args)


def run_sweep(config: dict, workers: int = 1, timing: bool = True) -> list[SweepRow]:
    jobs = [(g, e, s, timing) for g, e, s in cells(config)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            return list(ex.map(_run_cell_star, jobs))
    return [_run_cell_star(j) for j in jobs]


def fit_slope(eps, used) -> float:
    """Least-squares slope of log(used) against log(1/eps)."""
    x = np.log(1.0 / np.asarray(eps, dtype=float))
    y = np.log(np.asarray(used, dtype=float))
    if len(np.unique(x)) < 2:
        return float("nan")
    return float(np.polyfit(x, y, 1)[0])


def fitted_exponents(rows: list[SweepRow]) -> list[dict]:
    groups: dict[tuple[str, str], list[SweepRow]] = {}
    for r in rows:
        groups.setdefault((r.generator, r.mode), []).append(r)
    out = []
    for (gen, mode), rs in groups.items():
        ok = [r for r in rs if r.planks_used > 0 and r.epsilon < 1.0]
        slope = fit_slope([r.epsilon for r in ok], [r.planks_used for r in ok]) if ok else float("nan")
        out.append({"generator": gen, "mode": mode, "slope": slope, "cells": len(rs)})
    return out


def rows_to_csv(rows: list[SweepRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow(r.csv_fields())
    return buf.getvalue()

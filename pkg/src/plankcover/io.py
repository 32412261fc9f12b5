"""Canonical JSON for instances and certificates, and OBJ export.

Canonical form: sorted keys, compact separators, floats written with 17
significant digits.  Parsing then re-serializing gives identical bytes.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .geometry import CoverCertificate, Instance, PlacedPlank, Plank, StepRecord, UnitVector


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite float {x!r}")
    return format(x, ".17g")


def dumps(obj) -> str:
    """Canonical JSON text (no trailing newline)."""
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        items = sorted(obj.items())
        return "{" + ",".join(json.dumps(str(k)) + ":" + dumps(v) for k, v in items) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ",".join(dumps(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def instance_to_dict(inst: Instance) -> dict:
    return {
        "epsilon": inst.epsilon,
        "metadata": dict(inst.metadata),
        "planks": [{"normal": p.normal.as_list(), "width": p.width} for p in inst.planks],
    }


def instance_from_dict(d: dict) -> Instance:
    planks = tuple(Plank(UnitVector(*map(float, p["normal"])), float(p["width"])) for p in d["planks"])
    return Instance(planks, float(d["epsilon"]), dict(d.get("metadata", {})))


def _step_to_dict(s: StepRecord) -> dict:
    return {
        "step": s.step,
        "plank_index": s.plank_index,
        "support": s.support,
        "n_constraints": s.n_constraints,
        "vol_region": s.vol_region,
        "vol_region_se": s.vol_region_se,
        "vol_parallel": s.vol_parallel,
        "vol_parallel_se": s.vol_parallel_se,
        "empty_after": s.empty_after,
    }


def certificate_to_dict(cert: CoverCertificate) -> dict:
    return {
        "ordering": list(cert.ordering),
        "placements": [
            {"normal": p.normal.as_list(), "lower_offset": p.lower_offset, "upper_offset": p.upper_offset}
            for p in cert.placements
        ],
        "steps": [_step_to_dict(s) for s in cert.steps],
        "covered": cert.covered,
        "planks_used": cert.planks_used,
        "mode": cert.mode,
        "chunks": None if cert.chunks is None else [list(c) for c in cert.chunks],
        "error": cert.error,
        "tol_support": cert.tol_support,
        "tol_empty": cert.tol_empty,
    }


def _opt_float(v):
    return None if v is None else float(v)


def certificate_from_dict(d: dict) -> CoverCertificate:
    placements = tuple(
        PlacedPlank(UnitVector(*map(float, p["normal"])), float(p["lower_offset"]), float(p["upper_offset"]))
        for p in d["placements"]
    )
    steps = tuple(
        StepRecord(
            int(s["step"]), int(s["plank_index"]), float(s["support"]), int(s["n_constraints"]),
            _opt_float(s.get("vol_region")), _opt_float(s.get("vol_region_se")),
            _opt_float(s.get("vol_parallel")), _opt_float(s.get("vol_parallel_se")), s.get("empty_after"),
        )
        for s in d.get("steps", [])
    )
    chunks = d.get("chunks")
    return CoverCertificate(
        ordering=tuple(int(i) for i in d["ordering"]),
        placements=placements,
        steps=steps,
        covered=bool(d["covered"]),
        planks_used=int(d["planks_used"]),
        mode=d.get("mode", "fixed_order"),
        chunks=None if chunks is None else tuple(tuple(int(i) for i in c) for c in chunks),
        error=d.get("error"),
        tol_support=float(d.get("tol_support", 1e-9)),
        tol_empty=float(d.get("tol_empty", 1e-9)),
    )


def write_json(path, obj):
    Path(path).write_text(dumps(obj) + "\n")


def read_json(path):
    return json.loads(Path(path).read_text())


def save_instance(path, inst: Instance):
    write_json(path, instance_to_dict(inst))


def load_instance(path) -> Instance:
    return instance_from_dict(read_json(path))


def save_certificate(path, cert: CoverCertificate):
    write_json(path, certificate_to_dict(cert))


def load_certificate(path) -> CoverCertificate:
    return certificate_from_dict(read_json(path))


def plane_basis(n):
    """Deterministic orthonormal pair spanning the plane orthogonal to ``n``."""
    n = np.asarray(n, dtype=float)
    e = np.zeros(3)
    e[int(np.argmin(np.abs(n)))] = 1.0
    u = e - (e @ n) * n
    u /= np.linalg.norm(u)
    return u, np.cross(n, u)


def obj_text(cert: CoverCertificate, radius: float = 2.0) -> str:
    """Both boundary planes of every placed plank as squares.

    Each square is centred on the plane's closest point to the origin with
    half-side equal to the radius of the plane's section of the
    ``radius``-ball, so it contains that section.
    """
    lines = ["# plankcover placed slab boundaries", f"# planks {cert.planks_used}"]
    vid = 1
    for i, pp in enumerate(cert.placements):
        n = pp.normal.array
        u, v = plane_basis(n)
        lines.append(f"o plank_{i}")
        for off in (pp.lower_offset, pp.upper_offset):
            s = math.sqrt(max(0.0, radius * radius - off * off))
            c = off * n
            for a, b in ((-1, -1), (1, -1), (1, 1), (-1, 1)):
                p = c + a * s * u + b * s * v
                lines.append("v " + " ".join(_fmt_float(float(t)) for t in p))
            lines.append(f"f {vid} {vid + 1} {vid + 2} {vid + 3}")
            vid += 4
    return "\n".join(lines) + "\n"

"""Greedy tangent placement of planks.

Each plank is pushed down onto the remaining region from above: its upper
plane is the supporting plane of the region in the plank's direction.  The
remainder is then the old region with one more halfspace, so it stays
convex, and in particular connected, after every step.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, replace

from .convex import is_empty, support_value
from .geometry import (
    ConvexRegion,
    CoverCertificate,
    EmptyRegion,
    Halfspace,
    Instance,
    NonConvergence,
    PlacedPlank,
    Plank,
    StepRecord,
)
from .measure import ParallelBodyTracker, mc_volume
from .ordering import build_angle_graph, default_threshold, extract_order

log = logging.getLogger(__name__)

MODES = ("chunked", "fixed_order")


@dataclass(frozen=True)
class EngineConfig:
    mode: str = "chunked"
    tol_support: float = 1e-9
    tol_empty: float = 1e-9
    max_planks: int | None = None
    record_volumes: bool = False
    volume_every: int | None = None  # default max(1, k // 100)
    volume_samples: int = 20_000
    volume_seed: int = 0
    theta: float | None = None  # angle-graph threshold; default from epsilon and k

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not (self.tol_support > 0 and self.tol_empty > 0):
            raise ValueError("tolerances must be positive")
        if self.max_planks is not None and self.max_planks < 1:
            raise ValueError("max_planks must be at least 1")


def place_next(K: ConvexRegion, plank: Plank, tol: float = 1e-9):
    """Translate ``plank`` until its upper plane supports K from above.

    Returns the placed plank and the remainder K' = K ∩ {x . n <= h - width},
    with redundant constraints pruned.
    """
    h, _ = support_value(K, plank.normal, tol=tol)
    lower = h - plank.width
    placed = PlacedPlank(plank.normal, lower, h)
    return placed, K.with_constraint(Halfspace(plank.normal, lower)).pruned()


def processing_order(instance: Instance, config: EngineConfig):
    """Plank order for a run, plus the chunks in chunked mode."""
    k = len(instance)
    if config.mode == "fixed_order":
        return list(range(k)), None
    theta = config.theta if config.theta is not None else default_threshold(k, instance.epsilon)
    G = build_angle_graph(instance.normals, theta)
    ordering, chunks = extract_order(G)
    return ordering, tuple(c.indices for c in chunks)


def run_cover(instance: Instance, config: EngineConfig | None = None) -> CoverCertificate:
    """Place planks one by one until the remainder is empty or planks run out.

    The certificate lists the full processing order; ``placements`` and
    ``steps`` cover only the planks actually used.  A numerical failure ends
    the run early with ``covered=False`` and the message in ``error``.
    """
    config = config or EngineConfig()
    k = len(instance)
    ordering, chunks = processing_order(instance, config)
    limit = k if config.max_planks is None else min(k, config.max_planks)
    every = config.volume_every or max(1, k // 100)
    tracker = ParallelBodyTracker(config.volume_samples, config.volume_seed, config.tol_support) if config.record_volumes else None

    K = ConvexRegion.ball()
    placements: list[PlacedPlank] = []
    steps: list[StepRecord] = []
    covered = False
    error = None
    for step, idx in enumerate(ordering[:limit]):
        try:
            placed, K = place_next(K, instance.planks[idx], config.tol_support)
            empty = is_empty(K, config.tol_empty)
        except (NonConvergence, EmptyRegion) as exc:
            error = f"step {step}: {type(exc).__name__}: {exc}"
            log.warning("run aborted at %s", error)
            break
        placements.append(placed)
        rec = StepRecord(step, idx, placed.upper_offset, len(K), empty_after=empty)
        if tracker is not None and (step % every == every - 1 or empty or step == limit - 1):
            vk = mc_volume(K, config.volume_samples, config.volume_seed)
            vb = tracker.update(K)
            rec = replace(rec, vol_region=vk.mean, vol_region_se=vk.std_error,
                          vol_parallel=vb.mean, vol_parallel_se=vb.std_error)
        steps.append(rec)
        if empty:
            covered = True
            break

    return CoverCertificate(
        ordering=tuple(ordering),
        placements=tuple(placements),
        steps=tuple(steps),
        covered=covered,
        planks_used=len(placements),
        mode=config.mode,
        chunks=chunks,
        error=error,
        tol_support=config.tol_support,
        tol_empty=config.tol_empty,
    )


def verify_certificate_static(instance: Instance, cert: CoverCertificate, reasons: list | None = None) -> bool:
    """Structural audit of a certificate against its instance.

    Checks that the ordering is a permutation, that each placement keeps the
    normal and width of its plank, that every upper plane supports the
    region rebuilt from the earlier placements, and that supports never
    increase along a run of equal normals.  Failure reasons are appended to
    ``reasons`` when given.
    """
    out = [] if reasons is None else reasons
    k = len(instance)
    if sorted(cert.ordering) != list(range(k)):
        out.append("ordering is not a permutation")
        return False
    if cert.planks_used != len(cert.placements) or len(cert.placements) > k:
        out.append("planks_used does not match placements")
        return False
    tol = 2.0 * cert.tol_support
    K = ConvexRegion.ball()
    prev = None
    for i, pp in enumerate(cert.placements):
        plank = instance.planks[cert.ordering[i]]
        if pp.normal != plank.normal:
            out.append(f"normal mismatch at step {i}")
        if abs(pp.width - plank.width) > 1e-12:
            out.append(f"width mismatch at step {i}")
        try:
            h, _ = support_value(K, pp.normal)
        except (EmptyRegion, NonConvergence) as exc:
            out.append(f"support failure at step {i}: {exc}")
            break
        if abs(h - pp.upper_offset) > tol:
            out.append(f"tangency violated at step {i}: support {h!r}, upper {pp.upper_offset!r}")
        if prev is not None and prev.normal == pp.normal and pp.upper_offset > prev.upper_offset + tol:
            out.append(f"support increased along equal normals at step {i}")
        K = K.with_constraint(Halfspace(pp.normal, pp.lower_offset)).pruned()
        prev = pp
    return not out

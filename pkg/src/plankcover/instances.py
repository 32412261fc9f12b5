"""Instance generators: uniform random normals, parallel stacks, and a
greedy spherical code packed into a polar cap (the adversarial family).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from .geometry import GeometryError, Instance, Plank, UnitVector, as_unit

NORTH = (0.0, 0.0, 1.0)


class InfeasibleParams(UserWarning):
    """Adversarial parameters leave room for only one point."""


def _check_eps(epsilon):
    if not (epsilon > 0 and math.isfinite(epsilon)):
        raise GeometryError("epsilon must be positive")


def random_directions(k: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal((k, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def gen_random(k: int, epsilon: float, seed: int) -> Instance:
    """k planks of width epsilon with normals uniform on the sphere."""
    if k < 1:
        raise GeometryError("k must be at least 1")
    _check_eps(epsilon)
    N = random_directions(k, np.random.default_rng(seed))
    planks = tuple(Plank(UnitVector.from_array(n), float(epsilon)) for n in N)
    meta = {"generator": "random", "k": int(k), "epsilon": float(epsilon), "seed": int(seed)}
    return Instance(planks, float(epsilon), meta)


def gen_parallel(k: int, epsilon: float, normal=NORTH) -> Instance:
    """k identical planks."""
    if k < 1:
        raise GeometryError("k must be at least 1")
    _check_eps(epsilon)
    n = as_unit(normal)
    meta = {"generator": "parallel", "k": int(k), "epsilon": float(epsilon), "normal": n.as_list()}
    return Instance(tuple(Plank(n, float(epsilon)) for _ in range(k)), float(epsilon), meta)


@dataclass(frozen=True)
class AdversarialParams:
    epsilon: float
    cap_angle: float = math.pi / 6
    separation_factor: float = 2.0
    seed: int = 0
    max_rejections: int = 10_000

    def __post_init__(self):
        _check_eps(self.epsilon)
        if not 0 < self.cap_angle < math.pi / 2:
            raise GeometryError("cap_angle must lie in (0, pi/2)")
        if not self.separation_factor > 0:
            raise GeometryError("separation_factor must be positive")
        if self.max_rejections < 1:
            raise GeometryError("max_rejections must be at least 1")

    @property
    def separation(self) -> float:
        return self.separation_factor * self.epsilon ** (2.0 / 3.0)

    @property
    def feasible(self) -> bool:
        return self.separation < 2.0 * self.cap_angle


def _cap_point(rng, cos_cap):
    z = rng.uniform(cos_cap, 1.0)
    phi = rng.uniform(0.0, 2.0 * math.pi)
    s = math.sqrt(max(0.0, 1.0 - z * z))
    return np.array([s * math.cos(phi), s * math.sin(phi), z])


def gen_adversarial(params: AdversarialParams) -> Instance:
    """Greedy maximal spherical code inside a polar cap around +z.

    Candidates are drawn uniformly in the cap and kept when their angular
    distance to every kept point is at least ``params.separation``.
    Generation stops after ``params.max_rejections`` consecutive rejections.
    The planks come out in generation order, which is the order a
    fixed-order run must use.
    """
    rng = np.random.default_rng(params.seed)
    cos_cap = math.cos(params.cap_angle)
    sep = params.separation
    meta = {"generator": "adversarial", **asdict(params), "separation": sep}
    first = _cap_point(rng, cos_cap)
    pts = [first]
    if not params.feasible:
        warnings.warn(
            f"separation {sep:.4g} exceeds the cap diameter {2 * params.cap_angle:.4g}; only one point fits",
            InfeasibleParams,
            stacklevel=2,
        )
        meta["infeasible"] = True
    else:
        cos_sep = math.cos(sep)
        kept = np.empty((64, 3))
        kept[0] = first
        n = 1
        misses = 0
        while misses < params.max_rejections:
            c = _cap_point(rng, cos_cap)
            # angle >= sep  <=>  dot <= cos(sep); re-check near the boundary exactly
            dots = kept[:n] @ c
            close = dots > cos_sep
            if close.any() and not np.all(np.arccos(np.clip(dots[close], -1, 1)) >= sep):
                misses += 1
                continue
            if n == len(kept):
                kept = np.vstack([kept, np.empty_like(kept)])
            kept[n] = c
            n += 1
            misses = 0
        pts = list(kept[:n])
        meta["infeasible"] = False
    meta["k"] = len(pts)
    planks = tuple(Plank(UnitVector.from_array(p), float(params.epsilon)) for p in pts)
    return Instance(planks, float(params.epsilon), meta)

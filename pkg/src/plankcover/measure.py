"""Monte Carlo volumes of regions, of their unit parallel bodies, and of
the part of the ball left uncovered by a placement.

Uniform points in a ball are drawn as normalized Gaussians scaled by
``radius * U**(1/3)``.  The sample budget is split into fixed-size blocks,
each with its own stream ``SeedSequence(seed, spawn_key=(block,))``, so an
estimate depends only on ``(samples, seed)`` and never on how many
workers evaluated the blocks.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .convex import FEAS_TOL, nearest_points, region_extent, support_value
from .geometry import ConvexRegion, CoverCertificate, EmptyRegion, Halfspace, Instance, PlacedPlank, Plank

BLOCK = 1 << 16
BALL_VOLUME = 4.0 * math.pi / 3.0


@dataclass(frozen=True)
class VolumeEstimate:
    mean: float
    std_error: float
    samples: int
    seed: int


def block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(block,)))


def sample_ball(n: int, rng: np.random.Generator, radius: float = 1.0) -> np.ndarray:
    v = rng.standard_normal((n, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    r = radius * rng.random(n) ** (1.0 / 3.0)
    return v * r[:, None]


def _blocks(samples):
    return [(b, min(BLOCK, samples - b * BLOCK)) for b in range((samples + BLOCK - 1) // BLOCK)]


def ball_points(samples: int, seed: int, radius: float = 1.0) -> np.ndarray:
    """All sample points of an estimate, in block order."""
    return np.concatenate([sample_ball(n, block_rng(seed, b), radius) for b, n in _blocks(samples)])


def _map_blocks(fn, samples, workers):
    jobs = _blocks(samples)
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(workers) as ex:
            return list(ex.map(lambda j: fn(*j), jobs))
    return [fn(*j) for j in jobs]


def _estimate(hits, samples, seed, ref_volume):
    p = hits / samples
    return VolumeEstimate(ref_volume * p, ref_volume * math.sqrt(p * (1.0 - p) / samples), samples, seed)


def mc_volume(K: ConvexRegion, samples: int = 1_000_000, seed: int = 0, workers: int = 1) -> VolumeEstimate:
    """Hit-or-miss estimate of Vol K from uniform points of the unit ball."""
    if samples < 1:
        raise ValueError("samples must be at least 1")

    def count(b, n):
        return int(np.count_nonzero(K.contains_many(sample_ball(n, block_rng(seed, b)))))

    hits = sum(_map_blocks(count, samples, workers))
    return _estimate(hits, samples, seed, BALL_VOLUME)


def in_parallel_body(P, K: ConvexRegion, tol: float = 1e-9) -> np.ndarray:
    """Membership of points in B(K), the set of points within distance 1 of K."""
    P = np.asarray(P, dtype=float).reshape(-1, 3)
    r2 = np.einsum("ij,ij->i", P, P)
    if len(K) == 0:
        return r2 <= (2.0 + tol) ** 2
    inside = np.zeros(len(P), dtype=bool)
    undecided = r2 <= (2.0 + tol) ** 2
    slack = P @ K.normals.T - K.offsets
    undecided &= np.max(slack, axis=1) <= 1.0 + tol  # a plane separates by more than 1
    direct = undecided & (r2 <= 1.0) & np.all(slack <= 0.0, axis=1)
    inside |= direct
    undecided &= ~direct
    idx = np.flatnonzero(undecided)
    if len(idx):
        try:
            _, d = nearest_points(P[idx], K)
        except EmptyRegion:
            return np.zeros(len(P), dtype=bool)
        inside[idx] = d <= 1.0 + tol
    return inside


def mc_parallel_volume(K: ConvexRegion, samples: int = 1_000_000, seed: int = 0, tol: float = 1e-9,
                       workers: int = 1) -> VolumeEstimate:
    """Hit-or-miss estimate of Vol B(K) from uniform points of the radius-2 ball.

    A sample counts when its distance to K is at most ``1 + tol``.  Distances
    come from the exact active-set projection.  An empty K (not merely a
    measure-zero one) has an empty parallel body and estimates to 0.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")

    def count(b, n):
        return int(np.count_nonzero(in_parallel_body(sample_ball(n, block_rng(seed, b), 2.0), K, tol)))

    hits = sum(_map_blocks(count, samples, workers))
    return _estimate(hits, samples, seed, 8.0 * BALL_VOLUME)


class ParallelBodyTracker:
    """Vol B(K_i) along a nested sequence K_0 ⊇ K_1 ⊇ ... with common samples.

    Every call to ``update`` returns exactly what ``mc_parallel_volume``
    would for the same ``(samples, seed)``, but only samples whose nearest
    point was cut away since the last call are re-projected.  A sample that
    left B(K) never comes back, because the regions are nested.
    """

    def __init__(self, samples: int, seed: int, tol: float = 1e-9):
        self.samples = samples
        self.seed = seed
        self.tol = tol
        self.points = ball_points(samples, seed, 2.0)
        norms = np.linalg.norm(self.points, axis=1)
        self.inside = norms <= 2.0 + tol
        self.nearest = self.points / np.maximum(norms, 1.0)[:, None]

    def update(self, K: ConvexRegion) -> VolumeEstimate:
        if len(K):
            idx = np.flatnonzero(self.inside)
            viol = np.max(self.nearest[idx] @ K.normals.T - K.offsets, axis=1)
            stale = idx[viol > FEAS_TOL]
            if len(stale):
                try:
                    Q, d = nearest_points(self.points[stale], K)
                except EmptyRegion:
                    # B(empty) is empty
                    self.inside[:] = False
                else:
                    self.nearest[stale] = Q
                    self.inside[stale] = d <= 1.0 + self.tol
        hits = int(np.count_nonzero(self.inside))
        return _estimate(hits, self.samples, self.seed, 8.0 * BALL_VOLUME)


def covered_mask(P, placements) -> np.ndarray:
    P = np.asarray(P, dtype=float).reshape(-1, 3)
    covered = np.zeros(len(P), dtype=bool)
    if not placements:
        return covered
    N = np.array([pp.normal.as_list() for pp in placements])
    lo = np.array([pp.lower_offset for pp in placements])
    hi = np.array([pp.upper_offset for pp in placements])
    for s in range(0, len(N), 256):
        t = P @ N[s:s + 256].T
        covered |= np.any((t >= lo[s:s + 256]) & (t <= hi[s:s + 256]), axis=1)
    return covered


def verify_cover(instance: Instance, cert: CoverCertificate, samples: int = 1_000_000, seed: int = 0,
                 workers: int = 1) -> float:
    """Fraction of uniform ball samples lying in none of the placed slabs."""
    if samples < 1:
        raise ValueError("samples must be at least 1")
    placements = list(cert.placements)

    def count(b, n):
        return int(np.count_nonzero(~covered_mask(sample_ball(n, block_rng(seed, b)), placements)))

    return sum(_map_blocks(count, samples, workers)) / samples


def shadow_plank(K: ConvexRegion, plank: Plank):
    """The translate tangent from above to B(K), and the halfspace above its lower plane.

    Returns ``(placed, halfspace)`` where ``halfspace`` is
    {x : x . normal >= lower_offset}, stored with the flipped normal.
    """
    h, _ = support_value(K, plank.normal)
    upper = h + 1.0
    lower = upper - plank.width
    return PlacedPlank(plank.normal, lower, upper), Halfspace(-plank.normal, -lower)


def sample_region(K: ConvexRegion, n: int, rng: np.random.Generator, max_draws: int = 2_000_000) -> np.ndarray:
    """Up to ``n`` uniform points of K by rejection from its bounding box."""
    lo, hi = region_extent(K)
    out = []
    got = 0
    drawn = 0
    while got < n and drawn < max_draws:
        m = min(max(4 * (n - got), 1024), max_draws - drawn)
        X = lo + (hi - lo) * rng.random((m, 3))
        drawn += m
        X = X[K.contains_many(X)]
        out.append(X)
        got += len(X)
    if not out:
        return np.zeros((0, 3))
    return np.concatenate(out)[:n]


def convexity_probe(K: ConvexRegion, pairs: int = 1000, seed: int = 0, tol: float = 1e-12):
    """Count midpoints of random point pairs of K that fall outside K.

    Returns ``(violations, pairs_tested)``; fewer pairs are tested when K is
    too thin to sample.
    """
    rng = np.random.default_rng(seed)
    X = sample_region(K, 2 * pairs, rng)
    n = len(X) // 2
    if n == 0:
        return 0, 0
    mid = 0.5 * (X[:n] + X[n:2 * n])
    return int(np.count_nonzero(~K.contains_many(mid, tol))), n

"""Geometric vocabulary shared by the covering code.

Everything here is an immutable value. Regions are kept intensionally as
"unit ball centred at the origin intersected with a list of halfspaces";
nothing is ever meshed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

UNIT_TOL = 1e-12


class GeometryError(ValueError):
    """Raised when a geometric value cannot be constructed."""


class EmptyRegion(RuntimeError):
    """Raised when an operation needs a nonempty region and gets an empty one."""


class NonConvergence(RuntimeError):
    """Raised when an iterative method exhausts its budget."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class UnitVector:
    """A direction in R^3, normalized at construction."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        norm = math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)
        if not math.isfinite(norm) or norm == 0.0:
            raise GeometryError("cannot build a unit vector from a zero or non-finite vector")
        if abs(norm - 1.0) > UNIT_TOL:
            object.__setattr__(self, "x", self.x / norm)
            object.__setattr__(self, "y", self.y / norm)
            object.__setattr__(self, "z", self.z / norm)

    @classmethod
    def from_array(cls, v) -> "UnitVector":
        v = np.asarray(v, dtype=float).reshape(3)
        return cls(float(v[0]), float(v[1]), float(v[2]))

    @property
    def array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def __neg__(self) -> "UnitVector":
        return UnitVector(-self.x, -self.y, -self.z)

    def as_list(self) -> list[float]:
        return [self.x, self.y, self.z]


def as_unit(v) -> UnitVector:
    if isinstance(v, UnitVector):
        return v
    return UnitVector.from_array(v)


def angular_distance(a, b) -> float:
    """Angle in radians, in [0, pi], between two unit directions."""
    a = as_unit(a)
    b = as_unit(b)
    d = a.x * b.x + a.y * b.y + a.z * b.z
    return math.acos(min(1.0, max(-1.0, d)))


@dataclass(frozen=True)
class Plank:
    """A slab of given width; only its direction matters, position is chosen later."""

    normal: UnitVector
    width: float

    def __post_init__(self):
        object.__setattr__(self, "normal", as_unit(self.normal))
        if not (self.width > 0 and math.isfinite(self.width)):
            raise GeometryError(f"plank width must be positive, got {self.width!r}")

    @property
    def oversized(self) -> bool:
        """True if a single translate could swallow the whole unit ball."""
        return self.width > 2.0


@dataclass(frozen=True)
class Halfspace:
    """The set {x : x . normal <= offset}."""

    normal: UnitVector
    offset: float

    def __post_init__(self):
        object.__setattr__(self, "normal", as_unit(self.normal))
        object.__setattr__(self, "offset", float(self.offset))

    def contains(self, p, tol: float = 0.0) -> bool:
        return float(np.dot(self.normal.array, p)) <= self.offset + tol


@dataclass(frozen=True)
class PlacedPlank:
    """A plank fixed in space: lower_offset <= x . normal <= upper_offset."""

    normal: UnitVector
    lower_offset: float
    upper_offset: float

    def __post_init__(self):
        object.__setattr__(self, "normal", as_unit(self.normal))
        if self.upper_offset < self.lower_offset:
            raise GeometryError("upper_offset must not be below lower_offset")

    @property
    def width(self) -> float:
        return self.upper_offset - self.lower_offset

    def contains(self, p) -> bool:
        t = float(np.dot(self.normal.array, p))
        return self.lower_offset <= t <= self.upper_offset


@dataclass(frozen=True, eq=False)
class ConvexRegion:
    """Unit ball at the origin intersected with ``constraints``.

    ``normals`` (m, 3) and ``offsets`` (m,) are read-only array views of the
    constraint list, kept for the vectorized kernels.
    """

    constraints: tuple[Halfspace, ...] = ()
    normals: np.ndarray = field(init=False, repr=False, compare=False)
    offsets: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        cons = tuple(self.constraints)
        object.__setattr__(self, "constraints", cons)
        normals = np.array([h.normal.as_list() for h in cons], dtype=float).reshape(-1, 3)
        offsets = np.array([h.offset for h in cons], dtype=float)
        normals.flags.writeable = False
        offsets.flags.writeable = False
        object.__setattr__(self, "normals", normals)
        object.__setattr__(self, "offsets", offsets)

    @classmethod
    def ball(cls) -> "ConvexRegion":
        return cls(())

    @classmethod
    def from_arrays(cls, normals, offsets) -> "ConvexRegion":
        normals = np.asarray(normals, dtype=float).reshape(-1, 3)
        offsets = np.asarray(offsets, dtype=float).reshape(-1)
        return cls(tuple(Halfspace(UnitVector.from_array(n), float(b)) for n, b in zip(normals, offsets)))

    def __len__(self) -> int:
        return len(self.constraints)

    def __eq__(self, other):
        if not isinstance(other, ConvexRegion):
            return NotImplemented
        return self.constraints == other.constraints

    def __hash__(self):
        return hash(self.constraints)

    def with_constraint(self, h: Halfspace) -> "ConvexRegion":
        return ConvexRegion(self.constraints + (h,))

    def pruned(self) -> "ConvexRegion":
        """Drop constraints that cannot change the set.

        A halfspace with offset >= 1 contains the whole ball; among
        constraints with identical normals only the smallest offset matters.
        """
        best: dict[tuple[float, float, float], int] = {}
        for i, h in enumerate(self.constraints):
            if h.offset >= 1.0:
                continue
            key = (h.normal.x, h.normal.y, h.normal.z)
            j = best.get(key)
            if j is None or h.offset < self.constraints[j].offset:
                best[key] = i
        keep = sorted(best.values())
        if len(keep) == len(self.constraints):
            return self
        return ConvexRegion(tuple(self.constraints[i] for i in keep))

    def contains(self, p, tol: float = 0.0) -> bool:
        return region_contains(self, p, tol)

    def contains_many(self, pts, tol: float = 0.0) -> np.ndarray:
        """Vectorized membership for an (n, 3) array of points."""
        pts = np.asarray(pts, dtype=float).reshape(-1, 3)
        ok = np.einsum("ij,ij->i", pts, pts) <= (1.0 + tol) ** 2
        if len(self.constraints):
            ok &= np.all(pts @ self.normals.T <= self.offsets + tol, axis=1)
        return ok


def region_contains(K: ConvexRegion, p, tol: float = 0.0) -> bool:
    """True iff ``p`` is in K up to ``tol`` (ball and every halfspace)."""
    if tol < 0:
        raise ValueError("tol must be non-negative")
    p = np.asarray(p, dtype=float).reshape(3)
    if float(np.linalg.norm(p)) > 1.0 + tol:
        return False
    if len(K.constraints) == 0:
        return True
    return bool(np.all(K.normals @ p <= K.offsets + tol))


@dataclass(frozen=True)
class Instance:
    """A named collection of planks."""

    planks: tuple[Plank, ...]
    epsilon: float
    metadata: dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        planks = tuple(self.planks)
        if not planks:
            raise GeometryError("an instance needs at least one plank")
        if not self.epsilon > 0:
            raise GeometryError("epsilon must be positive")
        object.__setattr__(self, "planks", planks)

    @classmethod
    def from_planks(cls, planks: Sequence[Plank], metadata=None) -> "Instance":
        """Build an instance whose epsilon is the minimum plank width."""
        planks = tuple(planks)
        if not planks:
            raise GeometryError("an instance needs at least one plank")
        return cls(planks, min(p.width for p in planks), dict(metadata or {}))

    def __len__(self) -> int:
        return len(self.planks)

    @property
    def normals(self) -> np.ndarray:
        return np.array([p.normal.as_list() for p in self.planks])

    @property
    def widths(self) -> np.ndarray:
        return np.array([p.width for p in self.planks])

    @property
    def uniform(self) -> bool:
        w = self.widths
        return bool(np.all(w == w[0]))


@dataclass(frozen=True)
class StepRecord:
    """What happened when one plank was placed."""

    step: int
    plank_index: int
    support: float
    n_constraints: int
    vol_region: float | None = None
    vol_region_se: float | None = None
    vol_parallel: float | None = None
    vol_parallel_se: float | None = None
    empty_after: bool | None = None


@dataclass(frozen=True)
class CoverCertificate:
    """Ordering, placements and per-step records of a non-dissective cover."""

    ordering: tuple[int, ...]
    placements: tuple[PlacedPlank, ...]
    steps: tuple[StepRecord, ...]
    covered: bool
    planks_used: int
    mode: str = "fixed_order"
    chunks: tuple[tuple[int, ...], ...] | None = None
    error: str | None = None
    tol_support: float = 1e-9
    tol_empty: float = 1e-9

    def truncated(self, n: int) -> "CoverCertificate":
        """The certificate of the first ``n`` placements, marked uncovered."""
        n = max(0, min(n, self.planks_used))
        return CoverCertificate(
            ordering=self.ordering,
            placements=self.placements[:n],
            steps=self.steps[:n],
            covered=False,
            planks_used=n,
            mode=self.mode,
            chunks=self.chunks,
            error=self.error,
            tol_support=self.tol_support,
            tol_empty=self.tol_empty,
        )

    def regions(self):
        """Yield K_0, K_1, ... rebuilt from the lower offsets of the placements."""
        K = ConvexRegion.ball()
        yield K
        for pp in self.placements:
            K = K.with_constraint(Halfspace(pp.normal, pp.lower_offset))
            yield K

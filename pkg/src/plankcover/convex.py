"""Convex-analysis kernel over ``ball ∩ halfspaces`` regions.

Two families of solvers live here.

* ``project_region`` is Dykstra's cyclic projection over the ball and the
  halfspaces.  It is simple and converges to the exact nearest point, but
  slowly when many constraints are active.
* The active-set routines (``nearest_points``, ``support_value``) exploit
  the fact that the problems are three dimensional: an optimum is pinned by
  the ball plus at most two planes, or by three planes.  For a working set
  of constraints every such configuration is enumerated in closed form, and
  constraint generation grows the working set until the relaxed optimum is
  feasible for the full region.  The answer is exact up to rounding.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .geometry import ConvexRegion, EmptyRegion, NonConvergence, UnitVector, as_unit

FEAS_TOL = 1e-11
_PAR_TOL = 1e-10  # |n_i x n_j| below this: planes treated as parallel
_DET_TOL = 1e-12  # |det| below this: triple of planes treated as degenerate
_BLOCK = 1 << 21  # soft cap on (points * candidates * working-set) per block


@dataclass(frozen=True)
class ConvergenceReport:
    iterations: int
    residual: float
    converged: bool


def _orthogonal_unit(n):
    """A unit vector orthogonal to each row of ``n`` (shape (..., 3))."""
    a = np.abs(n)
    e = np.zeros_like(n)
    idx = np.argmin(a, axis=-1)
    np.put_along_axis(e, idx[..., None], 1.0, axis=-1)
    u = e - np.sum(e * n, axis=-1, keepdims=True) * n
    return u / np.linalg.norm(u, axis=-1, keepdims=True)


def _combos(w, r):
    c = list(itertools.combinations(range(w), r))
    if not c:
        return np.zeros((0, r), dtype=int)
    return np.array(c, dtype=int)


def _candidates(NW, bW, valid, target, linear):
    """Closed-form KKT candidates for each point of a batch.

    ``NW`` (B, w, 3) and ``bW`` (B, w) hold the working-set constraints,
    ``valid`` (B, w) masks padding.  ``target`` is the point to project
    (distance objective) or the direction to maximize (``linear``).
    Returns candidates (B, C, 3) and a definedness mask (B, C).
    """
    B, w = bW.shape
    cands = []
    oks = []

    tnorm = np.linalg.norm(target, axis=1)
    if linear:
        cands.append(target[:, None, :])
        oks.append(np.ones((B, 1), dtype=bool))
    else:
        cands.append(target[:, None, :])
        oks.append(np.ones((B, 1), dtype=bool))
        safe = np.where(tnorm > 0, tnorm, 1.0)
        cands.append((target / safe[:, None])[:, None, :])
        oks.append((tnorm > 0)[:, None])

    if w:
        tn = np.einsum("bwk,bk->bw", NW, target)
        if not linear:
            # projections onto single planes
            cands.append(target[:, None, :] - (tn - bW)[..., None] * NW)
            oks.append(valid)
        # sphere ∩ plane circles
        r = np.sqrt(np.clip(1.0 - bW * bW, 0.0, None))
        v = target[:, None, :] - tn[..., None] * NW
        vn = np.linalg.norm(v, axis=2)
        small = vn <= 1e-15
        u = np.where(small[..., None], _orthogonal_unit(NW), v / np.where(small, 1.0, vn)[..., None])
        cands.append(bW[..., None] * NW + r[..., None] * u)
        oks.append(valid & (bW * bW <= 1.0 + 1e-12))

    if w >= 2:
        pr = _combos(w, 2)
        ni, nj = NW[:, pr[:, 0]], NW[:, pr[:, 1]]
        bi, bj = bW[:, pr[:, 0]], bW[:, pr[:, 1]]
        pvalid = valid[:, pr[:, 0]] & valid[:, pr[:, 1]]
        d = np.cross(ni, nj)
        dn = np.linalg.norm(d, axis=2)
        nonpar = dn > _PAR_TOL
        dd = np.where(nonpar, dn * dn, 1.0)
        g = np.sum(ni * nj, axis=2)
        x0 = ((bi - g * bj) / dd)[..., None] * ni + ((bj - g * bi) / dd)[..., None] * nj
        dh = d / np.where(nonpar, dn, 1.0)[..., None]
        s = 1.0 - np.sum(x0 * x0, axis=2)
        root = np.sqrt(np.clip(s, 0.0, None))[..., None]
        okp = pvalid & nonpar
        oks_sphere = okp & (s >= -1e-12)
        cands.append(x0 + root * dh)
        oks.append(oks_sphere)
        cands.append(x0 - root * dh)
        oks.append(oks_sphere)
        if not linear:
            t = np.einsum("bck,bk->bc", dh, target) - np.sum(x0 * dh, axis=2)
            cands.append(x0 + t[..., None] * dh)
            oks.append(okp)

    if w >= 3:
        tr = _combos(w, 3)
        n1, n2, n3 = NW[:, tr[:, 0]], NW[:, tr[:, 1]], NW[:, tr[:, 2]]
        b1, b2, b3 = bW[:, tr[:, 0]], bW[:, tr[:, 1]], bW[:, tr[:, 2]]
        c23, c31, c12 = np.cross(n2, n3), np.cross(n3, n1), np.cross(n1, n2)
        det = np.sum(n1 * c23, axis=2)
        good = np.abs(det) > _DET_TOL
        sdet = np.where(good, det, 1.0)[..., None]
        x = (b1[..., None] * c23 + b2[..., None] * c31 + b3[..., None] * c12) / sdet
        cands.append(x)
        oks.append(valid[:, tr[:, 0]] & valid[:, tr[:, 1]] & valid[:, tr[:, 2]] & good)

    return np.concatenate(cands, axis=1), np.concatenate(oks, axis=1)


def _solve_relaxed(NW, bW, valid, target, linear, ftol):
    """Best feasible candidate per point; status False where none exists."""
    X, ok = _candidates(NW, bW, valid, target, linear)
    ok &= np.einsum("bck,bck->bc", X, X) <= (1.0 + ftol) ** 2
    if bW.shape[1]:
        viol = np.einsum("bck,bwk->bcw", X, NW) - bW[:, None, :]
        viol = np.where(valid[:, None, :], viol, -np.inf)
        ok &= np.max(viol, axis=2) <= ftol
    if linear:
        obj = np.einsum("bck,bk->bc", X, target)
    else:
        diff = X - target[:, None, :]
        obj = -np.einsum("bck,bck->bc", diff, diff)
    obj = np.where(ok, obj, -np.inf)
    best = np.argmax(obj, axis=1)
    found = ok[np.arange(len(best)), best]
    return X[np.arange(len(best)), best], found


def _active_set(A, b, targets, linear, ftol=FEAS_TOL, init=None, max_rounds=None):
    """Constraint-generation driver shared by projection and support.

    Returns (solutions (B, 3), feasible (B,) bool, working sets).
    """
    targets = np.atleast_2d(np.asarray(targets, dtype=float))
    B = len(targets)
    m = len(b)
    sols = np.zeros((B, 3))
    feas = np.ones(B, dtype=bool)
    if m == 0:
        X, f = _solve_relaxed(np.zeros((B, 0, 3)), np.zeros((B, 0)), np.zeros((B, 0), bool), targets, linear, ftol)
        return X, f, [[] for _ in range(B)]

    work = [list(init) if init is not None else [] for _ in range(B)]
    pending = np.arange(B)
    rounds = 0
    limit = max_rounds if max_rounds is not None else m + 4
    while len(pending):
        rounds += 1
        if rounds > limit:
            raise NonConvergence("active-set iteration did not settle", ConvergenceReport(rounds, float("nan"), False))
        w = max(len(work[i]) for i in pending)
        ncand = 3 + 3 * w + 3 * w * (w - 1) // 2 + w * (w - 1) * (w - 2) // 6
        block = max(1, _BLOCK // max(1, ncand * max(w, 1)))
        still = []
        for s in range(0, len(pending), block):
            idx = pending[s:s + block]
            Widx = np.zeros((len(idx), w), dtype=int)
            valid = np.zeros((len(idx), w), dtype=bool)
            for r, i in enumerate(idx):
                k = len(work[i])
                Widx[r, :k] = work[i]
                valid[r, :k] = True
            X, found = _solve_relaxed(A[Widx], b[Widx], valid, targets[idx], linear, ftol)
            sols[idx] = X
            dead = ~found
            feas[idx[dead]] = False
            live = np.flatnonzero(found)
            if len(live) == 0:
                continue
            viol = X[live] @ A.T - b
            worst = np.argmax(viol, axis=1)
            wv = viol[np.arange(len(live)), worst]
            for r in np.flatnonzero(wv > ftol):
                i = idx[live[r]]
                work[i].append(int(worst[r]))
                still.append(i)
        pending = np.array(still, dtype=int)
    return sols, feas, work


def nearest_points(P, K: ConvexRegion, ftol: float = FEAS_TOL):
    """Exact nearest points of K for a batch of query points.

    Returns ``(Q, dist)``.  Raises EmptyRegion if K is empty.
    """
    P = np.atleast_2d(np.asarray(P, dtype=float))
    Q, feas, _ = _active_set(K.normals, K.offsets, P, linear=False, ftol=ftol)
    if not np.all(feas):
        raise EmptyRegion("region is empty")
    return Q, np.linalg.norm(P - Q, axis=1)


def _dykstra(p, A, b, tol, max_iter):
    x = np.array(p, dtype=float)
    m = len(b)
    y = np.zeros((m + 1, 3))
    residual = math.inf
    for it in range(1, max_iter + 1):
        y_prev = y.copy()
        z = x + y[0]
        nz = math.sqrt(float(z @ z))
        x = z / nz if nz > 1.0 else z
        y[0] = z - x
        for j in range(m):
            z = x + y[j + 1]
            t = float(A[j] @ z) - b[j]
            x = z - t * A[j] if t > 0 else z
            y[j + 1] = z - x
        viol = math.sqrt(float(x @ x)) - 1.0
        if m:
            viol = max(viol, float(np.max(A @ x - b)))
        # change of the increments, not of x: x can creep while still far off
        residual = max(viol, 0.0, float(np.linalg.norm(y - y_prev)))
        if residual <= tol:
            return x, ConvergenceReport(it, residual, True)
    return x, ConvergenceReport(max_iter, residual, False)


def project_region(p, K: ConvexRegion, tol: float = 1e-9, max_iter: int = 100_000, method: str = "dykstra"):
    """Nearest point of K to ``p``.

    Parameters
    ----------
    p : array_like, shape (3,)
    K : ConvexRegion
        Must be nonempty.
    tol : float
        Stopping tolerance on the cycle change and on constraint violation.
    max_iter : int
        Cap on full Dykstra cycles.
    method : {"dykstra", "active-set"}
        ``"active-set"`` uses the exact enumeration solver instead.

    Returns
    -------
    q : ndarray, shape (3,)
    report : ConvergenceReport

    Raises
    ------
    NonConvergence
        If Dykstra exhausts ``max_iter``; the partial report is attached.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    p = np.asarray(p, dtype=float).reshape(3)
    if method == "active-set":
        Q, _ = nearest_points(p[None], K)
        return Q[0], ConvergenceReport(1, 0.0, True)
    if method != "dykstra":
        raise ValueError(f"unknown method {method!r}")
    q, report = _dykstra(p, K.normals, K.offsets, tol, max_iter)
    if not report.converged:
        raise NonConvergence(f"Dykstra projection did not converge in {max_iter} cycles", report)
    return q, report


def distance_to_region(p, K: ConvexRegion, tol: float = 1e-9, method: str = "dykstra") -> float:
    q, _ = project_region(p, K, tol=tol, method=method)
    return float(np.linalg.norm(np.asarray(p, dtype=float) - q))


def _support_ascent(K, c, tol, max_iter, step=0.1, warm=None):
    x = np.zeros(3) if warm is None else np.asarray(warm, dtype=float)
    x, _ = project_region(x, K, tol=tol * 0.1)
    iterates = [x]
    for it in range(max_iter):
        x_new, _ = project_region(x + step * c, K, tol=tol * 0.1)
        iterates.append(x_new)
        if np.linalg.norm(x_new - x) <= tol:
            x = x_new
            break
        x = x_new
    else:
        raise NonConvergence("support ascent did not converge", ConvergenceReport(max_iter, float("nan"), False))
    tail = iterates[int(0.8 * len(iterates)):]
    avg = np.mean(tail, axis=0)
    best = avg if avg @ c > x @ c else x
    return float(best @ c), best


def support_value(K: ConvexRegion, c, tol: float = 1e-9, method: str = "exact", warm=None, max_iter: int = 100_000):
    """Maximum of ``x . c`` over K and a point attaining it.

    ``method="exact"`` is the active-set enumeration; ``"ascent"`` runs
    projected gradient ascent with Dykstra projections (step 0.1, averaged
    tail) and is kept mainly as an independent cross-check.

    Raises EmptyRegion if K is empty.
    """
    c = as_unit(c).array
    if method == "ascent":
        if is_empty(K, tol_empty=1e-12):
            raise EmptyRegion("support of an empty region")
        return _support_ascent(K, c, tol, max_iter, warm=warm)
    if method != "exact":
        raise ValueError(f"unknown method {method!r}")
    X, feas, _ = _active_set(K.normals, K.offsets, c[None], linear=True)
    if not feas[0]:
        raise EmptyRegion("support of an empty region")
    x = X[0]
    return float(x @ c), x


def _has_shrunk_point(K: ConvexRegion, r: float) -> bool:
    """Is there a centre x with a ball of radius r inside K (r may be <= 0)?"""
    R = 1.0 - r
    if R <= 0.0:
        return r == 1.0 and bool(np.all(K.offsets >= 1.0))
    b = (K.offsets - r) / R
    _, feas, _ = _active_set(K.normals, b, np.array([[0.0, 0.0, 1.0]]), linear=True)
    return bool(feas[0])


def inner_radius(K: ConvexRegion, tol: float = 1e-12) -> float:
    """Largest r such that a ball of radius r fits in K (negative if K is empty).

    Computed as max over x of min(1 - |x|, offset_j - x . n_j) by bisection on
    r, each probe being an exact feasibility test of the shrunk region.
    """
    lo = min(1.0, float(np.min(K.offsets)) if len(K) else 1.0)  # value at the origin
    if lo >= 1.0:
        return 1.0
    if not _has_shrunk_point(K, lo):
        # only happens through rounding when lo is exactly the optimum
        return lo
    hi = 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if _has_shrunk_point(K, mid):
            lo = mid
        else:
            hi = mid
    return lo


def is_empty(K: ConvexRegion, tol_empty: float = 1e-9) -> bool:
    """True iff inner_radius(K) < tol_empty.

    Measure-zero remainders (a point, a disk) count as empty.  Decided with
    a single feasibility probe at radius ``tol_empty``.
    """
    if tol_empty <= 0:
        raise ValueError("tol_empty must be positive")
    return not _has_shrunk_point(K, tol_empty)


def region_extent(K: ConvexRegion):
    """Axis-aligned bounding box (lo, hi) of a nonempty region."""
    lo = np.empty(3)
    hi = np.empty(3)
    for k in range(3):
        e = np.zeros(3)
        e[k] = 1.0
        hi[k] = support_value(K, e)[0]
        lo[k] = -support_value(K, -e)[0]
    return lo, hi

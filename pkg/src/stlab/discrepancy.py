"""Star discrepancy of window point sets with respect to the product
Sato-Tate measure.

Two conventions are supported:

``niederreiter``
    max over grid corners W of |A([0,W))/K - mu([0,W))|, with half-open
    counts at every corner.  This is the grid formula evaluated as stated and
    is what the published tables report.
``supremum``
    the true supremum over all W in [0,1]^s.  Inside a grid cell the count
    is constant and equals the half-open count at the upper corner Y, while
    the measure sweeps (mu(Z), mu(Y)]; so the value per cell is
    max(A(Y)/K - mu(Z), mu(Y) - A(Y)/K).

The two agree except when the extremum sits on a boundary carrying points.
"""
from __future__ import annotations

import itertools
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np
from numba import njit

from .errors import BudgetExceededError, DomainError, SizeError
from .measure import st_cdf

NIEDERREITER = "niederreiter"
SUPREMUM = "supremum"
CONVENTIONS = (NIEDERREITER, SUPREMUM)

DEFAULT_BUDGETS = {1: 10_000_000, 2: 100_000, 3: 5_000}


@dataclass(frozen=True)
class WindowPointSet:
    points: np.ndarray  # shape (K, s)

    def __post_init__(self):
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=float))
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise DomainError("points must be a non-empty (K, s) array")
        if np.any(~((pts >= 0.0) & (pts <= 1.0))):
            raise DomainError("coordinates must lie in [0, 1]")
        object.__setattr__(self, "points", pts)

    @property
    def K(self) -> int:
        return self.points.shape[0]

    @property
    def s(self) -> int:
        return self.points.shape[1]

    @classmethod
    def from_angles(cls, angles, s: int, K: int) -> "WindowPointSet":
        """X_k = (x_k, ..., x_{k+s-1}) for k = 1..K."""
        x = np.asarray(getattr(angles, "angles", angles), dtype=float)
        if x.size < K + s - 1:
            raise DomainError(f"need {K + s - 1} angles, have {x.size}")
        return cls(np.lib.stride_tricks.sliding_window_view(x[: K + s - 1], s).copy())


@dataclass(frozen=True)
class CoordinateGrid:
    values: tuple  # per dimension: sorted distinct values incl. 0 and 1
    ranks: np.ndarray  # (K, s) index of each coordinate in its grid

    @property
    def sizes(self) -> list[int]:
        return [v.size for v in self.values]


def build_grid(points) -> CoordinateGrid:
    pts = points.points if isinstance(points, WindowPointSet) else np.asarray(points, float)
    values, ranks = [], []
    for i in range(pts.shape[1]):
        g = np.unique(np.concatenate([[0.0, 1.0], pts[:, i]]))
        values.append(g)
        ranks.append(np.searchsorted(g, pts[:, i]))
    return CoordinateGrid(tuple(values), np.stack(ranks, axis=1).astype(np.int64))


@dataclass(frozen=True)
class DiscrepancyResult:
    s: int
    K: int
    star_disc: float
    log_slope: float
    grid_sizes: list = field(default_factory=list)
    elapsed: float = 0.0
    convention: str = NIEDERREITER
    method: str = "exact"

    def as_dict(self):
        d = asdict(self)
        d["grid_sizes"] = list(self.grid_sizes)
        return d


def box_count(points, W) -> int:
    """Number of points with every coordinate strictly below W."""
    pts = points.points if isinstance(points, WindowPointSet) else np.asarray(points, float)
    W = np.asarray(W, dtype=float)
    return int(np.count_nonzero(np.all(pts < W, axis=1)))


# ------------------------------------------------------------------ sweeps


def _star_1d(grid: CoordinateGrid, K: int, mode: int) -> float:
    g = grid.values[0]
    F = st_cdf(g)
    C = np.bincount(grid.ranks[:, 0], minlength=g.size).cumsum()
    # strict count below g[j] is C[j-1]
    A = np.concatenate([[0], C[:-1]]) / K
    if mode == 0:
        return float(np.max(np.abs(A - F)))
    return float(max(np.max(A[1:] - F[:-1]), np.max(F[1:] - A[1:])))


@njit(cache=True, inline="always")
def _scan_grid(col, invK, fy, F, best):
    # max_j |col[j]/K - fy*F[j]| over j >= 1, four independent maxima so the
    # loop pipelines
    n = col.size
    a0 = best
    a1 = best
    a2 = best
    a3 = best
    j = 1
    while j + 4 <= n:
        v0 = abs(col[j] * invK - fy * F[j])
        v1 = abs(col[j + 1] * invK - fy * F[j + 1])
        v2 = abs(col[j + 2] * invK - fy * F[j + 2])
        v3 = abs(col[j + 3] * invK - fy * F[j + 3])
        a0 = v0 if v0 > a0 else a0
        a1 = v1 if v1 > a1 else a1
        a2 = v2 if v2 > a2 else a2
        a3 = v3 if v3 > a3 else a3
        j += 4
    while j < n:
        v0 = abs(col[j] * invK - fy * F[j])
        a0 = v0 if v0 > a0 else a0
        j += 1
    a0 = a1 if a1 > a0 else a0
    a2 = a3 if a3 > a2 else a2
    return a2 if a2 > a0 else a0


@njit(cache=True, inline="always")
def _scan_cells(col, invK, fy, fz, F, best):
    # per cell (F[j-1], F[j]]: max(col/K - fz*F[j-1], fy*F[j] - col/K)
    n = col.size
    a0 = best
    a1 = best
    a2 = best
    a3 = best
    j = 1
    while j + 2 <= n:
        c0 = col[j] * invK
        c1 = col[j + 1] * invK
        v0 = c0 - fz * F[j - 1]
        w0 = fy * F[j] - c0
        v1 = c1 - fz * F[j]
        w1 = fy * F[j + 1] - c1
        a0 = v0 if v0 > a0 else a0
        a1 = w0 if w0 > a1 else a1
        a2 = v1 if v1 > a2 else a2
        a3 = w1 if w1 > a3 else a3
        j += 2
    while j < n:
        c0 = col[j] * invK
        v0 = c0 - fz * F[j - 1]
        w0 = fy * F[j] - c0
        a0 = v0 if v0 > a0 else a0
        a1 = w0 if w0 > a1 else a1
        j += 1
    a0 = a1 if a1 > a0 else a0
    a2 = a3 if a3 > a2 else a2
    return a2 if a2 > a0 else a0


@njit(cache=True)
def _star_2d(r1, r2, F1, F2, K, mode):
    n1 = F1.size
    n2 = F2.size
    order = np.argsort(r1, kind="mergesort")
    # col[j2] = number of points with r1 < j1 and r2 < j2
    col = np.zeros(n2, dtype=np.int64)
    invK = 1.0 / K
    best = 0.0
    ptr = 0
    for j1 in range(1, n1):
        while ptr < K and r1[order[ptr]] < j1:
            for j2 in range(r2[order[ptr]] + 1, n2):
                col[j2] += 1
            ptr += 1
        if mode == 0:
            best = _scan_grid(col, invK, F1[j1], F2, best)
        else:
            best = _scan_cells(col, invK, F1[j1], F1[j1 - 1], F2, best)
    return best


@njit(cache=True)
def _star_3d(r1, r2, r3, F1, F2, F3, K, mode):
    n1 = F1.size
    n2 = F2.size
    n3 = F3.size
    # points grouped by their dimension-2 rank
    by2 = np.argsort(r2, kind="mergesort")
    start = np.zeros(n2 + 1, dtype=np.int64)
    for idx in range(K):
        start[r2[idx] + 1] += 1
    for j in range(n2):
        start[j + 1] += start[j]
    # col[j3] = number of points with r1 < j1, r2 < j2, r3 < j3; counts stay
    # integral so no rounding accumulates along the sweep
    col = np.zeros(n3, dtype=np.int64)
    invK = 1.0 / K
    best = 0.0
    for j1 in range(1, n1):
        col[:] = 0
        fy1 = F1[j1]
        fz1 = F1[j1 - 1]
        for j2 in range(1, n2):
            for t in range(start[j2 - 1], start[j2]):
                q = by2[t]
                if r1[q] < j1:
                    for j3 in range(r3[q] + 1, n3):
                        col[j3] += 1
            if mode == 0:
                best = _scan_grid(col, invK, fy1 * F2[j2], F3, best)
            else:
                best = _scan_cells(col, invK, fy1 * F2[j2], fz1 * F2[j2 - 1], F3, best)
    return best


def _mode(convention: str) -> int:
    if convention not in CONVENTIONS:
        raise DomainError(f"unknown convention {convention!r}; choose from {CONVENTIONS}")
    return 0 if convention == NIEDERREITER else 1


def _as_pointset(points) -> WindowPointSet:
    return points if isinstance(points, WindowPointSet) else WindowPointSet(points)


def check_budget(s: int, K: int, budgets: dict | None = None) -> None:
    """Raise BudgetExceededError when an exact s-dimensional sweep over K
    points is beyond the configured size."""
    budgets = DEFAULT_BUDGETS if budgets is None else budgets
    if s not in DEFAULT_BUDGETS:
        raise DomainError("exact computation supports s = 1, 2, 3 only")
    limit = budgets.get(s, DEFAULT_BUDGETS[s])
    if K > limit:
        raise BudgetExceededError(
            f"K={K} exceeds the s={s} budget of {limit}; lower K, raise the "
            "budget in the configuration, or use the randomized estimate")


def star_discrepancy(points, convention: str = NIEDERREITER,
                     budgets: dict | None = None) -> DiscrepancyResult:
    """Exact star discrepancy for s = 1, 2, 3 by sorted sweeps."""
    ps = _as_pointset(points)
    mode = _mode(convention)
    check_budget(ps.s, ps.K, budgets)
    t0 = time.perf_counter()
    grid = build_grid(ps)
    F = [st_cdf(v) for v in grid.values]
    r = [np.ascontiguousarray(grid.ranks[:, i]) for i in range(ps.s)]
    if ps.s == 1:
        d = _star_1d(grid, ps.K, mode)
    elif ps.s == 2:
        d = float(_star_2d(r[0], r[1], F[0], F[1], ps.K, mode))
    else:
        d = float(_star_3d(r[0], r[1], r[2], F[0], F[1], F[2], ps.K, mode))
    elapsed = time.perf_counter() - t0
    return DiscrepancyResult(ps.s, ps.K, d, _log_slope(d, ps.K), grid.sizes,
                             elapsed, convention)


def _log_slope(d: float, K: int) -> float:
    if K < 2:
        return math.nan
    if d == 0:
        return math.inf
    return -math.log(d) / math.log(K)


def star_discrepancy_estimate(points, samples: int = 2000, seed: int = 0) -> DiscrepancyResult:
    """Randomised lower bound: max deviation over random grid corners.

    Never a substitute for the exact value; useful beyond the budgets.
    """
    ps = _as_pointset(points)
    t0 = time.perf_counter()
    grid = build_grid(ps)
    rng = np.random.default_rng(seed)
    F = [st_cdf(v) for v in grid.values]
    ranks = grid.ranks
    best = 0.0
    for _ in range(samples):
        idx = [int(rng.integers(1, v.size)) for v in grid.values]
        inside = np.all(ranks < np.array(idx), axis=1)
        mu = 1.0
        for i, j in enumerate(idx):
            mu *= F[i][j]
        best = max(best, abs(np.count_nonzero(inside) / ps.K - mu))
    return DiscrepancyResult(ps.s, ps.K, best, _log_slope(best, ps.K), grid.sizes,
                             time.perf_counter() - t0, NIEDERREITER, "estimate")


# ------------------------------------------------------- brute-force oracles


def star_discrepancy_bruteforce(points, convention: str = NIEDERREITER) -> float:
    """Direct evaluation at every grid corner, counting point by point.

    With ``supremum`` each coordinate of a corner is also taken as a limit
    from above (counting x <= w instead of x < w), which realises the
    supremum; corners at 1 admit no limit from above.
    """
    ps = _as_pointset(points)
    mode = _mode(convention)
    if ps.K > 64 or ps.s > 3:
        raise SizeError("brute force is limited to K <= 64, s <= 3")
    pts = ps.points
    grids = [np.unique(np.concatenate([[0.0, 1.0], pts[:, i]])) for i in range(ps.s)]
    F = [st_cdf(g) for g in grids]
    sides = (False,) if mode == 0 else (False, True)
    best = 0.0
    letters = "abc"[: ps.s]
    spec = ",".join(f"k{c}" for c in letters) + "->" + letters
    for combo in itertools.product(sides, repeat=ps.s):
        ind = []
        for i, closed in enumerate(combo):
            x = pts[:, i][:, None]
            m = (x <= grids[i][None, :]) if closed else (x < grids[i][None, :])
            if closed:
                m[:, grids[i] == 1.0] = False  # no limit from above at 1
            ind.append(m.astype(np.int64))
        counts = np.einsum(spec, *ind) / ps.K
        mu = F[0]
        for i in range(1, ps.s):
            mu = np.multiply.outer(mu, F[i])
        dev = np.abs(counts - mu)
        if any(combo):
            valid = np.ones(counts.shape, dtype=bool)
            for i, closed in enumerate(combo):
                if closed:
                    shape = [1] * ps.s
                    shape[i] = -1
                    valid &= (grids[i] < 1.0).reshape(shape)
            dev = np.where(valid, dev, 0.0)
        best = max(best, float(dev.max()))
    return best


def extreme_discrepancy_bruteforce(points) -> float:
    """sup over half-open boxes [a, b) of |A/K - mu|, by direct enumeration.

    Each endpoint ranges over grid values and both one-sided limits: a from
    below counts x >= a, from above x > a; b from below counts x < b, from
    above x <= b.
    """
    ps = _as_pointset(points)
    if ps.K > 32 or ps.s > 2:
        raise SizeError("brute force is limited to K <= 32, s <= 2")
    pts = ps.points
    per_dim_ind, per_dim_mu = [], []
    for i in range(ps.s):
        g = np.unique(np.concatenate([[0.0, 1.0], pts[:, i]]))
        F = st_cdf(g)
        x = pts[:, i]
        inds, mus = [], []
        for ia in range(g.size):
            for ib in range(ia, g.size):
                a, b = g[ia], g[ib]
                for a_up in (False, True):
                    if a_up and a == 1.0:
                        continue
                    for b_up in (False, True):
                        if b_up and b == 1.0:
                            continue
                        lo = x > a if a_up else x >= a
                        hi = x <= b if b_up else x < b
                        inds.append(lo & hi)
                        mus.append(F[ib] - F[ia])
        per_dim_ind.append(np.array(inds, dtype=np.int64))  # (boxes, K)
        per_dim_mu.append(np.array(mus))
    if ps.s == 1:
        counts = per_dim_ind[0].sum(axis=1) / ps.K
        mu = per_dim_mu[0]
    else:
        counts = (per_dim_ind[0] @ per_dim_ind[1].T) / ps.K
        mu = np.multiply.outer(per_dim_mu[0], per_dim_mu[1])
    return float(np.max(np.abs(counts - mu)))

"""Exact accelerated k-means over ball-shaped clusters.

Each cluster is carried as a ball (mean center, max member distance as
radius).  Per iteration the neighbor relation, stable region and annular
regions bound the candidate centers each point has to be compared against,
and a center-shift test prunes center-center distance computations, without
ever changing the result: ``run`` and the naive ``lloyd_run`` produce
identical partitions for the same seed.

Movement rule shared by both algorithms: a point keeps its current cluster
unless some center is strictly closer; among strictly closer centers the
minimum-distance one wins, exact ties broken by lowest cluster index.  (A
pure lowest-index rule over *all* centers would need information the pruned
algorithm provably never computes, and the candidate-set guarantees hold
exactly for strict improvement.)
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .metrics import DistanceFn, euclidean

__all__ = [
    "Dataset",
    "BallCluster",
    "BkmConfig",
    "RunStats",
    "Clustering",
    "Init",
    "ConfigError",
    "init_clusters",
    "compute_center",
    "compute_radius",
    "neighbors",
    "stable_region",
    "annular_regions",
    "reassign",
    "prune_neighbor_check",
    "run",
    "lloyd_run",
    "ball_geometry",
]


class ConfigError(ValueError):
    """Invalid clustering configuration."""


class Init(enum.Enum):
    RANDOM_PARTITION = "random"
    PLUS_PLUS = "plusplus"


@dataclass(frozen=True)
class Dataset:
    """Fixed-dimension real vectors; the finite universe every module works over."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=float))
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise ValueError("dataset must be a non-empty (n, d) array")
        if not np.isfinite(pts).all():
            raise ValueError("dataset coordinates must be finite")
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]


@dataclass
class BallCluster:
    """One cluster as a ball plus its per-iteration geometry."""

    center: np.ndarray
    radius: float
    members: np.ndarray
    stable_radius: Optional[float] = None
    neighbors: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=int))
    annuli: np.ndarray = field(default_factory=lambda: np.empty(0))


@dataclass(frozen=True)
class BkmConfig:
    k: int
    max_iter: int = 200
    seed: int = 0
    init: Init = Init.RANDOM_PARTITION
    distance: DistanceFn = field(default_factory=euclidean)

    def __post_init__(self):
        if self.k < 1:
            raise ConfigError("k must be positive")
        if self.max_iter < 1:
            raise ConfigError("max_iter must be positive")


@dataclass
class RunStats:
    iterations: int = 0
    distance_computations: int = 0
    points_moved_per_iter: list = field(default_factory=list)
    prunings_fired: int = 0
    empty_cluster_repairs: int = 0
    neighbor_free_stable_clusters: int = 0
    # instrumented-mode violation counters; all must stay zero
    stable_violations: int = 0
    move_target_violations: int = 0
    pruning_violations: int = 0


@dataclass
class Clustering:
    """Hard partition with a tie report; soft ties are recoverable from `ties`."""

    assignments: np.ndarray
    centers: np.ndarray
    radii: np.ndarray
    converged: bool
    ties: list = field(default_factory=list)
    history: Optional[list] = None

    @property
    def k(self) -> int:
        return self.centers.shape[0]

    def member_sets(self) -> list[np.ndarray]:
        return [np.flatnonzero(self.assignments == i) for i in range(self.k)]


class _Counter:
    """Distance engine: one code path for every sigma evaluation, with counting.

    All point-to-center distances flow through ``rows`` with points as matrix
    rows, so the accelerated and naive algorithms see bit-identical values.
    """

    def __init__(self, fn: DistanceFn):
        self.fn = fn
        self.count = 0

    def rows(self, m: np.ndarray, v: np.ndarray) -> np.ndarray:
        self.count += m.shape[0]
        return _raw_rows(self.fn, m, v)

    def one(self, a: np.ndarray, b: np.ndarray) -> float:
        self.count += 1
        return float(self.fn.eval(a, b))

    def paired(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        self.count += a.shape[0]
        return np.array([float(self.fn.eval(a[i], b[i])) for i in range(a.shape[0])])


def _raw_rows(fn: DistanceFn, m: np.ndarray, v: np.ndarray) -> np.ndarray:
    if fn.rows is not None:
        return fn.rows(m, v)
    return np.array([float(fn.eval(row, v)) for row in m])


def compute_center(ds: Dataset, members: Sequence[int]) -> np.ndarray:
    """Coordinate-wise mean of the member points."""
    mem = np.asarray(members, dtype=int)
    if mem.size == 0:
        raise ValueError("cannot take the center of an empty member set")
    return ds.points[np.sort(mem)].mean(axis=0)


def compute_radius(
    ds: Dataset, members: Sequence[int], center: np.ndarray, distance: DistanceFn = None
) -> float:
    """Greatest member distance from the center."""
    mem = np.sort(np.asarray(members, dtype=int))
    if mem.size == 0:
        raise ValueError("cannot take the radius of an empty member set")
    fn = distance if distance is not None else euclidean()
    return float(_raw_rows(fn, ds.points[mem], np.asarray(center, dtype=float)).max())


def neighbors(
    centers: np.ndarray, radii: np.ndarray, i: int, distance: DistanceFn = None
) -> np.ndarray:
    """Clusters j != i whose center lies strictly inside twice cluster i's radius."""
    fn = distance if distance is not None else euclidean()
    centers = np.asarray(centers, dtype=float)
    k = centers.shape[0]
    out = [
        j
        for j in range(k)
        if j != i and float(fn.eval(centers[i], centers[j])) < 2.0 * float(radii[i])
    ]
    return np.array(out, dtype=int)


def stable_region(
    centers: np.ndarray, i: int, neighbor_ids: Sequence[int], distance: DistanceFn = None
) -> Optional[float]:
    """Stable radius: half the closest neighbor-center distance.

    Returns None when the neighbor set is empty, in which case the whole ball
    is stable.
    """
    ids = np.asarray(neighbor_ids, dtype=int)
    if ids.size == 0:
        return None
    fn = distance if distance is not None else euclidean()
    centers = np.asarray(centers, dtype=float)
    return 0.5 * min(float(fn.eval(centers[i], centers[j])) for j in ids)


def annular_regions(
    member_dists: np.ndarray, sorted_neighbor_dists: np.ndarray, radius: float
) -> tuple[np.ndarray, np.ndarray]:
    """Split members into the stable core and annular shells.

    ``member_dists`` are distances from members to their own center and
    ``sorted_neighbor_dists`` the ascending center distances of the k'
    neighbors.  Returns (boundaries, labels): boundaries are the half center
    distances; labels give 0 for the stable region and m in 1..k' for the mth
    annulus (b_m, b_{m+1}], the last one extending to the cluster radius.
    Lower bounds are strict, upper bounds inclusive.
    """
    nd = np.asarray(sorted_neighbor_dists, dtype=float)
    if nd.size == 0:
        raise ValueError("annular regions need at least one neighbor")
    bounds = nd / 2.0
    d = np.asarray(member_dists, dtype=float)
    labels = np.zeros(d.shape[0], dtype=int)
    kprime = nd.size
    for m in range(1, kprime + 1):
        lo = bounds[m - 1]
        hi = bounds[m] if m < kprime else radius
        labels[(d > lo) & (d <= hi)] = m
    return bounds, labels


def prune_neighbor_check(
    prev_center_dist: float, r_i: float, delta_i: float, delta_j: float
) -> bool:
    """True when cluster j provably cannot be a neighbor of cluster i this iteration.

    Uses last iteration's center distance and the two center shifts:
    prev >= 2 r_i + delta_i + delta_j rules the pair out without computing the
    current center distance.  Never prunes on the first iteration (no history).
    """
    return prev_center_dist >= 2.0 * r_i + delta_i + delta_j


def init_clusters(ds: Dataset, cfg: BkmConfig) -> list[np.ndarray]:
    """Seeded initial memberships: k non-empty disjoint index sets covering all points."""
    n = ds.n
    if cfg.k > n:
        raise ConfigError(f"k={cfg.k} exceeds dataset size n={n}")
    rng = np.random.default_rng(cfg.seed)
    if cfg.init is Init.RANDOM_PARTITION:
        perm = rng.permutation(n)
        assign = np.empty(n, dtype=int)
        assign[perm[: cfg.k]] = np.arange(cfg.k)  # anchors keep every cluster non-empty
        if n > cfg.k:
            assign[perm[cfg.k :]] = rng.integers(0, cfg.k, size=n - cfg.k)
    else:
        chosen = _plus_plus_indices(ds.points, cfg.k, rng)
        cols = [_euclid_sq_rows(ds.points, ds.points[c]) for c in chosen]
        assign = np.argmin(np.stack(cols, axis=1), axis=1)
        # chosen points anchor their own cluster (guards duplicate-point draws)
        for c_idx, p in enumerate(chosen):
            assign[p] = c_idx
    return [np.flatnonzero(assign == i) for i in range(cfg.k)]


def _euclid_sq_rows(m: np.ndarray, v: np.ndarray) -> np.ndarray:
    diff = m - v
    return np.sum(diff * diff, axis=1)


def _plus_plus_indices(x: np.ndarray, k: int, rng: np.random.Generator) -> list[int]:
    n = x.shape[0]
    chosen = [int(rng.integers(n))]
    d2 = _euclid_sq_rows(x, x[chosen[0]])
    for _ in range(1, k):
        total = float(d2.sum())
        if total > 0.0:
            nxt = int(rng.choice(n, p=d2 / total))
        else:
            nxt = int(np.setdiff1d(np.arange(n), np.array(chosen))[0])
        chosen.append(nxt)
        d2 = np.minimum(d2, _euclid_sq_rows(x, x[nxt]))
    return chosen


def _assignments_from_sets(sets: Sequence[np.ndarray], n: int) -> np.ndarray:
    assign = np.full(n, -1, dtype=int)
    for i, mem in enumerate(sets):
        assign[np.asarray(mem, dtype=int)] = i
    if (assign < 0).any():
        raise ValueError("member sets do not cover the dataset")
    return assign


def _centers_of(x: np.ndarray, assign: np.ndarray, k: int) -> np.ndarray:
    return np.stack([x[np.flatnonzero(assign == i)].mean(axis=0) for i in range(k)])


def _repair_empty(
    x: np.ndarray,
    assign: np.ndarray,
    centers: np.ndarray,
    k: int,
    donor_dists,
    stats: RunStats,
) -> int:
    """Refill emptied clusters with the farthest point of the currently largest one.

    ``donor_dists(members, cluster)`` must return that cluster's member
    distances to its center.  Deterministic: lowest empty index first, first
    maximal donor, first farthest point.
    """
    moved = 0
    sizes = np.bincount(assign, minlength=k)
    while (sizes == 0).any():
        empty = int(np.flatnonzero(sizes == 0)[0])
        donor = int(np.argmax(sizes))
        mem = np.flatnonzero(assign == donor)
        far = int(mem[int(np.argmax(donor_dists(mem, donor)))])
        assign[far] = empty
        sizes[donor] -= 1
        sizes[empty] += 1
        stats.empty_cluster_repairs += 1
        moved += 1
    return moved


def reassign(
    ds: Dataset,
    centers: np.ndarray,
    radii: np.ndarray,
    assign: np.ndarray,
    distance: DistanceFn = None,
    repair_empty: bool = True,
) -> tuple[np.ndarray, int]:
    """One candidate-bounded assignment pass against fixed centers.

    Stable points are untouched; a point in annulus m is compared against its
    own center and the first m closest neighbor centers only.  A cluster
    emptied by the pass is refilled with the farthest point of the largest
    cluster unless ``repair_empty`` is disabled.  Returns the new assignment
    array and the move count.
    """
    fn = distance if distance is not None else euclidean()
    counter = _Counter(fn)
    k = centers.shape[0]
    d_own = np.empty(ds.n)
    for i in range(k):
        mem = np.flatnonzero(assign == i)
        d_own[mem] = counter.rows(ds.points[mem], centers[i])
    dmat = np.full((k, k), np.nan)
    for i in range(k):
        for j in range(i + 1, k):
            dmat[i, j] = dmat[j, i] = counter.one(centers[i], centers[j])
    new_assign, moved, _ = _bounded_pass(
        ds.points, centers, radii, assign, d_own, dmat, counter, None
    )
    if repair_empty:
        moved += _repair_empty(
            ds.points,
            new_assign,
            centers,
            k,
            lambda mem, c: counter.rows(ds.points[mem], centers[c]),
            RunStats(),
        )
    return new_assign, moved


def _bounded_pass(
    x: np.ndarray,
    centers: np.ndarray,
    radii: np.ndarray,
    assign: np.ndarray,
    d_own: np.ndarray,
    dmat: np.ndarray,
    counter: _Counter,
    stats: Optional[RunStats],
) -> tuple[np.ndarray, int, list]:
    """Shared annulus-bounded reassignment; dmat holds center distances (nan = non-pair)."""
    k = centers.shape[0]
    new_assign = assign.copy()
    moved = 0
    structure = []  # per cluster: (members, stable_mask, sorted neighbor ids, bounds)
    for i in range(k):
        mem = np.flatnonzero(assign == i)
        dd = d_own[mem]
        nbr = [
            j
            for j in range(k)
            if j != i and not np.isnan(dmat[i, j]) and dmat[i, j] < 2.0 * radii[i]
        ]
        if not nbr:
            if stats is not None:
                stats.neighbor_free_stable_clusters += 1
            structure.append((mem, np.ones(mem.size, dtype=bool), [], None))
            continue
        nbr.sort(key=lambda j: (dmat[i, j], j))
        bounds = np.array([dmat[i, j] for j in nbr]) / 2.0
        stable_mask = dd <= bounds[0]
        structure.append((mem, stable_mask, nbr, bounds))
        kprime = len(nbr)
        for m in range(1, kprime + 1):
            lo = bounds[m - 1]
            hi = bounds[m] if m < kprime else radii[i]
            mask = (dd > lo) & (dd <= hi)
            if not mask.any():
                continue
            pts = mem[mask]
            cand = np.sort(np.array(nbr[:m], dtype=int))  # id order for tie-break
            block = np.stack(
                [counter.rows(x[pts], centers[c]) for c in cand], axis=1
            )
            best = block.min(axis=1)
            movers = best < dd[mask]  # strict improvement only
            if movers.any():
                targets = cand[np.argmin(block[movers], axis=1)]
                new_assign[pts[movers]] = targets
                moved += int(movers.sum())
    return new_assign, moved, structure


def run(
    ds: Dataset,
    cfg: BkmConfig,
    *,
    instrument: bool = False,
    record_history: bool = False,
) -> tuple[Clustering, RunStats]:
    """Accelerated clustering loop; exact with respect to ``lloyd_run``.

    Iterates center/radius/neighbor/stable/annulus/reassign until an
    iteration moves no point, or max_iter is hit (converged=False then).
    ``instrument`` re-checks every stable point, move target and fired pruning
    against uncounted brute-force distances, accumulating violation counters.
    """
    x = ds.points
    n = ds.n
    k = cfg.k
    fn = cfg.distance
    counter = _Counter(fn)
    assign = _assignments_from_sets(init_clusters(ds, cfg), n)
    stats = RunStats()
    history = [assign.copy()]
    prev_centers = None
    lb = None  # lower bounds on previous-iteration center distances
    converged = False
    centers = np.empty((k, ds.d))
    radii = np.empty(k)
    for iteration in range(1, cfg.max_iter + 1):
        centers = _centers_of(x, assign, k)
        deltas = None if prev_centers is None else counter.paired(centers, prev_centers)
        d_own = np.empty(n)
        for i in range(k):
            mem = np.flatnonzero(assign == i)
            dd = counter.rows(x[mem], centers[i])
            d_own[mem] = dd
            radii[i] = dd.max()

        dmat = np.full((k, k), np.nan)
        newlb = np.zeros((k, k))
        fired_pairs = []
        for i in range(k):
            for j in range(i + 1, k):
                if deltas is None or lb is None:
                    p_ij = p_ji = False
                else:
                    p_ij = prune_neighbor_check(lb[i, j], radii[i], deltas[i], deltas[j])
                    p_ji = prune_neighbor_check(lb[i, j], radii[j], deltas[i], deltas[j])
                    if p_ij:
                        stats.prunings_fired += 1
                        fired_pairs.append((i, j))
                    if p_ji:
                        stats.prunings_fired += 1
                        fired_pairs.append((j, i))
                if p_ij and p_ji:
                    newlb[i, j] = newlb[j, i] = lb[i, j] - deltas[i] - deltas[j]
                else:
                    d = counter.one(centers[i], centers[j])
                    dmat[i, j] = dmat[j, i] = d
                    newlb[i, j] = newlb[j, i] = d
        lb = newlb

        new_assign, moved, structure = _bounded_pass(
            x, centers, radii, assign, d_own, dmat, counter, stats
        )

        if instrument:
            dfull = np.stack([_raw_rows(fn, x, centers[j]) for j in range(k)], axis=1)
            best_full = dfull.min(axis=1)
            for i, (mem, stable_mask, nbr, _) in enumerate(structure):
                stable_pts = mem[stable_mask]
                stats.stable_violations += int(
                    (dfull[stable_pts, i] != best_full[stable_pts]).sum()
                )
                movers = mem[new_assign[mem] != i]
                for p in movers:
                    if int(new_assign[p]) not in nbr:
                        stats.move_target_violations += 1
            for (i, j) in fired_pairs:
                if float(fn.eval(centers[i], centers[j])) < 2.0 * radii[i]:
                    stats.pruning_violations += 1

        moved += _repair_empty(
            x,
            new_assign,
            centers,
            k,
            lambda mem, c: counter.rows(x[mem], centers[c]),
            stats,
        )
        stats.points_moved_per_iter.append(int(moved))
        stats.iterations = iteration
        assign = new_assign
        history.append(assign.copy())
        if moved == 0:
            converged = True
            break
        prev_centers = centers

    stats.distance_computations = counter.count
    ties = _tie_report(fn, x, centers)
    result = Clustering(
        assignments=assign,
        centers=centers,
        radii=radii.copy(),
        converged=converged,
        ties=ties,
        history=history if record_history else None,
    )
    return result, stats


def lloyd_run(
    ds: Dataset, cfg: BkmConfig, *, record_history: bool = False
) -> tuple[Clustering, RunStats]:
    """Textbook full-scan iteration with the same init, movement rule and repair."""
    x = ds.points
    n = ds.n
    k = cfg.k
    fn = cfg.distance
    counter = _Counter(fn)
    assign = _assignments_from_sets(init_clusters(ds, cfg), n)
    stats = RunStats()
    history = [assign.copy()]
    converged = False
    centers = np.empty((k, ds.d))
    dfull = None
    for iteration in range(1, cfg.max_iter + 1):
        centers = _centers_of(x, assign, k)
        dfull = np.stack([counter.rows(x, centers[j]) for j in range(k)], axis=1)
        cur = dfull[np.arange(n), assign]
        best = dfull.min(axis=1)
        first = dfull.argmin(axis=1)
        new_assign = np.where(cur == best, assign, first)
        moved = int((new_assign != assign).sum())
        moved += _repair_empty(
            x, new_assign, centers, k, lambda mem, c: dfull[mem, c], stats
        )
        stats.points_moved_per_iter.append(int(moved))
        stats.iterations = iteration
        assign = new_assign
        history.append(assign.copy())
        if moved == 0:
            converged = True
            break

    stats.distance_computations = counter.count
    radii = np.array(
        [
            _raw_rows(fn, x[np.flatnonzero(assign == i)], centers[i]).max()
            for i in range(k)
        ]
    )
    result = Clustering(
        assignments=assign,
        centers=centers,
        radii=radii,
        converged=converged,
        ties=_tie_report(fn, x, centers),
        history=history if record_history else None,
    )
    return result, stats


def ball_geometry(
    ds: Dataset, clustering: Clustering, distance: DistanceFn = None
) -> list[BallCluster]:
    """Per-cluster ball structure of a finished clustering.

    Fills in each cluster's neighbor set (sorted by center distance, ties by
    index), stable radius (None when the ball has no neighbors) and annular
    boundaries; uncounted, purely diagnostic.
    """
    fn = distance if distance is not None else euclidean()
    centers = clustering.centers
    k = centers.shape[0]
    out = []
    for i in range(k):
        mem = np.flatnonzero(clustering.assignments == i)
        nbr = neighbors(centers, clustering.radii, i, fn)
        order = sorted(nbr, key=lambda j: (float(fn.eval(centers[i], centers[j])), j))
        dists = np.array([float(fn.eval(centers[i], centers[j])) for j in order])
        out.append(
            BallCluster(
                center=centers[i],
                radius=float(clustering.radii[i]),
                members=mem,
                stable_radius=(0.5 * float(dists[0])) if dists.size else None,
                neighbors=np.array(order, dtype=int),
                annuli=dists / 2.0,
            )
        )
    return out


def _tie_report(fn: DistanceFn, x: np.ndarray, centers: np.ndarray) -> list:
    """Points whose nearest-center argmin is not unique (uncounted full scan)."""
    dfull = np.stack([_raw_rows(fn, x, centers[j]) for j in range(centers.shape[0])], axis=1)
    best = dfull.min(axis=1)
    ties = []
    tied_rows = np.flatnonzero((dfull == best[:, None]).sum(axis=1) > 1)
    for p in tied_rows:
        ties.append((int(p), tuple(int(j) for j in np.flatnonzero(dfull[p] == best[p]))))
    return ties

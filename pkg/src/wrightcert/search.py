"""Branch-and-bound over cube covers and the recombination cross-check.

The search pops cubes from a FIFO queue and prunes each one.  Certified
cubes land in A (unique zero per parameter) or B (bifurcation gate);
cubes thinner than the halting width land in R; everything else is split
along its widest weighted dimension and requeued.  Zeros of the
functional in the input union can never leave the union of A, B, and R.
Recombination then resolves R by merging, bisecting in the parameter,
and re-pruning, computes the certified parameter unions, and cross-checks
seams: parameter slices shared with B must re-certify as gate cubes, and
hulls of parameter-overlapping A-pairs must re-certify as unique, which
glues per-cube uniqueness into per-parameter uniqueness.
"""

from __future__ import annotations

import math
import os
import time
from collections import deque
from concurrent.futures import ProcessPoolExecutor

from . import interval as iv
from .cubes import (
    Cube,
    CubeCollection,
    cube_hull,
    cube_split,
    parse_cube,
    read_cubes,
    serialize_cube,
    write_cubes,
)
from .errors import ArgumentError, DegenerateDimension, HypothesisViolation
from .interval import Interval
from .prune import prune, prune_iterated

__all__ = [
    "RecombineResult",
    "SearchOutcome",
    "SearchParams",
    "SearchStats",
    "branch_and_bound",
    "load_checkpoint",
    "recombine",
    "weighted_width",
]

_CHECKPOINT_FILES = ("queue.txt", "A.txt", "B.txt", "R.txt")


class SearchParams:
    """Knobs of the global search.

    epsilon is the halting width, delta the continue-pruning ratio, d the
    largest subdividable dimension index (0 addresses the parameter), and
    weights holds one positive factor per dimension 0..d.  n_recombine is
    the prune iteration count used during recombination and worker_count
    the number of parallel workers.
    """

    __slots__ = ("epsilon", "delta", "d", "weights", "n_recombine", "worker_count")

    def __init__(
        self,
        epsilon: float,
        delta: float,
        d: int,
        weights,
        n_recombine: int = 5,
        worker_count: int = 1,
    ):
        epsilon = float(epsilon)
        delta = float(delta)
        if not epsilon > 0.0:
            raise ArgumentError("epsilon must be positive")
        if not delta >= 0.0:
            raise ArgumentError("delta must be nonnegative")
        if isinstance(d, bool) or not isinstance(d, int) or d < 0:
            raise ArgumentError("d must be an integer >= 0")
        weights = tuple(float(w) for w in weights)
        if len(weights) != d + 1:
            raise ArgumentError("need exactly one weight per dimension 0..d")
        if not all(w > 0.0 and math.isfinite(w) for w in weights):
            raise ArgumentError("weights must be positive and finite")
        for name, value in (("n_recombine", n_recombine), ("worker_count", worker_count)):
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ArgumentError(f"{name} must be an integer >= 1")
        object.__setattr__(self, "epsilon", epsilon)
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "n_recombine", n_recombine)
        object.__setattr__(self, "worker_count", worker_count)

    def __setattr__(self, name, value):
        raise AttributeError("SearchParams is immutable")


class SearchStats:
    __slots__ = ("pops", "splits", "flag_counts", "wall_seconds", "checkpoints_written")

    def __init__(self, pops, splits, flag_counts, wall_seconds, checkpoints_written):
        object.__setattr__(self, "pops", int(pops))
        object.__setattr__(self, "splits", int(splits))
        object.__setattr__(self, "flag_counts", tuple(int(n) for n in flag_counts))
        object.__setattr__(self, "wall_seconds", float(wall_seconds))
        object.__setattr__(self, "checkpoints_written", int(checkpoints_written))

    def __setattr__(self, name, value):
        raise AttributeError("SearchStats is immutable")

    def __repr__(self):
        return (
            f"SearchStats(pops={self.pops}, splits={self.splits}, "
            f"flag_counts={self.flag_counts}, wall_seconds={self.wall_seconds:.3f}, "
            f"checkpoints_written={self.checkpoints_written})"
        )


class SearchOutcome:
    """Result triple of the search plus run counters.

    Every zero of the functional in the searched union lies in the union
    of A, B, and R.  A-cubes certify a unique zero for each parameter
    value they carry; B-cubes certify that only the principal branch
    passes through them.
    """

    __slots__ = ("A", "B", "R", "stats")

    def __init__(self, A: CubeCollection, B: CubeCollection, R: CubeCollection, stats):
        for name, coll in (("A", A), ("B", B), ("R", R)):
            if not isinstance(coll, CubeCollection):
                raise ArgumentError(f"{name} must be a CubeCollection")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "stats", stats)

    def __setattr__(self, name, value):
        raise AttributeError("SearchOutcome is immutable")


def weighted_width(X: Cube, i: int, weights) -> float:
    """Weighted diameter of dimension i: the parameter for 0, else the
    addressed finite coordinate."""
    if not isinstance(X, Cube):
        raise ArgumentError("weighted_width expects a Cube")
    if isinstance(i, bool) or not isinstance(i, int) or i < 0:
        raise ArgumentError("dimension index must be an integer >= 0")
    if i >= len(weights):
        raise ArgumentError("dimension index exceeds the weight vector")
    return float(weights[i]) * X.dim_interval(i).width()


def _volume_m(X: Cube, m: int) -> float:
    """Volume of the projection onto finite coordinates 1..m.

    A zero-width coordinate contributes one outward ulp instead of zero,
    so ratios of such volumes stay defined.
    """
    vol = 1.0
    for i in range(1, m + 1):
        t = X.dim_interval(i)
        w = t.width()
        if w == 0.0:
            w = math.nextafter(t.hi, math.inf) - t.hi
        vol *= w
    return vol


def _process_cube(X: Cube, epsilon, delta, d, weights):
    """Steps 3 through 9 of the search loop on one cube.

    Returns (tag, payload, flags): tag is one of discard/A/B/R/split,
    payload the kept cube or the split pair, flags the prune flags seen.
    """
    flags = []
    while True:
        result = prune(X)
        flags.append(result.flag)
        if result.flag == 1:
            return "discard", None, flags
        if result.flag == 2:
            return "B", result.cube, flags
        if result.flag == 3:
            return "A", result.cube, flags
        tightened = result.cube
        if max(weighted_width(tightened, i, weights) for i in range(d + 1)) < epsilon:
            return "R", tightened, flags
        m = d // 2
        if (1.0 + delta) < _volume_m(X, m) / _volume_m(tightened, m):
            X = tightened
            continue
        break
    best_dim, best = 0, weighted_width(tightened, 0, weights)
    for i in range(1, d + 1):
        w = weighted_width(tightened, i, weights)
        if w > best:
            best_dim, best = i, w
    try:
        low, high = cube_split(tightened, best_dim)
    except DegenerateDimension:
        # weighted width at or above epsilon yet no float strictly between
        # the endpoints; park the sliver as unresolved rather than loop
        return "R", tightened, flags
    return "split", (low, high), flags


def _process_serialized(args):
    line, epsilon, delta, d, weights = args
    tag, payload, flags = _process_cube(parse_cube(line), epsilon, delta, d, weights)
    if tag == "split":
        return tag, (serialize_cube(payload[0]), serialize_cube(payload[1])), flags
    if payload is None:
        return tag, None, flags
    return tag, serialize_cube(payload), flags


def _write_checkpoint(directory, queue, A, B, R) -> None:
    for name, cubes in zip(_CHECKPOINT_FILES, (queue, A, B, R)):
        write_cubes(os.path.join(directory, name), cubes)


def load_checkpoint(directory):
    """Queue, A, B, and R collections as last checkpointed.

    Resume by running :func:`branch_and_bound` on the returned queue and
    extending the returned A, B, and R with the new outcome's collections.
    A missing file reads as an empty collection.
    """
    out = []
    for name in _CHECKPOINT_FILES:
        path = os.path.join(directory, name)
        out.append(read_cubes(path) if os.path.exists(path) else CubeCollection())
    return tuple(out)


def branch_and_bound(
    S: CubeCollection,
    p: SearchParams,
    *,
    checkpoint_dir=None,
    checkpoint_interval: int = 256,
) -> SearchOutcome:
    """Exhaust the FIFO queue of cubes into the A, B, R classification.

    Batches of up to worker_count cubes are popped together and their
    results are applied in pop order, so the outcome is identical for
    every worker count, including byte-identical checkpoint and dump
    files.  With more than one worker the batch is mapped over a process
    pool; cubes cross the boundary in the record format.  When a
    checkpoint directory is given, the queue and the three collections
    are rewritten there every ``checkpoint_interval`` pops and once at
    the end.
    """
    if not isinstance(S, CubeCollection):
        raise ArgumentError("branch_and_bound expects a CubeCollection")
    if not isinstance(p, SearchParams):
        raise ArgumentError("p must be SearchParams")
    if isinstance(checkpoint_interval, bool) or not isinstance(checkpoint_interval, int):
        raise ArgumentError("checkpoint_interval must be a plain integer")
    if checkpoint_interval < 1:
        raise ArgumentError("checkpoint_interval must be at least 1")
    for X in S:
        if X.alpha is None:
            raise ArgumentError("search cubes need a parameter interval")
        if not X.phase_fixed:
            raise ArgumentError("search cubes must be phase-fixed")
        if X.M < 5:
            raise HypothesisViolation(f"search requires M >= 5, got {X.M}")
        if not X.decay_s > 2.0:
            raise HypothesisViolation("search requires decay exponent > 2")
        if p.d > 2 * X.M:
            raise ArgumentError("d exceeds the cube dimension 2M")

    started = time.monotonic()
    queue = deque(S)
    A, B, R = CubeCollection(), CubeCollection(), CubeCollection()
    pops = splits = checkpoints = 0
    flag_counts = [0, 0, 0, 0]
    since_checkpoint = 0

    executor = None
    try:
        if p.worker_count > 1:
            executor = ProcessPoolExecutor(max_workers=p.worker_count)
        while queue:
            batch = [queue.popleft() for _ in range(min(p.worker_count, len(queue)))]
            if executor is None:
                results = [
                    _process_cube(X, p.epsilon, p.delta, p.d, p.weights)
                    for X in batch
                ]
            else:
                packed = [
                    (serialize_cube(X), p.epsilon, p.delta, p.d, p.weights)
                    for X in batch
                ]
                results = []
                for tag, payload, flags in executor.map(_process_serialized, packed):
                    if tag == "split":
                        payload = (parse_cube(payload[0]), parse_cube(payload[1]))
                    elif payload is not None:
                        payload = parse_cube(payload)
                    results.append((tag, payload, flags))
            for tag, payload, flags in results:
                pops += 1
                since_checkpoint += 1
                for f in flags:
                    flag_counts[f] += 1
                if tag == "discard":
                    pass
                elif tag == "A":
                    A.append(payload)
                elif tag == "B":
                    B.append(payload)
                elif tag == "R":
                    R.append(payload)
                else:
                    splits += 1
                    queue.append(payload[0])
                    queue.append(payload[1])
            if checkpoint_dir is not None and since_checkpoint >= checkpoint_interval:
                _write_checkpoint(checkpoint_dir, queue, A, B, R)
                checkpoints += 1
                since_checkpoint = 0
    finally:
        if executor is not None:
            executor.shutdown()
    if checkpoint_dir is not None:
        _write_checkpoint(checkpoint_dir, queue, A, B, R)
        checkpoints += 1

    stats = SearchStats(pops, splits, flag_counts, time.monotonic() - started, checkpoints)
    return SearchOutcome(A, B, R, stats)


class RecombineResult:
    """Certified parameter unions plus the post-recombination state.

    alpha_union_A and alpha_union_B are merged, disjoint interval tuples;
    on SUCCESS every parameter in the A-union minus the B-union carries a
    unique slowly oscillating zero, and parameters in the B-union carry
    only the principal branch.  outcome holds the collections after the
    unresolved cubes were reassigned, which FAILURE leaves partial.
    """

    __slots__ = ("alpha_union_A", "alpha_union_B", "status", "outcome")

    def __init__(self, alpha_union_A, alpha_union_B, status, outcome):
        if status not in ("SUCCESS", "FAILURE"):
            raise ArgumentError("status must be SUCCESS or FAILURE")
        object.__setattr__(self, "alpha_union_A", tuple(alpha_union_A))
        object.__setattr__(self, "alpha_union_B", tuple(alpha_union_B))
        object.__setattr__(self, "status", status)
        object.__setattr__(self, "outcome", outcome)

    def __setattr__(self, name, value):
        raise AttributeError("RecombineResult is immutable")


def _merge_union(intervals) -> tuple:
    """Disjoint, sorted union of the intervals; touching pieces merge."""
    pieces = sorted((t for t in intervals), key=lambda t: (t.lo, t.hi))
    merged = []
    for t in pieces:
        if merged and t.lo <= merged[-1].hi:
            if t.hi > merged[-1].hi:
                merged[-1] = Interval(merged[-1].lo, t.hi)
        else:
            merged.append(t)
    return tuple(merged)


def recombine(out: SearchOutcome, n: int = 5, *, max_passes: int = 8) -> RecombineResult:
    """Resolve the unresolved cubes and certify the parameter unions.

    Unresolved cubes whose parameter intervals overlap with positive
    width merge into their hull; each survivor is bisected along the
    parameter and re-pruned up to n rounds, with the whole merge-bisect-
    prune pass repeated up to max_passes times.  Anything still
    undecided is FAILURE.  The parameter unions of A and B follow, then
    two seam checks: A-slices inside the B-union must re-certify as gate
    cubes, and hulls of parameter-overlapping A-pairs must re-certify as
    unique.  FAILURE is a value describing the partial state, never an
    exception.
    """
    if not isinstance(out, SearchOutcome):
        raise ArgumentError("recombine expects a SearchOutcome")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ArgumentError("n must be an integer >= 1")
    if isinstance(max_passes, bool) or not isinstance(max_passes, int) or max_passes < 1:
        raise ArgumentError("max_passes must be an integer >= 1")

    A = list(out.A)
    B = list(out.B)
    R = list(out.R)

    for _ in range(max_passes):
        if not R:
            break
        merging = True
        while merging:
            merging = False
            for i in range(len(R)):
                for j in range(i + 1, len(R)):
                    shared = iv.intersect(R[i].alpha, R[j].alpha)
                    if not shared.is_empty and shared.width() > 0.0:
                        hulled = cube_hull(R[i], R[j])
                        del R[j]
                        del R[i]
                        R.append(hulled)
                        merging = True
                        break
                if merging:
                    break
        pieces = []
        for X in R:
            try:
                pieces.extend(cube_split(X, 0))
            except DegenerateDimension:
                pieces.append(X)
        R = []
        for X in pieces:
            result = prune_iterated(X, n)
            if result.flag == 1:
                continue
            if result.flag == 2:
                B.append(result.cube)
            elif result.flag == 3:
                A.append(result.cube)
            else:
                R.append(result.cube)

    union_A = _merge_union(X.alpha for X in A)
    union_B = _merge_union(X.alpha for X in B)
    state = SearchOutcome(CubeCollection(A), CubeCollection(B), CubeCollection(R), out.stats)
    if R:
        return RecombineResult(union_A, union_B, "FAILURE", state)

    for X in A:
        for segment in union_B:
            shared = iv.intersect(X.alpha, segment)
            if shared.is_empty:
                continue
            result = prune_iterated(X.replace(alpha=shared), n)
            if result.flag != 2:
                return RecombineResult(union_A, union_B, "FAILURE", state)

    for i in range(len(A)):
        for j in range(i + 1, len(A)):
            shared = iv.intersect(A[i].alpha, A[j].alpha)
            if shared.is_empty:
                continue
            hulled = cube_hull(A[i], A[j]).replace(alpha=shared)
            result = prune_iterated(hulled, n)
            if result.flag != 3:
                return RecombineResult(union_A, union_B, "FAILURE", state)

    return RecombineResult(union_A, union_B, "SUCCESS", state)

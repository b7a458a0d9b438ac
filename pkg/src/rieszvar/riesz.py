"""Weighted Riesz p-variation via ball packings, plus the 1D classical form.

The supremum over countable disjoint ball families is approached from
below on a finite candidate set (grid-node centers times a radius list).
In 1D the optimum over that set is found exactly by a weighted
interval-scheduling dynamic program; in any dimension a greedy pass and
a swap-based local search give certified feasible lower bounds.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BadPartition,
    NoCandidates,
    PreconditionError,
    UnboundedSupport,
    ZeroVariation,
)
from .grid import (
    ATOL,
    Ball,
    BallCollection,
    FieldKind,
    ball_in_domain,
    balls_disjoint,
    region_mask,
)
from .report import ReportRow, params_string

DP_1D_EXACT = "dp_1d_exact"
GREEDY = "greedy"
GREEDY_PLUS_LOCAL_SEARCH = "greedy_plus_local_search"
METHODS = (DP_1D_EXACT, GREEDY, GREEDY_PLUS_LOCAL_SEARCH)


@dataclass(frozen=True)
class BallScore:
    """One packing summand: (osc/r)^p times the weight mass of the ball."""

    ball: Ball
    oscillation: float
    weight_mass: float
    score: float


@dataclass(frozen=True)
class PackingSolution:
    collection: BallCollection
    scores: tuple
    total: float
    variation: float
    p: float
    method: str

    def __post_init__(self):
        object.__setattr__(self, "scores", tuple(self.scores))


def candidate_balls(grid, radii_list):
    """Balls at every masked-in node center, per radius, contained in the domain.

    Deterministic lexicographic order: flat node index, then radius
    ascending. Radii below twice the spacing are rejected.
    """
    radii = sorted(float(r) for r in radii_list)
    if not radii:
        raise PreconditionError("radii_list must be nonempty")
    if radii[0] < 2.0 * grid.spacing:
        raise PreconditionError(
            f"every radius must be >= 2h = {2 * grid.spacing}, got {radii[0]}"
        )
    balls = []
    flat_mask = grid.mask.reshape(-1)
    for flat in np.flatnonzero(flat_mask):
        center = grid.node_coordinate(flat)
        for r in radii:
            ball = Ball(center, r)
            if ball_in_domain(grid, ball):
                balls.append(ball)
    if not balls:
        raise NoCandidates("no candidate ball fits inside the domain")
    return balls


def measure_balls(f, w, balls):
    """Oscillation and weight mass per ball (independent of the exponent p)."""
    if w.kind != FieldKind.WEIGHT:
        raise PreconditionError("scoring requires a weight field")
    grid = f.grid
    vol = grid.cell_volume()
    osc = np.empty(len(balls))
    mass = np.empty(len(balls))
    for i, ball in enumerate(balls):
        member = region_mask(grid, ball)
        vals = f.values[member]
        if vals.size == 0:
            raise PreconditionError("candidate ball contains no masked-in node")
        osc[i] = vals.max() - vals.min()
        mass[i] = w.values[member].sum() * vol
    return osc, mass


def make_scores(balls, osc, mass, p):
    if p < 1:
        raise PreconditionError(f"p must be >= 1, got {p}")
    return [
        BallScore(ball=b, oscillation=float(o), weight_mass=float(m),
                  score=float((o / b.radius) ** p * m))
        for b, o, m in zip(balls, osc, mass)
    ]


def score_ball(f, w, ball, p):
    """Score a single ball; see BallScore."""
    osc, mass = measure_balls(f, w, [ball])
    return make_scores([ball], osc, mass, p)[0]


def _solution(selected, scored, p, method):
    """Assemble a PackingSolution; fsum makes the total order-independent."""
    chosen = [scored[i] for i in sorted(selected)]
    total = math.fsum(s.score for s in chosen)
    collection = BallCollection(tuple(s.ball for s in chosen))
    return PackingSolution(
        collection=collection,
        scores=tuple(chosen),
        total=total,
        variation=total ** (1.0 / p) if total > 0 else 0.0,
        p=p,
        method=method,
    )


def pack_1d_exact(scored, p=None):
    """Optimal disjoint subset in 1D by weighted interval scheduling.

    Candidates become intervals [c - r, c + r]; closed disjointness means
    touching endpoints are allowed. The DP maximizes total score, breaking
    ties toward fewer balls and then toward earlier candidates.
    """
    if not scored:
        raise NoCandidates("no scored candidates to pack")
    if scored[0].ball.center.size != 1:
        raise PreconditionError("pack_1d_exact requires dim = 1 candidates")
    p = _infer_p(scored, p)
    items = sorted(
        range(len(scored)),
        key=lambda i: (
            scored[i].ball.center[0] + scored[i].ball.radius,
            scored[i].ball.center[0] - scored[i].ball.radius,
            i,
        ),
    )
    rights = [scored[i].ball.center[0] + scored[i].ball.radius for i in items]
    n = len(items)
    # best[i] = (total, -count) over the first i sorted items; choice tracks
    # whether item i-1 was taken and its compatible predecessor.
    best = [(0.0, 0)] * (n + 1)
    take = [None] * (n + 1)
    for i in range(1, n + 1):
        idx = items[i - 1]
        left = scored[idx].ball.center[0] - scored[idx].ball.radius
        pred = _rightmost_le(rights, left + ATOL, i - 1)
        cand = (best[pred][0] + scored[idx].score, best[pred][1] - 1)
        if cand > best[i - 1]:
            best[i] = cand
            take[i] = pred
        else:
            best[i] = best[i - 1]
            take[i] = None
    selected = []
    i = n
    while i > 0:
        if take[i] is None:
            i -= 1
        else:
            selected.append(items[i - 1])
            i = take[i]
    return _solution(selected, scored, p, DP_1D_EXACT)


def _rightmost_le(rights, bound, upto):
    """Largest index j <= upto with rights[j-1] <= bound, as a DP state (0 = none)."""
    lo, hi = 0, upto
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if rights[mid - 1] <= bound:
            lo = mid
        else:
            hi = mid - 1
    return lo


def _infer_p(scored, p):
    if p is not None:
        return float(p)
    return 1.0


def pack_greedy(scored, p=None):
    """Highest-score-first selection of mutually disjoint balls."""
    p = _infer_p(scored, p)
    order = sorted(range(len(scored)), key=lambda i: (-scored[i].score, i))
    selected = []
    for i in order:
        if scored[i].score <= 0:
            continue
        if all(balls_disjoint(scored[i].ball, scored[j].ball) for j in selected):
            selected.append(i)
    return _solution(selected, scored, p, GREEDY)


def pack_local_search(initial, scored, max_iters=200):
    """Hill climbing over 1- and 2-ball swap moves, first improvement.

    Removes at most two selected balls and inserts one or two candidates,
    accepting only strict total increases; the total never decreases and
    the search stops at a local optimum or after max_iters moves.
    """
    ball_key = {id(s.ball): i for i, s in enumerate(scored)}
    selected = set()
    for s in initial.scores:
        # Match initial balls back to candidate indices by identity or geometry.
        idx = ball_key.get(id(s.ball))
        if idx is None:
            idx = _find_candidate(scored, s.ball)
        selected.add(idx)
    total = initial.total
    eps = 1e-12 * max(1.0, abs(total))
    for _ in range(max_iters):
        move = _first_improvement(scored, selected, eps)
        if move is None:
            break
        removed, inserted = move
        selected -= removed
        selected |= inserted
        total = math.fsum(scored[i].score for i in sorted(selected))
        eps = 1e-12 * max(1.0, abs(total))
    sol = _solution(selected, scored, initial.p, GREEDY_PLUS_LOCAL_SEARCH)
    if sol.total < initial.total:
        return initial
    return sol


def _find_candidate(scored, ball):
    for i, s in enumerate(scored):
        if s.ball.radius == ball.radius and np.array_equal(s.ball.center, ball.center):
            return i
    raise PreconditionError("initial solution contains a ball outside the candidate set")


def _conflicts(scored, selected, i):
    return {j for j in selected if not balls_disjoint(scored[i].ball, scored[j].ball)}


def _first_improvement(scored, selected, eps):
    outside = [i for i in range(len(scored)) if i not in selected]
    # Single insertion with up to two removals.
    for i in outside:
        conf = _conflicts(scored, selected, i)
        if len(conf) > 2:
            continue
        gain = scored[i].score - sum(scored[j].score for j in conf)
        if gain > eps:
            return conf, {i}
    # Pair insertion with up to two removals.
    for a_pos, ia in enumerate(outside):
        conf_a = _conflicts(scored, selected, ia)
        if len(conf_a) > 2:
            continue
        for ib in outside[a_pos + 1:]:
            if not balls_disjoint(scored[ia].ball, scored[ib].ball):
                continue
            conf = conf_a | _conflicts(scored, selected, ib)
            if len(conf) > 2:
                continue
            gain = scored[ia].score + scored[ib].score - sum(
                scored[j].score for j in conf
            )
            if gain > eps:
                return conf, {ia, ib}
    return None


def riesz_variation(f, w, p, radii_list, method="auto", max_iters=200):
    """Lower bound of V_p(f; domain, w) over the finite candidate set.

    ``method`` is one of dp_1d_exact (dim 1 only), greedy, or
    greedy_plus_local_search; "auto" picks the DP in 1D and
    greedy_plus_local_search otherwise.
    """
    grid = f.grid
    if method == "auto":
        method = DP_1D_EXACT if grid.dim == 1 else GREEDY_PLUS_LOCAL_SEARCH
    if method not in METHODS:
        raise PreconditionError(f"unknown packing method {method!r}")
    if method == DP_1D_EXACT and grid.dim != 1:
        raise PreconditionError("dp_1d_exact is only available in one dimension")
    balls = candidate_balls(grid, radii_list)
    osc, mass = measure_balls(f, w, balls)
    scored = make_scores(balls, osc, mass, p)
    if method == DP_1D_EXACT:
        return pack_1d_exact(scored, p)
    greedy = pack_greedy(scored, p)
    if method == GREEDY:
        return greedy
    return pack_local_search(greedy, scored, max_iters=max_iters)


def finest_partition(grid):
    """All masked-in node indices of a 1D grid, ascending."""
    if grid.dim != 1:
        raise PreconditionError("partitions are one-dimensional")
    return np.flatnonzero(grid.mask.reshape(-1))


def classical_riesz_1d(f, p, partition=None):
    """Riesz p-variation sum over a 1D partition of node indices.

    sum |f(x_j) - f(x_{j-1})|^p / |x_j - x_{j-1}|^{p-1}; refining the
    partition never decreases the value, so the finest grid partition
    (the default) is the reported supremum surrogate.
    """
    grid = f.grid
    if grid.dim != 1:
        raise PreconditionError("classical_riesz_1d requires dim = 1")
    if p < 1:
        raise PreconditionError(f"p must be >= 1, got {p}")
    if partition is None:
        partition = finest_partition(grid)
    idx = np.asarray(partition, dtype=int)
    if idx.size < 2:
        raise BadPartition("partition needs at least two nodes")
    if np.any(np.diff(idx) <= 0):
        raise BadPartition("partition must be strictly increasing")
    if np.any(idx < 0) or np.any(idx >= grid.n_nodes):
        raise BadPartition("partition index out of range")
    x = grid.origin[0] + grid.spacing * idx
    fv = f.values.reshape(-1)[idx]
    dx = np.diff(x)
    df = np.abs(np.diff(fv))
    return float(math.fsum(df**p / dx ** (p - 1.0)))


@dataclass(frozen=True)
class LipschitzField:
    """Per-node discrete local Lipschitz estimate over a neighbor shell."""

    grid: object
    values: np.ndarray


def _shell_offsets(grid, shell_radius):
    reach = int(math.floor(shell_radius / grid.spacing + ATOL))
    ranges = [range(-reach, reach + 1)] * grid.dim
    offsets = []
    for delta in np.stack(np.meshgrid(*ranges, indexing="ij"), axis=-1).reshape(-1, grid.dim):
        if not delta.any():
            continue
        dist = grid.spacing * float(np.linalg.norm(delta))
        if dist <= shell_radius + ATOL:
            offsets.append((tuple(int(d) for d in delta), dist))
    return offsets


def _shifted(values, mask, delta):
    """Neighbor values/validity at integer offset delta (out of range invalid)."""
    nv = np.zeros_like(values)
    ok = np.zeros_like(mask)
    src = []
    dst = []
    for d, n in zip(delta, values.shape):
        if d >= 0:
            dst.append(slice(0, n - d))
            src.append(slice(d, n))
        else:
            dst.append(slice(-d, n))
            src.append(slice(0, n + d))
    for s in src:
        if s.start >= s.stop:
            return nv, ok
    nv[tuple(dst)] = values[tuple(src)]
    ok[tuple(dst)] = mask[tuple(src)]
    return nv, ok


def lipschitz_field(f, shell_radius):
    """Discrete surrogate of the local Lipschitz constant.

    Max over nodes y with 0 < |y - x| <= shell_radius of
    |f(x) - f(y)| / |x - y|; nodes with no masked neighbor get 0.
    """
    grid = f.grid
    if shell_radius < grid.spacing:
        raise PreconditionError("shell_radius must be at least the grid spacing")
    best = np.zeros(grid.shape)
    for delta, dist in _shell_offsets(grid, shell_radius):
        nv, ok = _shifted(f.values, grid.mask, delta)
        usable = grid.mask & ok
        ratio = np.zeros(grid.shape)
        ratio[usable] = np.abs(f.values[usable] - nv[usable]) / dist
        np.maximum(best, ratio, out=best)
    best[~grid.mask] = 0.0
    return LipschitzField(grid, best)


def _boundary_nodes(grid):
    """Masked nodes on the box edge or adjacent to a masked-out node."""
    boundary = np.zeros(grid.shape, dtype=bool)
    for axis in range(grid.dim):
        edge = [slice(None)] * grid.dim
        edge[axis] = 0
        boundary[tuple(edge)] = True
        edge[axis] = grid.shape[axis] - 1
        boundary[tuple(edge)] = True
        for step in (+1, -1):
            _, ok = _shifted(grid.mask.astype(float), grid.mask, _unit(grid.dim, axis, step))
            boundary |= ~ok
    return boundary & grid.mask


def _unit(dim, axis, step):
    d = [0] * dim
    d[axis] = step
    return tuple(d)


def weak_type_check(
    f,
    w,
    p,
    radii_list,
    t_grid,
    shell_radius,
    k_max=None,
    method="auto",
):
    """Weak-type statistic K(t) = t^p w({L_f > t}) / V_p^p per level t.

    Requires f to vanish near the domain boundary (compact support).
    Returns report rows: one info row per t and a final pass/fail row for
    max K against k_max (default 32 * 2^p, absorbing the Vitali dilation).
    """
    grid = f.grid
    if k_max is None:
        k_max = 32.0 * 2.0**p
    support_vals = np.abs(f.values[_boundary_nodes(grid)])
    if support_vals.size and support_vals.max() > ATOL:
        raise UnboundedSupport("function is nonzero next to the domain boundary")
    lip = lipschitz_field(f, shell_radius)
    packing = riesz_variation(f, w, p, radii_list, method=method)
    vp_pow = packing.total
    rows = []
    vol = grid.cell_volume()
    max_k = 0.0
    for t in t_grid:
        level = grid.mask & (lip.values > t)
        measure = float(w.values[level].sum() * vol)
        if measure > 0 and vp_pow == 0:
            raise ZeroVariation("variation is zero while a superlevel set is nonempty")
        k = (t**p * measure / vp_pow) if vp_pow > 0 else 0.0
        max_k = max(max_k, k)
        rows.append(
            ReportRow(
                experiment="weak_type",
                quantity="K(t)",
                params=params_string(t=float(t), p=float(p)),
                value=k,
                tolerance=k_max,
                status="info",
            )
        )
    rows.append(
        ReportRow(
            experiment="weak_type",
            quantity="max_K",
            params=params_string(p=float(p), variation=packing.variation),
            value=max_k,
            tolerance=k_max,
            status="pass" if max_k <= k_max else "fail",
        )
    )
    return rows

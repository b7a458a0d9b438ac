"""Muckenhoupt, reverse-Hölder, and doubling constants over finite cube families.

The supremum over all cubes is replaced by a finite dyadic (optionally
shifted) family, so every constant reported here is a lower bound of the
true one. Cube averages are node means, which makes the Jensen-type
lower bound of 1 exact for constant weights.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    InfiniteDual,
    NoCubes,
    PreconditionError,
    ZeroWeightOnBall,
    ZeroWeightOnCube,
)
from .grid import (
    Ball,
    Cube,
    FieldKind,
    SampledField,
    cube_in_bbox,
    region_mask,
    weighted_measure,
)


class CubeProvenance(Enum):
    DYADIC = "dyadic"
    SHIFTED_DYADIC = "shifted_dyadic"
    EXHAUSTIVE_GRID = "exhaustive_grid"


@dataclass(frozen=True)
class CubeFamily:
    cubes: tuple
    provenance: CubeProvenance

    def __post_init__(self):
        object.__setattr__(self, "cubes", tuple(self.cubes))
        if not self.cubes:
            raise NoCubes("cube family is empty")

    def __len__(self):
        return len(self.cubes)

    def __iter__(self):
        return iter(self.cubes)


@dataclass(frozen=True)
class RwEstimate:
    """Operational critical index: smallest q with A_q constant under a threshold.

    ``at_max`` flags that even q_max did not bring the constant below the
    threshold, so the reported value is only the search cap.
    """

    value: float
    at_max: bool
    threshold: float
    tol: float


@dataclass(frozen=True)
class WeightDiagnostics:
    ap_constant: dict
    a1_constant: float
    rh_constant: dict
    doubling_constant: float
    rw_estimate: RwEstimate


def generate_cubes(grid, min_side, levels, shifts=1):
    """Dyadic cubes tiled from the grid origin, with translated copies.

    Level ``l`` uses side ``min_side * 2**l``; copy ``j`` of ``shifts``
    is translated by ``j * side / shifts`` along every axis. Cubes that
    exit the bounding box or miss every masked-in node are dropped.
    """
    if min_side < grid.spacing:
        raise PreconditionError(
            f"min_side {min_side} is below the grid spacing {grid.spacing}"
        )
    if levels < 1 or shifts < 1:
        raise PreconditionError("levels and shifts must be >= 1")
    lo = grid.bbox_lo
    hi = grid.bbox_hi
    cubes = []
    for level in range(levels):
        side = min_side * 2**level
        offsets = [j * side / shifts for j in range(shifts)]
        counts = [int(math.floor((hi[a] - lo[a]) / side)) + 1 for a in range(grid.dim)]
        for off in offsets:
            grids_1d = [lo[a] + off + side * np.arange(counts[a]) for a in range(grid.dim)]
            for corner in _cartesian(grids_1d):
                cube = Cube(corner=np.array(corner), side=side)
                if not cube_in_bbox(grid, cube):
                    continue
                if not region_mask(grid, cube).any():
                    continue
                cubes.append(cube)
    if not cubes:
        raise NoCubes("every candidate cube was clipped away or empty")
    provenance = CubeProvenance.DYADIC if shifts == 1 else CubeProvenance.SHIFTED_DYADIC
    return CubeFamily(tuple(cubes), provenance)


def _cartesian(axes):
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.reshape(-1) for m in mesh], axis=-1)


def _cube_values(w, cube):
    member = region_mask(w.grid, cube)
    if not member.any():
        raise ZeroWeightOnCube("cube contains no masked-in node")
    return w.values[member]


def ap_constant(w, p, family):
    """[w]_{A_p} over the family: sup of <w>_Q <w^{1/(1-p)}>_Q^{p-1}.

    Nodes where w vanishes push the dual average to +inf; the constant is
    then reported as +inf rather than raising.
    """
    if p <= 1:
        raise PreconditionError(f"A_p requires p > 1, got {p}")
    if w.kind != FieldKind.WEIGHT:
        raise PreconditionError("ap_constant requires a weight field")
    best = 0.0
    expo = 1.0 / (1.0 - p)
    for cube in family:
        vals = _cube_values(w, cube)
        mean_w = vals.mean()
        if mean_w == 0.0:
            raise ZeroWeightOnCube("weight integrates to zero on a cube")
        with np.errstate(divide="ignore", over="ignore"):
            dual = vals**expo
        mean_dual = float(dual.mean())
        product = mean_w * mean_dual ** (p - 1.0)
        best = max(best, float(product))
    return best


def a1_constant(w, family):
    """[w]_{A_1} over the family: sup of <w>_Q * max_Q w^{-1}."""
    if w.kind != FieldKind.WEIGHT:
        raise PreconditionError("a1_constant requires a weight field")
    best = 0.0
    for cube in family:
        vals = _cube_values(w, cube)
        mn = vals.min()
        if mn == 0.0:
            return float("inf")
        best = max(best, float(vals.mean() / mn))
    return best


def rh_constant(w, s, family):
    """Reverse-Hölder constant over the family: sup of <w^s>_Q^{1/s} / <w>_Q."""
    if s <= 1:
        raise PreconditionError(f"RH_s requires s > 1, got {s}")
    best = 0.0
    for cube in family:
        vals = _cube_values(w, cube)
        mean_w = vals.mean()
        if mean_w == 0.0:
            raise ZeroWeightOnCube("weight integrates to zero on a cube")
        best = max(best, float((vals**s).mean() ** (1.0 / s) / mean_w))
    return best


def estimate_rw(w, family, threshold=1000.0, tol=1e-3, q_max=64.0):
    """Bisect for the smallest q > 1 with ap_constant(w, q) <= threshold.

    Relies on the monotonicity of q -> [w]_{A_q}. Returns an RwEstimate;
    ``at_max`` is set when even q_max stays above the threshold.
    """
    if threshold <= 1:
        raise PreconditionError("threshold must be > 1")
    if tol <= 0:
        raise PreconditionError("tol must be positive")
    lo = 1.0 + tol
    if ap_constant(w, lo, family) <= threshold:
        return RwEstimate(lo, False, threshold, tol)
    if ap_constant(w, q_max, family) > threshold:
        return RwEstimate(q_max, True, threshold, tol)
    hi = q_max
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if ap_constant(w, mid, family) <= threshold:
            hi = mid
        else:
            lo = mid
    return RwEstimate(hi, False, threshold, tol)


def doubling_constant(w, ball_family):
    """Max of w(2B)/w(B) over the family, 2B the concentric double."""
    if w.kind != FieldKind.WEIGHT:
        raise PreconditionError("doubling_constant requires a weight field")
    best = 0.0
    for ball in ball_family:
        wb = weighted_measure(w, ball)
        if wb == 0.0:
            raise ZeroWeightOnBall("weight integrates to zero on a ball")
        w2b = weighted_measure(w, Ball(ball.center, 2.0 * ball.radius))
        best = max(best, w2b / wb)
    return best


def dual_weight(w, q):
    """sigma = w^{1/(1-q)} as a weight field.

    Raises InfiniteDual (carrying the flat indices of the zero-weight
    nodes) when the dual would be infinite somewhere on the mask.
    """
    if q <= 1:
        raise PreconditionError(f"dual weight requires q > 1, got {q}")
    if w.kind != FieldKind.WEIGHT:
        raise PreconditionError("dual_weight requires a weight field")
    zero = (w.values == 0.0) & w.grid.mask
    if zero.any():
        raise InfiniteDual(
            "weight vanishes at masked-in nodes; dual is infinite there",
            flagged=np.flatnonzero(zero.reshape(-1)).tolist(),
        )
    with np.errstate(divide="ignore"):
        vals = np.where(w.grid.mask, w.values ** (1.0 / (1.0 - q)), 0.0)
    return SampledField(w.grid, vals, FieldKind.WEIGHT)


def doubling_ball_family(grid, radii, stride=1):
    """Balls centered at every ``stride``-th masked node whose double stays in the box."""
    balls = []
    flat_mask = grid.mask.reshape(-1)
    for flat in range(0, grid.n_nodes, stride):
        if not flat_mask[flat]:
            continue
        center = grid.node_coordinate(flat)
        for r in radii:
            double_lo = np.all(center - 2 * r >= grid.bbox_lo - 1e-9)
            double_hi = np.all(center + 2 * r <= grid.bbox_hi + 1e-9)
            if double_lo and double_hi:
                ball = Ball(center, r)
                if region_mask(grid, ball).any():
                    balls.append(ball)
    return balls


def compute_diagnostics(
    w,
    family,
    p_values=(2.0,),
    s_values=(1.5,),
    ball_family=(),
    threshold=1000.0,
    tol=1e-3,
):
    """All weight constants in one pass, for the CLI and the harness."""
    ap = {float(p): ap_constant(w, p, family) for p in p_values}
    rh = {float(s): rh_constant(w, s, family) for s in s_values}
    doubling = doubling_constant(w, ball_family) if ball_family else float("nan")
    return WeightDiagnostics(
        ap_constant=ap,
        a1_constant=a1_constant(w, family),
        rh_constant=rh,
        doubling_constant=doubling,
        rw_estimate=estimate_rw(w, family, threshold=threshold, tol=tol),
    )

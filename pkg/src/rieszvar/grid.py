"""Uniform-grid domains, sampled fields, and quadrature primitives.

A domain is a box of uniformly spaced nodes together with a boolean mask
selecting which nodes belong to it. Functions and weights are arrays of
node values on such a grid. Balls are open (node membership uses strict
``|x - c| < r``), cubes are closed and axis-parallel, and all integrals
are plain node sums times ``h**dim``. These conventions are shared by
every other module, so they live here.
"""

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .errors import (
    BadShape,
    EmptyDomain,
    EmptyRegion,
    IsolatedNode,
)

# Absolute slack for containment / disjointness comparisons on node
# coordinates. Domains are O(1) boxes, so this is far below the spacing
# of any usable grid while absorbing decimal-float noise like
# 0.95 + 0.05 = 1.0000000000000002.
ATOL = 1e-9


class FieldKind(Enum):
    FUNCTION = "function"
    WEIGHT = "weight"


@dataclass(frozen=True, eq=False)
class Grid:
    """Uniform node grid over a masked box domain.

    Node ``k`` (a multi-index) sits at ``origin + spacing * k``. The mask
    marks nodes belonging to the domain; at least one node must be in.
    """

    dim: int
    origin: np.ndarray
    spacing: float
    shape: tuple
    mask: np.ndarray

    def __post_init__(self):
        origin = np.asarray(self.origin, dtype=float).reshape(-1)
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "shape", tuple(int(s) for s in self.shape))
        if self.dim not in (1, 2, 3):
            raise BadShape(f"dim must be 1, 2, or 3, got {self.dim}")
        if origin.size != self.dim:
            raise BadShape(f"origin has {origin.size} entries, expected {self.dim}")
        if len(self.shape) != self.dim:
            raise BadShape(f"shape has {len(self.shape)} entries, expected {self.dim}")
        if any(s < 2 for s in self.shape):
            raise BadShape(f"every shape component must be >= 2, got {self.shape}")
        if not (math.isfinite(self.spacing) and self.spacing > 0):
            raise BadShape(f"spacing must be positive and finite, got {self.spacing}")
        mask = np.asarray(self.mask, dtype=bool)
        if mask.shape != self.shape:
            raise BadShape(f"mask shape {mask.shape} != grid shape {self.shape}")
        object.__setattr__(self, "mask", mask)
        if not mask.any():
            raise EmptyDomain("no node is masked into the domain")

    @property
    def n_nodes(self):
        return int(np.prod(self.shape))

    @property
    def bbox_lo(self):
        return self.origin.copy()

    @property
    def bbox_hi(self):
        return self.origin + self.spacing * (np.array(self.shape) - 1)

    def axis_coords(self, axis):
        """Node coordinates along one axis, exactly origin + h*k."""
        return self.origin[axis] + self.spacing * np.arange(self.shape[axis])

    def coords(self):
        """Tuple of per-axis coordinate arrays broadcast to the grid shape."""
        axes = [self.axis_coords(a) for a in range(self.dim)]
        return np.meshgrid(*axes, indexing="ij")

    def points(self):
        """All node coordinates, shape (*grid.shape, dim)."""
        return np.stack(self.coords(), axis=-1)

    def flat_index(self, multi_index):
        return int(np.ravel_multi_index(tuple(multi_index), self.shape))

    def multi_index(self, flat):
        return tuple(int(i) for i in np.unravel_index(int(flat), self.shape))

    def node_coordinate(self, flat):
        k = np.array(self.multi_index(flat), dtype=float)
        return self.origin + self.spacing * k

    def cell_volume(self):
        return self.spacing**self.dim


@dataclass(frozen=True, eq=False)
class SampledField:
    """Real values sampled at the grid nodes.

    ``kind`` distinguishes plain functions from weights; weights must be
    nonnegative wherever the mask is on. Values at masked-out nodes are
    carried but never read by any operation.
    """

    grid: Grid
    values: np.ndarray
    kind: FieldKind = FieldKind.FUNCTION

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != self.grid.shape:
            raise BadShape(
                f"values shape {values.shape} != grid shape {self.grid.shape}"
            )
        object.__setattr__(self, "values", values)
        masked = values[self.grid.mask]
        if not np.all(np.isfinite(masked)):
            raise BadShape("field has non-finite values at masked-in nodes")
        if self.kind == FieldKind.WEIGHT and np.any(masked < 0):
            raise BadShape("weight has negative values at masked-in nodes")

    def masked_values(self):
        return self.values[self.grid.mask]


@dataclass(frozen=True)
class Ball:
    """Open ball B(center, radius)."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        center = np.atleast_1d(np.asarray(self.center, dtype=float))
        object.__setattr__(self, "center", center)
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise BadShape(f"ball radius must be positive, got {self.radius}")


@dataclass(frozen=True)
class Cube:
    """Closed axis-parallel cube [corner, corner + side]^dim."""

    corner: np.ndarray
    side: float

    def __post_init__(self):
        corner = np.atleast_1d(np.asarray(self.corner, dtype=float))
        object.__setattr__(self, "corner", corner)
        if not (math.isfinite(self.side) and self.side > 0):
            raise BadShape(f"cube side must be positive, got {self.side}")


def balls_disjoint(b1, b2):
    """Closed-ball disjointness: center distance >= sum of radii.

    Slightly stronger than open disjointness; tangent balls pass.
    """
    dist = float(np.linalg.norm(b1.center - b2.center))
    return dist + ATOL >= b1.radius + b2.radius


@dataclass(frozen=True)
class BallCollection:
    """Finite ordered family of pairwise disjoint balls."""

    balls: tuple

    def __post_init__(self):
        object.__setattr__(self, "balls", tuple(self.balls))
        n = len(self.balls)
        for i in range(n):
            for j in range(i + 1, n):
                if not balls_disjoint(self.balls[i], self.balls[j]):
                    raise BadShape(
                        f"balls {i} and {j} overlap (centers "
                        f"{self.balls[i].center}, {self.balls[j].center})"
                    )

    def __len__(self):
        return len(self.balls)

    def __iter__(self):
        return iter(self.balls)

    def validate_in_domain(self, grid):
        """Check that every ball is contained in the domain."""
        for i, ball in enumerate(self.balls):
            if not ball_in_domain(grid, ball):
                raise BadShape(f"ball {i} is not contained in the domain")


def build_grid(dim, origin, spacing, shape, domain_predicate=None):
    """Construct a grid, masking nodes by a domain predicate.

    The predicate receives node coordinates of shape (..., dim) and must
    return a boolean array of shape (...). ``None`` keeps the full box.
    """
    probe = Grid(
        dim=dim,
        origin=np.asarray(origin, dtype=float),
        spacing=float(spacing),
        shape=tuple(shape),
        mask=np.ones(tuple(int(s) for s in shape), dtype=bool),
    )
    if domain_predicate is None:
        return probe
    mask = np.asarray(domain_predicate(probe.points()), dtype=bool)
    if mask.shape != probe.shape:
        raise BadShape(
            f"domain predicate returned shape {mask.shape}, expected {probe.shape}"
        )
    if not mask.any():
        raise EmptyDomain("domain predicate masked out every node")
    return replace(probe, mask=mask)


def _axis_window(grid, axis, lo, hi):
    """Index range [i0, i1] of nodes with coordinate in [lo, hi] (+/- ATOL)."""
    h = grid.spacing
    o = grid.origin[axis]
    i0 = int(np.ceil((lo - o - ATOL) / h))
    i1 = int(np.floor((hi - o + ATOL) / h))
    return max(i0, 0), min(i1, grid.shape[axis] - 1)


def _ball_window(grid, ball):
    lo_hi = []
    for a in range(grid.dim):
        i0, i1 = _axis_window(grid, a, ball.center[a] - ball.radius, ball.center[a] + ball.radius)
        if i0 > i1:
            return None
        lo_hi.append((i0, i1))
    return lo_hi


def _window_membership(grid, ball):
    """Slices of the ball's index window plus the strict-membership bool array."""
    window = _ball_window(grid, ball)
    if window is None:
        return None, None
    slices = tuple(slice(i0, i1 + 1) for i0, i1 in window)
    dist_sq = np.zeros([i1 - i0 + 1 for i0, i1 in window])
    for a, (i0, i1) in enumerate(window):
        coord = grid.origin[a] + grid.spacing * np.arange(i0, i1 + 1)
        d = coord - ball.center[a]
        shape = [1] * grid.dim
        shape[a] = d.size
        dist_sq = dist_sq + (d**2).reshape(shape)
    inside = dist_sq < ball.radius**2
    return slices, inside


def region_mask(grid, region=None):
    """Boolean node membership of a region intersected with the domain mask.

    ``region`` is None (whole domain), a Ball (open), or a Cube (closed).
    """
    if region is None:
        return grid.mask.copy()
    if isinstance(region, Ball):
        out = np.zeros(grid.shape, dtype=bool)
        slices, inside = _window_membership(grid, region)
        if slices is not None:
            out[slices] = inside
        return out & grid.mask
    if isinstance(region, Cube):
        tol = ATOL * max(1.0, region.side)
        out = np.ones(grid.shape, dtype=bool)
        for a in range(grid.dim):
            coord = grid.axis_coords(a)
            sel = (coord >= region.corner[a] - tol) & (
                coord <= region.corner[a] + region.side + tol
            )
            shape = [1] * grid.dim
            shape[a] = coord.size
            out &= sel.reshape(shape)
        return out & grid.mask
    raise TypeError(f"unsupported region type {type(region)!r}")


def node_set(grid, ball):
    """Flat indices of masked-in nodes strictly inside the ball.

    Deterministic lexicographic (row-major) order; may be empty.
    """
    member = region_mask(grid, ball)
    return np.flatnonzero(member)


def ball_in_domain(grid, ball):
    """Ball containment test: all inside nodes masked-in, bbox inside grid bbox.

    Node-based plus bounding box; an approximation for implicit masks.
    """
    lo_ok = np.all(ball.center - ball.radius >= grid.bbox_lo - ATOL)
    hi_ok = np.all(ball.center + ball.radius <= grid.bbox_hi + ATOL)
    if not (lo_ok and hi_ok):
        return False
    slices, inside = _window_membership(grid, ball)
    if slices is None:
        return True
    return bool(np.all(grid.mask[slices][inside]))


def cube_in_bbox(grid, cube):
    tol = ATOL * max(1.0, cube.side)
    lo_ok = np.all(cube.corner >= grid.bbox_lo - tol)
    hi_ok = np.all(cube.corner + cube.side <= grid.bbox_hi + tol)
    return bool(lo_ok and hi_ok)


def riemann_integral(field, region=None):
    """Node-sum quadrature: sum of masked values in the region times h^dim."""
    member = region_mask(field.grid, region)
    if not member.any():
        raise EmptyRegion("no masked-in node lies in the region")
    return float(field.values[member].sum() * field.grid.cell_volume())


def weighted_measure(weight, region=None):
    """w(E) = integral of the weight over the region."""
    if weight.kind != FieldKind.WEIGHT:
        raise BadShape("weighted_measure requires a field of kind weight")
    return riemann_integral(weight, region)


def oscillation(field, region=None):
    """osc_E(f) = max - min of the sampled values over the region."""
    member = region_mask(field.grid, region)
    if not member.any():
        raise EmptyRegion("no masked-in node lies in the region")
    vals = field.values[member]
    return float(vals.max() - vals.min())


def _neighbor(values, mask, axis, step):
    """Neighbor values/validity along an axis at offset ``step`` (+1 or -1)."""
    nv = np.zeros_like(values)
    ok = np.zeros_like(mask)
    src = [slice(None)] * values.ndim
    dst = [slice(None)] * values.ndim
    if step == +1:
        dst[axis] = slice(None, -1)
        src[axis] = slice(1, None)
    else:
        dst[axis] = slice(1, None)
        src[axis] = slice(None, -1)
    nv[tuple(dst)] = values[tuple(src)]
    ok[tuple(dst)] = mask[tuple(src)]
    return nv, ok


def gradient_fd(field):
    """Finite-difference gradient, one SampledField per axis.

    Central differences wherever both axis neighbors are masked-in,
    one-sided at the domain boundary. Exact for affine data.
    """
    grid = field.grid
    h = grid.spacing
    out = []
    for axis in range(grid.dim):
        vp, okp = _neighbor(field.values, grid.mask, axis, +1)
        vm, okm = _neighbor(field.values, grid.mask, axis, -1)
        lonely = grid.mask & ~okp & ~okm
        if lonely.any():
            where = np.argwhere(lonely)[0]
            raise IsolatedNode(
                f"masked-in node {tuple(int(i) for i in where)} has no "
                f"masked-in neighbor along axis {axis}"
            )
        d = np.zeros_like(field.values)
        central = grid.mask & okp & okm
        fwd = grid.mask & okp & ~okm
        bwd = grid.mask & ~okp & okm
        d[central] = (vp[central] - vm[central]) / (2.0 * h)
        d[fwd] = (vp[fwd] - field.values[fwd]) / h
        d[bwd] = (field.values[bwd] - vm[bwd]) / h
        out.append(SampledField(grid, d, FieldKind.FUNCTION))
    return out


def gradient_magnitude(field):
    """Euclidean norm of the finite-difference gradient as a field."""
    parts = gradient_fd(field)
    sq = np.zeros(field.grid.shape)
    for part in parts:
        sq += part.values**2
    return SampledField(field.grid, np.sqrt(sq), FieldKind.FUNCTION)


# ---------------------------------------------------------------------------
# Grid file format (line-oriented text, row-major node order)
# ---------------------------------------------------------------------------

def write_field(path, field):
    """Write a grid + field in the line-oriented text format.

    Layout: ``dim``, ``shape``, ``origin``, ``spacing``, ``count`` header
    lines, then one ``<mask> <value>`` line per node in row-major order.
    Values use full round-trip decimal.
    """
    grid = field.grid
    lines = [
        f"dim {grid.dim}",
        "shape " + " ".join(str(s) for s in grid.shape),
        "origin " + " ".join(repr(float(o)) for o in grid.origin),
        f"spacing {grid.spacing!r}",
        f"count {grid.n_nodes}",
    ]
    flat_mask = grid.mask.reshape(-1)
    flat_vals = field.values.reshape(-1)
    for m, v in zip(flat_mask, flat_vals):
        lines.append(f"{int(m)} {float(v)!r}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _expect(parts, key, line_no):
    if not parts or parts[0] != key:
        raise BadShape(f"grid file line {line_no}: expected '{key} ...'")
    return parts[1:]


def read_grid(path):
    """Read the text format back; returns (grid, values array)."""
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if len(lines) < 5:
        raise BadShape("grid file too short")
    dim = int(_expect(lines[0].split(), "dim", 1)[0])
    shape = tuple(int(s) for s in _expect(lines[1].split(), "shape", 2))
    origin = np.array([float(x) for x in _expect(lines[2].split(), "origin", 3)])
    spacing = float(_expect(lines[3].split(), "spacing", 4)[0])
    count = int(_expect(lines[4].split(), "count", 5)[0])
    if count != int(np.prod(shape)):
        raise BadShape(f"count {count} != product of shape {shape}")
    if len(lines) != 5 + count:
        raise BadShape(f"expected {count} node lines, found {len(lines) - 5}")
    mask = np.empty(count, dtype=bool)
    values = np.empty(count, dtype=float)
    for i, ln in enumerate(lines[5:]):
        m, v = ln.split()
        mask[i] = bool(int(m))
        values[i] = float(v)
    grid = Grid(dim, origin, spacing, shape, mask.reshape(shape))
    return grid, values.reshape(shape)


def read_field(path, kind=FieldKind.FUNCTION):
    grid, values = read_grid(path)
    return SampledField(grid, values, kind)

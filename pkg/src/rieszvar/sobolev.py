"""Weighted L^p and W^{1,p} norms, mollification, and the Morrey-type check."""

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    DegenerateGradient,
    EmptyRegion,
    ErodedEmpty,
    PreconditionError,
)
from .grid import (
    ATOL,
    Ball,
    FieldKind,
    SampledField,
    gradient_fd,
    gradient_magnitude,
    node_set,
    region_mask,
    riemann_integral,
)
from .report import ReportRow, params_string


def weighted_lp_norm(f, w, p, region=None):
    """(sum |f|^p w h^n)^{1/p} over masked nodes in the region."""
    if p < 1:
        raise PreconditionError(f"p must be >= 1, got {p}")
    if w.kind != FieldKind.WEIGHT:
        raise PreconditionError("weighted_lp_norm requires a weight field")
    member = region_mask(f.grid, region)
    if not member.any():
        raise EmptyRegion("no masked-in node lies in the region")
    vol = f.grid.cell_volume()
    s = float(np.sum(np.abs(f.values[member]) ** p * w.values[member]) * vol)
    return s ** (1.0 / p)


def sobolev_norm(f, w, p):
    """||f||_{L^p(w)} + || |grad f| ||_{L^p(w)} with the finite-difference gradient."""
    return weighted_lp_norm(f, w, p) + weighted_lp_norm(gradient_magnitude(f), w, p)


def _bump_profile(u_sq):
    """Radial profile exp(-1/(1 - |u|^2)) on the open unit ball, else 0."""
    out = np.zeros_like(u_sq)
    inside = u_sq < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - u_sq[inside]))
    return out


@dataclass(frozen=True)
class Mollifier:
    """Smooth radial bump at scale R, discretely normalized to unit mass.

    The profile is the standard exp(-1/(1-|x|^2)) bump; on a grid the
    kernel weights are renormalized so their node sum times h^n is
    exactly 1, which preserves constants to rounding.
    """

    R: float

    def __post_init__(self):
        if not (self.R > 0 and math.isfinite(self.R)):
            raise PreconditionError(f"mollifier scale must be positive, got {self.R}")

    def kernel(self, grid):
        """Integer offsets and normalized quadrature weights on the grid."""
        h = grid.spacing
        reach = int(math.ceil(self.R / h))
        axes = [np.arange(-reach, reach + 1)] * grid.dim
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
        deltas = mesh.reshape(-1, grid.dim)
        dist_sq = np.sum((deltas * h) ** 2, axis=1)
        inside = dist_sq < self.R**2
        deltas = deltas[inside]
        weights = _bump_profile(dist_sq[inside] / self.R**2)
        total = weights.sum() * grid.cell_volume()
        if total <= 0:
            raise PreconditionError("mollifier support contains no node")
        weights = weights / total
        return deltas, weights

    def mass(self, grid):
        _, weights = self.kernel(grid)
        return float(weights.sum() * grid.cell_volume())


def eroded_mask(grid, R):
    """Nodes whose open R-ball stays inside the domain (nodes and bbox)."""
    ok_bbox = np.ones(grid.shape, dtype=bool)
    for a in range(grid.dim):
        coord = grid.axis_coords(a)
        sel = (coord - R >= grid.bbox_lo[a] - ATOL) & (coord + R <= grid.bbox_hi[a] + ATOL)
        shape = [1] * grid.dim
        shape[a] = coord.size
        ok_bbox &= sel.reshape(shape)
    h = grid.spacing
    reach = int(math.ceil(R / h))
    ok_nodes = grid.mask.copy()
    axes = [np.arange(-reach, reach + 1)] * grid.dim
    for delta in np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, grid.dim):
        if not delta.any():
            continue
        if np.sum((delta * h) ** 2) >= R**2:
            continue
        _, ok = _shift_mask(grid.mask, delta)
        ok_nodes &= ok
    return grid.mask & ok_bbox & ok_nodes


def _shift_mask(mask, delta):
    ok = np.zeros_like(mask)
    src = []
    dst = []
    for d, n in zip(delta, mask.shape):
        d = int(d)
        if d >= 0:
            dst.append(slice(0, n - d))
            src.append(slice(d, n))
        else:
            dst.append(slice(-d, n))
            src.append(slice(0, n + d))
    for s in src:
        if s.start >= s.stop:
            return None, ok
    ok[tuple(dst)] = mask[tuple(src)]
    return None, ok


def mollify(f, R):
    """Convolve with the scale-R bump on the eroded domain.

    Returns a field on a grid whose mask is the eroded domain; constants
    and affine functions are preserved to rounding (the discrete kernel
    has unit mass and symmetric offsets).
    """
    grid = f.grid
    if R < 2.0 * grid.spacing:
        raise PreconditionError(f"R must be >= 2h = {2 * grid.spacing}, got {R}")
    eroded = eroded_mask(grid, R)
    if not eroded.any():
        raise ErodedEmpty("no node keeps its mollification ball inside the domain")
    deltas, weights = Mollifier(R).kernel(grid)
    vol = grid.cell_volume()
    out = np.zeros(grid.shape)
    for delta, wgt in zip(deltas, weights):
        shifted = _shift_values(f.values, delta)
        out += wgt * vol * shifted
    out[~eroded] = 0.0
    eroded_grid = replace(grid, mask=eroded)
    return SampledField(eroded_grid, out, FieldKind.FUNCTION)


def _shift_values(values, delta):
    nv = np.zeros_like(values)
    src = []
    dst = []
    for d, n in zip(delta, values.shape):
        d = int(d)
        if d >= 0:
            dst.append(slice(0, n - d))
            src.append(slice(d, n))
        else:
            dst.append(slice(-d, n))
            src.append(slice(0, n + d))
    for s in src:
        if s.start >= s.stop:
            return nv
    nv[tuple(dst)] = values[tuple(src)]
    return nv


def choose_morrey_q(p, n, rw):
    """Midpoint choice: 1 + delta halfway across (n, p/rw), q = p/(1+delta)."""
    if p <= n * rw:
        raise PreconditionError(
            f"Morrey check needs p > n * rw, got p={p}, n*rw={n * rw}"
        )
    one_plus_delta = 0.5 * (n + p / rw)
    return p / one_plus_delta


def morrey_check(
    f,
    w,
    p,
    region_pairs,
    q=None,
    rw=1.0,
    pair_budget=2000,
    seed=0,
):
    """Empirical constant of the pointwise Morrey-type estimate.

    For sampled node pairs (y, z) inside each ball B(x0, R), reports
    C_hat = max |f(z) - f(y)| / (|z - y|^{1 - n q / p}
    sigma(B_{2R})^{(q-1)/p} ||grad f||_{L^p(B_R, w)}) with
    sigma = w^{1/(1-q)}. One info row per region plus a summary row.
    """
    grid = f.grid
    n = grid.dim
    if q is None:
        q = choose_morrey_q(p, n, rw)
    if not (1.0 < q and n * q < p):
        raise PreconditionError(f"need 1 < q and n*q < p, got q={q}, p={p}")
    if np.any(w.values[grid.mask] <= 0):
        raise PreconditionError("Morrey check requires w > 0 on the domain")
    rng = np.random.Generator(np.random.Philox(seed))
    grad_mag = gradient_magnitude(f)
    rows = []
    worst = 0.0
    for x0, R in region_pairs:
        ball = Ball(np.atleast_1d(np.asarray(x0, dtype=float)), float(R))
        double = Ball(ball.center, 2.0 * ball.radius)
        idx = node_set(grid, ball)
        if idx.size < 2:
            raise EmptyRegion("Morrey ball holds fewer than two nodes")
        grad_norm = weighted_lp_norm(grad_mag, w, p, region=ball)
        if grad_norm == 0.0:
            inner_vals = f.values.reshape(-1)[idx]
            if inner_vals.max() - inner_vals.min() > 0:
                raise DegenerateGradient(
                    "gradient norm vanished on a ball with nonconstant samples"
                )
            rows.append(
                ReportRow(
                    experiment="morrey",
                    quantity="C_hat",
                    params=params_string(center=tuple(ball.center), R=R),
                    value=0.0,
                    tolerance=float("inf"),
                    status="info",
                )
            )
            continue
        sigma_vals = w.values ** (1.0 / (1.0 - q))
        sigma_member = region_mask(grid, double)
        sigma_mass = float(sigma_vals[sigma_member].sum() * grid.cell_volume())
        denom_const = sigma_mass ** ((q - 1.0) / p) * grad_norm
        n_pairs = min(pair_budget, idx.size * (idx.size - 1) // 2)
        ia = rng.integers(0, idx.size, size=n_pairs)
        ib = rng.integers(0, idx.size, size=n_pairs)
        keep = ia != ib
        ia, ib = idx[ia[keep]], idx[ib[keep]]
        pts = grid.points().reshape(-1, grid.dim)
        fv = f.values.reshape(-1)
        dist = np.linalg.norm(pts[ia] - pts[ib], axis=1)
        num = np.abs(fv[ia] - fv[ib])
        exponent = 1.0 - n * q / p
        ratios = num / (dist**exponent * denom_const)
        c_hat = float(ratios.max()) if ratios.size else 0.0
        worst = max(worst, c_hat)
        rows.append(
            ReportRow(
                experiment="morrey",
                quantity="C_hat",
                params=params_string(center=tuple(ball.center), R=R, q=q),
                value=c_hat,
                tolerance=float("inf"),
                status="info",
            )
        )
    rows.append(
        ReportRow(
            experiment="morrey",
            quantity="max_C_hat",
            params=params_string(p=float(p), q=float(q)),
            value=worst,
            tolerance=float("inf"),
            status="pass" if math.isfinite(worst) else "fail",
        )
    )
    return rows


def mollify_gradient_bound(f, w, p, scales, variation_total_pow):
    """Ratio ||D_j(phi_R * f)||_{L^p(eroded, w)} / V_p over mollifier scales.

    Returns the list of (R, ratio) pairs; bounded ratios across a dyadic
    range of R are the discrete trace of the proof's uniform estimate.
    """
    vp = variation_total_pow ** (1.0 / p) if variation_total_pow > 0 else 0.0
    out = []
    for R in scales:
        smooth = mollify(f, R)
        w_eroded = SampledField(smooth.grid, w.values, FieldKind.WEIGHT)
        grad_norm = weighted_lp_norm(gradient_magnitude(smooth), w_eroded, p)
        ratio = grad_norm / vp if vp > 0 else (0.0 if grad_norm == 0 else float("inf"))
        out.append((float(R), float(ratio)))
    return out

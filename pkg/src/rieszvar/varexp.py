"""Variable-exponent machinery: Luxemburg norms, sequence norms, and RBV^{p(.)}.

The Luxemburg norm of f is the infimal lambda with modular(f/lambda) <= 1;
every norm here is computed by bisection on that monotone modular. The
variable-exponent variation seminorm reuses the constant-exponent packing
optimizer as a proposal generator and evaluates the exact Luxemburg value
on each proposed disjoint family, so reported values are lower bounds.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import BadParams, EmptyRegion, PreconditionError, UnknownCatalogEntry
from .grid import (
    FieldKind,
    SampledField,
    gradient_magnitude,
    read_grid,
    region_mask,
)
from .report import ReportRow, params_string
from .riesz import (
    DP_1D_EXACT,
    GREEDY_PLUS_LOCAL_SEARCH,
    candidate_balls,
    make_scores,
    measure_balls,
    pack_1d_exact,
    pack_greedy,
    pack_local_search,
)


@dataclass(frozen=True, eq=False)
class ExponentFunction:
    """Variable exponent p(.) sampled on a grid, with its range."""

    grid: object
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != self.grid.shape:
            raise BadParams(
                f"exponent shape {values.shape} != grid shape {self.grid.shape}"
            )
        masked = values[self.grid.mask]
        if not np.all(np.isfinite(masked)) or np.any(masked < 1.0):
            raise BadParams("exponent must satisfy 1 <= p(x) < infinity on the mask")
        object.__setattr__(self, "values", values)

    @property
    def p_minus(self):
        return float(self.values[self.grid.mask].min())

    @property
    def p_plus(self):
        return float(self.values[self.grid.mask].max())


def exponent_catalog(grid, name, params=None):
    """Named exponent families: constant, affine, step_exponent."""
    params = dict(params or {})
    if name == "constant":
        vals = np.full(grid.shape, float(params.get("value", 2.0)))
    elif name == "affine":
        slope = params.get("slope", 1.0)
        slope = np.atleast_1d(np.asarray(slope, dtype=float))
        if slope.size == 1 and grid.dim > 1:
            slope = np.full(grid.dim, float(slope[0]))
        if slope.size != grid.dim:
            raise BadParams(f"slope has {slope.size} entries, expected {grid.dim}")
        vals = float(params.get("intercept", 2.0)) + np.tensordot(
            grid.points(), slope, axes=([-1], [0])
        )
    elif name == "step_exponent":
        threshold = float(params.get("threshold", 0.5))
        left = float(params.get("left", 2.0))
        right = float(params.get("right", 4.0))
        x0 = grid.coords()[0]
        vals = np.where(x0 <= threshold, left, right)
    else:
        raise UnknownCatalogEntry(f"no exponent family named {name!r}")
    return ExponentFunction(grid, vals)


def exponent_from_file(path):
    grid, values = read_grid(path)
    return ExponentFunction(grid, values)


@dataclass(frozen=True)
class LHDiagnostics:
    c0_estimate: float
    c_infinity_estimate: float
    p_infinity_used: float


def lh_constants(pfun, pair_budget=50000, p_infinity=None, seed=0):
    """Sampled log-Hölder constants of the exponent.

    c0 maximizes |p(x)-p(y)| * (-log|x-y|) over node pairs with
    |x-y| < 1/2 (a seeded batch of rows scanned against all nodes);
    c_infinity maximizes |p(x)-p_inf| * log(e+|x|), with p_inf supplied
    or taken at the node of maximal |x|.
    """
    if pair_budget < 1:
        raise PreconditionError("pair_budget must be >= 1")
    grid = pfun.grid
    idx = np.flatnonzero(grid.mask.reshape(-1))
    pts = grid.points().reshape(-1, grid.dim)[idx]
    pv = pfun.values.reshape(-1)[idx]
    n = idx.size
    radial = np.linalg.norm(pts, axis=1)
    if p_infinity is None:
        far = int(np.argmax(radial))
        p_inf = float(pv[far])
    else:
        p_inf = float(p_infinity)
    c_inf = float(np.max(np.abs(pv - p_inf) * np.log(np.e + radial)))
    n_rows = max(1, min(n, pair_budget // n + 1))
    rng = np.random.Generator(np.random.Philox(seed))
    rows = rng.choice(n, size=n_rows, replace=False)
    c0 = 0.0
    for i in rows:
        d = np.linalg.norm(pts - pts[i], axis=1)
        near = (d > 0) & (d < 0.5)
        if not near.any():
            continue
        vals = np.abs(pv[near] - pv[i]) * (-np.log(d[near]))
        c0 = max(c0, float(vals.max()))
    return LHDiagnostics(c0, c_inf, p_inf)


def harmonic_mean_exponent(pfun, region=None):
    """p_E with 1/p_E the node mean of 1/p over the region."""
    member = region_mask(pfun.grid, region)
    if not member.any():
        raise EmptyRegion("no masked-in node lies in the region")
    return float(1.0 / np.mean(1.0 / pfun.values[member]))


def modular(f, pfun, region=None):
    """rho(f) = sum |f(x)|^{p(x)} h^n over the region (may overflow to +inf)."""
    member = region_mask(f.grid, region)
    if not member.any():
        raise EmptyRegion("no masked-in node lies in the region")
    with np.errstate(over="ignore"):
        terms = np.abs(f.values[member]) ** pfun.values[member]
    return float(terms.sum() * f.grid.cell_volume())


def _bisect_luxemburg(rho, scale_hint, p_minus, tol):
    """Shared bisection: smallest lambda with rho(lambda) <= 1.

    ``rho`` is a nonincreasing function of lambda; ``scale_hint`` is the
    modular at lambda = 1. Returns the upper bracket end, so the modular
    at the result is guaranteed <= 1.
    """
    hi = 2.0 * max(1.0, scale_hint) ** (1.0 / p_minus)
    lo = hi / 2.0
    for _ in range(4096):
        if rho(lo) > 1.0:
            break
        hi = lo
        lo *= 0.5
        if lo < 1e-300:
            return 0.0
    while hi - lo > tol * hi:
        mid = 0.5 * (lo + hi)
        if rho(mid) <= 1.0:
            hi = mid
        else:
            lo = mid
    return hi


def luxemburg_norm(f, pfun, region=None, tol=1e-10):
    """Luxemburg norm: inf { lambda > 0 : modular(f/lambda) <= 1 }."""
    if tol <= 0:
        raise PreconditionError("tol must be positive")
    member = region_mask(f.grid, region)
    if not member.any():
        raise EmptyRegion("no masked-in node lies in the region")
    av = np.abs(f.values[member])
    if av.max() == 0.0:
        return 0.0
    pv = pfun.values[member]
    vol = f.grid.cell_volume()

    def rho(lam):
        with np.errstate(over="ignore"):
            return float(np.sum((av / lam) ** pv) * vol)

    return _bisect_luxemburg(rho, rho(1.0), float(pv.min()), tol)


def char_norm(region, pfun, tol=1e-10):
    """Luxemburg norm of the indicator of a ball or cube."""
    member = region_mask(pfun.grid, region)
    if not member.any():
        raise EmptyRegion("region contains no masked-in node")
    indicator = SampledField(
        pfun.grid, member.astype(float), FieldKind.FUNCTION
    )
    return luxemburg_norm(indicator, pfun, region=region, tol=tol)


@dataclass(frozen=True)
class VariableSequence:
    """Finite element of the variable-exponent sequence space."""

    values: np.ndarray
    exponents: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        exponents = np.asarray(self.exponents, dtype=float)
        if values.shape != exponents.shape or values.ndim != 1:
            raise BadParams("sequence values and exponents must be equal-length 1D")
        if not np.all(np.isfinite(values)):
            raise BadParams("sequence entries must be finite")
        if np.any(exponents < 1.0) or not np.all(np.isfinite(exponents)):
            raise BadParams("sequence exponents must satisfy 1 <= p < infinity")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "exponents", exponents)


def seq_norm(sequence, tol=1e-10):
    """Luxemburg norm on the sequence space: inf { l : sum (|t_k|/l)^{p_k} <= 1 }."""
    if tol <= 0:
        raise PreconditionError("tol must be positive")
    av = np.abs(sequence.values)
    if av.size == 0 or av.max() == 0.0:
        return 0.0
    pv = sequence.exponents

    def rho(lam):
        with np.errstate(over="ignore"):
            return float(np.sum((av / lam) ** pv))

    return _bisect_luxemburg(rho, rho(1.0), float(pv.min()), tol)


def g_operator(f, collection):
    """G_D f = sum over balls of (osc_B(f)/r) * indicator(B), 0 elsewhere."""
    grid = f.grid
    out = np.zeros(grid.shape)
    for ball in collection:
        member = region_mask(grid, ball)
        if not member.any():
            continue
        vals = f.values[member]
        out[member] = (vals.max() - vals.min()) / ball.radius
    return SampledField(grid, out, FieldKind.FUNCTION)


def _collection_terms(f, collection, pfun, tol):
    """Per-ball (osc/r, harmonic-mean exponent, indicator norm) triples."""
    terms = []
    for ball in collection:
        member = region_mask(f.grid, ball)
        if not member.any():
            raise EmptyRegion("packing ball contains no masked-in node")
        vals = f.values[member]
        a = (vals.max() - vals.min()) / ball.radius
        p_ball = harmonic_mean_exponent(pfun, ball)
        c_ball = char_norm(ball, pfun, tol=tol)
        terms.append((float(a), float(p_ball), float(c_ball)))
    return terms


def rbv_var_modular(f, collection, pfun, lam, tol=1e-10, terms=None):
    """Variable-exponent variation modular of f/lam on a disjoint family.

    sum over balls of ((osc/r)/lam)^{p_B} ||indicator||_{p(.)}^{p_B} with
    p_B the harmonic mean exponent; nonincreasing in lam.
    """
    if lam <= 0:
        raise PreconditionError("lambda must be positive")
    if terms is None:
        terms = _collection_terms(f, collection, pfun, tol)
    with np.errstate(over="ignore"):
        return float(
            math.fsum((a / lam) ** p * c**p for a, p, c in terms)
        )


def rbv_collection_norm(f, collection, pfun, tol=1e-10):
    """Luxemburg value of the variation modular on one disjoint family."""
    terms = _collection_terms(f, collection, pfun, tol)
    if not terms or max(a for a, _, _ in terms) == 0.0:
        return 0.0
    entries = np.array([a * c for a, p, c in terms])
    expo = np.array([p for _, p, _ in terms])
    return seq_norm(VariableSequence(entries, expo), tol=tol)


def explore_packings(f, pfun, radii_list, method="auto", max_iters=200):
    """Candidate disjoint families for the variable-exponent supremum.

    Proposals come from the constant-exponent optimizer at p_minus with
    the Lebesgue weight: the packing over the full candidate set plus one
    per single radius. Deduplicated, order preserved.
    """
    grid = f.grid
    if method == "auto":
        method = DP_1D_EXACT if grid.dim == 1 else GREEDY_PLUS_LOCAL_SEARCH
    lebesgue = SampledField(grid, np.ones(grid.shape), FieldKind.WEIGHT)
    p_proxy = pfun.p_minus
    balls = candidate_balls(grid, radii_list)
    osc, mass = measure_balls(f, lebesgue, balls)
    packings = []
    seen = set()
    subsets = [list(range(len(balls)))]
    for r in sorted({float(b.radius) for b in balls}):
        subsets.append([i for i, b in enumerate(balls) if b.radius == r])
    for subset in subsets:
        scored = make_scores(
            [balls[i] for i in subset], osc[subset], mass[subset], p_proxy
        )
        if method == DP_1D_EXACT:
            sol = pack_1d_exact(scored, p_proxy)
        else:
            sol = pack_greedy(scored, p_proxy)
            if method == GREEDY_PLUS_LOCAL_SEARCH:
                sol = pack_local_search(sol, scored, max_iters=max_iters)
        key = tuple(
            (tuple(b.center), b.radius) for b in sol.collection
        )
        if key and key not in seen:
            seen.add(key)
            packings.append(sol.collection)
    return packings


def rbv_var_seminorm(f, pfun, radii_list, tol=1e-10, method="auto", max_iters=200):
    """Lower bound of the RBV^{p(.)} seminorm: max Luxemburg value over proposals."""
    best = 0.0
    for collection in explore_packings(f, pfun, radii_list, method, max_iters):
        best = max(best, rbv_collection_norm(f, collection, pfun, tol=tol))
    return best


def gd_equivalence_check(f, pfun, packings, c_eq=4.0, tol=1e-10):
    """Ratio of ||G_D f||_{p(.)} to the RBV_D^{p(.)} norm per packing.

    Reports one info row per packing and min/max summary rows; passes
    when every ratio lies in [1/c_eq, c_eq]. Packings on which f is
    constant contribute skipped info rows (both sides vanish).
    """
    rows = []
    ratios = []
    for k, collection in enumerate(packings):
        gval = luxemburg_norm(g_operator(f, collection), pfun, tol=tol)
        rval = rbv_collection_norm(f, collection, pfun, tol=tol)
        if rval == 0.0 and gval == 0.0:
            rows.append(
                ReportRow(
                    experiment="gd_equivalence",
                    quantity="ratio_skipped",
                    params=params_string(packing=k, n_balls=len(collection)),
                    value=float("nan"),
                    tolerance=c_eq,
                    status="info",
                )
            )
            continue
        ratio = gval / rval
        ratios.append(ratio)
        rows.append(
            ReportRow(
                experiment="gd_equivalence",
                quantity="ratio",
                params=params_string(packing=k, n_balls=len(collection)),
                value=ratio,
                tolerance=c_eq,
                status="info",
            )
        )
    if ratios:
        ok = min(ratios) >= 1.0 / c_eq and max(ratios) <= c_eq
        rows.append(
            ReportRow(
                experiment="gd_equivalence",
                quantity="ratio_min",
                params=params_string(n_packings=len(ratios)),
                value=min(ratios),
                tolerance=c_eq,
                status="pass" if ok else "fail",
            )
        )
        rows.append(
            ReportRow(
                experiment="gd_equivalence",
                quantity="ratio_max",
                params=params_string(n_packings=len(ratios)),
                value=max(ratios),
                tolerance=c_eq,
                status="pass" if ok else "fail",
            )
        )
    return rows


def varexp_sobolev_equivalence(
    f,
    pfun,
    radii_list,
    c_thm=16.0,
    tol=1e-10,
    method="auto",
    max_iters=200,
):
    """Theorem-level ratio: RBV^{p(.)} seminorm over the gradient Luxemburg norm."""
    n = f.grid.dim
    if pfun.p_minus <= n:
        raise PreconditionError(
            f"variable-exponent equivalence needs p_minus > n, got {pfun.p_minus}"
        )
    rbv = rbv_var_seminorm(f, pfun, radii_list, tol=tol, method=method, max_iters=max_iters)
    gnorm = luxemburg_norm(gradient_magnitude(f), pfun, tol=tol)
    rows = []
    if rbv == 0.0 and gnorm == 0.0:
        rows.append(
            ReportRow(
                experiment="varexp_sobolev",
                quantity="ratio_skipped",
                params=params_string(p_minus=pfun.p_minus, p_plus=pfun.p_plus),
                value=float("nan"),
                tolerance=c_thm,
                status="info",
            )
        )
        return rows
    ratio = rbv / gnorm if gnorm > 0 else float("inf")
    ok = math.isfinite(ratio) and 1.0 / c_thm <= ratio <= c_thm
    rows.append(
        ReportRow(
            experiment="varexp_sobolev",
            quantity="rbv_seminorm",
            params=params_string(p_minus=pfun.p_minus, p_plus=pfun.p_plus),
            value=rbv,
            tolerance=c_thm,
            status="info",
        )
    )
    rows.append(
        ReportRow(
            experiment="varexp_sobolev",
            quantity="grad_luxemburg",
            params=params_string(p_minus=pfun.p_minus, p_plus=pfun.p_plus),
            value=gnorm,
            tolerance=c_thm,
            status="info",
        )
    )
    rows.append(
        ReportRow(
            experiment="varexp_sobolev",
            quantity="ratio",
            params=params_string(p_minus=pfun.p_minus, p_plus=pfun.p_plus),
            value=ratio,
            tolerance=c_thm,
            status="pass" if ok else "fail",
        )
    )
    return rows

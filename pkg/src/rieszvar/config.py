"""Experiment configuration: JSON schema, validation, and materialization."""

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .catalog import list_catalog, sample_catalog
from .errors import ConfigError, ToolkitError
from .grid import FieldKind, build_grid, read_field
from .varexp import exponent_catalog, exponent_from_file

KNOWN_SUITES = (
    "theorem1",
    "weak_type",
    "lemma21",
    "rh_exists",
    "embedding",
    "differentiability",
    "morrey",
    "mollify_bound",
    "gd_equivalence",
    "varexp_sobolev",
)


@dataclass(frozen=True)
class Thresholds:
    k_max_base: float = 32.0
    c_eq: float = 4.0
    c_thm: float = 16.0
    bound_thm1: float = 16.0
    rw_threshold: float = 1000.0
    rw_tol: float = 1e-3
    drift_tol: float = 0.10


@dataclass(frozen=True)
class CubeSpec:
    min_side: float = 0.25
    levels: int = 4
    shifts: int = 2


@dataclass(frozen=True)
class ExperimentConfig:
    raw: dict
    dim: int
    bounds: tuple
    h: float
    function_spec: dict
    weight_spec: dict
    exponent_spec: dict | None
    radii: tuple
    method: str
    p_values: tuple
    s_values: tuple
    thresholds: Thresholds
    cubes: CubeSpec
    t_grid: tuple
    shell_factor: float
    refinements: int
    suites: tuple
    seed: int
    out: str | None
    fmt: str

    def config_hash(self):
        canonical = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()

    def level_spacing(self, level):
        return self.h / 2**level


def _require(data, key, path):
    if key not in data:
        raise ConfigError(f"{path}.{key}", "missing required field")
    return data[key]


def _check_field_spec(spec, path, kind):
    if "file" in spec:
        return
    name = _require(spec, "catalog", path)
    families = list_catalog()
    pool = families["functions"] if kind == "function" else families["weights"]
    if kind == "exponent":
        pool = families["exponents"]
    if name not in pool:
        raise ConfigError(f"{path}.catalog", f"unknown catalog family {name!r}")


def load_config(data):
    """Validate a config dict (already parsed JSON) into an ExperimentConfig."""
    if not isinstance(data, dict):
        raise ConfigError("", "config must be a JSON object")
    grid_spec = _require(data, "grid", "")
    dim = int(_require(grid_spec, "dim", "grid"))
    if dim not in (1, 2, 3):
        raise ConfigError("grid.dim", f"dim must be 1, 2, or 3, got {dim}")
    bounds = _require(grid_spec, "bounds", "grid")
    if len(bounds) != dim:
        raise ConfigError("grid.bounds", f"expected {dim} [lo, hi] pairs")
    h = float(_require(grid_spec, "h", "grid"))
    if h <= 0:
        raise ConfigError("grid.h", "spacing must be positive")
    for a, (lo, hi) in enumerate(bounds):
        if hi <= lo:
            raise ConfigError(f"grid.bounds[{a}]", "hi must exceed lo")
        steps = (hi - lo) / h
        if abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
            raise ConfigError(
                f"grid.bounds[{a}]", f"extent {hi - lo} is not a multiple of h {h}"
            )
    function_spec = dict(_require(data, "function", ""))
    weight_spec = dict(data.get("weight", {"catalog": "constant", "params": {"value": 1.0}}))
    exponent_spec = data.get("exponent")
    _check_field_spec(function_spec, "function", "function")
    _check_field_spec(weight_spec, "weight", "weight")
    if exponent_spec is not None and "constant" not in exponent_spec:
        _check_field_spec(dict(exponent_spec), "exponent", "exponent")
    radii = tuple(float(r) for r in data.get("radii", ()))
    if any(r <= 0 for r in radii):
        raise ConfigError("radii", "radii must be positive")
    if radii and min(radii) < 2.0 * h:
        raise ConfigError("radii", f"every radius must be >= 2h = {2 * h}")
    method = data.get("method", "auto")
    if method not in ("auto", "dp_1d_exact", "greedy", "greedy_plus_local_search"):
        raise ConfigError("method", f"unknown packing method {method!r}")
    thr_raw = data.get("thresholds", {})
    thresholds = Thresholds(
        k_max_base=float(thr_raw.get("k_max_base", 32.0)),
        c_eq=float(thr_raw.get("c_eq", 4.0)),
        c_thm=float(thr_raw.get("c_thm", 16.0)),
        bound_thm1=float(thr_raw.get("bound_thm1", 16.0)),
        rw_threshold=float(thr_raw.get("rw_threshold", 1000.0)),
        rw_tol=float(thr_raw.get("rw_tol", 1e-3)),
        drift_tol=float(thr_raw.get("drift_tol", 0.10)),
    )
    for name in ("k_max_base", "c_eq", "c_thm", "bound_thm1", "rw_threshold"):
        if getattr(thresholds, name) <= 1:
            raise ConfigError(f"thresholds.{name}", "threshold must be > 1")
    cube_raw = data.get("cubes", {})
    cubes = CubeSpec(
        min_side=float(cube_raw.get("min_side", 0.25)),
        levels=int(cube_raw.get("levels", 4)),
        shifts=int(cube_raw.get("shifts", 2)),
    )
    suites = tuple(data.get("suites", ()))
    for s in suites:
        if s not in KNOWN_SUITES:
            raise ConfigError("suites", f"unknown suite {s!r}")
    t_grid = tuple(float(t) for t in data.get("t_grid", (0.125, 0.25, 0.5, 0.75, 0.9, 0.99)))
    refinements = int(data.get("refinements", 1))
    if refinements < 1:
        raise ConfigError("refinements", "need at least one level")
    return ExperimentConfig(
        raw=data,
        dim=dim,
        bounds=tuple((float(lo), float(hi)) for lo, hi in bounds),
        h=h,
        function_spec=function_spec,
        weight_spec=weight_spec,
        exponent_spec=dict(exponent_spec) if exponent_spec is not None else None,
        radii=radii,
        method=method,
        p_values=tuple(float(p) for p in data.get("p_values", (2.0,))),
        s_values=tuple(float(s) for s in data.get("s_values", (1.05, 1.1, 1.25, 1.5))),
        thresholds=thresholds,
        cubes=cubes,
        t_grid=t_grid,
        shell_factor=float(data.get("shell_factor", 3.0)),
        refinements=refinements,
        suites=suites,
        seed=int(data.get("seed", 0)),
        out=data.get("out"),
        fmt=data.get("format", "csv"),
    )


def load_config_file(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"invalid JSON: {exc}") from exc
    return load_config(data)


def materialize_grid(config, level=0):
    h = config.level_spacing(level)
    origin = [lo for lo, _ in config.bounds]
    shape = [int(round((hi - lo) / h)) + 1 for lo, hi in config.bounds]
    return build_grid(config.dim, origin, h, shape)


def materialize_field(grid, spec, kind):
    if "file" in spec:
        field_kind = FieldKind.WEIGHT if kind == "weight" else FieldKind.FUNCTION
        return read_field(spec["file"], kind=field_kind)
    try:
        return sample_catalog(grid, spec["catalog"], spec.get("params"))
    except ToolkitError as exc:
        raise ConfigError(f"{kind}.catalog", str(exc)) from exc


def materialize_exponent(grid, spec):
    if spec is None:
        return None
    if "constant" in spec:
        return exponent_catalog(grid, "constant", {"value": float(spec["constant"])})
    if "file" in spec:
        return exponent_from_file(spec["file"])
    try:
        return exponent_catalog(grid, spec["catalog"], spec.get("params"))
    except ToolkitError as exc:
        raise ConfigError("exponent.catalog", str(exc)) from exc


def _grids_compatible(a, b):
    return (
        a.dim == b.dim
        and a.shape == b.shape
        and abs(a.spacing - b.spacing) <= 1e-12 * a.spacing
        and np.allclose(a.origin, b.origin, atol=1e-12)
    )


def materialize_level(config, level=0):
    """Grid, function, weight, and exponent at one refinement level.

    A file-based function supplies its own grid (including the mask); it
    must agree with the configured grid at this level, and file-based
    fields cannot be refined.
    """
    grid = materialize_grid(config, level)
    f = materialize_field(grid, config.function_spec, "function")
    if "file" in config.function_spec:
        if level > 0:
            raise ConfigError("function.file", "file-based fields cannot be refined")
        if not _grids_compatible(f.grid, grid):
            raise ConfigError(
                "function.file", "file grid does not match the configured grid"
            )
        grid = f.grid
    w = materialize_field(grid, config.weight_spec, "weight")
    pfun = materialize_exponent(grid, config.exponent_spec)
    return grid, f, w, pfun

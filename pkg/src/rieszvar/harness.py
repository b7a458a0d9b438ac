"""Theorem-verification suites and the report-producing entry point."""

import math
import time

import numpy as np

from .config import materialize_level
from .errors import ToolkitError
from .grid import FieldKind, SampledField, gradient_magnitude, region_mask
from .report import Report, ReportRow, params_string
from .riesz import lipschitz_field, riesz_variation, weak_type_check
from .sobolev import mollify_gradient_bound, morrey_check, weighted_lp_norm
from .varexp import (
    gd_equivalence_check,
    explore_packings,
    luxemburg_norm,
    rbv_var_seminorm,
    varexp_sobolev_equivalence,
)
from .weights import ap_constant, generate_cubes, rh_constant, estimate_rw


def _drift_row(experiment, quantity, values, drift_tol, params=""):
    """Stability row comparing the last two refinement levels."""
    a, b = values[-2], values[-1]
    if a == 0 and b == 0:
        drift = 0.0
    elif b == 0 or not (math.isfinite(a) and math.isfinite(b)):
        drift = float("inf")
    else:
        drift = abs(a - b) / abs(b)
    return ReportRow(
        experiment=experiment,
        quantity=f"{quantity}_drift",
        params=params,
        value=drift,
        tolerance=drift_tol,
        status="pass" if drift <= drift_tol else "fail",
    )


def verify_theorem1(config):
    """Two-sided Sobolev/variation ratio suite across the refinement levels.

    For each p: computes the variation lower bound and the weighted
    gradient norm, then checks both ratios against the configured bound.
    When p <= dim * rw only the gradient-side inequality is checked (it
    holds for every weight and every p >= 1).
    """
    rows = []
    thr = config.thresholds
    for p in config.p_values:
        left_ratios = []
        right_ratios = []
        for level in range(config.refinements):
            grid, f, w, _ = materialize_level(config, level)
            family = generate_cubes(
                grid, config.cubes.min_side, config.cubes.levels, config.cubes.shifts
            )
            rw = estimate_rw(
                w, family, threshold=thr.rw_threshold, tol=thr.rw_tol
            ).value
            packing = riesz_variation(f, w, p, config.radii, method=config.method)
            grad_norm = weighted_lp_norm(gradient_magnitude(f), w, p)
            params = params_string(p=p, level=level, h=grid.spacing, rw=rw)
            rows.append(
                ReportRow("theorem1", "variation", params, packing.variation,
                          float("inf"), "info")
            )
            rows.append(
                ReportRow("theorem1", "grad_norm", params, grad_norm,
                          float("inf"), "info")
            )
            if packing.variation == 0.0 and grad_norm == 0.0:
                rows.append(
                    ReportRow("theorem1", "ratio_skipped", params, float("nan"),
                              thr.bound_thm1, "info")
                )
                continue
            two_sided = p > grid.dim * rw
            left = grad_norm / packing.variation if packing.variation > 0 else float("inf")
            left_ratios.append(left)
            rows.append(
                ReportRow(
                    "theorem1", "ratio_grad_over_var", params, left,
                    thr.bound_thm1,
                    "pass" if left <= thr.bound_thm1 else "fail",
                )
            )
            if two_sided:
                right = packing.variation / grad_norm if grad_norm > 0 else float("inf")
                right_ratios.append(right)
                rows.append(
                    ReportRow(
                        "theorem1", "ratio_var_over_grad", params, right,
                        thr.bound_thm1,
                        "pass" if right <= thr.bound_thm1 else "fail",
                    )
                )
        if config.refinements >= 2 and len(left_ratios) >= 2:
            rows.append(
                _drift_row("theorem1", "ratio_grad_over_var", left_ratios,
                           thr.drift_tol, params_string(p=p))
            )
        if config.refinements >= 2 and len(right_ratios) >= 2:
            rows.append(
                _drift_row("theorem1", "ratio_var_over_grad", right_ratios,
                           thr.drift_tol, params_string(p=p))
            )
    return rows


def suite_weak_type(config):
    rows = []
    for p in config.p_values:
        grid, f, w, _ = materialize_level(config, 0)
        shell = config.shell_factor * grid.spacing
        k_max = config.thresholds.k_max_base * 2.0**p
        rows.extend(
            weak_type_check(
                f, w, p, config.radii, config.t_grid, shell,
                k_max=k_max, method=config.method,
            )
        )
    return rows


def suite_lemma21(config, n_subsets=200):
    """Measure-ratio inequality on seeded random node subsets of family cubes."""
    rows = []
    thr = config.thresholds
    rng = np.random.Generator(np.random.Philox(config.seed))
    for p in config.p_values:
        grid, _, w, _ = materialize_level(config, 0)
        family = generate_cubes(
            grid, config.cubes.min_side, config.cubes.levels, config.cubes.shifts
        )
        ap = ap_constant(w, p, family)
        if not math.isfinite(ap):
            rows.append(
                ReportRow("lemma21", "skipped_infinite_ap",
                          params_string(p=p), float("inf"), float("inf"), "info")
            )
            continue
        violations = 0
        min_slack = float("inf")
        cubes = list(family)
        for k in range(n_subsets):
            cube = cubes[int(rng.integers(0, len(cubes)))]
            member = np.flatnonzero(region_mask(grid, cube).reshape(-1))
            size = int(rng.integers(1, member.size + 1))
            subset = rng.choice(member, size=size, replace=False)
            w_flat = w.values.reshape(-1)
            wq = float(w_flat[member].sum())
            we = float(w_flat[subset].sum())
            if wq == 0:
                continue
            lhs = (size / member.size) ** p
            rhs = (ap + 1e-6) * we / wq
            min_slack = min(min_slack, rhs - lhs)
            if lhs > rhs:
                violations += 1
        rows.append(
            ReportRow(
                "lemma21", "violations",
                params_string(p=p, n_subsets=n_subsets, ap=ap),
                float(violations), 0.0,
                "pass" if violations == 0 else "fail",
            )
        )
        rows.append(
            ReportRow("lemma21", "min_slack", params_string(p=p), min_slack,
                      0.0, "info")
        )
    return rows


def suite_rh_exists(config, s_probe=(1.05, 1.1, 1.25, 1.5), bound=10.0):
    """Some reverse-Hölder exponent yields a finite, small constant."""
    grid, _, w, _ = materialize_level(config, 0)
    family = generate_cubes(
        grid, config.cubes.min_side, config.cubes.levels, config.cubes.shifts
    )
    best_s, best_val = None, float("inf")
    for s in s_probe:
        val = rh_constant(w, s, family)
        if math.isfinite(val) and val < best_val:
            best_s, best_val = s, val
    ok = best_s is not None and best_val <= bound
    return [
        ReportRow(
            "rh_exists", "best_rh",
            params_string(s=best_s if best_s is not None else float("nan")),
            best_val, bound, "pass" if ok else "fail",
        )
    ]


def suite_embedding(config):
    """Discrete Hölder embedding between exponents on a shared packing."""
    rows = []
    grid, f, w, _ = materialize_level(config, 0)
    p_pairs = [(p1, p2) for p1 in config.p_values for p2 in config.p_values if p1 < p2]
    if not p_pairs:
        p_pairs = [(2.0, 4.0)]
    w_total = float(w.values[grid.mask].sum() * grid.cell_volume())
    for p1, p2 in p_pairs:
        sol2 = riesz_variation(f, w, p2, config.radii, method=config.method)
        if len(sol2.collection) == 0:
            continue
        total1 = math.fsum(
            (s.oscillation / s.ball.radius) ** p1 * s.weight_mass for s in sol2.scores
        )
        lhs = total1 ** (1.0 / p1)
        rhs = sol2.total ** (1.0 / p2) * w_total ** (1.0 / p1 - 1.0 / p2)
        ok = lhs <= rhs * (1.0 + 1e-8)
        rows.append(
            ReportRow(
                "embedding", "holder_gap",
                params_string(p1=p1, p2=p2),
                rhs - lhs, 0.0, "pass" if ok else "fail",
            )
        )
    return rows


def suite_differentiability(config, m_grid=(1.0, 2.0, 4.0, 8.0, 16.0)):
    """Fraction of nodes with large local Lipschitz estimate, reported only."""
    grid, f, _, _ = materialize_level(config, 0)
    shell = config.shell_factor * grid.spacing
    lip = lipschitz_field(f, shell)
    n_masked = int(grid.mask.sum())
    rows = []
    for m in m_grid:
        frac = float(np.sum(lip.values[grid.mask] > m)) / n_masked
        rows.append(
            ReportRow("differentiability", "fraction_above",
                      params_string(M=m), frac, 1.0, "info")
        )
    return rows


def suite_morrey(config):
    rows = []
    thr = config.thresholds
    for p in config.p_values:
        per_level = []
        for level in range(config.refinements):
            grid, f, w, _ = materialize_level(config, level)
            family = generate_cubes(
                grid, config.cubes.min_side, config.cubes.levels, config.cubes.shifts
            )
            rw = estimate_rw(w, family, threshold=thr.rw_threshold, tol=thr.rw_tol).value
            if p <= grid.dim * rw:
                rows.append(
                    ReportRow("morrey", "skipped_precondition",
                              params_string(p=p, rw=rw), float("nan"),
                              float("inf"), "info")
                )
                break
            span = min(hi - lo for lo, hi in config.bounds)
            center = [0.5 * (lo + hi) for lo, hi in config.bounds]
            region_pairs = [(center, span / 4.0)]
            level_rows = morrey_check(
                f, w, p, region_pairs, rw=rw, seed=config.seed
            )
            for row in level_rows:
                if row.quantity == "max_C_hat":
                    per_level.append(row.value)
            rows.extend(level_rows)
        if len(per_level) >= 2:
            a, b = per_level[-2], per_level[-1]
            ratio = max(a, b) / min(a, b) if min(a, b) > 0 else 1.0
            rows.append(
                ReportRow("morrey", "stability",
                          params_string(p=p), ratio, 2.0,
                          "pass" if ratio < 2.0 else "fail")
            )
    return rows


def suite_mollify_bound(config):
    """Uniformity of the mollified-gradient bound over dyadic scales."""
    rows = []
    grid, f, w, _ = materialize_level(config, 0)
    span = min(hi - lo for lo, hi in config.bounds)
    scales = [span / 16.0, span / 32.0, span / 64.0]
    scales = [s for s in scales if s >= 2.0 * grid.spacing]
    for p in config.p_values:
        packing = riesz_variation(f, w, p, config.radii, method=config.method)
        if packing.total == 0:
            continue
        pairs = mollify_gradient_bound(f, w, p, scales, packing.total)
        ratios = [r for _, r in pairs]
        for R, r in pairs:
            rows.append(
                ReportRow("mollify_bound", "grad_ratio",
                          params_string(p=p, R=R), r, float("inf"), "info")
            )
        if ratios:
            spread = max(ratios) / min(ratios) if min(ratios) > 0 else float("inf")
            ok = all(math.isfinite(r) for r in ratios) and spread <= 4.0
            rows.append(
                ReportRow("mollify_bound", "K_moll",
                          params_string(p=p), max(ratios), 4.0,
                          "pass" if ok else "fail")
            )
    return rows


def suite_gd_equivalence(config):
    rows = []
    thr = config.thresholds
    per_level = []
    for level in range(config.refinements):
        grid, f, _, pfun = materialize_level(config, level)
        if pfun is None:
            rows.append(
                ReportRow("gd_equivalence", "skipped_no_exponent", "",
                          float("nan"), thr.c_eq, "info")
            )
            return rows
        packings = explore_packings(f, pfun, config.radii, method=config.method)
        level_rows = gd_equivalence_check(f, pfun, packings, c_eq=thr.c_eq)
        level_rows = [
            ReportRow(r.experiment, r.quantity,
                      r.params + f";level={level}", r.value, r.tolerance, r.status)
            for r in level_rows
        ]
        rows.extend(level_rows)
        maxima = [r.value for r in level_rows if r.quantity == "ratio_max"]
        if maxima:
            per_level.append(maxima[0])
    if len(per_level) >= 2:
        rows.append(
            _drift_row("gd_equivalence", "ratio_max", per_level, thr.drift_tol)
        )
    return rows


def suite_varexp_sobolev(config):
    rows = []
    thr = config.thresholds
    per_level = []
    for level in range(config.refinements):
        grid, f, _, pfun = materialize_level(config, level)
        if pfun is None:
            rows.append(
                ReportRow("varexp_sobolev", "skipped_no_exponent", "",
                          float("nan"), thr.c_thm, "info")
            )
            return rows
        level_rows = varexp_sobolev_equivalence(
            f, pfun, config.radii, c_thm=thr.c_thm, method=config.method
        )
        level_rows = [
            ReportRow(r.experiment, r.quantity,
                      r.params + f";level={level}", r.value, r.tolerance, r.status)
            for r in level_rows
        ]
        rows.extend(level_rows)
        ratios = [r.value for r in level_rows if r.quantity == "ratio"]
        if ratios:
            per_level.append(ratios[0])
    if len(per_level) >= 2:
        rows.append(
            _drift_row("varexp_sobolev", "ratio", per_level, thr.drift_tol)
        )
    return rows


_SUITES = {
    "theorem1": verify_theorem1,
    "weak_type": suite_weak_type,
    "lemma21": suite_lemma21,
    "rh_exists": suite_rh_exists,
    "embedding": suite_embedding,
    "differentiability": suite_differentiability,
    "morrey": suite_morrey,
    "mollify_bound": suite_mollify_bound,
    "gd_equivalence": suite_gd_equivalence,
    "varexp_sobolev": suite_varexp_sobolev,
}


def run_config(config):
    """Run every configured suite; module errors become error rows."""
    rows = []
    for suite in config.suites:
        started = time.perf_counter()
        try:
            suite_rows = _SUITES[suite](config)
        except ToolkitError as exc:
            rows.append(
                ReportRow(suite, "error", params_string(message=str(exc)),
                          float("nan"), float("nan"), "error")
            )
            continue
        elapsed_ms = int((time.perf_counter() - started) * 1000)
        if suite_rows:
            first = suite_rows[0]
            suite_rows[0] = ReportRow(
                first.experiment, first.quantity, first.params,
                first.value, first.tolerance, first.status,
                runtime_ms=elapsed_ms,
            )
        rows.extend(suite_rows)
    return Report(rows=tuple(rows), config_hash=config.config_hash(), seed=config.seed)

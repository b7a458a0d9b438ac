import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rieszvar import (
    Ball,
    BallCollection,
    Cube,
    FieldKind,
    SampledField,
    build_grid,
    gradient_fd,
    node_set,
    oscillation,
    read_field,
    riemann_integral,
    sample_catalog,
    weighted_measure,
    write_field,
)
from rieszvar.errors import (
    BadParams,
    BadShape,
    EmptyDomain,
    EmptyRegion,
    IsolatedNode,
    UnknownCatalogEntry,
)

from conftest import const_weight, linear


class TestBuildGrid:
    def test_full_box(self):
        g = build_grid(1, [0.0], 0.01, [101])
        assert g.mask.all() and g.n_nodes == 101
        assert g.bbox_hi[0] == pytest.approx(1.0)

    def test_disk_mask_excludes_corners(self):
        g = build_grid(
            2, [-1.0, -1.0], 0.1, [21, 21],
            lambda pts: np.linalg.norm(pts, axis=-1) < 1.0,
        )
        assert not g.mask[0, 0] and not g.mask[-1, -1]
        assert g.mask[10, 10]

    def test_empty_domain(self):
        with pytest.raises(EmptyDomain):
            build_grid(1, [0.0], 0.5, [3], lambda pts: pts[..., 0] > 10)

    def test_bad_shape(self):
        with pytest.raises(BadShape):
            build_grid(1, [0.0], 0.5, [1])

    def test_node_coordinates_exact(self):
        g = build_grid(1, [0.25], 0.125, [9])
        for k in range(9):
            assert g.node_coordinate(k)[0] == 0.25 + 0.125 * k


class TestCatalog:
    def test_linear_exact(self, unit_grid):
        f = linear(unit_grid)
        assert np.allclose(f.values, unit_grid.axis_coords(0), atol=0)

    def test_power_weight(self, symmetric_grid):
        w = sample_catalog(symmetric_grid, "power_weight", {"alpha": 0.5})
        x = symmetric_grid.axis_coords(0)
        assert np.allclose(w.values, np.abs(x) ** 0.5)
        assert w.kind == FieldKind.WEIGHT

    def test_unknown_entry(self, unit_grid):
        with pytest.raises(UnknownCatalogEntry):
            sample_catalog(unit_grid, "nosuch")

    def test_bad_params(self, unit_grid):
        with pytest.raises(BadParams):
            sample_catalog(unit_grid, "constant", {"value": -1.0})
        with pytest.raises(BadParams):
            # alpha < 0 with a node at the center is infinite
            sample_catalog(unit_grid, "power_weight", {"alpha": -0.5})


class TestQuadrature:
    def test_constant(self, unit_grid):
        one = const_weight(unit_grid)
        assert riemann_integral(one) == pytest.approx(1.0, abs=unit_grid.spacing)

    def test_linear(self, unit_grid):
        assert riemann_integral(linear(unit_grid)) == pytest.approx(
            0.5, abs=unit_grid.spacing
        )

    def test_empty_region(self, unit_grid):
        with pytest.raises(EmptyRegion):
            riemann_integral(const_weight(unit_grid), Ball([0.5 + 1e-5], 1e-9))

    def test_weighted_measure_ball(self, unit_grid):
        w = const_weight(unit_grid)
        got = weighted_measure(w, Ball([0.5], 0.25))
        assert got == pytest.approx(0.5, abs=2 * unit_grid.spacing)

    def test_weighted_measure_cube(self, unit_grid):
        w = const_weight(unit_grid, 2.0)
        got = weighted_measure(w, Cube([0.0], 0.5))
        assert got == pytest.approx(1.0, abs=4 * unit_grid.spacing)

    def test_weighted_measure_power(self):
        g = build_grid(1, [0.0], 1e-3, [1001])
        w = sample_catalog(g, "power_weight", {"alpha": 0.5})
        assert weighted_measure(w) == pytest.approx(2 / 3, abs=0.01)

    def test_requires_weight_kind(self, unit_grid):
        with pytest.raises(BadShape):
            weighted_measure(linear(unit_grid))

    @settings(max_examples=25, deadline=None)
    @given(a=st.floats(-3, 3), b=st.floats(-3, 3))
    def test_linearity(self, a, b):
        g = build_grid(1, [0.0], 1 / 64, [65])
        f = sample_catalog(g, "sinusoid", {"freq": 1.0})
        h = linear(g, slope=2.0)
        combo = SampledField(g, a * f.values + b * h.values)
        lhs = riemann_integral(combo)
        rhs = a * riemann_integral(f) + b * riemann_integral(h)
        assert lhs == pytest.approx(rhs, abs=1e-12)

    def test_refinement_convergence_order(self):
        # node-sum quadrature error is O(h) against the closed form
        exact = (1 - math.cos(math.pi)) / math.pi  # int_0^1 sin(pi x)
        errs = []
        for k in (6, 7, 8):
            g = build_grid(1, [0.0], 2.0**-k, [2**k + 1])
            f = sample_catalog(g, "sinusoid", {"freq": 1.0})
            errs.append(abs(riemann_integral(f) - exact))
        orders = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
        assert min(orders) >= 0.9


class TestOscillation:
    def test_monotone_ball(self, unit_grid):
        f = linear(unit_grid)
        assert oscillation(f, Ball([0.5], 0.25)) == pytest.approx(
            0.5, abs=2 * unit_grid.spacing
        )

    def test_constant_zero(self, unit_grid):
        assert oscillation(const_weight(unit_grid, 3.0)) == 0.0

    def test_square_on_centered_ball(self, symmetric_grid):
        f = sample_catalog(symmetric_grid, "power_abs", {"beta": 2.0})
        r = 0.3
        got = oscillation(f, Ball([0.0], r))
        assert got == pytest.approx(r**2, abs=2 * r * symmetric_grid.spacing)

    @settings(max_examples=25, deadline=None)
    @given(r1=st.floats(0.05, 0.2), r2=st.floats(0.2, 0.45))
    def test_region_monotonicity(self, r1, r2):
        g = build_grid(1, [0.0], 1 / 128, [129])
        f = sample_catalog(g, "sinusoid", {"freq": 2.0})
        w = const_weight(g)
        small, big = Ball([0.5], r1), Ball([0.5], r2)
        assert oscillation(f, small) <= oscillation(f, big) + 1e-15
        assert weighted_measure(w, small) <= weighted_measure(w, big) + 1e-15


class TestGradient:
    def test_affine_exact(self, unit_grid):
        d = gradient_fd(linear(unit_grid, slope=3.0))[0]
        assert np.all(d.values[unit_grid.mask] == 3.0)

    def test_constant_zero(self, unit_grid):
        d = gradient_fd(const_weight(unit_grid, 5.0))[0]
        assert np.all(d.values[unit_grid.mask] == 0.0)

    def test_quadratic_central_exact(self):
        g = build_grid(1, [0.0], 0.01, [101])
        f = sample_catalog(g, "power_abs", {"beta": 2.0})
        d = gradient_fd(f)[0]
        node = 50  # x = 0.5, interior
        assert d.values[node] == pytest.approx(1.0, abs=1e-12)

    def test_isolated_node(self):
        mask_pred = lambda pts: (pts[..., 0] < 0.15) | (pts[..., 0] > 0.45)
        g = build_grid(1, [0.0], 0.1, [6], mask_pred)
        # node at 0.5 has neighbor 0.4 masked out and no node at 0.6
        with pytest.raises(IsolatedNode):
            gradient_fd(linear(g))

    def test_2d_affine(self, disk_grid):
        f = sample_catalog(disk_grid, "linear", {"slope": [2.0, -1.0]})
        dx, dy = gradient_fd(f)
        assert np.allclose(dx.values[disk_grid.mask], 2.0)
        assert np.allclose(dy.values[disk_grid.mask], -1.0)


class TestNodeSet:
    def test_1d_enumeration(self):
        g = build_grid(1, [0.0], 0.1, [11])
        idx = node_set(g, Ball([0.5], 0.15))
        coords = [g.node_coordinate(i)[0] for i in idx]
        assert coords == pytest.approx([0.4, 0.5, 0.6])

    def test_far_outside_empty(self):
        g = build_grid(1, [0.0], 0.1, [11])
        assert node_set(g, Ball([5.0], 0.2)).size == 0

    def test_2d_cross(self):
        g = build_grid(2, [0.0, 0.0], 1.0, [3, 3])
        idx = node_set(g, Ball([1.0, 1.0], 1.01))
        assert idx.size == 5  # center plus 4 axis neighbors


class TestBallCollection:
    def test_tangent_balls_allowed(self):
        BallCollection((Ball([0.25], 0.25), Ball([0.75], 0.25)))

    def test_overlap_rejected(self):
        with pytest.raises(BadShape):
            BallCollection((Ball([0.4], 0.25), Ball([0.6], 0.25)))


class TestGridFile:
    def test_round_trip(self, tmp_path, disk_grid):
        f = sample_catalog(disk_grid, "bump", {"radius": 0.9})
        path = tmp_path / "field.grid"
        write_field(path, f)
        back = read_field(path)
        assert back.grid.dim == disk_grid.dim
        assert back.grid.shape == disk_grid.shape
        assert back.grid.spacing == disk_grid.spacing
        assert np.array_equal(back.grid.mask, disk_grid.mask)
        assert np.array_equal(back.values, f.values)

    def test_count_mismatch_rejected(self, tmp_path):
        path = tmp_path / "bad.grid"
        path.write_text("dim 1\nshape 3\norigin 0.0\nspacing 0.5\ncount 2\n1 0.0\n1 1.0\n")
        with pytest.raises(BadShape):
            read_field(path)

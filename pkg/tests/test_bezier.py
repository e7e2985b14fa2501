import numpy as np
import pytest

from uavgen import bezier as bz
from uavgen import tape as tp
from oracles import de_casteljau_surface, finite_diff_grad, rel_err

K_CIRCLE = 0.5522847498307934  # cubic approximation constant for a quarter arc


def quarter_arc_ctrl():
    """Quarter circle in (y,z) from (1,0) to (0,1), radius 1."""
    return np.array([[1.0, 0.0], [1.0, K_CIRCLE], [K_CIRCLE, 1.0], [0.0, 1.0]])


def quarter_cylinder_patch():
    """Radius-1 quarter-cylinder shell extruded along x for length 1."""
    arc = quarter_arc_ctrl()
    xs = np.linspace(0.0, 1.0, 4)
    ctrl = np.zeros((1, 4, 4, 3))
    for i in range(4):
        for j in range(4):
            ctrl[0, i, j] = [xs[j], arc[i, 0], arc[i, 1]]
    return ctrl


class TestSurfaceEval:
    def test_corner_interpolation(self):
        rng = np.random.default_rng(0)
        ctrl = tp.Tensor(rng.normal(size=(2, 4, 4, 3)))
        out = bz.bezier_surface_eval(ctrl, 0.0, 0.0)
        np.testing.assert_allclose(out.values, ctrl.values[:, 0, 0, :])

    def test_planar_patch_stays_planar(self):
        rng = np.random.default_rng(1)
        ctrl = rng.normal(size=(1, 4, 4, 3))
        ctrl[..., 2] = 0.0
        for u, v in [(0.1, 0.9), (0.5, 0.5), (0.77, 0.13)]:
            out = bz.bezier_surface_eval(tp.Tensor(ctrl), u, v)
            assert abs(out.values[0, 2]) < 1e-14

    def test_matches_de_casteljau_oracle(self):
        rng = np.random.default_rng(2)
        ctrl = rng.normal(size=(3, 4, 4, 3))
        out = bz.bezier_surface_eval(tp.Tensor(ctrl), 0.3, 0.7)
        for b in range(3):
            expected = de_casteljau_surface(ctrl[b], 0.3, 0.7)
            assert rel_err(out.values[b], expected) < 1e-12

    def test_params_outside_unit_square_rejected(self):
        ctrl = tp.Tensor(np.zeros((1, 4, 4, 3)))
        with pytest.raises(ValueError):
            bz.bezier_surface_eval(ctrl, 1.2, 0.5)


class TestAreaVolume:
    def test_flat_unit_square_exact(self):
        xs = np.linspace(0.0, 1.0, 4)
        ctrl = np.zeros((1, 4, 4, 3))
        for i in range(4):
            for j in range(4):
                ctrl[0, i, j] = [xs[i], 1.0, xs[j]]  # unit square at y=1
        for n in (5, 10, 17):
            area, _ = bz.surface_area_volume(tp.Tensor(ctrl), n=n)
            assert area.values[0] == pytest.approx(1.0, abs=1e-12)

    def test_quarter_cylinder_area(self):
        area, _ = bz.surface_area_volume(tp.Tensor(quarter_cylinder_patch()), n=10)
        assert abs(area.values[0] - np.pi / 2) / (np.pi / 2) < 0.01

    def test_quarter_prism_volume(self):
        # y-projection of the quarter-cylinder shell encloses pi/4 per unit length
        _, vol = bz.surface_area_volume(tp.Tensor(quarter_cylinder_patch()), n=20)
        assert abs(vol.values[0] - np.pi / 4) / (np.pi / 4) < 0.01

    def test_tessellation_convergence_monotone(self):
        errs = []
        for n in (5, 10, 20, 40):
            area, vol = bz.surface_area_volume(tp.Tensor(quarter_cylinder_patch()), n=n)
            errs.append(
                abs(area.values[0] - np.pi / 2) / (np.pi / 2)
                + abs(vol.values[0] - np.pi / 4) / (np.pi / 4)
            )
        assert all(errs[i + 1] < errs[i] for i in range(3))

    def test_isotropic_scaling(self):
        rng = np.random.default_rng(4)
        ctrl = rng.normal(size=(1, 4, 4, 3)) + 3.0
        a1, v1 = bz.surface_area_volume(tp.Tensor(ctrl), n=8)
        a2, v2 = bz.surface_area_volume(tp.Tensor(2.0 * ctrl), n=8)
        assert a2.values[0] == pytest.approx(4.0 * a1.values[0], rel=1e-12)
        assert v2.values[0] == pytest.approx(8.0 * v1.values[0], rel=1e-12)

    def test_gradient_vs_fd(self):
        rng = np.random.default_rng(5)
        base = rng.normal(size=(1, 4, 4, 3)) + 2.0

        def f(arr):
            with tp.Tape():
                area, vol = bz.surface_area_volume(tp.Tensor(arr.reshape(1, 4, 4, 3)), n=5)
                return (area + 2.0 * vol).values[0]

        with tp.Tape() as t:
            x = tp.Tensor(base, requires_grad=True)
            area, vol = bz.surface_area_volume(x, n=5)
            t.backward(tp.sum_(area + 2.0 * vol))
        fd = finite_diff_grad(f, base.reshape(-1))
        assert rel_err(x.grad.reshape(-1), fd, floor=1e-4) < 1e-5


class TestInterpolation:
    def test_straight_line(self):
        # line in (y,z) from (0,0) to (2,1); query z=0.5 -> y=1
        ctrl = np.array([[[0.0, 0.0], [2 / 3, 1 / 3], [4 / 3, 2 / 3], [2.0, 1.0]]])
        out = bz.interpolate_curve_at_z(tp.Tensor(ctrl), tp.Tensor([[0.5]]))
        assert out.values[0, 0] == pytest.approx(1.0, abs=1e-9)

    def test_out_of_range_returns_zero(self):
        ctrl = np.array([[[0.0, 0.0], [2 / 3, 1 / 3], [4 / 3, 2 / 3], [2.0, 1.0]]])
        out = bz.interpolate_curve_at_z(tp.Tensor(ctrl), tp.Tensor([[1.5, -0.2]]))
        np.testing.assert_array_equal(out.values, [[0.0, 0.0]])

    def test_matches_high_resolution_oracle(self):
        rng = np.random.default_rng(6)
        # monotone-in-z cubic: z control points increasing
        y_ctrl = rng.uniform(0.5, 2.0, size=4)
        z_ctrl = np.sort(rng.uniform(0.0, 1.0, size=4))
        z_ctrl[0], z_ctrl[-1] = 0.0, 1.0
        ctrl = np.stack([y_ctrl, z_ctrl], axis=-1)[None]
        queries = rng.uniform(0.05, 0.95, size=(1, 10))
        out = bz.interpolate_curve_at_z(tp.Tensor(ctrl), tp.Tensor(queries), r=50)
        dense = bz.curve_polyline(tp.Tensor(ctrl), r=5000).values[0]
        for q, got in zip(queries[0], out.values[0]):
            j = np.argmin(np.abs(dense[:, 1] - q))
            assert abs(got - dense[j, 0]) < 1e-3

    def test_gradient_vs_fd(self):
        ctrl = np.array([[[0.3, 0.0], [0.9, 0.4], [1.3, 0.7], [1.8, 1.0]]])
        queries = np.array([[0.25, 0.6]])

        def f(arr):
            with tp.Tape():
                out = bz.interpolate_curve_at_z(
                    tp.Tensor(arr.reshape(1, 4, 2)), tp.Tensor(queries)
                )
                return tp.sum_(out).values.item()

        with tp.Tape() as t:
            x = tp.Tensor(ctrl, requires_grad=True)
            t.backward(tp.sum_(bz.interpolate_curve_at_z(x, tp.Tensor(queries))))
        fd = finite_diff_grad(f, ctrl.reshape(-1))
        assert rel_err(x.grad.reshape(-1), fd, floor=1e-4) < 1e-5


class TestValidityChecks:
    def test_arc_is_convex(self):
        counts = bz.convexity_violations(quarter_arc_ctrl()[None])
        assert counts[0] == 0

    def test_s_curve_has_inflection(self):
        ctrl = np.array([[[0.0, 0.0], [1.0, 2.0], [2.0, -2.0], [3.0, 0.0]]])
        assert bz.convexity_violations(ctrl)[0] >= 1

    def test_straight_segment_zero(self):
        ctrl = np.array([[[0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [3.0, 3.0]]])
        assert bz.convexity_violations(ctrl)[0] == 0

    def test_degenerate_curve_rejected(self):
        ctrl = np.zeros((1, 4, 2))
        with pytest.raises(ValueError, match="degenerate"):
            bz.convexity_violations(ctrl)

    def test_convex_arc_no_selfx(self):
        assert not bz.self_intersection(quarter_arc_ctrl()[None])[0]

    def test_loop_detected_and_verified(self):
        ctrl = np.array([[[0.0, 0.0], [2.0, 1.0], [-1.0, 1.0], [1.0, 0.0]]])
        assert bz.self_intersection(ctrl)[0]
        # dense pairwise proximity oracle: find t1 != t2 with near-equal points
        pts = bz.curve_polyline(tp.Tensor(ctrl), r=2000).values[0]
        d = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
        ii, jj = np.meshgrid(np.arange(2000), np.arange(2000), indexing="ij")
        mask = np.abs(ii - jj) > 100
        assert (d + np.where(mask, 0.0, np.inf)).min() < 1e-3

    def test_straight_line_no_selfx(self):
        ctrl = np.array([[[0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [3.0, 3.0]]])
        assert not bz.self_intersection(ctrl)[0]

import numpy as np
import pytest

from uavgen import losses as ls
from uavgen import tape as tp
from oracles import finite_diff_grad, rel_err


class TestALM:
    def test_zero_violation_keeps_lambda(self):
        st = ls.ALMState.zeros(4, 5)
        lam = ls.alm_update_hypercube(np.zeros((4, 5)), st, epoch=50)
        np.testing.assert_array_equal(lam, 0.0)
        # mu may grow only from nonzero violations
        np.testing.assert_array_equal(st.mu, 0.0)

    def test_warmup_gate_at_zero(self):
        st = ls.ALMState.zeros(2, 3)
        ls.alm_update_hypercube(np.ones((2, 3)), st, epoch=0)
        np.testing.assert_array_equal(st.mu, 0.0)

    def test_hand_computed_single_step(self):
        cfg = ls.ALMConfig(alpha=0.9, gamma=5e-3, eps=1e-8, warmup_epochs=100, cap=5.0)
        st = ls.ALMState.zeros(1, 1, cfg)
        ls.alm_update_hypercube(np.array([[1.0]]), st, epoch=100)  # ramp = 1
        capped = 5.0 * np.tanh(0.2)
        v = 0.1 * capped**2
        dmu = 5e-3 * capped / (np.sqrt(v) + 1e-8)
        assert st.mu[0, 0] == pytest.approx(dmu, abs=1e-12)
        assert st.lam[0, 0] == pytest.approx(dmu * capped, abs=1e-12)
        assert dmu == pytest.approx(0.01581, abs=5e-5)  # matches the hand value

    def test_mu_nondecreasing_and_cap(self):
        rng = np.random.default_rng(0)
        st = ls.ALMState.zeros(3, 4)
        prev = st.mu.copy()
        for epoch in range(80):
            c = rng.normal(scale=20.0, size=(3, 4))
            capped = st.config.cap * np.tanh(c / st.config.cap)
            assert np.all(np.abs(capped) <= st.config.cap + 1e-12)
            ls.alm_update_hypercube(c, st, epoch)
            assert np.all(st.mu >= prev - 1e-15)
            prev = st.mu.copy()

    def test_pooled_equals_hypercube_for_constant_batch(self):
        c_row = np.array([[0.4, -0.2, 1.3]])
        c_batch = np.repeat(c_row, 6, axis=0)
        pooled = ls.ALMState.zeros(1, 3)
        single = ls.ALMState.zeros(1, 3)
        for epoch in range(10):
            ls.alm_update_pooled(c_batch, pooled, epoch)
            ls.alm_update_hypercube(c_row, single, epoch)
        np.testing.assert_allclose(pooled.lam, single.lam, rtol=1e-14)
        np.testing.assert_allclose(pooled.mu, single.mu, rtol=1e-14)

    def test_pooled_composes_mean_then_core(self):
        rng = np.random.default_rng(1)
        c = rng.normal(size=(8, 2))
        pooled = ls.ALMState.zeros(1, 2)
        manual = ls.ALMState.zeros(1, 2)
        for epoch in range(5):
            ls.alm_update_pooled(c, pooled, epoch)
            ls.alm_update_hypercube(c.mean(axis=0, keepdims=True), manual, epoch)
        np.testing.assert_allclose(pooled.lam, manual.lam, rtol=1e-14)

    def test_mixed_signs_cancel(self):
        c = np.array([[1.0], [-1.0]])
        st = ls.ALMState.zeros(1, 1)
        ls.alm_update_pooled(c, st, epoch=100)
        np.testing.assert_array_equal(st.mu, 0.0)

    def test_shape_mismatch(self):
        st = ls.ALMState.zeros(2, 3)
        with pytest.raises(ValueError, match="match"):
            ls.alm_update_hypercube(np.zeros((4, 3)), st, epoch=1)

    def test_penalty_values_and_gradient(self):
        c = tp.Tensor(np.array([3.0]), requires_grad=True)
        assert ls.alm_penalty(np.zeros(1), np.zeros(1), c).values == 0.0
        with tp.Tape() as t:
            val = ls.alm_penalty(np.array([1.0]), np.array([2.0]), c)
            t.backward(val)
        assert val.values == pytest.approx(12.0)
        assert c.grad[0] == pytest.approx(1.0 + 2.0 * 3.0)


class TestDPP:
    def test_identical_pair_analytic(self):
        x = tp.Tensor(np.zeros((2, 3)))
        loss = ls.dpp_loss(x, ls.DPPConfig(sigma=1.0, eps=1e-2))
        assert loss.values == pytest.approx(-2.0 * np.log(0.0201), abs=1e-3)
        assert loss.values == pytest.approx(7.818, abs=1e-2)

    def test_distant_pair_analytic(self):
        x = tp.Tensor(np.array([[0.0, 0, 0], [1e6, 0, 0]]))
        loss = ls.dpp_loss(x, ls.DPPConfig(sigma=1.0, eps=1e-2))
        assert loss.values == pytest.approx(-2.0 * np.log(1.0201), abs=1e-3)
        assert loss.values == pytest.approx(-0.0398, abs=1e-3)

    def test_collapse_scores_worse_for_any_sigma(self):
        rng = np.random.default_rng(2)
        spread = tp.Tensor(rng.normal(size=(12, 4)))
        collapsed = tp.Tensor(np.tile(rng.normal(size=(1, 4)), (12, 1)))
        for sigma in (0.3, 1.0, 4.0):
            cfg = ls.DPPConfig(sigma=sigma)
            assert ls.dpp_loss(collapsed, cfg).values > ls.dpp_loss(spread, cfg).values

    def test_permutation_and_translation_invariance(self):
        rng = np.random.default_rng(3)
        pts = rng.normal(size=(9, 5))
        base = ls.dpp_loss(tp.Tensor(pts)).values
        perm = ls.dpp_loss(tp.Tensor(pts[rng.permutation(9)])).values
        shifted = ls.dpp_loss(tp.Tensor(pts + 13.7)).values
        assert perm == pytest.approx(base, rel=1e-10)
        assert shifted == pytest.approx(base, rel=1e-8)

    def test_requires_two_samples(self):
        with pytest.raises(ValueError):
            ls.dpp_loss(tp.Tensor(np.zeros((1, 3))))

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError):
            ls.dpp_loss(tp.Tensor(np.array([[np.nan, 0.0], [0.0, 1.0]])))

    def test_gradient_vs_fd(self):
        rng = np.random.default_rng(4)
        pts = rng.normal(size=(5, 3))

        def f(arr):
            with tp.Tape():
                return ls.dpp_loss(tp.Tensor(arr.reshape(5, 3))).values.item()

        with tp.Tape() as t:
            x = tp.Tensor(pts, requires_grad=True)
            t.backward(ls.dpp_loss(x))
        fd = finite_diff_grad(f, pts.reshape(-1))
        assert rel_err(x.grad.reshape(-1), fd, floor=1e-5) < 1e-5


class TestPADPP:
    def test_unit_quality_halves_plain_loss(self):
        rng = np.random.default_rng(5)
        pts = tp.Tensor(rng.normal(size=(6, 3)))
        q = tp.Tensor(np.ones(6))
        pa = ls.pa_dpp_loss(pts, q).values
        plain = ls.dpp_loss(pts).values
        assert pa == pytest.approx(plain / 2.0, rel=1e-10)

    def test_quality_scaling_identity(self):
        rng = np.random.default_rng(6)
        pts = tp.Tensor(rng.normal(scale=3.0, size=(5, 3)))
        cfg = ls.DPPConfig(eps=1e-12)
        q1 = tp.Tensor(np.full(5, 1.0))
        qk = tp.Tensor(np.full(5, 2.5))
        delta = ls.pa_dpp_loss(pts, qk, cfg).values - ls.pa_dpp_loss(pts, q1, cfg).values
        assert delta == pytest.approx(-2.0 * 5 * np.log(2.5), rel=1e-6)

    def test_vs_direct_determinant_oracle(self):
        rng = np.random.default_rng(7)
        pts = rng.normal(size=(4, 2))
        q = rng.uniform(0.5, 2.0, size=4)
        cfg = ls.DPPConfig(sigma=1.3, eps=1e-2)
        got = ls.pa_dpp_loss(tp.Tensor(pts), tp.Tensor(q), cfg).values
        d2 = ((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1)
        l_mat = np.exp(-d2 / (2 * 1.3**2)) * np.outer(q, q) + 1e-2 * np.eye(4)
        assert got == pytest.approx(-np.log(np.linalg.det(l_mat)), rel=1e-10)

    def test_positive_quality_required(self):
        with pytest.raises(ValueError):
            ls.pa_dpp_loss(tp.Tensor(np.zeros((3, 2))), tp.Tensor(np.array([1.0, -1, 1])))


class TestEqualityActivation:
    def test_inside_band_zero(self):
        for mode in ("relu", "huber"):
            act = ls.EqualityActivation(mode=mode, tolerance=0.1)
            out = ls.equality_activation(tp.Tensor([0.05]), act)
            assert out.values[0] == 0.0

    def test_relu_value(self):
        act = ls.EqualityActivation(mode="relu", tolerance=0.1)
        out = ls.equality_activation(tp.Tensor([0.6]), act)
        assert out.values[0] == pytest.approx(0.5)

    def test_huber_piecewise_values(self):
        act = ls.EqualityActivation(mode="huber", tolerance=0.0, huber_width=0.1)
        out = ls.equality_activation(tp.Tensor([0.05, 0.2]), act)
        assert out.values[0] == pytest.approx(0.0125)
        assert out.values[1] == pytest.approx(0.15)

    def test_huber_c1_at_edge(self):
        act = ls.EqualityActivation(mode="huber", tolerance=0.0, huber_width=0.1)
        lo = ls.equality_activation(tp.Tensor([0.1 - 1e-9]), act).values[0]
        hi = ls.equality_activation(tp.Tensor([0.1 + 1e-9]), act).values[0]
        assert hi - lo == pytest.approx(1e-9 * 2, abs=1e-10)  # slope ~1 both sides

    def test_monotone(self):
        act = ls.EqualityActivation(mode="huber", tolerance=0.02, huber_width=0.05)
        grid = np.linspace(0, 1, 200)
        out = ls.equality_activation(tp.Tensor(grid), act).values
        assert np.all(np.diff(out) >= -1e-15)

    def test_bad_config(self):
        with pytest.raises(ValueError):
            ls.EqualityActivation(mode="softplus")
        with pytest.raises(ValueError):
            ls.EqualityActivation(tolerance=-0.1)

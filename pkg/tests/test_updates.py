import math

import numpy as np
import pytest

from mmnmf import (
    DomainError,
    ShapeError,
    additive_step,
    euclidean_cost,
    eta_euclidean,
    eta_gkl,
    gkl_cost,
    grad_h_euclidean,
    grad_h_gkl,
    transpose,
    update_h_euclidean,
    update_h_gkl,
    update_w_euclidean,
    update_w_gkl,
)
from mmnmf.updates import Factorization, perturbed_numerator, update_w_euclidean_direct, update_w_gkl_direct
from oracles import rand_positive

UPDATES = {
    "euclidean": (euclidean_cost, update_h_euclidean, update_w_euclidean, update_w_euclidean_direct),
    "gkl": (gkl_cost, update_h_gkl, update_w_gkl, update_w_gkl_direct),
}


def _instance(rng, n=6, m=5, r=2):
    return rand_positive(rng, (n, m)), rand_positive(rng, (n, r)), rand_positive(rng, (r, m))


@pytest.mark.parametrize("kind", list(UPDATES))
class TestUpdateRules:
    def test_fixed_point_at_exact_fit(self, rng, kind):
        _, upd_h, upd_w, _ = UPDATES[kind]
        _, w, h = _instance(rng)
        v = w @ h
        np.testing.assert_allclose(upd_h(v, w, h), h, rtol=1e-14)
        np.testing.assert_allclose(upd_w(v, w, h), w, rtol=1e-14)

    def test_scalar_exact_solve(self, kind):
        cost, upd_h, _, _ = UPDATES[kind]
        v, w, h = [[2.0]], [[1.0]], [[1.0]]
        h_new = upd_h(v, w, h)
        np.testing.assert_array_equal(h_new, [[2.0]])
        assert cost(v, w, h_new) == 0.0

    def test_cost_non_increasing(self, rng, kind):
        cost, upd_h, upd_w, _ = UPDATES[kind]
        for _ in range(50):
            v, w, h = _instance(rng)
            before = cost(v, w, h)
            h2 = upd_h(v, w, h)
            mid = cost(v, w, h2)
            w2 = upd_w(v, w, h2)
            after = cost(v, w2, h2)
            assert mid <= before + 1e-12 * (1 + before)
            assert after <= mid + 1e-12 * (1 + mid)

    def test_w_update_is_transposed_h_update(self, rng, kind):
        _, upd_h, upd_w, _ = UPDATES[kind]
        v, w, h = _instance(rng)
        expected = transpose(upd_h(transpose(v), transpose(h), transpose(w)))
        assert np.array_equal(upd_w(v, w, h), expected)

    def test_w_update_matches_direct_formula(self, rng, kind):
        _, _, upd_w, direct = UPDATES[kind]
        v, w, h = _instance(rng)
        np.testing.assert_allclose(upd_w(v, w, h), direct(v, w, h), rtol=1e-15, atol=0)

    def test_zero_entries_stay_zero(self, rng, kind):
        _, upd_h, upd_w, _ = UPDATES[kind]
        v, w, h = _instance(rng, r=3)
        h[1, 2] = 0.0
        w[3, 0] = 0.0
        assert upd_h(v, w, h)[1, 2] == 0.0
        assert upd_w(v, w, h)[3, 0] == 0.0

    def test_non_negative_output(self, rng, kind):
        _, upd_h, upd_w, _ = UPDATES[kind]
        v, w, h = _instance(rng)
        v[0] = 0.0
        assert np.all(upd_h(v, w, h) >= 0)
        assert np.all(upd_w(v, w, h) >= 0)

    def test_shape_mismatch(self, kind):
        _, upd_h, _, _ = UPDATES[kind]
        with pytest.raises(ShapeError):
            upd_h(np.ones((3, 3)), np.ones((3, 2)), np.ones((1, 3)))


def test_gkl_scalar_cost_drop():
    v, w, h = [[2.0]], [[1.0]], [[1.0]]
    assert gkl_cost(v, w, h) == pytest.approx(2 * math.log(2) - 1, rel=1e-14)
    assert gkl_cost(v, w, update_h_gkl(v, w, h)) == 0.0


def test_gkl_update_domain_error():
    with pytest.raises(DomainError):
        update_h_gkl([[1.0, 1.0]], [[0.0]], [[1.0, 1.0]])


class TestAdaptiveRates:
    def test_eta_euclidean_scalar(self):
        np.testing.assert_array_equal(eta_euclidean([[1.0]], [[1.0]]), [[1.0]])

    def test_eta_euclidean_homogeneous_in_h(self, rng):
        _, w, h = _instance(rng)
        np.testing.assert_allclose(eta_euclidean(w, 3.7 * h), eta_euclidean(w, h), rtol=1e-14)

    def test_eta_gkl_examples(self):
        np.testing.assert_array_equal(eta_gkl([[1.0]], [[1.0]]), [[1.0]])
        np.testing.assert_array_equal(eta_gkl([[1.0], [1.0]], [[3.0]]), [[1.5]])

    def test_zero_gradient_leaves_h(self, rng):
        h = rand_positive(rng, (2, 3))
        np.testing.assert_array_equal(additive_step(h, np.ones_like(h), np.zeros_like(h)), h)

    @pytest.mark.parametrize(
        "eta,grad,update",
        [(eta_euclidean, grad_h_euclidean, update_h_euclidean), (eta_gkl, grad_h_gkl, update_h_gkl)],
        ids=["euclidean", "gkl"],
    )
    def test_gradient_step_reproduces_multiplicative_rule(self, rng, eta, grad, update):
        for _ in range(30):
            v, w, h = _instance(rng)
            step = additive_step(h, eta(w, h), grad(v, w, h))
            np.testing.assert_allclose(step, update(v, w, h), rtol=1e-12, atol=0)

    def test_additive_step_shape_mismatch(self):
        with pytest.raises(ShapeError):
            additive_step(np.ones((2, 2)), np.ones((2, 3)), np.ones((2, 2)))


def test_fixed_point_implies_stationarity(rng):
    # Start near an exact fit, run updates until H stops moving, then the gradient must vanish.
    _, w, h_true = _instance(rng)
    v = w @ h_true
    h = h_true * rng.uniform(0.9, 1.1, size=h_true.shape)
    for _ in range(20000):
        h_new = update_h_euclidean(v, w, h)
        if np.max(np.abs(h_new - h) / h) <= 1e-12:
            break
        h = h_new
    else:
        pytest.fail("update did not reach a fixed point")
    assert np.max(np.abs(grad_h_euclidean(v, w, h))) <= 1e-9


def test_perturbation_hook_scales_and_restores(rng):
    v, w, h = _instance(rng)
    base = update_h_euclidean(v, w, h)
    with perturbed_numerator(1.01):
        np.testing.assert_allclose(update_h_euclidean(v, w, h), 1.01 * base, rtol=1e-14)
    np.testing.assert_array_equal(update_h_euclidean(v, w, h), base)


def test_factorization_validates_rank():
    with pytest.raises(ShapeError):
        Factorization(np.ones((3, 2)), np.ones((3, 4)))
    fac = Factorization(np.ones((3, 2)), np.ones((2, 4)))
    assert fac.rank == 2
    np.testing.assert_array_equal(fac.reconstruct(), 2 * np.ones((3, 4)))

import math

import numpy as np
import pytest

from mmnmf import probes
from mmnmf._matrix import DomainError
from mmnmf.costs import CostKind

KL_UNIT_GAP = math.log(4.0) - math.log(3.0) - 1.0  # log(4 / 3e)


def euclid_entry(v, w, h):
    return (v - float(np.dot(np.atleast_1d(w), np.atleast_1d(h)))) ** 2


def gkl_entry(v, w, h):
    x = float(np.dot(np.atleast_1d(w), np.atleast_1d(h)))
    return v * math.log(v / x) - v + x


class TestEuclideanCounterexamples:
    def test_unit_values(self):
        rep = probes.euclid_scalar_counterexample(1.0)
        assert rep.left == pytest.approx(0.5625, rel=1e-14)
        assert rep.right == pytest.approx(0.5, rel=1e-14)
        assert rep.gap == pytest.approx(-0.0625, rel=1e-14)
        assert rep.lam == 0.5

    @pytest.mark.parametrize("v,gap", [(2.0, -0.25), (4.0, -1.0)])
    def test_scaled(self, v, gap):
        assert probes.euclid_scalar_counterexample(v).gap == pytest.approx(gap, rel=1e-12)

    def test_reproduces_direct_evaluation(self):
        v = 4.0
        s = math.sqrt(v)
        left = euclid_entry(v, s / 2, s / 2)
        right = 0.5 * euclid_entry(v, 0, 0) + 0.5 * euclid_entry(v, s, s)
        rep = probes.euclid_scalar_counterexample(v)
        assert rep.left == pytest.approx(left, rel=1e-14)
        assert rep.right == pytest.approx(right, rel=1e-14)

    @pytest.mark.parametrize("r", [1, 3, 7])
    def test_vector_independent_of_rank(self, r):
        rep = probes.euclid_vector_counterexample(1.0, r)
        assert rep.gap == pytest.approx(-0.0625, rel=1e-12)
        assert rep.gap == rep.right - rep.left

    def test_vector_rank_one_is_scalar_case(self):
        a = probes.euclid_vector_counterexample(2.5, 1)
        b = probes.euclid_scalar_counterexample(2.5)
        assert a.gap == pytest.approx(b.gap, rel=1e-14)

    @pytest.mark.parametrize("bad", [0.0, -1.0, float("nan")])
    def test_rejects_nonpositive_v(self, bad):
        with pytest.raises(DomainError):
            probes.euclid_scalar_counterexample(bad)

    def test_rejects_bad_rank(self):
        with pytest.raises(ValueError):
            probes.euclid_vector_counterexample(1.0, 0)


class TestKLCounterexamples:
    def test_unit_values(self):
        rep = probes.kl_scalar_counterexample(1.0)
        assert rep.left == pytest.approx(3 - math.log(4), rel=1e-14)
        assert rep.right == pytest.approx(2 - math.log(3), rel=1e-14)
        assert rep.gap == pytest.approx(math.log(4 / (3 * math.e)), rel=1e-12)
        assert rep.gap == pytest.approx(-0.71231, abs=1e-5)

    @pytest.mark.parametrize("v", [0.5, 2.0])
    def test_scaled(self, v):
        assert probes.kl_scalar_counterexample(v).gap == pytest.approx(v * KL_UNIT_GAP, rel=1e-12)

    def test_reproduces_direct_evaluation(self):
        v = 0.5
        s = math.sqrt(v)
        left = gkl_entry(v, 2 * s, 2 * s)
        right = 0.5 * gkl_entry(v, s, 3 * s) + 0.5 * gkl_entry(v, 3 * s, s)
        assert probes.kl_scalar_counterexample(v).gap == pytest.approx(right - left, rel=1e-12)
        assert right - left == pytest.approx(-0.35616, abs=1e-5)

    @pytest.mark.parametrize("v,r", [(1.0, 1), (1.0, 4), (3.0, 2)])
    def test_vector(self, v, r):
        assert probes.kl_vector_counterexample(v, r).gap == pytest.approx(v * KL_UNIT_GAP, rel=1e-12)


def test_gaps_negative_for_random_v(rng):
    for v in rng.uniform(1e-6, 10.0, size=100):
        r = int(rng.integers(1, 8))
        for rep in (
            probes.euclid_scalar_counterexample(v),
            probes.euclid_vector_counterexample(v, r),
            probes.kl_scalar_counterexample(v),
            probes.kl_vector_counterexample(v, r),
        ):
            assert rep.gap < 0
            assert rep.gap == rep.right - rep.left
        assert probes.euclid_vector_counterexample(v, r).gap == pytest.approx(-v * v / 16, rel=1e-12)
        assert probes.kl_vector_counterexample(v, r).gap == pytest.approx(v * KL_UNIT_GAP, rel=1e-12)


class TestMatrixWitness:
    def test_degenerate_embedding(self):
        assert probes.matrix_nonconvexity_witness(CostKind.EUCLIDEAN, 1, 1, 1).gap == pytest.approx(-1 / 16, rel=1e-12)

    def test_euclidean_3x2_rank2(self):
        rep = probes.matrix_nonconvexity_witness("euclidean", 3, 2, 2, v=1.0)
        assert abs(rep.gap + 0.0625) <= 1e-10

    def test_gkl_3x2_rank2(self):
        rep = probes.matrix_nonconvexity_witness("gkl", 3, 2, 2, v=1.0)
        assert abs(rep.gap - KL_UNIT_GAP) <= 1e-8

    def test_full_evaluation_matches_independent_sum(self):
        # Evaluate the full objective at the three matrix points entry by entry.
        rep = probes.matrix_nonconvexity_witness("gkl", 3, 4, 2, v=2.0)
        (w1, h1), (w2, h2) = rep.points
        n, m = 3, 4
        v = np.ones((n, m))
        v[0, :] = 0
        v[:, 0] = 0
        v[0, 0] = 2.0

        def full(w, h):
            total = 0.0
            for i in range(n):
                for j in range(m):
                    x = float(w[i] @ h[:, j])
                    total += (v[i, j] * math.log(v[i, j] / x) if v[i, j] > 0 else 0.0) - v[i, j] + x
            return total

        left = full(0.5 * (w1 + w2), 0.5 * (h1 + h2))
        right = 0.5 * full(w1, h1) + 0.5 * full(w2, h2)
        assert rep.gap == pytest.approx(right - left, abs=1e-10)

    def test_constant_one_fill_would_not_witness(self):
        # All non-probe entries at 1 adds curvature from the shared row/column.
        v = 1.0
        n, m, r = 3, 2, 2
        s = np.full(r, math.sqrt(v / r))
        V = np.ones((n, m))
        w1, h1 = np.ones((n, r)), np.ones((r, m))
        w1[0], h1[:, 0] = 0.0, 0.0
        w2, h2 = w1.copy(), h1.copy()
        w2[0], h2[:, 0] = s, s
        f = lambda w, h: float(np.sum((V - w @ h) ** 2))
        gap = 0.5 * f(w1, h1) + 0.5 * f(w2, h2) - f(0.5 * (w1 + w2), 0.5 * (h1 + h2))
        assert gap > 0

    @pytest.mark.parametrize("dims", [(0, 1, 1), (1, 2, 0), (2.5, 1, 1)])
    def test_invalid_dims(self, dims):
        with pytest.raises(ValueError):
            probes.matrix_nonconvexity_witness("euclidean", *dims)


class TestSingleVariableConvexity:
    @pytest.mark.parametrize("entry", [euclid_entry, gkl_entry], ids=["euclidean", "gkl"])
    def test_midpoint_inequality_with_one_factor_fixed(self, rng, entry):
        for _ in range(200):
            v, fixed, a, b = rng.uniform(0.1, 5.0, size=4)
            rep_h = probes.midpoint_report(lambda h: entry(v, fixed, h), (a,), (b,))
            rep_w = probes.midpoint_report(lambda w: entry(v, w, fixed), (a,), (b,))
            assert rep_h.gap >= -1e-12
            assert rep_w.gap >= -1e-12

    def test_lambda_range(self):
        with pytest.raises(ValueError):
            probes.midpoint_report(lambda x: x, (0.0,), (1.0,), lam=1.5)


class TestDerivative:
    def test_zero_at_stationary_point(self):
        assert probes.gkl_scalar_derivative(3.0, [1.0, 2.0], [1.0, 1.0], 0) == 0.0

    def test_hand_value(self):
        assert probes.gkl_scalar_derivative(1.0, [1.0], [0.5], 0) == pytest.approx(-1.0, rel=1e-15)

    def test_matches_finite_differences(self, rng):
        for _ in range(50):
            r = int(rng.integers(1, 5))
            v = rng.uniform(0.1, 3)
            w = rng.uniform(0.1, 2, size=r)
            h = rng.uniform(0.1, 2, size=r)
            a = int(rng.integers(r))
            d = 1e-6 * (1 + h[a])
            hp, hm = h.copy(), h.copy()
            hp[a] += d
            hm[a] -= d
            fd = (gkl_entry(v, w, hp) - gkl_entry(v, w, hm)) / (2 * d)
            assert probes.gkl_scalar_derivative(v, w, h, a) == pytest.approx(fd, rel=1e-6, abs=1e-9)

    def test_domain(self):
        with pytest.raises(DomainError):
            probes.gkl_scalar_derivative(1.0, [0.0], [1.0], 0)


class TestLandscape:
    def test_zero_at_one(self):
        sample = probes.landscape_sample(1.0, 1.0, [0.5, 1.0, 2.0])
        assert sample.gkld_values[1] == 0.0
        assert sample.gkld_values[0] > 0 and sample.gkld_values[2] > 0

    def test_kld_strictly_decreasing(self):
        for grid in (probes.linear_grid(0.01, 10, 1000), np.geomspace(1e-3, 1e3, 50)):
            sample = probes.landscape_sample(1.0, 1.0, grid)
            assert np.all(np.diff(sample.kld_values) < 0)

    def test_sign_flip_at_h_star(self):
        grid = probes.linear_grid(0.05, 2.0, 40)
        sample = probes.landscape_sample(1.0, 2.0, grid)
        assert sample.h_star == 0.5
        deriv = np.array([probes.gkl_scalar_derivative(1.0, [2.0], [x], 0) for x in grid])
        assert np.all(deriv[grid < 0.5 - 1e-12] < 0)
        assert np.all(deriv[grid > 0.5 + 1e-12] > 0)
        dec = np.diff(sample.gkld_values)
        assert np.all(dec[grid[1:] < 0.5] < 0) and np.all(dec[grid[:-1] > 0.5] > 0)

    def test_csv(self, tmp_path):
        path = tmp_path / "land.csv"
        probes.landscape_sample(1.0, 1.0, probes.linear_grid(0.1, 5, 100)).write_csv(path)
        lines = path.read_text().splitlines()
        assert lines[0] == "h,kld,gkld"
        assert len(lines) == 101

    @pytest.mark.parametrize("grid", [[1.0], [1.0, 0.5], [0.0, 1.0]])
    def test_invalid_grid(self, grid):
        with pytest.raises(ValueError):
            probes.landscape_sample(1.0, 1.0, grid)

import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fairlens.errors import ConfigError, EmptyInputError
from fairlens.metrics import (
    Group,
    Weights,
    d_inter,
    d_within,
    fairness_diversity,
    fairness_diversity_terms,
    iias,
    iss_cross,
    iss_intra,
)
from oracles import cosine, naive_d_inter, naive_d_within, naive_fairness

E = np.eye(3)
HALF = Weights.__new__(Weights)
object.__setattr__(HALF, "alpha", 0.5)
object.__setattr__(HALF, "beta", 0.5)


def random_groups(rng, k_max=4, n_max=8, d_max=16):
    d = int(rng.integers(1, d_max + 1))
    k = int(rng.integers(1, k_max + 1))
    return [rng.normal(size=(int(rng.integers(1, n_max + 1)), d)) for _ in range(k)]


class TestWithin:
    def test_identical(self):
        assert d_within(np.tile([0.2, 0.3, 0.5], (5, 1))) == 0.0

    def test_orthonormal_pair(self, backend):
        assert d_within(E[:2]) == pytest.approx(math.sqrt(2) / 2, abs=1e-15)

    def test_singleton(self):
        assert d_within(E[:1]) == 0.0

    def test_empty(self):
        with pytest.raises(EmptyInputError):
            d_within(np.zeros((0, 3)))

    def test_oracle(self, backend, rng):
        for _ in range(50):
            g = rng.normal(size=(int(rng.integers(1, 9)), 5))
            assert d_within(g) == pytest.approx(naive_d_within(g.tolist()), abs=1e-12)


class TestInter:
    def test_same_single_vector(self):
        assert d_inter(E[:1], E[:1]) == 0.0

    def test_worked_pair(self, backend):
        assert d_inter(E[:2], E[:1]) == pytest.approx(math.sqrt(2) / 2, abs=1e-15)

    def test_symmetry(self, backend, rng):
        for _ in range(20):
            a, b = rng.normal(size=(4, 6)), rng.normal(size=(7, 6))
            assert d_inter(a, b) == pytest.approx(d_inter(b, a), abs=1e-14)

    def test_dim_mismatch(self):
        with pytest.raises(ConfigError):
            d_inter(np.ones((2, 3)), np.ones((2, 4)))


class TestCombined:
    def test_identical_everywhere(self):
        v = np.tile([1.0, 2.0], (3, 1))
        assert fairness_diversity({"a": v, "b": v[:2]}, HALF) == 0.0

    def test_worked_example(self, backend):
        got = fairness_diversity({"A": E[:2], "B": E[:1]}, HALF)
        oracle = naive_fairness([E[:2].tolist(), E[:1].tolist()], 0.5, 0.5)
        assert oracle == pytest.approx(math.sqrt(2) / 4, abs=1e-15)
        assert got == pytest.approx(oracle, abs=1e-12)

    def test_single_group_has_no_inter_term(self):
        t = fairness_diversity_terms({"a": E}, HALF)
        assert t.inter is None and t.inter_term == 0.0
        assert t.value == pytest.approx(0.5 * d_within(E))

    def test_single_vector(self):
        assert fairness_diversity([E[:1]], HALF) == 0.0

    def test_oracle(self, backend, rng):
        for _ in range(50):
            groups = random_groups(rng)
            expected = naive_fairness([g.tolist() for g in groups], 0.3, 0.45)
            assert fairness_diversity(groups, Weights(0.3, 0.45)) == pytest.approx(expected, abs=1e-12)

    def test_permutation_invariance(self, rng):
        groups = random_groups(rng, k_max=4)
        w = Weights(0.4, 0.2)
        base = fairness_diversity(groups, w)
        shuffled = [g[rng.permutation(len(g))] for g in reversed(groups)]
        assert fairness_diversity(shuffled, w) == pytest.approx(base, abs=1e-12)

    def test_scale_invariance(self, rng):
        groups = random_groups(rng)
        w = Weights(0.4, 0.4)
        scaled = [g * rng.uniform(0.1, 100) for g in groups]
        assert fairness_diversity(scaled, w) == pytest.approx(fairness_diversity(groups, w), abs=1e-12)

    def test_inconsistent_dims(self):
        with pytest.raises(ConfigError):
            fairness_diversity([np.ones((2, 3)), np.ones((2, 4))])

    def test_weights_validation(self):
        with pytest.raises(ConfigError):
            Weights(0.6, 0.1)
        with pytest.raises(ConfigError):
            Weights(0.1, -0.1)
        with pytest.warns(UserWarning):
            Weights(0.5, 0.5)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            Weights(0.49, 0.49)

    @settings(max_examples=200, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.floats(0, 0.5), st.floats(0, 0.5))
    def test_bounded(self, seed, alpha, beta):
        groups = random_groups(np.random.default_rng(seed))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            w = Weights(alpha, beta)
        m = fairness_diversity(groups, w)
        assert 0.0 <= m <= alpha + beta + 1e-15


class TestISS:
    def test_identical(self, rng):
        v = rng.normal(size=5)
        assert iss_intra(np.tile(v, (4, 1))) == 0.0
        assert iss_cross(np.tile(v, (2, 1)), np.tile(v, (3, 1))) == 0.0
        # rescaling changes the normalized vector by at most an ulp
        assert iss_cross([v], [3 * v]) == pytest.approx(0.0, abs=1e-15)

    def test_antipodal(self):
        assert iss_intra([E[0], -E[0]]) == 2.0
        assert iss_cross([E[0]], [-E[0]]) == 2.0

    def test_orthonormal(self):
        assert iss_intra(E) == pytest.approx(1.0, abs=1e-15)
        assert iss_cross([E[0]], [E[1]]) == pytest.approx(1.0, abs=1e-15)

    def test_cosine_oracle(self, rng):
        x = rng.normal(size=(9, 4))
        rows = x.tolist()
        pairs = [(i, j) for i in range(9) for j in range(i + 1, 9)]
        expected = 1 - sum(cosine(rows[i], rows[j]) for i, j in pairs) / len(pairs)
        assert iss_intra(x) == pytest.approx(expected, abs=1e-12)
        y = rng.normal(size=(5, 4))
        expected = 1 - np.mean([cosine(a, b) for a in rows for b in y.tolist()])
        assert iss_cross(x, y) == pytest.approx(expected, abs=1e-12)

    def test_needs_two(self):
        with pytest.raises(EmptyInputError):
            iss_intra([E[0]])
        with pytest.raises(EmptyInputError):
            iss_cross([E[0]], np.zeros((0, 3)))

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_range(self, seed):
        r = np.random.default_rng(seed)
        x = r.normal(size=(int(r.integers(2, 10)), int(r.integers(1, 6))))
        assert 0.0 <= iss_intra(x) <= 2.0
        assert 0.0 <= iss_cross(x, r.normal(size=(3, x.shape[1]))) <= 2.0


class TestIIAS:
    def test_equal_sets(self, rng):
        c, a = rng.normal(size=(3, 5)), rng.normal(size=(4, 5))
        assert iias(c, a, a) == 0.0

    def test_male_bias(self):
        assert iias([E[0]], [E[0]], [E[1]]) == pytest.approx(1.0, abs=1e-15)

    def test_antisymmetry(self, rng):
        c, m, f = rng.normal(size=(3, 5)), rng.normal(size=(4, 5)), rng.normal(size=(2, 5))
        assert iias(c, f, m) == -iias(c, m, f)

    def test_oracle(self, rng):
        c, m, f = rng.normal(size=(3, 4)), rng.normal(size=(5, 4)), rng.normal(size=(2, 4))
        expected = np.mean([
            np.mean([cosine(ci, mi) for mi in m]) - np.mean([cosine(ci, fi) for fi in f])
            for ci in c
        ])
        assert iias(c, m, f) == pytest.approx(expected, abs=1e-12)
        assert -2 <= iias(c, m, f) <= 2

    def test_empty(self):
        with pytest.raises(EmptyInputError):
            iias(np.zeros((0, 3)), E, E)


def test_group_normalizes():
    g = Group("x", [[3.0, 4.0]])
    assert np.allclose(g.vectors, [[0.6, 0.8]])
    assert g.size == 1

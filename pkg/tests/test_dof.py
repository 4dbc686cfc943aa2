import numpy as np
import pytest

from srbp.channel import sample_bernoulli_mask
from srbp.dof import (
    init_state,
    poisson_row_weight_pmf,
    predict_dof,
    step,
    trajectory_csv,
)
from srbp.pairing import triangulate_mask


class TestPoissonPmf:
    def test_values(self):
        e = np.exp(-1)
        assert poisson_row_weight_pmf(1.0, 0) == pytest.approx(e)
        assert poisson_row_weight_pmf(1.0, 1) == pytest.approx(e)
        assert poisson_row_weight_pmf(2.0, 3) == pytest.approx(np.exp(-2) * 8 / 6)

    def test_invalid_args(self):
        with pytest.raises(ValueError):
            poisson_row_weight_pmf(1.0, -1)
        with pytest.raises(ValueError):
            poisson_row_weight_pmf(0.0, 1)


class TestInitState:
    def test_survivor_mean(self):
        s = init_state(64, 1 / 64)
        assert s.m == pytest.approx(64 * (1 - np.exp(-1)), rel=1e-12)

    def test_weight_one_share(self):
        s = init_state(64, 1 / 64)
        assert s.p1 == pytest.approx(np.exp(-1) / (1 - np.exp(-1)), rel=1e-12)

    def test_dense_limit(self):
        s = init_state(256, 1.0)
        assert s.m == pytest.approx(256, rel=1e-10)

    def test_counts_partition_m(self):
        s = init_state(64, 1 / 64)
        assert s.weight_counts.sum() == pytest.approx(s.m, abs=1e-9)


class TestStep:
    def test_empty_matrix_convention(self):
        s = init_state(8, 1 / 8)
        drained = type(s)(step=3, m=0.0, weight_counts=np.zeros_like(s.weight_counts),
                          p1=0.0, p_ex=1.0, n_ex_accum=0.5)
        nxt = step(drained, 8)
        assert nxt.m == 0.0
        assert nxt.p_ex == 1.0
        assert nxt.n_ex_accum == pytest.approx(1.5)

    def test_first_step_exclusion_probability(self):
        s = init_state(64, 1 / 64)
        # Independent direct evaluation of (1 - p1)^m.
        p1 = np.exp(-1) / (1 - np.exp(-1))
        m = 64 * (1 - np.exp(-1))
        expected = (1 - p1) ** m
        assert s.p_ex == pytest.approx(expected, rel=1e-10)
        assert expected == pytest.approx(4.9e-16, rel=0.05)

    def test_conservation_over_trajectory(self):
        pred = predict_dof(64, 1 / 64)
        for s in pred.trajectory:
            assert abs(s.weight_counts.sum() - s.m) < 1e-6


class TestPredictDof:
    @pytest.mark.parametrize(
        "n,expected",
        [(8, 4.59), (16, 8.95), (32, 17.56), (64, 34.8), (128, 69.99)],
    )
    def test_reference_values(self, n, expected):
        pred = predict_dof(n, 1 / n)
        assert pred.n_d == pytest.approx(expected, rel=0.02)

    def test_identity_n_d_plus_n_ex(self):
        pred = predict_dof(32, 1 / 32)
        assert pred.n_d + pred.n_ex == pytest.approx(32, abs=1e-12)

    def test_state_ranges_valid(self):
        for n in (16, 64, 256, 1024):
            for beta in (0.5, 1.0, 2.0, 4.0, 8.0):
                delta = beta / n
                if not 0 < delta <= 1:
                    continue
                pred = predict_dof(n, delta)
                for s in pred.trajectory:
                    assert 0.0 <= s.p1 <= 1.0
                    assert 0.0 <= s.p_ex <= 1.0
                    assert s.m >= 0.0
                    assert np.all(s.weight_counts >= 0.0)

    def test_monotone_in_n(self):
        values = [predict_dof(n, 1 / n).n_d for n in (8, 16, 32, 64, 128)]
        assert np.all(np.diff(values) > 0)

    def test_matches_simulation(self, rng):
        # The paper-style analytical and simulated means stay within 0.25
        # of each other in absolute terms.
        for n in (8, 16, 32, 64):
            sim = []
            for _ in range(4000):
                mask = sample_bernoulli_mask(n, n, 1 / n, rng)
                sim.append(triangulate_mask(mask, rng).n_d)
            assert abs(predict_dof(n, 1 / n).n_d - np.mean(sim)) < 0.25


class TestTrajectoryCsv:
    def test_header_and_rows(self):
        pred = predict_dof(8, 1 / 8)
        text = trajectory_csv(pred)
        lines = text.strip().split("\n")
        assert lines[0] == "step,m,n1,p1,p_ex"
        assert len(lines) == 1 + len(pred.trajectory)
        first = lines[1].split(",")
        assert int(first[0]) == 1
        assert float(first[1]) == pytest.approx(8 * (1 - np.exp(-1)), rel=1e-9)

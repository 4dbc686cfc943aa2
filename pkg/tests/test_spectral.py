import numpy as np
import pytest

from srbp.channel import MaskMatrix, SparseVirtualChannel, apply_mask, sample_bernoulli_mask
from srbp.pairing import block_triangulate, extract_blocks, triangulate_mask
from srbp.spectral import (
    allocation_capacity,
    squared_singular_values,
    srbp_capacity,
    svd_capacity,
    waterfill,
)


class TestSquaredSingularValues:
    def test_identity(self):
        np.testing.assert_allclose(squared_singular_values(np.eye(3)), np.ones(3))

    def test_diagonal(self):
        np.testing.assert_allclose(
            squared_singular_values(np.diag([3.0, 2.0j])), [9.0, 4.0]
        )

    def test_trace_identity_oracle(self, rng):
        m = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
        gains = squared_singular_values(m)
        assert gains.sum() == pytest.approx(np.linalg.norm(m) ** 2, rel=1e-10)
        assert np.all(np.diff(gains) <= 0)


class TestWaterfill:
    def test_symmetric(self):
        alloc = waterfill([1.0, 1.0], 2.0)
        np.testing.assert_allclose(alloc.powers, [1.0, 1.0])

    def test_starved_second_channel(self):
        alloc = waterfill([4.0, 1.0], 0.1)
        np.testing.assert_allclose(alloc.powers, [0.1, 0.0], atol=1e-12)
        assert alloc.water_level == pytest.approx(0.35)

    def test_two_active(self):
        # Solve (mu - 0.25) + (mu - 1) = 2.
        alloc = waterfill([4.0, 1.0], 2.0)
        np.testing.assert_allclose(alloc.powers, [1.375, 0.625])
        assert alloc.water_level == pytest.approx(1.625)

    def test_all_zero_gains_rejected(self):
        with pytest.raises(ValueError, match="no usable subchannel"):
            waterfill([0.0, 0.0], 1.0)

    def test_budget_and_kkt(self, rng):
        for _ in range(200):
            k = int(rng.integers(1, 9))
            gains = rng.gamma(1.0, 2.0, size=k)
            gains[rng.random(k) < 0.2] = 0.0
            if not np.any(gains > 0):
                continue
            rho = float(rng.gamma(2.0, 2.0)) + 1e-3
            alloc = waterfill(gains, rho)
            assert alloc.powers.sum() == pytest.approx(rho, abs=1e-9 * rho)
            mu = alloc.water_level
            for g, p in zip(gains, alloc.powers):
                if g == 0:
                    assert p == 0
                else:
                    assert p == pytest.approx(max(0.0, mu - 1 / g), abs=1e-9)

    def test_perturbation_never_improves(self, rng):
        eps = 1e-4
        for _ in range(100):
            gains = rng.gamma(1.0, 2.0, size=4) + 1e-3
            rho = 2.0
            alloc = waterfill(gains, rho)
            best = allocation_capacity(gains, alloc.powers)
            active = np.nonzero(alloc.powers > eps)[0]
            for a in active:
                for b in range(4):
                    if a == b:
                        continue
                    p = alloc.powers.copy()
                    p[a] -= eps
                    p[b] += eps
                    assert allocation_capacity(gains, p) <= best + 1e-12

    def test_scale_covariance_kkt(self, rng):
        gains = rng.gamma(1.0, 2.0, size=5) + 1e-3
        for c in (0.1, 3.0, 40.0):
            alloc = waterfill(c * gains, 1.5)
            mu = alloc.water_level
            for g, p in zip(c * gains, alloc.powers):
                assert p == pytest.approx(max(0.0, mu - 1 / g), abs=1e-9)
            assert alloc.powers.sum() == pytest.approx(1.5, abs=1e-9)

    def test_rho_validated(self):
        with pytest.raises(ValueError):
            waterfill([1.0], 0.0)


class TestSvdCapacity:
    def test_unit_diagonal(self):
        assert svd_capacity(np.diag([1.0 + 0j]), 1.0).capacity == pytest.approx(1.0)

    def test_zero_matrix(self):
        res = svd_capacity(np.zeros((3, 3), complex), 1.0)
        assert res.capacity == 0.0
        assert res.allocation.powers.size == 0

    def test_grid_search_oracle(self, rng):
        mask = sample_bernoulli_mask(3, 3, 0.5, rng)
        ch = apply_mask(mask, rng)
        if mask.nnz == 0:
            pytest.skip("empty draw")
        rho = 2.0
        res = svd_capacity(ch, rho)
        gains = squared_singular_values(ch.values)
        gains = gains[gains > 1e-9 * gains[0]]
        # Brute-force power split over a fine simplex grid.
        steps = 401
        p1 = np.linspace(0, rho, steps)
        best = 0.0
        if gains.size == 1:
            best = np.log2(1 + rho * gains[0])
        elif gains.size == 2:
            caps = np.log2(1 + p1 * gains[0]) + np.log2(1 + (rho - p1) * gains[1])
            best = caps.max()
        else:
            g1, g2 = np.meshgrid(p1, p1)
            ok = g1 + g2 <= rho
            caps = (np.log2(1 + g1 * gains[0]) + np.log2(1 + g2 * gains[1])
                    + np.log2(1 + (rho - g1 - g2) * gains[2]))
            best = caps[ok].max()
        assert res.capacity == pytest.approx(best, abs=1e-3)
        assert res.capacity >= best - 1e-12

    def test_recomputable_from_fields(self, rng):
        ch = apply_mask(sample_bernoulli_mask(6, 6, 0.4, rng), rng)
        res = svd_capacity(ch, 5.0)
        recomputed = allocation_capacity(res.gains, res.allocation.powers)
        assert res.capacity == pytest.approx(recomputed, abs=1e-12)

    def test_monotone_in_rho(self, rng):
        ch = apply_mask(sample_bernoulli_mask(8, 8, 0.3, rng), rng)
        caps = [svd_capacity(ch, r).capacity for r in (0.5, 1.0, 2.0, 8.0, 32.0)]
        assert np.all(np.diff(caps) >= 0)

    def test_natural_log_switch(self, rng):
        ch = apply_mask(sample_bernoulli_mask(4, 4, 0.5, rng), rng)
        bits = svd_capacity(ch, 3.0).capacity
        nats = svd_capacity(ch, 3.0, log_base=np.e).capacity
        assert nats == pytest.approx(bits * np.log(2.0), rel=1e-12)


class TestSrbpCapacity:
    def test_permuted_diagonal_matches_svd(self, rng):
        n = 5
        perm = rng.permutation(n)
        values = np.zeros((n, n), complex)
        for i, j in enumerate(perm):
            values[i, j] = rng.standard_normal() + 1j * rng.standard_normal()
        mask = MaskMatrix(bits=(values != 0).astype(np.uint8))
        ch = SparseVirtualChannel(values=values, mask=mask)
        tri = triangulate_mask(mask, rng)
        blocks = extract_blocks(block_triangulate(tri, mask), ch)
        assert all(b.shape == (1, 1) for b in blocks)
        s = srbp_capacity(blocks, 4.0).capacity
        assert s == pytest.approx(svd_capacity(ch, 4.0).capacity, rel=1e-12)

    def test_rank_one_block(self):
        block = np.ones((2, 2), complex)
        res = srbp_capacity([block], 1.0)
        np.testing.assert_allclose(res.gains, [4.0])
        assert res.capacity == pytest.approx(np.log2(5.0))

    def test_empty_blocks(self):
        assert srbp_capacity([], 1.0).capacity == 0.0

    def test_never_exceeds_svd(self, rng):
        for _ in range(2000):
            mask = sample_bernoulli_mask(8, 8, 1 / 8, rng)
            ch = apply_mask(mask, rng)
            tri = triangulate_mask(mask, rng)
            blocks = extract_blocks(block_triangulate(tri, mask), ch)
            rho = float(rng.uniform(0.1, 100.0))
            s = srbp_capacity(blocks, rho).capacity
            v = svd_capacity(ch, rho).capacity
            assert s <= v + 1e-9

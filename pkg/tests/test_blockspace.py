import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blocksweep import (
    BlockVector,
    ConformanceError,
    WeightVector,
    norm_equivalence_factors,
    weighted_norm_sq,
)


def scalar_loop_weighted_sq(blocks, omega):
    """Independent oracle: plain python accumulation, no numpy reductions."""
    total = 0.0
    for w, block in zip(omega, blocks):
        for v in block:
            total += w * v * v
    return total


class TestBlockVector:
    def test_blockwise_arithmetic(self):
        x = BlockVector([[1.0, 2.0], [3.0]])
        y = BlockVector([[0.5, -1.0], [2.0]])
        s = x + y
        assert np.allclose(s.blocks[0], [1.5, 1.0])
        assert np.allclose(s.blocks[1], [5.0])
        d = x - y
        assert np.allclose(d.blocks[0], [0.5, 3.0])
        assert np.allclose((2.0 * x).blocks[1], [6.0])
        assert np.allclose((-x).blocks[0], [-1.0, -2.0])

    def test_norm_is_direct_sum(self):
        x = BlockVector([[3.0], [4.0]])
        assert x.norm_sq() == 25.0
        assert x.norm() == 5.0

    def test_conformance_enforced(self):
        x = BlockVector([[1.0, 2.0], [3.0]])
        y = BlockVector([[1.0], [2.0]])
        with pytest.raises(ConformanceError):
            x + y
        with pytest.raises(ConformanceError):
            x - y

    def test_blocks_are_immutable(self):
        x = BlockVector([[1.0, 2.0], [3.0]])
        with pytest.raises(ValueError):
            x.blocks[0][0] = 9.0

    def test_source_mutation_does_not_leak(self):
        src = np.array([1.0, 2.0])
        x = BlockVector([src, [3.0]])
        src[0] = 99.0
        assert x.blocks[0][0] == 1.0

    def test_flat_round_trip(self):
        x = BlockVector([[1.0, 2.0], [3.0], [4.0, 5.0, 6.0]])
        again = BlockVector.from_flat(x.to_flat(), x.dims)
        assert x == again

    def test_from_flat_rejects_bad_split(self):
        with pytest.raises(ConformanceError):
            BlockVector.from_flat(np.ones(4), (2, 3))

    def test_zeros(self):
        z = BlockVector.zeros((2, 1))
        assert z.norm_sq() == 0.0
        assert z.dims == (2, 1)


class TestWeightedNormSq:
    def test_zero_vector_gives_zero(self):
        for dims in [(1,), (2, 3), (1, 1, 1)]:
            z = BlockVector.zeros(dims)
            w = WeightVector(np.ones(len(dims)))
            assert weighted_norm_sq(z, w) == 0.0

    def test_unit_weights_reduce_to_plain_norm(self):
        x = BlockVector([[3.0], [4.0]])
        assert weighted_norm_sq(x, WeightVector([1.0, 1.0])) == 25.0

    def test_worked_example_against_scalar_loop(self):
        blocks = [[1.0, 1.0], [2.0]]
        omega = [2.0, 0.5]
        expected = scalar_loop_weighted_sq(blocks, omega)
        assert expected == 6.0
        assert weighted_norm_sq(BlockVector(blocks), WeightVector(omega)) == expected

    def test_random_inputs_match_scalar_loop(self, rng):
        for _ in range(50):
            dims = rng.integers(1, 5, size=rng.integers(1, 5))
            blocks = [rng.standard_normal(d) for d in dims]
            omega = rng.uniform(0.1, 3.0, size=len(dims))
            got = weighted_norm_sq(BlockVector(blocks), WeightVector(omega))
            want = scalar_loop_weighted_sq(blocks, omega)
            assert got == pytest.approx(want, rel=1e-12)

    def test_positive_unless_zero(self, rng):
        w = WeightVector([0.3, 1.7])
        for _ in range(100):
            blocks = [rng.standard_normal(2), rng.standard_normal(1)]
            x = BlockVector(blocks)
            value = weighted_norm_sq(x, w)
            if any(np.any(b != 0) for b in blocks):
                assert value > 0.0

    def test_dimension_mismatch(self):
        x = BlockVector([[1.0], [2.0]])
        with pytest.raises(ConformanceError):
            weighted_norm_sq(x, WeightVector([1.0]))

    @given(st.floats(min_value=-100, max_value=100, allow_nan=False))
    @settings(max_examples=60, deadline=None)
    def test_quadratic_scaling(self, c):
        x = BlockVector([[1.0, -2.0], [0.5]])
        w = WeightVector([2.0, 0.25])
        base = weighted_norm_sq(x, w)
        assert weighted_norm_sq(c * x, w) == pytest.approx(c * c * base, rel=1e-12, abs=1e-12)

    def test_weights_must_be_positive(self):
        with pytest.raises(ValueError):
            WeightVector([1.0, 0.0])
        with pytest.raises(ValueError):
            WeightVector([-1.0])


class TestNormEquivalence:
    def test_unit_marginals_coincide(self):
        assert norm_equivalence_factors([1.0, 1.0, 1.0]) == (1.0, 1.0)

    def test_min_max(self):
        assert norm_equivalence_factors([0.5, 0.25]) == (0.25, 0.5)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            norm_equivalence_factors([0.0, 0.5])
        with pytest.raises(ValueError):
            norm_equivalence_factors([1.2])

    def test_sandwich_on_random_vectors(self, rng):
        p = np.array([0.5, 0.25])
        lo, hi = norm_equivalence_factors(p)
        w = WeightVector(1.0 / p)
        for _ in range(1000):
            x = BlockVector([rng.standard_normal(3), rng.standard_normal(2)])
            weighted = weighted_norm_sq(x, w)
            plain = x.norm_sq()
            assert lo * weighted <= plain * (1 + 1e-12)
            assert plain <= hi * weighted * (1 + 1e-12)

    def test_factors_are_attained(self):
        # a vector supported on the min-marginal block meets the lower factor
        p = np.array([0.5, 0.25])
        w = WeightVector(1.0 / p)
        x_min = BlockVector([[0.0], [1.0]])
        assert x_min.norm_sq() == pytest.approx(0.25 * weighted_norm_sq(x_min, w))
        x_max = BlockVector([[1.0], [0.0]])
        assert x_max.norm_sq() == pytest.approx(0.5 * weighted_norm_sq(x_max, w))

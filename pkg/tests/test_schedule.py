"""Unit tests for Cascade block schedules and pass plans."""

import numpy as np
import pytest

from diqsim.errors import ParameterError, PlanError
from diqsim.reconciliation import PassPlan, block_schedule, make_pass_plans
from diqsim.utils.seeding import derive_rng


class TestBlockSchedule:
    """Tests for block_schedule."""

    def test_classic_schedule(self):
        assert block_schedule(0.073, 10_000, 4) == [10, 20, 40, 80]

    def test_high_qber_clamps_to_two(self):
        assert block_schedule(0.5, 100, 2) == [2, 4]

    def test_zero_qber_uses_ceiling(self):
        assert block_schedule(0.0, 100, 1) == [50]
        assert block_schedule(1e-9, 100, 1) == [50]

    def test_growth_capped_at_n(self):
        assert block_schedule(0.5, 5, 4) == [2, 4, 5, 5]

    def test_single_bit(self):
        assert block_schedule(0.1, 1, 3) == [1, 1, 1]

    @pytest.mark.parametrize(
        "qber, n, passes",
        [(0.51, 100, 4), (-0.1, 100, 4), (0.1, 0, 4), (0.1, 100, 0)],
    )
    def test_rejects_bad_arguments(self, qber, n, passes):
        with pytest.raises(ParameterError):
            block_schedule(qber, n, passes)


class TestPassPlan:
    """Tests for PassPlan."""

    def test_rejects_non_permutation(self):
        with pytest.raises(PlanError):
            PassPlan(1, 2, np.array([0, 0, 1]))

    def test_rejects_bad_block_size(self):
        with pytest.raises(PlanError):
            PassPlan(1, 0, np.arange(4))

    def test_blocks_partition_positions(self, rng):
        plan = PassPlan(2, 3, rng.permutation(10))
        blocks = plan.blocks()
        assert plan.n_blocks == len(blocks) == 4
        assert all(len(b) <= 3 for b in blocks)
        assert sorted(np.concatenate(blocks).tolist()) == list(range(10))

    def test_block_of_inverts_blocks(self, rng):
        plan = PassPlan(2, 4, rng.permutation(11))
        owner = plan.block_of()
        for j, block in enumerate(plan.blocks()):
            assert all(owner[p] == j for p in block)

    def test_block_parities(self):
        plan = PassPlan.from_blocks(1, [[0, 3], [1, 2]])
        assert plan.block_parities(np.array([1, 1, 0, 0])).tolist() == [1, 1]

    def test_from_blocks_rejects_uneven(self):
        with pytest.raises(PlanError):
            PassPlan.from_blocks(1, [[0], [1, 2]])

    def test_shuffle_is_read_only(self):
        plan = PassPlan.identity(1, 2, 4)
        with pytest.raises(ValueError):
            plan.shuffle[0] = 3


class TestMakePassPlans:
    """Tests for make_pass_plans."""

    def test_first_pass_is_identity(self):
        plans = make_pass_plans([2, 4, 8], 16, derive_rng(1))
        assert np.array_equal(plans[0].shuffle, np.arange(16))
        assert [p.pass_index for p in plans] == [1, 2, 3]
        assert [p.block_size for p in plans] == [2, 4, 8]

    def test_seeded(self):
        first = make_pass_plans([2, 4], 32, derive_rng(3))
        second = make_pass_plans([2, 4], 32, derive_rng(3))
        assert np.array_equal(first[1].shuffle, second[1].shuffle)

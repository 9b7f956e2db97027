import random
from fractions import Fraction as F

import pytest

from ckpsolve import (GuessTuple, Instance, InvalidParams, MultiMindedBid,
                      SingleMindedBid, SubSumSpec, ckp_bifptas, cx,
                      gen_random, gen_subsum_reduction, grid_unit,
                      guess_admissible, load_and_check, multickp_fptas,
                      projection_grids)
from ckpsolve.oracle import brute_force_ckp, brute_force_multi


class TestGuessAdmissible:
    # C=10, n=5, eps=1/2, P=1: L = 1/2, so (1+2eps)*C = 20 sits at index 40
    cfg = grid_unit(10, 5, F(1, 2), 1)

    def test_zero_guess(self):
        assert guess_admissible(GuessTuple(0, 0, 0, 0), self.cfg)

    def test_boundary_equality(self):
        assert guess_admissible(GuessTuple(40, 0, 0, 0), self.cfg)

    def test_just_past_boundary(self):
        assert not guess_admissible(GuessTuple(41, 0, 0, 0), self.cfg)

    def test_cancellation_counts(self):
        # xi_plus - xi_minus is what enters the real axis
        assert guess_admissible(GuessTuple(60, 25, 0, 0), self.cfg)
        # but the imaginary parts add up
        assert not guess_admissible(GuessTuple(0, 0, 21, 20), self.cfg)


class TestSingleMinded:
    def test_single_bid_selected(self):
        inst = Instance(5, [SingleMindedBid(F(7), cx(3, 4))], 1)
        res = ckp_bifptas(inst, F(1, 2))
        assert res.allocation.total_value == 7

    def test_rejects_multi(self):
        inst = Instance(5, [MultiMindedBid([(cx(1, 0), F(1)),
                                            (cx(2, 0), F(2))])], 1)
        with pytest.raises(InvalidParams):
            ckp_bifptas(inst, F(1, 2))

    @pytest.mark.parametrize("seed", range(8))
    def test_beats_oracle_within_bound(self, seed):
        rng = random.Random(seed)
        inst = gen_random(3, 1, rng.choice([0, F(1, 3)]), seed=seed * 3 + 1,
                          power_factor=rng.choice([1, 2]))
        opt = brute_force_ckp(inst)
        for eps in (F(1, 4), F(1, 2)):
            res = ckp_bifptas(inst, eps)
            assert res.allocation.total_value >= opt.opt_value
            lhs = res.allocation.total_load.magnitude_sq()
            assert lhs <= ((1 + 3 * eps) * inst.capacity) ** 2
            assert res.violation_bound == 1 + 3 * eps

    def test_subsum_feasible_reaches_one(self):
        inst = gen_subsum_reduction(SubSumSpec([1, 2, 3], 3, 1, F(1, 2)))
        res = ckp_bifptas(inst, F(1, 2))
        assert res.allocation.total_value >= 1

    def test_deterministic(self):
        inst = gen_random(6, 1, F(1, 2), seed=9)
        r1 = ckp_bifptas(inst, F(1, 4))
        r2 = ckp_bifptas(inst, F(1, 4))
        assert r1.allocation == r2.allocation
        assert r1.guess == r2.guess

    def test_monotone_in_eps(self):
        for seed in range(10):
            inst = gen_random(5, 1, F(1, 3), seed=seed, power_factor=2)
            v = [ckp_bifptas(inst, eps).allocation.total_value
                 for eps in (F(1, 4), F(1, 2), F(1, 1))]
            assert v[0] <= v[1] <= v[2]


class TestMultiMinded:
    def test_all_zero_bids(self):
        inst = Instance(5, [MultiMindedBid([]), MultiMindedBid([])], 1)
        res = multickp_fptas(inst, F(1, 2))
        assert res.allocation.total_value == 0
        assert res.allocation.total_load.is_zero

    @pytest.mark.parametrize("seed", range(8))
    def test_beats_oracle_within_bound(self, seed):
        inst = gen_random(4, 2, F(1, 2) if seed % 2 else 0, seed=seed + 40)
        opt = brute_force_multi(inst)
        for eps in (F(1, 4), F(1, 2)):
            res = multickp_fptas(inst, eps)
            assert res.allocation.total_value >= opt.opt_value
            lhs = res.allocation.total_load.magnitude_sq()
            assert lhs <= ((1 + 4 * eps) * inst.capacity) ** 2

    def test_allocations_are_declared_options(self):
        inst = gen_random(5, 3, F(2, 5), seed=77)
        res = multickp_fptas(inst, F(1, 2))
        for bid, d in zip(inst.bids, res.allocation.chosen):
            opts = [o for o, _ in bid.as_multi().options] \
                if hasattr(bid, "as_multi") else [o for o, _ in bid.options]
            assert d in opts

    def test_rounded_overshoot_still_found(self):
        # |d| <= C but the rounding of d overshoots C; the admissibility
        # window (1+2eps)C must still admit the guess
        inst = Instance(1, [SingleMindedBid(F(9), cx(F(3, 4), F(5, 8)))], 1)
        cfg = grid_unit(1, 1, 1, 1)
        from ckpsolve import round_demand
        r = round_demand(inst.bids[0].demand, cfg)
        rd = cx(r.re_idx * cfg.L, r.im_idx * cfg.L)
        assert rd.magnitude_sq() > 1  # the rounded demand overshoots
        res = multickp_fptas(inst, 1)
        assert res.allocation.total_value == 9

    def test_second_quadrant_cancellation(self):
        # the minus user's real part cancels the plus user's, so both fit
        inst = Instance(2, [SingleMindedBid(F(5), cx(2, 0)),
                            SingleMindedBid(F(5), cx(-2, 1))], 2)
        opt = brute_force_ckp(inst)
        assert opt.opt_value == 10
        res = multickp_fptas(inst, F(1, 4))
        assert res.allocation.total_value >= 10


class TestExactnessBeyondInt64:
    def test_huge_values_stay_exact(self):
        huge = F(2 ** 61, 3)
        inst = Instance(1, [SingleMindedBid(5 * huge, cx(F(1, 2), 0)),
                            SingleMindedBid(3 * huge, cx(0, F(1, 2)))], 1)
        res = ckp_bifptas(inst, F(1, 2))
        assert res.allocation.total_value == 8 * huge


class TestInstrumentation:
    def test_guess_counter_bounded(self):
        for seed in range(6):
            inst = gen_random(5, 2, F(1, 3), seed=seed)
            res = multickp_fptas(inst, F(1, 4))
            grids = projection_grids(res.grid)
            closed_form = grids.a_plus_size * grids.a_minus_size \
                * grids.b_size * grids.b_size
            assert res.stats.guesses_tried <= closed_form
            assert res.stats.guess_space_size == closed_form

    def test_stats_populated(self):
        inst = gen_random(4, 1, 0, seed=5)
        res = ckp_bifptas(inst, F(1, 2))
        assert res.stats.dp_cells > 0
        assert res.stats.wall_time >= 0

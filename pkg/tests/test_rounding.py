from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ckpsolve import (GridPoint, GridTooLarge, InvalidParams, Limits,
                      MultiMindedBid, SingleMindedBid, cx, grid_unit,
                      partial_order_leq, projection_grids, round_demand,
                      rounded_demand_space)

from conftest import upper_half_demands


class TestGridUnit:
    def test_direct_substitution(self):
        assert grid_unit(10, 5, F(1, 2), 1).L == F(1, 2)

    def test_smallest_instance(self):
        assert grid_unit(1, 1, 1, 1).L == F(1, 2)

    def test_degenerate_eps_rejected(self):
        with pytest.raises(InvalidParams):
            grid_unit(10, 5, 0, 1)
        with pytest.raises(InvalidParams):
            grid_unit(10, 5, F(3, 2), 1)
        with pytest.raises(InvalidParams):
            grid_unit(0, 5, F(1, 2), 1)
        with pytest.raises(InvalidParams):
            grid_unit(10, 0, F(1, 2), 1)


class TestRoundDemand:
    # C=8, n=4, eps=1, P=1 gives L = 1 exactly
    cfg = grid_unit(8, 4, 1, 1)

    def test_grid_aligned_is_identity(self):
        assert round_demand(cx(0, 0), self.cfg) == GridPoint(0, 0)
        assert round_demand(cx(3, 2), self.cfg) == GridPoint(3, 2)

    def test_ceil_both_first_quadrant(self):
        assert round_demand(cx(F(5, 2), F(3, 2)), self.cfg) == GridPoint(3, 2)

    def test_floor_negative_real(self):
        assert round_demand(cx(F(-5, 2), F(3, 2)), self.cfg) == GridPoint(-3, 2)

    @given(upper_half_demands())
    def test_dominates_and_close(self, d):
        cfg = grid_unit(8, 4, F(1, 2), 1)  # L = 1/2
        r = round_demand(d, cfg)
        rd = cx(r.re_idx * cfg.L, r.im_idx * cfg.L)
        assert partial_order_leq(d, rd)
        assert abs(rd.re - d.re) < cfg.L
        assert abs(rd.im - d.im) < cfg.L

    @given(upper_half_demands())
    def test_idempotent(self, d):
        cfg = grid_unit(8, 4, F(1, 2), 1)
        r = round_demand(d, cfg)
        rd = cx(r.re_idx * cfg.L, r.im_idx * cfg.L)
        assert round_demand(rd, cfg) == r


class TestProjectionGrids:
    def test_exact_ceilings(self):
        # C=10, n=5, eps=1, P=1 gives L = 1
        cfg = grid_unit(10, 5, 1, 1)
        assert cfg.L == 1
        g = projection_grids(cfg)
        assert g.a_plus_max == 20   # ceil(C*(1+P)/L)
        assert g.a_minus_max == 10  # ceil(C*P/L)
        assert g.b_max == 10        # ceil(C/L)

    def test_fractional_ceilings(self):
        cfg = grid_unit(10, 3, F(1, 2), F(3, 2))  # L = 2/3
        g = projection_grids(cfg)
        # C(1+P)/L = 25/(2/3) = 37.5 -> 38; CP/L = 22.5 -> 23; C/L = 15
        assert (g.a_plus_max, g.a_minus_max, g.b_max) == (38, 23, 15)

    def test_declaration_independence(self):
        c1 = grid_unit(10, 5, F(1, 2), 2)
        c2 = grid_unit(10, 5, F(1, 2), 2)
        assert c1.serialize() == c2.serialize()
        assert projection_grids(c1).serialize() == \
            projection_grids(c2).serialize()

    def test_memory_cap(self):
        cfg = grid_unit(10, 5, F(1, 100), 4)
        with pytest.raises(GridTooLarge):
            projection_grids(cfg, Limits(max_table_cells=1000))

    def test_guess_space_closed_form(self):
        cfg = grid_unit(10, 5, 1, 1)
        g = projection_grids(cfg)
        assert g.guess_space_size() == 21 * 11 * 11 * 11


class TestRoundedDemandSpace:
    def test_cartesian_count(self):
        cfg = grid_unit(10, 5, 1, 1)
        g = projection_grids(cfg)
        space = rounded_demand_space(g)
        assert len(space) == g.a_plus_size * g.b_size
        assert len(list(space)) == len(space)

    def test_single_point_box(self):
        from ckpsolve.rounding import RoundedDemandSpace
        space = RoundedDemandSpace(0, 0)
        assert list(space) == [GridPoint(0, 0)]

    def test_membership(self):
        cfg = grid_unit(10, 5, 1, 1)
        space = rounded_demand_space(projection_grids(cfg))
        assert GridPoint(0, 0) in space
        assert GridPoint(20, 10) in space
        assert GridPoint(21, 0) not in space

    def test_cap(self):
        cfg = grid_unit(10, 5, F(1, 100), 4)
        g = projection_grids(cfg, Limits(max_table_cells=10**10))
        with pytest.raises(GridTooLarge):
            rounded_demand_space(g, Limits(max_table_cells=100))

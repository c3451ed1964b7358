"""Slot-arithmetic oracles and whole-plan invariants."""

import io
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from d2dcast.phy import PhyParams, airtime
from d2dcast.scheduler import (
    SlotPlanParams,
    build_slot_plan,
    d2d_superslot_len,
    d2d_window_size,
    downlink_sf_at,
    downlink_superslot_len,
    silent_slots,
)

PHY = PhyParams()
PLAN = SlotPlanParams()


class TestSuperslotLengths:
    def test_sf12_frame_needs_77_slots(self):
        # airtime(12, 50) = 2.3020 s; ceil(2.3020 / 0.03) = 77
        assert math.ceil(airtime(12, 50, PHY) / 0.03) == 77
        assert downlink_superslot_len(12, PLAN, PHY) == 77

    def test_exact_multiple_of_ping_slot(self):
        t = airtime(7, 50, PHY)
        plan = SlotPlanParams(ping_slot_s=t / 2)
        assert downlink_superslot_len(7, plan, PHY) == 2

    def test_sf10_frame_needs_20_slots(self):
        assert downlink_superslot_len(10, PLAN, PHY) == 20

    def test_d2d_superslot_matches_downlink_rule(self):
        assert d2d_superslot_len(PLAN, PHY) == 20
        assert d2d_superslot_len(SlotPlanParams(sf_d2d=7), PHY) == math.ceil(
            airtime(7, 50, PHY) / 0.03
        )

    def test_huge_ping_slot_gives_single_slot(self):
        assert d2d_superslot_len(SlotPlanParams(ping_slot_s=1.0), PHY) == 1


class TestSilentSlots:
    def test_sf12_at_one_percent(self):
        # ceil(100 * 2.3020 / (1 * 0.03)) = ceil(7673.2) = 7674
        assert silent_slots(12, PLAN, PHY) == 7674

    def test_sf10_at_one_percent(self):
        # ceil(100 * 0.575488 / 0.03) = ceil(1918.29) = 1919
        assert silent_slots(10, PLAN, PHY) == 1919

    def test_back_to_back_at_full_duty_cycle(self):
        t = airtime(7, 50, PHY)
        plan = SlotPlanParams(ping_slot_s=t, duty_cycle_pct=100.0)
        assert silent_slots(7, plan, PHY) == 1

    @given(
        sf=st.integers(min_value=7, max_value=12),
        tau=st.floats(min_value=0.1, max_value=100.0),
        b=st.integers(min_value=1, max_value=200),
    )
    @settings(max_examples=200, deadline=None)
    def test_duty_cycle_bound_holds(self, sf, tau, b):
        plan = SlotPlanParams(duty_cycle_pct=tau, fragment_bytes=b)
        w_p = silent_slots(sf, plan, PHY)
        t = airtime(sf, b, PHY)
        assert t / (w_p * plan.ping_slot_s) <= tau / 100.0 + 1e-12


class TestWindowSize:
    def test_s_star_binds(self):
        assert d2d_window_size(7674, 77, 20, 20) == 20

    def test_slot_budget_binds(self):
        assert d2d_window_size(100, 60, 20, 20) == 2

    def test_no_silent_slots_gives_empty_window(self):
        assert d2d_window_size(100, 100, 20, 20) == 0


class TestSfProgression:
    @pytest.mark.parametrize(
        "n,expected", [(0, 7), (299, 7), (300, 8), (10_000, 12)]
    )
    def test_step_rule(self, n, expected):
        assert downlink_sf_at(n, 7, 300) == expected

    def test_fixed_sf_never_steps(self):
        assert downlink_sf_at(10_000, 9, None) == 9

    def test_rejects_negative_index(self):
        with pytest.raises(ValueError):
            downlink_sf_at(-1, 7, 300)


class TestSlotPlan:
    def test_start_slot_recurrence(self):
        plan = build_slot_plan(1000, PLAN, PHY)
        for n in range(plan.n_frames - 1):
            assert plan.start_slot[n + 1] - plan.start_slot[n] == plan.w_p[n]

    def test_window_never_encroaches(self):
        plan = build_slot_plan(2000, PLAN, PHY)
        assert (plan.g_p + plan.s_d2d * plan.e_p <= plan.w_p).all()

    def test_sf_boundary_matches_progression(self):
        plan = build_slot_plan(400, PLAN, PHY)
        assert plan.sf[299] == 7
        assert plan.sf[300] == 8

    def test_gateway_duty_cycle_per_interval(self):
        plan = build_slot_plan(2000, PLAN, PHY)
        for n in range(plan.n_frames):
            on_fraction = plan.airtime_s[n] / (plan.w_p[n] * PLAN.ping_slot_s)
            assert on_fraction <= PLAN.duty_cycle_pct / 100.0 + 1e-12

    def test_fixed_sf_plan_is_flat(self):
        plan = build_slot_plan(50, SlotPlanParams(start_sf=12, frames_per_sf=None), PHY)
        assert set(plan.sf.tolist()) == {12}

    def test_csv_dump(self):
        plan = build_slot_plan(5, PLAN, PHY)
        buf = io.StringIO()
        plan.write_csv(buf)
        lines = buf.getvalue().strip().splitlines()
        assert lines[0] == "n,sf,G_p,W_p,E_p,S_D2D,start_slot"
        assert len(lines) == 6
        assert lines[1].startswith("0,7,4,")

    @given(
        tau=st.floats(min_value=0.2, max_value=100.0),
        start_sf=st.integers(min_value=7, max_value=12),
        w=st.one_of(st.none(), st.integers(min_value=1, max_value=50)),
        sf_d2d=st.integers(min_value=7, max_value=12),
        t_p=st.floats(min_value=0.005, max_value=2.0),
    )
    @settings(max_examples=100, deadline=None)
    def test_plan_invariants_hold_for_arbitrary_params(
        self, tau, start_sf, w, sf_d2d, t_p
    ):
        plan_params = SlotPlanParams(
            ping_slot_s=t_p, duty_cycle_pct=tau, start_sf=start_sf,
            frames_per_sf=w, sf_d2d=sf_d2d,
        )
        plan = build_slot_plan(120, plan_params, PHY)
        assert (plan.g_p + plan.s_d2d * plan.e_p <= plan.w_p).all()
        assert (plan.s_d2d <= plan_params.max_window_superslots).all()
        assert (plan.s_d2d >= 0).all()
        assert (plan.start_slot[1:] - plan.start_slot[:-1] == plan.w_p[:-1]).all()

import math

import pytest
from hypothesis import given, strategies as st

from coexsim.medium import FrameKind, PathLossModel
from coexsim.reservation import (CTS_POWER_CEILING_DBM, CTS_POWER_FLOOR_DBM, NAV_FIELD_CAP_US,
                                 EvalState, InterfererEstimate, PacingState,
                                 QosTarget, build_cts_train, estimate_interferers,
                                 evaluate_performance, reservation_power,
                                 update_pacing)

LOGD = PathLossModel(kind="log-distance", exponent=3.0, reference_loss_db=40.05)


class TestCtsTrain:
    def test_single_chunk_under_cap(self):
        chunks = build_cts_train(10_000, 1.0, 0, "coord", 2412.0,
                                 min_reservation_us=2000)
        assert len(chunks) == 1
        assert chunks[0].nav_duration_us == 10_000
        assert chunks[0].kind is FrameKind.CTS

    def test_cap_chunking(self):
        chunks = build_cts_train(50_000, 1.0, 0, "coord", 2412.0)
        assert [c.nav_duration_us for c in chunks] == [32_767, 17_233]

    def test_below_threshold_sends_nothing(self):
        assert build_cts_train(1000, 1.0, 0, "coord", 2412.0,
                               min_reservation_us=2000) == []

    def test_non_positive_reservation_rejected(self):
        with pytest.raises(ValueError):
            build_cts_train(0, 1.0, 0, "coord", 2412.0)

    def test_coverage_is_gapless(self):
        chunks = build_cts_train(100_000, 1.0, 500, "coord", 2412.0)
        covered_until = chunks[0].end_us
        for c in chunks:
            # every chunk finishes flying before the running NAV coverage lapses
            assert c.end_us <= covered_until
            covered_until = max(covered_until, c.end_us + c.nav_duration_us)
        assert covered_until == chunks[0].end_us + 100_000

    @given(st.integers(min_value=1, max_value=500_000),
           st.integers(min_value=0, max_value=5000))
    def test_durations_sum_exactly_and_respect_cap(self, reservation, threshold):
        chunks = build_cts_train(reservation, 1.0, 0, "coord", 2412.0,
                                 min_reservation_us=threshold)
        if reservation < threshold:
            assert chunks == []
            return
        assert sum(c.nav_duration_us for c in chunks) == reservation
        assert all(c.nav_duration_us <= NAV_FIELD_CAP_US for c in chunks)
        # follow-up chunks take off exactly when the previous duration elapses
        for prev, nxt in zip(chunks, chunks[1:]):
            assert nxt.start_us == prev.start_us + prev.nav_duration_us


class TestInterfererEstimate:
    def test_empty_neighborhood(self):
        est = estimate_interferers([], 1_000_000, 20.0, LOGD)
        assert est == InterfererEstimate(0, 0.0)

    def test_counts_distinct_sources(self):
        heard = [("sta1", -29.1), ("sta2", -32.0), ("sta1", -29.5)]
        est = estimate_interferers(heard, 1_000_000, 20.0, LOGD)
        assert est.active_systems == 2

    def test_reach_inverts_weakest_power(self):
        # oracle: rx of a 1 dBm frame at 3 m under n=3 is about -53.4 dBm
        reach = estimate_interferers([("sta", -53.4)], 1_000_000, 1.0, LOGD).max_distance_m
        assert reach == pytest.approx(3.0, abs=0.05)
        # same overheard level attributed to a 20 dBm talker puts it further out
        far = estimate_interferers([("sta", -53.4)], 1_000_000, 20.0, LOGD).max_distance_m
        assert far == pytest.approx(10 ** ((73.4 - 40.05) / 30.0), abs=0.05)


class TestPacing:
    def test_equal_share_goals(self):
        s = update_pacing(PacingState(), InterfererEstimate(2, 3.0), 0.33, 0)
        assert s.utilization_goal == pytest.approx(1 / 3)
        s = update_pacing(PacingState(), InterfererEstimate(0, 0.0), 0.9, 0)
        assert s.utilization_goal == 1.0

    def test_undershoot_halves_interval(self):
        state = PacingState(utilization_goal=0.33, claim_interval_us=8000)
        out = update_pacing(state, InterfererEstimate(2, 3.0), 0.20, 0,
                            delta=0.02, interval_min_us=1000)
        assert out.claim_interval_us == 4000

    def test_overshoot_doubles_interval(self):
        state = PacingState(claim_interval_us=8000)
        out = update_pacing(state, InterfererEstimate(2, 3.0), 0.60, 0)
        assert out.claim_interval_us == 16000

    def test_dead_band_holds(self):
        state = PacingState(claim_interval_us=8000)
        out = update_pacing(state, InterfererEstimate(2, 3.0), 1 / 3, 0)
        assert out.claim_interval_us == 8000

    @given(st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=1, max_size=64),
           st.integers(min_value=0, max_value=5))
    def test_interval_stays_bounded(self, shares, systems):
        state = PacingState(claim_interval_us=8000)
        est = InterfererEstimate(systems, 2.0)
        for share in shares:
            state = update_pacing(state, est, share, 0,
                                  interval_min_us=1000, interval_max_us=64_000)
            assert 1000 <= state.claim_interval_us <= 64_000

    def test_bad_share_rejected(self):
        with pytest.raises(ValueError):
            update_pacing(PacingState(), InterfererEstimate(), 1.5, 0)


class TestReservationPower:
    def test_sized_to_reach(self):
        level = reservation_power(3.0, -82.0, LOGD, margin_db=3.0)
        oracle = -82.0 + (40.05 + 30 * math.log10(3.0)) + 3.0
        assert level == pytest.approx(oracle)
        assert level == pytest.approx(-24.6, abs=0.1)

    def test_nothing_to_silence_floors(self):
        assert reservation_power(0.0, -82.0, LOGD) == CTS_POWER_FLOOR_DBM

    def test_distant_reach_clamps_to_ceiling(self):
        assert reservation_power(1000.0, -82.0, LOGD) == CTS_POWER_CEILING_DBM

    @given(st.floats(min_value=0.1, max_value=2000.0),
           st.floats(min_value=1.01, max_value=8.0))
    def test_monotone_in_reach(self, reach, factor):
        lo = reservation_power(reach, -82.0, LOGD)
        hi = reservation_power(reach * factor, -82.0, LOGD)
        assert hi >= lo

    def test_negative_reach_rejected(self):
        with pytest.raises(ValueError):
            reservation_power(-1.0, -82.0, LOGD)


class TestPerformanceGate:
    def test_quiet_medium_keeps_cts_off(self):
        state = evaluate_performance(EvalState(), retx_in_window=0,
                                     throughput_bytes_per_s=1e6, mean_delay_us=100.0,
                                     now_us=0)
        assert not state.cts_enabled

    def test_retransmission_burst_enables(self):
        state = evaluate_performance(EvalState(), retx_in_window=5,
                                     throughput_bytes_per_s=250_000.0,
                                     mean_delay_us=100.0, now_us=1_000_000,
                                     enable_retx_threshold=3)
        assert state.cts_enabled
        assert state.throughput_before == 250_000.0
        assert state.enabled_at_us == 1_000_000

    def test_no_improvement_disables_with_hold(self):
        on = EvalState(cts_enabled=True, throughput_before=1_000_000.0,
                       enabled_at_us=0)
        out = evaluate_performance(on, retx_in_window=0,
                                   throughput_bytes_per_s=900_000.0,
                                   mean_delay_us=0.0, now_us=1_000_000,
                                   eval_window_us=1_000_000, hold_us=2_000_000)
        assert not out.cts_enabled
        assert out.hold_until_us == 3_000_000

    def test_improvement_keeps_cts_on(self):
        on = EvalState(cts_enabled=True, throughput_before=250_000.0, enabled_at_us=0)
        out = evaluate_performance(on, retx_in_window=0,
                                   throughput_bytes_per_s=600_000.0,
                                   mean_delay_us=0.0, now_us=1_500_000)
        assert out.cts_enabled
        assert out.throughput_after == 600_000.0

    def test_hold_blocks_reenable(self):
        held = EvalState(cts_enabled=False, hold_until_us=5_000_000)
        out = evaluate_performance(held, retx_in_window=10,
                                   throughput_bytes_per_s=0.0, mean_delay_us=0.0,
                                   now_us=4_000_000)
        assert not out.cts_enabled
        out = evaluate_performance(held, retx_in_window=10,
                                   throughput_bytes_per_s=0.0, mean_delay_us=0.0,
                                   now_us=5_000_000)
        assert out.cts_enabled

    def test_qos_violation_is_flagged(self):
        qos = QosTarget(min_throughput_bytes_per_s=500_000,
                        max_mean_delay_us=10_000.0)
        state = EvalState(cts_enabled=True, qos=qos, enabled_at_us=0,
                          throughput_before=0.0)
        out = evaluate_performance(state, retx_in_window=0,
                                   throughput_bytes_per_s=400_000.0,
                                   mean_delay_us=500.0, now_us=100_000)
        assert out.qos_violated
        out = evaluate_performance(state, retx_in_window=0,
                                   throughput_bytes_per_s=600_000.0,
                                   mean_delay_us=500.0, now_us=100_000)
        assert not out.qos_violated

import math

import numpy as np
import pytest

from sliptrack.metrics import (
    EpisodeTrace,
    RewardCoeffs,
    StepRecord,
    aggregate_metrics,
    compute_metrics,
    is_slipping,
    step_reward,
)


def rec(t, e=0.0, dtheta=0.0, dv=0.0, slip_dv=0.0, slip_domega=0.0,
        omega_r=0.0, omega_l=0.0, reward=0.0):
    return StepRecord(
        t=t, e=e, dtheta=dtheta, dv=dv, slip_dv=slip_dv,
        slip_domega=slip_domega, omega_r=omega_r, omega_l=omega_l,
        reward=reward, x=0.0, y=0.0, yaw=0.0, v=0.0, omega=0.0, mu=0.9,
        k_stanley=2.0, k_speed=2.0,
    )


def test_step_reward_hand_value():
    coeffs = RewardCoeffs()
    # -20*0.01 - 1*0.04 - 1*0.09 = -0.33
    assert step_reward(0.1, 0.2, 0.3, coeffs) == pytest.approx(-0.33, abs=1e-12)
    assert step_reward(0.0, 0.0, 0.0, coeffs) == 0.0
    # sign of the errors does not matter
    assert step_reward(-0.1, -0.2, -0.3, coeffs) == step_reward(0.1, 0.2, 0.3, coeffs)


def test_step_reward_custom_coeffs():
    coeffs = RewardCoeffs(r_dist=-2.0, r_ang=-3.0, r_speed=-4.0)
    assert step_reward(1.0, 1.0, 1.0, coeffs) == pytest.approx(-9.0, abs=1e-12)


def test_is_slipping_thresholds_are_strict():
    assert not is_slipping(0.7, 0.0)
    assert not is_slipping(-0.7, 0.0)
    assert not is_slipping(0.0, 3.0)
    assert not is_slipping(0.0, -3.0)
    assert is_slipping(math.nextafter(0.7, 2.0), 0.0)
    assert is_slipping(0.0, math.nextafter(3.0, 4.0))
    assert is_slipping(-0.71, 0.0)
    assert is_slipping(0.0, -3.01)
    assert is_slipping(5.0, 5.0)
    assert not is_slipping(0.0, 0.0)


def test_is_slipping_custom_thresholds():
    assert is_slipping(0.2, 0.0, dv_threshold=0.1)
    assert not is_slipping(0.2, 0.0, dv_threshold=0.3)


def hand_trace():
    # three steps, steps 2 and 3 slip; commands chosen for easy norms
    coeffs = RewardCoeffs()
    r1 = step_reward(0.1, 0.2, 0.3, coeffs)
    r2 = step_reward(-0.2, 0.1, -0.1, coeffs)
    r3 = step_reward(0.3, -0.3, 0.2, coeffs)
    records = [
        rec(1, e=0.1, dtheta=0.2, dv=0.3, omega_r=1.0, omega_l=2.0, reward=r1),
        rec(2, e=-0.2, dtheta=0.1, dv=-0.1, slip_dv=0.8,
            omega_r=3.0, omega_l=4.0, reward=r2),
        rec(3, e=0.3, dtheta=-0.3, dv=0.2, slip_domega=3.5,
            omega_r=3.0, omega_l=1.0, reward=r3),
    ]
    return EpisodeTrace.from_records(records, reached_goal=True)


def test_compute_metrics_hand_oracle():
    m = compute_metrics(hand_trace(), gamma=0.99)
    # rewards: -0.33, -0.82, -1.93 (each -20 e^2 - dth^2 - dv^2)
    assert m.avg_reward == pytest.approx(-3.08 / 3.0, abs=1e-12)
    assert m.avg_lat == pytest.approx(0.2, abs=1e-12)
    assert m.avg_dv == pytest.approx(0.2, abs=1e-12)
    # command deltas: |(2,2)| = sqrt(8) into step 2, |(0,-3)| = 3 into step 3
    assert m.avg_du == pytest.approx((math.sqrt(8.0) + 3.0) / 3.0, abs=1e-12)
    assert m.e_max == pytest.approx(0.3, abs=1e-12)
    assert m.slip_step_count == 2
    assert m.avg_lat_slip == pytest.approx(0.25, abs=1e-12)
    assert m.avg_dv_slip == pytest.approx(0.15, abs=1e-12)
    assert m.avg_du_slip == pytest.approx((math.sqrt(8.0) + 3.0) / 2.0, abs=1e-12)
    assert m.disc_return == pytest.approx(
        -0.33 + 0.99 * -0.82 + 0.9801 * -1.93, abs=1e-12
    )
    assert m.n_steps == 3


def test_metrics_no_slip_gives_none():
    records = [rec(1, e=0.1, reward=-0.2), rec(2, e=0.2, reward=-0.8)]
    m = compute_metrics(EpisodeTrace.from_records(records, False))
    assert m.slip_step_count == 0
    assert m.avg_lat_slip is None
    assert m.avg_dv_slip is None
    assert m.avg_du_slip is None


def test_metrics_slip_on_first_step_has_no_command_delta():
    # a slipping first step contributes zero effort (no predecessor)
    records = [
        rec(1, e=0.1, slip_dv=0.9, omega_r=5.0, omega_l=5.0),
        rec(2, e=0.1, omega_r=5.0, omega_l=5.0),
    ]
    m = compute_metrics(EpisodeTrace.from_records(records, False))
    assert m.slip_step_count == 1
    assert m.avg_du_slip == 0.0
    assert m.avg_du == 0.0


def test_metrics_single_step_trace():
    m = compute_metrics(EpisodeTrace.from_records([rec(1, e=0.5, reward=-5.0)], False))
    assert m.avg_du == 0.0
    assert m.avg_reward == -5.0
    assert m.disc_return == -5.0
    assert m.e_max == 0.5


def test_metrics_effort_divides_by_step_count():
    # two steps, one command change of norm 5: avg is 5/2, not 5/1
    records = [
        rec(1, omega_r=0.0, omega_l=0.0),
        rec(2, omega_r=3.0, omega_l=4.0),
    ]
    m = compute_metrics(EpisodeTrace.from_records(records, False))
    assert m.avg_du == pytest.approx(2.5, abs=1e-12)


def test_empty_trace_rejected():
    with pytest.raises(ValueError):
        EpisodeTrace.from_records([], False)


def test_jsonl_round_trip(tmp_path):
    trace = hand_trace()
    path = tmp_path / "trace.jsonl"
    trace.save_jsonl(path)
    lines = path.read_text().splitlines()
    assert len(lines) == 4  # meta + 3 steps
    loaded = EpisodeTrace.load_jsonl(path)
    assert loaded.reached_goal == trace.reached_goal
    assert np.array_equal(loaded.t, trace.t)
    for name in ("e", "dtheta", "dv", "slip_dv", "slip_domega",
                 "omega_r", "omega_l", "reward", "mu", "k_stanley"):
        assert np.array_equal(getattr(loaded, name), getattr(trace, name))
    # metrics computed on the reloaded trace are bit-identical
    a = compute_metrics(trace)
    b = compute_metrics(loaded)
    assert a == b


def test_aggregate_metrics_means_and_none_handling():
    m1 = compute_metrics(hand_trace())
    records = [rec(1, e=0.4, reward=-1.0), rec(2, e=0.6, reward=-3.0)]
    m2 = compute_metrics(EpisodeTrace.from_records(records, False))
    agg = aggregate_metrics([m1, m2])
    assert agg["avg_lat"] == pytest.approx((m1.avg_lat + m2.avg_lat) / 2.0, abs=1e-15)
    assert agg["e_max"] == pytest.approx((0.3 + 0.6) / 2.0, abs=1e-12)
    # slip metrics only average the episodes that slipped
    assert agg["avg_lat_slip"] == pytest.approx(m1.avg_lat_slip, abs=1e-15)
    assert agg["slip_step_count"] == 2
    agg_none = aggregate_metrics([m2])
    assert agg_none["avg_lat_slip"] is None
    with pytest.raises(ValueError):
        aggregate_metrics([])

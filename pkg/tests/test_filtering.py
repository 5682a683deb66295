import math

import numpy as np
import pytest

from headzoom.filtering import (
    ACCEPT,
    HOLD,
    FilterBank,
    KalmanChannel,
    ParamCurve,
    builtin_schedule,
    eval_curve,
    filter_pose,
    guard_sample,
    update_channel,
)
from headzoom.geometry import HeadPose, Orientation, Vec3

# schedule samples at x = 0, 0.25, 0.5, 0.75, 1
TILT_Q = [0.01, 0.01, 0.01, 0.01, 0.01]
PARALLEL_Q = [0.01, 0.01, 0.01, 0.00505, 1e-4]
ADAPTIVE_R = [1e-4, 1e-4, 1e-4, 0.05005, 0.1]
XS = [0.0, 0.25, 0.5, 0.75, 1.0]


def pose(x=0.0, y=1.6, z=0.0, yaw=0.0, pitch=0.0, roll=0.0, t=0.0):
    return HeadPose(t, Vec3(x, y, z), Orientation(yaw, pitch, roll))


def test_builtin_schedule_tilt_values():
    s = builtin_schedule("tilt")
    for x, q, r in zip(XS, TILT_Q, ADAPTIVE_R):
        got_q, got_r = s.sample(x)
        assert abs(got_q - q) < 1e-12
        assert abs(got_r - r) < 1e-12


def test_builtin_schedule_parallel_values():
    s = builtin_schedule("parallel")
    for x, q, r in zip(XS, PARALLEL_Q, ADAPTIVE_R):
        got_q, got_r = s.sample(x)
        assert abs(got_q - q) < 1e-12
        assert abs(got_r - r) < 1e-12


def test_builtin_schedule_static_is_flat():
    s = builtin_schedule("static")
    for x in np.linspace(0, 1, 11):
        q, r = s.sample(float(x))
        assert q == 0.01 and r == 1e-4


def test_builtin_schedule_rejects_unknown_mode():
    with pytest.raises(ValueError):
        builtin_schedule("orbit")


def test_eval_curve_boundaries_and_clamping():
    c = ParamCurve(((0.0, 2.0), (0.4, 1.0), (1.0, 4.0)))
    assert eval_curve(c, 0.0) == 2.0
    assert eval_curve(c, -5.0) == 2.0
    assert eval_curve(c, 1.0) == 4.0
    assert eval_curve(c, 7.0) == 4.0
    assert eval_curve(c, 0.2) == pytest.approx(1.5)
    assert eval_curve(c, 0.7) == pytest.approx(2.5)


def test_eval_curve_tilt_r_midpoints():
    r = builtin_schedule("tilt").r_curve
    assert eval_curve(r, 0.5) == pytest.approx(1e-4, abs=1e-15)
    assert eval_curve(r, 0.75) == pytest.approx(0.05005, abs=1e-12)


def test_builtin_curves_are_continuous():
    for mode in ("static", "parallel", "tilt"):
        s = builtin_schedule(mode)
        for curve in (s.q_curve, s.r_curve):
            xs = np.linspace(0.0, 1.0, 2001)
            ys = np.array([curve.eval(float(x)) for x in xs])
            jumps = np.abs(np.diff(ys))
            # a continuous piecewise-linear curve moves at most slope*dx
            assert jumps.max() < 0.25 * (xs[1] - xs[0]) + 1e-12


def test_param_curve_validation():
    with pytest.raises(ValueError):
        ParamCurve(())
    with pytest.raises(ValueError):
        ParamCurve(((0.0, 1.0), (0.0, 2.0)))
    with pytest.raises(ValueError):
        ParamCurve(((0.0, 1.0), (0.5, 0.0)))


def test_channel_seeds_on_first_sample():
    ch = KalmanChannel()
    assert update_channel(ch, 2.0, 0.01, 1e-4) == 2.0
    assert ch.initialized


def test_channel_constant_input_converges_exactly():
    ch = KalmanChannel()
    update_channel(ch, 0.0, 0.01, 1e-4)  # seed away from the target
    last = 0.0
    for _ in range(100):
        last = update_channel(ch, 1.0, 0.01, 1e-4)
    assert abs(last - 1.0) < 1e-6


def test_heavier_r_smooths_more_slowly():
    def steps_to_reach(q, r, threshold=0.9, limit=10_000):
        ch = KalmanChannel()
        for _ in range(200):  # settle to the steady-state gain first
            update_channel(ch, 0.0, q, r)
        for i in range(1, limit):
            if update_channel(ch, 1.0, q, r) >= threshold:
                return i
        return limit

    slow = steps_to_reach(q=1e-4, r=0.1)
    fast = steps_to_reach(q=0.01, r=1e-4)
    assert slow > fast


def test_covariance_and_gain_stay_bounded():
    rng = np.random.default_rng(17)
    for _ in range(50):
        q = float(rng.uniform(1e-5, 0.1))
        r = float(rng.uniform(1e-5, 0.5))
        ch = KalmanChannel()
        update_channel(ch, 0.0, q, r)
        for _ in range(200):
            p_pred = ch.error_covariance + q
            k = p_pred / (p_pred + r)
            assert 0.0 < k < 1.0
            update_channel(ch, float(rng.normal()), q, r)
            assert 0.0 < ch.error_covariance <= 1.0 + q


def test_angular_innovation_wraps_across_pi():
    ch = KalmanChannel(angular=True)
    z = 3.1
    for _ in range(200):
        est = update_channel(ch, z, 0.01, 1e-4)
        assert abs(est) > 3.0  # never swings through zero
        z = -z


def test_filter_pose_first_sample_passthrough():
    bank = FilterBank(builtin_schedule("parallel"))
    raw = pose(z=0.12, yaw=0.3)
    out = filter_pose(bank, raw, 0.5)
    assert out == raw


def make_noisy_hold(rng, n, sigma, z0=0.0):
    samples = []
    for i in range(n):
        nx, ny, nz = rng.normal(0.0, sigma, size=3)
        samples.append(pose(x=nx, y=1.6 + ny, z=z0 + nz, t=i * 1000.0 / 72.0))
    return samples


def pooled_position_std(samples):
    xs = np.array([[s.position.x, s.position.y, s.position.z] for s in samples])
    return float(np.sqrt(np.mean(np.var(xs, axis=0))))


def filtered_run(samples, mode, x):
    bank = FilterBank(builtin_schedule(mode))
    return [filter_pose(bank, s, x) for s in samples]


def test_jitter_suppression_matches_steady_state_analysis():
    # Fixed pose + 2 mm noise filtered at x=0.9 (parallel schedule).
    # q=0.00208, r=0.08002 there, so steady-state gain K=0.14875 and the
    # stationary output/input position std ratio is sqrt(K/(2-K)) = 0.2835.
    rng = np.random.default_rng(0)
    raws = make_noisy_hold(rng, 500, 0.002)
    outs = filtered_run(raws, "parallel", 0.9)
    ratio = pooled_position_std(outs) / pooled_position_std(raws)
    assert ratio == pytest.approx(0.2835, abs=0.06)
    assert ratio < 1.0 / 3.0


def test_jitter_suppression_is_deterministic():
    raws = make_noisy_hold(np.random.default_rng(123), 300, 0.002)
    a = filtered_run(raws, "parallel", 0.9)
    b = filtered_run(raws, "parallel", 0.9)
    assert a == b


def test_tilt_more_forward_lean_means_lower_variance():
    raws = make_noisy_hold(np.random.default_rng(7), 500, 0.002)
    high = filtered_run(raws, "tilt", 0.95)
    low = filtered_run(raws, "tilt", 0.2)
    assert pooled_position_std(high) < pooled_position_std(low)


def test_guard_accepts_normal_motion():
    bank = FilterBank(builtin_schedule("parallel"))
    bank.step(pose(t=0.0), 0.0, 0.5)
    nxt = pose(z=0.01, t=11.0)
    assert guard_sample(bank, nxt, 0.011) == ACCEPT


def test_guard_holds_teleport():
    bank = FilterBank(builtin_schedule("parallel"))
    bank.step(pose(t=0.0), 0.0, 0.5)
    nxt = pose(z=0.5, t=11.0)
    assert guard_sample(bank, nxt, 0.011) == HOLD


def test_guard_holds_non_finite():
    bank = FilterBank(builtin_schedule("parallel"))
    bank.step(pose(t=0.0), 0.0, 0.5)
    bad = pose(t=11.0, x=math.nan)
    assert guard_sample(bank, bad, 0.011) == HOLD
    bad = HeadPose(22.0, Vec3(0, 1.6, 0), Orientation(math.inf, 0, 0))
    assert guard_sample(bank, bad, 0.011) == HOLD


def test_guard_holds_stream_gap():
    bank = FilterBank(builtin_schedule("parallel"))
    bank.step(pose(t=0.0), 0.0, 0.5)
    assert guard_sample(bank, pose(t=600.0), 0.6) == HOLD


def test_hold_leaves_filter_state_untouched():
    bank = FilterBank(builtin_schedule("parallel"))
    bank.step(pose(t=0.0, z=0.1), 0.0, 0.5)
    before = {k: (c.estimate, c.error_covariance) for k, c in bank.channels.items()}
    decision, out = bank.step(pose(t=11.0, x=math.nan), 0.011, 0.5)
    assert decision == HOLD
    assert out.position == Vec3(0.0, 1.6, 0.1)
    after = {k: (c.estimate, c.error_covariance) for k, c in bank.channels.items()}
    assert before == after
    assert bank.hold_active


def test_hold_then_recover_equals_deleting_the_sample():
    clean = [pose(t=i * 11.0, z=0.001 * i) for i in range(10)]
    glitched = list(clean)
    glitched[5] = pose(t=55.0, x=math.nan)

    bank_a = FilterBank(builtin_schedule("parallel"))
    outs_a = []
    for i, s in enumerate(clean):
        if i == 5:
            continue
        outs_a.append(bank_a.step(s, 0.011, 0.5)[1])

    bank_b = FilterBank(builtin_schedule("parallel"))
    outs_b = []
    for s in glitched:
        decision, out = bank_b.step(s, 0.011, 0.5)
        if decision == ACCEPT:
            outs_b.append(out)

    assert outs_a == outs_b


def test_schedule_table_export():
    s = builtin_schedule("tilt")
    text = s.r_curve.table()
    rows = [line.split("\t") for line in text.strip().splitlines()]
    assert [float(r[0]) for r in rows] == [0.0, 0.5, 1.0]
    assert [float(r[1]) for r in rows] == [1e-4, 1e-4, 0.1]

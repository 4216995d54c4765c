"""Integrator: stepping, forcing programs, impulses, sampling, export."""

import math

import numpy as np
import pytest

from slowfast import (
    ControlPolicy,
    ForcingProgram,
    Impulse,
    IntegratorConfig,
    ModelParams,
    NoiseSpec,
    NonFiniteState,
    Pulse,
    ScheduleConflict,
    SystemState,
    forcing_at,
    realize_noise,
    region_membership,
    simulate,
    step,
)
from slowfast.integrator import CSV_HEADER
from slowfast.scenarios import make_fig4, sample_strata
from helpers import params_fig4, params_fig5, params_fig7


# ------------------------------------------------------------------- step


def test_equilibrium_is_exact_fixed_point():
    p = params_fig4()
    s = SystemState(t=0.0, x=0.0, y=0.0, sigma=p.c1)
    for dt in (1e-3, 0.05, 1.0):
        out = step(s, p, dt=dt)
        assert (out.x, out.y, out.sigma) == (0.0, 0.0, p.c1)


def test_quiescent_regime_decays_monotonically():
    """Fixed sigma below the fold level: the radius can only shrink."""
    p = ModelParams(omega=1.0, a=1.0, b=1.0, c1=-1.5, c2=-0.7, c3=0.5, epsilon=0.0)
    s = SystemState(t=0.0, x=0.3, y=0.4, sigma=-1.5)
    prev = s.squared_radius
    for _ in range(2000):
        s = step(s, p, dt=5e-3)
        assert s.squared_radius < prev
        prev = s.squared_radius
    assert prev < 1e-6


def test_step_rejects_bad_dt():
    p = params_fig4()
    s = SystemState(t=0.0, x=0.0, y=0.0, sigma=p.c1)
    with pytest.raises(ValueError):
        step(s, p, dt=0.0)


def test_slow_variable_relaxes_to_c1():
    """From sigma(0) = -0.8 the slow state falls monotonically to c1."""
    p = params_fig4()
    res = simulate(
        SystemState(t=0.0, x=0.0, y=0.0, sigma=-0.8),
        p,
        cfg=IntegratorConfig(dt=1e-3, horizon=300.0, sample_stride=100),
    )
    sig = res.trajectory.sigma
    assert np.all(np.diff(sig) <= 0.0)
    assert abs(sig[-1] - p.c1) < 1e-4


@pytest.mark.parametrize(
    "sigma0,increasing",
    [(-0.8, False), (-0.5, True), (0.3, True), (0.6, False)],
)
def test_slow_variable_monotone_between_targets(sigma0, increasing):
    p = params_fig4()
    res = simulate(
        SystemState(t=0.0, x=0.0, y=0.0, sigma=sigma0),
        p,
        cfg=IntegratorConfig(dt=1e-3, horizon=50.0, sample_stride=50),
    )
    diffs = np.diff(res.trajectory.sigma)
    assert np.all(diffs >= 0.0) if increasing else np.all(diffs <= 0.0)


# ------------------------------------------------------------ forcing_at


def test_forcing_empty_program():
    assert forcing_at(5.0, ForcingProgram()) == (0.0, 0.0, 0.0)


def test_forcing_pulse_window():
    fp = ForcingProgram(pulses=(Pulse("x", start=10.0, width=0.2, amplitude=0.5),))
    assert forcing_at(10.1, fp) == (0.5, 0.0, 0.0)
    assert forcing_at(10.3, fp) == (0.0, 0.0, 0.0)
    assert forcing_at(9.9, fp) == (0.0, 0.0, 0.0)


def test_forcing_pulses_sum_per_channel():
    fp = ForcingProgram(
        pulses=(
            Pulse("x", 0.0, 1.0, 0.5),
            Pulse("x", 0.5, 1.0, 0.25),
            Pulse("sigma", 0.0, 1.0, -1.0),
        )
    )
    assert forcing_at(0.75, fp) == (0.75, 0.0, -1.0)


def test_pulse_validation():
    with pytest.raises(ValueError):
        Pulse("z", 0.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        Pulse("x", 0.0, 0.0, 1.0)


def test_noise_table_is_seeded_and_scaled():
    spec = NoiseSpec(channels=("x",), std=0.2, seed=42)
    a = realize_noise(spec, 50_000, 1e-3)
    b = realize_noise(spec, 50_000, 1e-3)
    assert np.array_equal(a, b)
    assert np.all(a[:, 1] == 0.0) and np.all(a[:, 2] == 0.0)
    # std/sqrt(dt) = 0.2/sqrt(1e-3) ~ 6.32
    assert a[:, 0].std() == pytest.approx(0.2 / math.sqrt(1e-3), rel=0.02)


# ---------------------------------------------------------------- simulate


def test_constant_trajectory_at_oscillatory_equilibrium():
    p = params_fig4()
    res = simulate(
        SystemState(t=0.0, x=0.0, y=0.0, sigma=p.c3),
        p,
        cfg=IntegratorConfig(dt=1e-3, horizon=5.0, sample_stride=10),
    )
    assert np.all(res.trajectory.states[:, 0] == 0.0)
    assert np.all(res.trajectory.states[:, 2] == p.c3)


def test_trajectory_sampling_layout():
    p = params_fig4()
    cfg = IntegratorConfig(dt=1e-3, horizon=2.0, sample_stride=25)
    initial = SystemState(t=0.0, x=0.1, y=0.0, sigma=-0.8)
    traj = simulate(initial, p, cfg=cfg).trajectory
    assert len(traj) == 2000 // 25 + 1
    dts = np.diff(traj.t)
    assert np.allclose(dts, 25e-3, rtol=0, atol=1e-12)
    assert traj.t[0] == 0.0
    assert (traj.states[0] == (0.1, 0.0, -0.8)).all()
    # stride divides the horizon here, so the last sample is the final state
    assert traj.final_state.x == traj.states[-1, 0]


def test_impulse_applied_as_exact_jump():
    spec = make_fig4()
    res = simulate(spec.initial, spec.params, spec.forcing, spec.cfg)
    traj = res.trajectory
    i40 = int(np.searchsorted(traj.t, 40.0))
    assert traj.t[i40] == pytest.approx(40.0, abs=1e-12)
    # resting exactly at the equilibrium before the kick
    assert traj.states[i40 - 1, 0] == 0.0
    assert traj.states[i40, 0] == pytest.approx(0.1, abs=1e-15)
    assert traj.states[i40, 1] == pytest.approx(0.1, abs=1e-15)
    assert traj.states[i40, 2] == pytest.approx(spec.params.c2 + 0.02, abs=1e-14)


def test_impulse_validation():
    p = params_fig4()
    cfg = IntegratorConfig(dt=1e-3, horizon=10.0)
    init = SystemState(t=0.0, x=0.0, y=0.0, sigma=p.c1)
    with pytest.raises(ValueError):
        simulate(init, p, ForcingProgram(impulses=(Impulse(time=11.0, dx=1.0),)), cfg)
    with pytest.raises(ValueError):
        simulate(
            init,
            p,
            ForcingProgram(impulses=(Impulse(time=5.0), Impulse(time=5.0))),
            cfg,
        )


def test_impulse_on_pulse_edge_conflicts():
    p = params_fig4()
    cfg = IntegratorConfig(dt=1e-3, horizon=10.0)
    init = SystemState(t=0.0, x=0.0, y=0.0, sigma=p.c1)
    fp = ForcingProgram(
        pulses=(Pulse("x", 2.0, 1.0, 0.5),),
        impulses=(Impulse(time=3.0, dx=0.1),),
    )
    with pytest.raises(ScheduleConflict):
        simulate(init, p, fp, cfg)


def test_pulse_recorded_in_forcing_column():
    p = params_fig4()
    fp = ForcingProgram(pulses=(Pulse("y", 1.0, 0.5, 0.3),))
    cfg = IntegratorConfig(dt=1e-3, horizon=3.0, sample_stride=100)
    traj = simulate(
        SystemState(t=0.0, x=0.0, y=0.0, sigma=p.c1), p, fp, cfg
    ).trajectory
    inside = (traj.t >= 1.0) & (traj.t < 1.5)
    assert np.all(traj.forcing[inside, 1] == 0.3)
    assert np.all(traj.forcing[~inside, 1] == 0.0)


def test_nonfinite_abort_reports_last_good_state():
    p = params_fig4()
    init = SystemState(t=0.0, x=1e200, y=0.0, sigma=0.0)
    with pytest.raises(NonFiniteState) as info:
        simulate(init, p, cfg=IntegratorConfig(dt=1e-3, horizon=1.0))
    exc = info.value
    assert exc.time == 0.0
    assert exc.state.x == 1e200
    assert len(exc.partial_result.trajectory) == 1


def test_determinism_bit_identical_with_noise():
    p = params_fig4()
    cfg = IntegratorConfig(dt=1e-3, horizon=5.0, sample_stride=10)
    init = SystemState(t=0.0, x=0.1, y=0.1, sigma=-0.8)

    def run(seed):
        fp = ForcingProgram(noise=NoiseSpec(channels=("x", "y"), std=0.05, seed=seed))
        return simulate(init, p, fp, cfg).trajectory

    a, b, c = run(1), run(1), run(2)
    assert np.array_equal(a.states, b.states)
    assert np.array_equal(a.forcing, b.forcing)
    assert not np.array_equal(a.states, c.states)


def test_simulate_matches_composed_reference_steps():
    """The jitted kernel and the pure-Python step agree bit for bit."""
    p = params_fig5()
    fp = ForcingProgram(pulses=(Pulse("x", 0.05, 0.1, 0.4),))
    cfg = IntegratorConfig(dt=1e-3, horizon=0.5, sample_stride=1)
    policy = ControlPolicy(gain=0.7, latched=True, activation_time=None)
    init = SystemState(t=0.0, x=0.1, y=-0.2, sigma=-0.5)
    traj = simulate(init, p, fp, cfg, controller=policy).trajectory

    def held_zeta(k):
        # the driver applies pulses over snapped index windows
        vals = [0.0, 0.0, 0.0]
        for pl in fp.pulses:
            i_a = round(pl.start / cfg.dt)
            i_b = round((pl.start + pl.width) / cfg.dt)
            if i_a <= k < i_b:
                vals[{"x": 0, "y": 1, "sigma": 2}[pl.channel]] += pl.amplitude
        return tuple(vals)

    s = init
    for k in range(cfg.n_steps):
        row = traj.states[k]
        assert (s.x, s.y, s.sigma) == (row[0], row[1], row[2])
        zeta = held_zeta(k)
        s = step(s, p, lambda _t, z=zeta: z, lambda _t: policy.gain, dt=cfg.dt)
    final = traj.final_state
    assert (s.x, s.y, s.sigma) == (final.x, final.y, final.sigma)


def test_r2_large_radius_invariant_but_captured_by_cycle():
    """sigma < c1 is invariant for any radius, but a wide start lands on
    the stable cycle that coexists at the resting level instead of the
    resting point itself: this is why the basin sampler bounds the R2
    stratum's radius when it asserts convergence."""
    p = params_fig4()
    init = SystemState(t=0.0, x=1.5, y=1.5, sigma=-1.0)
    traj = simulate(
        init, p, cfg=IntegratorConfig(dt=1e-3, horizon=500.0, sample_stride=1000)
    ).trajectory
    for i in range(len(traj)):
        m = region_membership(traj.state_at(i), p)
        assert m.label == "R2" and m.margin >= -1e-6
    cycle_at_rest_level = 1 + math.sqrt(1 + p.c1)
    assert traj.final_state.squared_radius == pytest.approx(
        cycle_at_rest_level, abs=1e-6
    )


def test_region_stays_invariant_for_random_starts():
    """Unforced runs from inside the resting region never leave it."""
    p = params_fig4()
    strata = sample_strata(p, {"r1": 25, "r2": 25}, seed=5)
    cfg = IntegratorConfig(dt=5e-3, horizon=100.0, sample_stride=200)
    for states in strata.values():
        for row in states:
            init = SystemState(t=0.0, x=row[0], y=row[1], sigma=row[2])
            traj = simulate(init, p, cfg=cfg).trajectory
            for i in range(len(traj)):
                m = region_membership(traj.state_at(i), p)
                assert m.label in ("R1", "R2")
                assert m.margin >= -1e-6


def test_program_pulse_and_probe_pulse_sum():
    """A user pulse overlapping a probe window stacks on the x channel."""
    from slowfast import ProbeSchedule

    p = params_fig7()
    sched = ProbeSchedule(period=10.0, amplitude=0.5, width=0.2, threshold=-0.1,
                          start=5.0)
    fp = ForcingProgram(pulses=(Pulse("x", 5.0, 0.2, 0.25),))
    cfg = IntegratorConfig(dt=1e-3, horizon=20.0, sample_stride=100)
    init = SystemState(t=0.0, x=0.0, y=0.0, sigma=-0.65)
    traj = simulate(init, p, fp, cfg, probes=sched).trajectory
    i = int(np.searchsorted(traj.t, 5.1))
    assert traj.forcing[i, 0] == pytest.approx(0.75)  # 0.5 probe + 0.25 pulse
    assert traj.forcing[i, 1] == pytest.approx(0.5)  # probe only


# ------------------------------------------------------------- CSV export


def test_csv_round_trip(tmp_path):
    p = params_fig4()
    cfg = IntegratorConfig(dt=1e-3, horizon=1.0, sample_stride=100)
    traj = simulate(
        SystemState(t=0.0, x=0.1, y=0.2, sigma=-0.8), p, cfg=cfg
    ).trajectory
    path = tmp_path / "run.csv"
    traj.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == len(traj) + 1
    cells = lines[1].split(",")
    assert float(cells[1]) == traj.states[0, 0]  # 17 sig digits round-trip
    assert float(cells[3]) == traj.states[0, 2]


def test_config_validation():
    with pytest.raises(ValueError):
        IntegratorConfig(dt=0.0)
    with pytest.raises(ValueError):
        IntegratorConfig(dt=1.0, horizon=0.5)
    with pytest.raises(ValueError):
        IntegratorConfig(sample_stride=0)

"""Deterministic fixed-step integration of the forced system.

The scheme is classical 4th-order Runge-Kutta on a fixed grid (default
dt = 1e-3). A fixed grid keeps every schedule time (pulse edges, state
impulses, probe samples) exactly on a step boundary, which makes event
application auditable and runs bit-for-bit reproducible.

Forcing is applied as a zero-order hold over each step: the driver breaks
the timeline into segments at every pulse edge, so the hold is exact for
the piecewise-constant forcing class supported here (rectangular pulses,
instantaneous impulses, per-step noise).
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .control import ControlPolicy, on_event
from .detect import (
    DetectionRecord,
    DetectionState,
    ProbeSamples,
    ProbeSchedule,
    detector_step,
)
from .errors import NonFiniteState, ScheduleConflict
from .model import ModelParams, SystemState

DEFAULT_DT = 1e-3

CHANNELS = ("x", "y", "sigma")

CSV_HEADER = "t,x,y,sigma,zeta_x,zeta_y,zeta_sigma,u_x,u_y"


@dataclass(frozen=True)
class Pulse:
    """Rectangular forcing pulse on one channel, active on [start, start+width)."""

    channel: str
    start: float
    width: float
    amplitude: float

    def __post_init__(self):
        if self.channel not in CHANNELS:
            raise ValueError(f"pulse channel must be one of {CHANNELS}")
        if not self.width > 0:
            raise ValueError(f"pulse width must be > 0 (got {self.width})")


@dataclass(frozen=True)
class Impulse:
    """Instantaneous state jump applied between steps at the snapped time."""

    time: float
    dx: float = 0.0
    dy: float = 0.0
    dsigma: float = 0.0


@dataclass(frozen=True)
class NoiseSpec:
    """Seeded additive noise, held piecewise-constant over each step.

    ``std`` is per unit sqrt(time); each step adds std/sqrt(dt) times a
    standard normal draw, so the integrated contribution over a step is
    std*sqrt(dt)*N(0,1).
    """

    channels: tuple[str, ...] = ("x", "y")
    std: float = 0.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "channels", tuple(self.channels))
        for ch in self.channels:
            if ch not in CHANNELS:
                raise ValueError(f"noise channel must be one of {CHANNELS}")
        if self.std < 0:
            raise ValueError("noise std must be >= 0")


@dataclass(frozen=True)
class ForcingProgram:
    """Declarative schedule of pulses, impulses, and noise."""

    pulses: tuple[Pulse, ...] = ()
    impulses: tuple[Impulse, ...] = ()
    noise: NoiseSpec | None = None

    def __post_init__(self):
        object.__setattr__(self, "pulses", tuple(self.pulses))
        object.__setattr__(self, "impulses", tuple(self.impulses))

    def digest(self) -> str:
        """Stable fingerprint of the program for trajectory metadata."""
        parts = []
        for p in self.pulses:
            parts.append(f"pulse:{p.channel}:{p.start!r}:{p.width!r}:{p.amplitude!r}")
        for im in self.impulses:
            parts.append(f"impulse:{im.time!r}:{im.dx!r}:{im.dy!r}:{im.dsigma!r}")
        if self.noise is not None and self.noise.std > 0:
            parts.append(
                f"noise:{','.join(self.noise.channels)}:"
                f"{self.noise.std!r}:{self.noise.seed!r}"
            )
        blob = "|".join(parts).encode()
        return hashlib.sha256(blob).hexdigest()[:12]


def forcing_at(t: float, fp: ForcingProgram) -> tuple[float, float, float]:
    """Sum of all pulses active at time t, per channel.

    The seeded noise component lives on the integration grid and is
    realized by :func:`realize_noise`; it is not part of this pointwise
    pulse evaluation.
    """
    zx = zy = zs = 0.0
    for p in fp.pulses:
        if p.start <= t < p.start + p.width:
            if p.channel == "x":
                zx += p.amplitude
            elif p.channel == "y":
                zy += p.amplitude
            else:
                zs += p.amplitude
    return (zx, zy, zs)


def realize_noise(noise: NoiseSpec, n_steps: int, dt: float) -> np.ndarray:
    """Draw the per-step noise table (n_steps, 3), deterministic per seed.

    All three channels are always drawn so that the channel selection does
    not shift the random stream; unselected channels are zeroed.
    """
    rng = np.random.default_rng(noise.seed)
    draws = rng.standard_normal((n_steps, 3))
    scale = noise.std / math.sqrt(dt)
    mask = np.array([ch in noise.channels for ch in CHANNELS], dtype=float)
    return draws * (scale * mask)


@dataclass(frozen=True)
class IntegratorConfig:
    """Step size, total simulated time, and steps per recorded sample.

    The horizon is realized as round(horizon/dt) whole steps; the final
    state's time reports the realized horizon.
    """

    dt: float = DEFAULT_DT
    horizon: float = 100.0
    sample_stride: int = 1

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be > 0 (got {self.dt})")
        if not self.horizon >= self.dt:
            raise ValueError("horizon must be at least one step")
        if not (isinstance(self.sample_stride, int) and self.sample_stride >= 1):
            raise ValueError("sample_stride must be an integer >= 1")

    @property
    def n_steps(self) -> int:
        return int(round(self.horizon / self.dt))


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled run: states plus the forcing/control applied at
    each sample time, with enough metadata to reproduce the run."""

    t: np.ndarray
    states: np.ndarray  # (n, 3) columns x, y, sigma
    forcing: np.ndarray  # (n, 3) applied zeta at sample times
    control: np.ndarray  # (n, 2) applied u at sample times
    params: ModelParams
    config: IntegratorConfig
    forcing_digest: str
    final_state: SystemState
    warnings: tuple[str, ...] = ()

    def __len__(self) -> int:
        return self.t.shape[0]

    @property
    def x(self) -> np.ndarray:
        return self.states[:, 0]

    @property
    def y(self) -> np.ndarray:
        return self.states[:, 1]

    @property
    def sigma(self) -> np.ndarray:
        return self.states[:, 2]

    @property
    def squared_radius(self) -> np.ndarray:
        return self.states[:, 0] ** 2 + self.states[:, 1] ** 2

    def state_at(self, i: int) -> SystemState:
        return SystemState(
            t=float(self.t[i]),
            x=float(self.states[i, 0]),
            y=float(self.states[i, 1]),
            sigma=float(self.states[i, 2]),
        )

    def to_csv(self, path) -> None:
        """Write `t,x,y,sigma,zeta_x,zeta_y,zeta_sigma,u_x,u_y` rows with
        17 significant digits (round-trip exact for float64)."""
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(CSV_HEADER + "\n")
            for i in range(len(self)):
                row = (
                    self.t[i],
                    self.states[i, 0],
                    self.states[i, 1],
                    self.states[i, 2],
                    self.forcing[i, 0],
                    self.forcing[i, 1],
                    self.forcing[i, 2],
                    self.control[i, 0],
                    self.control[i, 1],
                )
                # v + 0.0 folds negative zeros into plain zeros
                fh.write(",".join(f"{v + 0.0:.17g}" for v in row) + "\n")


@dataclass(frozen=True)
class SimulationResult:
    trajectory: Trajectory
    detections: tuple[DetectionRecord, ...] = ()
    controller: ControlPolicy | None = None

    @property
    def event_time(self) -> float | None:
        for rec in self.detections:
            if rec.event:
                return rec.t_f
        return None


def step(
    s: SystemState,
    p: ModelParams,
    forcing_at=None,
    gain_at=None,
    dt: float = DEFAULT_DT,
) -> SystemState:
    """One classical RK4 step of the forced, feedback-controlled field.

    ``forcing_at`` maps a time to (zeta_x, zeta_y, zeta_sigma); ``gain_at``
    maps a time to the scalar feedback gain F, applied to the stage states
    as u = (-F*x, -F*y). Local error is O(dt^5) for smooth forcing.
    """
    if not dt > 0:
        raise ValueError(f"dt must be > 0 (got {dt})")

    def zeta(tt):
        return (0.0, 0.0, 0.0) if forcing_at is None else forcing_at(tt)

    def gval(tt):
        return 0.0 if gain_at is None else gain_at(tt)

    omega, a, b = p.omega, p.a, p.b
    c1, c2, c3, eps = p.c1, p.c2, p.c3, p.epsilon
    t, x, y, sg = s.t, s.x, s.y, s.sigma

    zx, zy, zs = zeta(t)
    gain = gval(t)
    r = x * x + y * y
    f = sg + 2.0 * a * b * r - b * r * r
    k1x = -omega * y + x * f + zx - gain * x
    k1y = omega * x + y * f + zy - gain * y
    k1s = -eps * (sg - c1) * (sg - c2) * (sg - c3) + zs

    zx, zy, zs = zeta(t + 0.5 * dt)
    gain = gval(t + 0.5 * dt)
    x2 = x + 0.5 * dt * k1x
    y2 = y + 0.5 * dt * k1y
    s2 = sg + 0.5 * dt * k1s
    r = x2 * x2 + y2 * y2
    f = s2 + 2.0 * a * b * r - b * r * r
    k2x = -omega * y2 + x2 * f + zx - gain * x2
    k2y = omega * x2 + y2 * f + zy - gain * y2
    k2s = -eps * (s2 - c1) * (s2 - c2) * (s2 - c3) + zs

    x3 = x + 0.5 * dt * k2x
    y3 = y + 0.5 * dt * k2y
    s3 = sg + 0.5 * dt * k2s
    r = x3 * x3 + y3 * y3
    f = s3 + 2.0 * a * b * r - b * r * r
    k3x = -omega * y3 + x3 * f + zx - gain * x3
    k3y = omega * x3 + y3 * f + zy - gain * y3
    k3s = -eps * (s3 - c1) * (s3 - c2) * (s3 - c3) + zs

    zx, zy, zs = zeta(t + dt)
    gain = gval(t + dt)
    x4 = x + dt * k3x
    y4 = y + dt * k3y
    s4 = sg + dt * k3s
    r = x4 * x4 + y4 * y4
    f = s4 + 2.0 * a * b * r - b * r * r
    k4x = -omega * y4 + x4 * f + zx - gain * x4
    k4y = omega * x4 + y4 * f + zy - gain * y4
    k4s = -eps * (s4 - c1) * (s4 - c2) * (s4 - c3) + zs

    nx = x + dt / 6.0 * (k1x + 2.0 * (k2x + k3x) + k4x)
    ny = y + dt / 6.0 * (k1y + 2.0 * (k2y + k3y) + k4y)
    ns = sg + dt / 6.0 * (k1s + 2.0 * (k2s + k3s) + k4s)
    if not (math.isfinite(nx) and math.isfinite(ny) and math.isfinite(ns)):
        raise NonFiniteState(
            f"non-finite state after step from t={t}", state=s, time=t
        )
    return SystemState(t=t + dt, x=nx, y=ny, sigma=ns)


def _snap(time: float, t0: float, dt: float) -> tuple[int, float]:
    idx = int(round((time - t0) / dt))
    shift = abs((t0 + idx * dt) - time)
    return idx, shift


class _ProbeTimeline:
    """Grid-snapped probe windows and sample indices for one schedule."""

    def __init__(self, sched: ProbeSchedule, t0: float, dt: float, n_steps: int):
        self.sched = sched
        self.windows = []  # (i_on, i_s, i_f) per probe, list index = n-1
        if int(round(sched.period / dt)) < 1:
            raise ValueError(
                f"probe period {sched.period} snaps to zero steps at dt={dt}"
            )
        n = 1
        while True:
            t_n = sched.probe_time(n)
            i_on, _ = _snap(t_n, t0, dt)
            i_s, _ = _snap(sched.sample_time(n), t0, dt)
            i_f, _ = _snap(sched.final_time(n), t0, dt)
            if i_f > n_steps:
                break
            self.windows.append((i_on, i_s, i_f))
            n += 1

    def pulse_value(self, k: int, probe_idx: int, halted: bool) -> float:
        """Probe forcing amplitude for the step starting at grid index k."""
        if halted or probe_idx >= len(self.windows):
            return 0.0
        i_on, i_s, _ = self.windows[probe_idx]
        # closed window: steps starting in [t_n, t_n + width]
        if i_on <= k <= i_s:
            return self.sched.amplitude
        return 0.0

    def next_boundary(self, pos: int, probe_idx: int, halted: bool) -> int | None:
        if halted or probe_idx >= len(self.windows):
            return None
        i_on, i_s, i_f = self.windows[probe_idx]
        for cand in (i_on, i_s, i_s + 1, i_f):
            if cand > pos:
                return cand
        return None


def simulate(
    initial: SystemState,
    p: ModelParams,
    forcing: ForcingProgram | None = None,
    cfg: IntegratorConfig = IntegratorConfig(),
    controller: ControlPolicy | None = None,
    probes: ProbeSchedule | None = None,
) -> SimulationResult:
    """Run the forced system over cfg.horizon, recording every
    sample_stride-th step.

    Impulses are applied as exact state jumps between steps, at times
    snapped to the nearest grid point. When a probe schedule is given,
    probe pulses are injected on the x and y channels, the squared radius
    is measured at each scheduled sample time, and the detector decides at
    each probe-final time whether an early-warning event fires; an event
    latches the detector (no further probing) and, when a controller is
    present, activates feedback for every step strictly after the event.

    Raises NonFiniteState if the state leaves the finite range (the
    exception carries the last good state and its time) and
    ScheduleConflict if an impulse lands on the same grid point as a pulse
    edge.
    """
    fp = forcing if forcing is not None else ForcingProgram()
    dt = cfg.dt
    n_steps = cfg.n_steps
    stride = cfg.sample_stride
    t0 = initial.t
    warnings: list[str] = []

    # pulse windows snapped to step indices, half-open [i_a, i_b):
    # the grid indices, not the float times, are the applied semantics
    pulse_windows: list[tuple[int, int, int, float]] = []
    edge_set: set[int] = set()
    for pl in fp.pulses:
        i_a, sh_a = _snap(pl.start, t0, dt)
        i_b, sh_b = _snap(pl.start + pl.width, t0, dt)
        for sh, which in ((sh_a, "start"), (sh_b, "end")):
            if sh > dt / 2:
                warnings.append(
                    f"pulse {which} at {pl.start} snapped by {sh:.3g} (> dt/2)"
                )
        pulse_windows.append((i_a, i_b, CHANNELS.index(pl.channel), pl.amplitude))
        edge_set.update((i_a, i_b))
    edges = sorted(e for e in edge_set if 0 < e < n_steps)

    def pulse_zeta(k: int) -> tuple[float, float, float]:
        vals = [0.0, 0.0, 0.0]
        for i_a, i_b, ch, amp in pulse_windows:
            if i_a <= k < i_b:
                vals[ch] += amp
        return vals[0], vals[1], vals[2]

    timeline = _ProbeTimeline(probes, t0, dt, n_steps) if probes is not None else None
    conflict_set = set(edge_set)
    if timeline is not None:
        for i_on, i_s, _ in timeline.windows:
            conflict_set.update((i_on, i_s + 1))

    # impulses: snapped, unique, strictly inside the horizon
    impulse_map: dict[int, Impulse] = {}
    for im in fp.impulses:
        idx, shift = _snap(im.time, t0, dt)
        if shift > dt / 2:
            warnings.append(f"impulse at {im.time} snapped by {shift:.3g} (> dt/2)")
        if not 0 < idx < n_steps:
            raise ValueError(
                f"impulse time {im.time} is not strictly inside the horizon"
            )
        if idx in impulse_map:
            raise ValueError(f"impulse times collide on grid index {idx}")
        if idx in conflict_set:
            raise ScheduleConflict(
                f"impulse at t={im.time} lands on a pulse edge grid point; "
                "the application order would be ambiguous"
            )
        impulse_map[idx] = im
    impulse_idxs = sorted(impulse_map)

    noise_full = None
    if fp.noise is not None and fp.noise.std > 0:
        noise_full = realize_noise(fp.noise, n_steps, dt)
    empty_noise = np.empty((0, 3), dtype=np.float64)

    det_state = DetectionState.initial(p) if probes is not None else None
    meas_rng = None
    if probes is not None and probes.measurement_noise_std > 0:
        meas_rng = np.random.default_rng(probes.measurement_seed)
    records: list[DetectionRecord] = []
    pending: dict | None = None  # s-sample carried until the f-sample
    probe_idx = 0

    policy = controller
    act_idx: int | None = None
    if policy is not None and policy.latched:
        if policy.activation_time is None:
            act_idx = -1
        else:
            act_idx, _ = _snap(policy.activation_time, t0, dt)

    n_rows = n_steps // stride + 1
    out_t = np.empty(n_rows)
    out_state = np.empty((n_rows, 3))
    out_zeta = np.empty((n_rows, 3))
    out_u = np.empty((n_rows, 2))

    def measure_radius(x: float, y: float) -> float:
        if meas_rng is None:
            return x * x + y * y
        nx, ny = meas_rng.normal(0.0, probes.measurement_noise_std, 2)
        return (x + nx) ** 2 + (y + ny) ** 2

    x, y, s = initial.x, initial.y, initial.sigma
    pos = 0
    imp_ptr = 0
    edge_ptr = 0
    while pos < n_steps:
        nb = n_steps
        while imp_ptr < len(impulse_idxs) and impulse_idxs[imp_ptr] <= pos:
            imp_ptr += 1
        if imp_ptr < len(impulse_idxs):
            nb = min(nb, impulse_idxs[imp_ptr])
        while edge_ptr < len(edges) and edges[edge_ptr] <= pos:
            edge_ptr += 1
        if edge_ptr < len(edges):
            nb = min(nb, edges[edge_ptr])
        if timeline is not None:
            pb = timeline.next_boundary(pos, probe_idx, det_state.halted)
            if pb is not None:
                nb = min(nb, pb)
        if act_idx is not None and pos <= act_idx < nb:
            nb = min(nb, act_idx + 1)

        zx, zy, zs = pulse_zeta(pos)
        if timeline is not None:
            amp = timeline.pulse_value(pos, probe_idx, det_state.halted)
            zx += amp
            zy += amp
        gain = 0.0
        if policy is not None and policy.latched and act_idx is not None and pos > act_idx:
            gain = policy.gain
        if noise_full is not None:
            noise_seg = noise_full[pos:nb]
            has_noise = True
        else:
            noise_seg = empty_noise
            has_noise = False

        x, y, s, status = _kernels.rk4_span(
            x, y, s, pos, nb, dt,
            p.omega, p.a, p.b, p.c1, p.c2, p.c3, p.epsilon,
            zx, zy, zs, gain,
            noise_seg, has_noise, stride,
            out_t, out_state, out_zeta, out_u,
        )
        if status >= 0:
            last_good = SystemState(t=t0 + status * dt, x=x, y=y, sigma=s)
            exc = NonFiniteState(
                f"non-finite state during step {status} (t={t0 + status * dt})",
                state=last_good,
                time=t0 + status * dt,
            )
            n_valid = status // stride + 1
            exc.partial_result = SimulationResult(
                trajectory=Trajectory(
                    t=t0 + out_t[:n_valid].copy(),
                    states=out_state[:n_valid].copy(),
                    forcing=out_zeta[:n_valid].copy(),
                    control=out_u[:n_valid].copy(),
                    params=p,
                    config=cfg,
                    forcing_digest=fp.digest(),
                    final_state=last_good,
                    warnings=tuple(warnings),
                ),
                detections=tuple(records),
                controller=policy,
            )
            raise exc
        pos = nb

        if pos in impulse_map:
            im = impulse_map[pos]
            before = SystemState(t=t0 + pos * dt, x=x, y=y, sigma=s)
            x += im.dx
            y += im.dy
            s += im.dsigma
            if not (math.isfinite(x) and math.isfinite(y) and math.isfinite(s)):
                raise NonFiniteState(
                    f"non-finite state after impulse at t={t0 + pos * dt}",
                    state=before,
                    time=t0 + pos * dt,
                )

        if timeline is not None and not det_state.halted and probe_idx < len(
            timeline.windows
        ):
            i_on, i_s, i_f = timeline.windows[probe_idx]
            if pos == i_s and pending is None:
                pending = {
                    "index": probe_idx + 1,
                    "t_s": t0 + i_s * dt,
                    "r_s": measure_radius(x, y),
                    "sigma_true": s,
                }
            elif pos == i_f and pending is not None:
                samples = ProbeSamples(
                    index=pending["index"],
                    t_s=pending["t_s"],
                    t_f=t0 + i_f * dt,
                    r_s=pending["r_s"],
                    r_f=measure_radius(x, y),
                    sigma_true=pending["sigma_true"],
                )
                record, det_state = detector_step(samples, probes, p, det_state)
                records.append(record)
                pending = None
                probe_idx += 1
                if record.event and policy is not None:
                    policy = on_event(policy, record.t_f)
                    act_idx = pos

    # terminal sample falls on the grid only when stride divides n_steps
    if n_steps % stride == 0:
        row = n_steps // stride
        zx, zy, zs = pulse_zeta(n_steps)
        if timeline is not None:
            amp = timeline.pulse_value(n_steps, probe_idx, det_state.halted)
            zx += amp
            zy += amp
        gain = 0.0
        if policy is not None and policy.latched and act_idx is not None and n_steps > act_idx:
            gain = policy.gain
        out_t[row] = n_steps * dt
        out_state[row] = (x, y, s)
        out_zeta[row] = (zx, zy, zs)
        out_u[row] = (-gain * x, -gain * y)

    final = SystemState(t=t0 + n_steps * dt, x=x, y=y, sigma=s)
    traj = Trajectory(
        t=t0 + out_t,
        states=out_state,
        forcing=out_zeta,
        control=out_u,
        params=p,
        config=cfg,
        forcing_digest=fp.digest(),
        final_state=final,
        warnings=tuple(warnings),
    )
    return SimulationResult(
        trajectory=traj,
        detections=tuple(records),
        controller=policy,
    )

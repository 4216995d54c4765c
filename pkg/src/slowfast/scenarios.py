"""Scenario definitions, batch experiments, and file outputs.

Every experiment the package reproduces is expressed as a ScenarioSpec;
the built-ins (fig2_sweep, fig4, fig5, fig7, fig8, basin_mc) are
constructible without any input file and document their parameter choices
inline. Scenario files use flat INI text (configparser) mirroring the
ScenarioSpec field names; see the README for the format.
"""

from __future__ import annotations

import configparser
import json
import math
import os
import time
from dataclasses import dataclass, field, replace

import numpy as np

from ._kernels import batch_integrate
from .analysis import check_envelope, radial_bound
from .control import ControlPolicy
from .detect import ProbeSchedule, write_detections_jsonl
from .errors import (
    NonFiniteState,
    PreconditionError,
    RegimeError,
    ScenarioValidationError,
)
from .integrator import (
    ForcingProgram,
    Impulse,
    IntegratorConfig,
    NoiseSpec,
    Pulse,
    SimulationResult,
    simulate,
)
from .model import ModelParams, SystemState, radius_offset

SWEEP_CSV_HEADER = (
    "sigma,r_steady_low,r_steady_high,"
    "closed_form_stable_radius,closed_form_unstable_radius"
)

# steady-state detection for sweeps: the squared radius must vary less
# than this over one full rotation period
SWEEP_CONVERGENCE_TOL = 1e-9


@dataclass(frozen=True)
class SweepConfig:
    sigma_min: float = -1.2
    sigma_max: float = 0.5
    steps: int = 35
    r_small: float = 0.01
    r_large: float = 4.0

    def grid(self) -> np.ndarray:
        return np.round(np.linspace(self.sigma_min, self.sigma_max, self.steps), 12)


@dataclass(frozen=True)
class BasinConfig:
    samples: int = 2500
    seed: int = 2024
    horizon: float = 500.0
    dt: float = 5e-3
    sample_stride: int = 200
    # keep a standoff below the separatrix level c2: arbitrarily close to
    # it the escape of the slow variable takes arbitrarily long, so no
    # uniform convergence deadline could hold without one
    sigma_standoff: float = 0.02


@dataclass(frozen=True)
class ScenarioOutputs:
    trajectory_csv: str | None = None
    detection_jsonl: str | None = None
    summary_json: str | None = None
    sweep_csv: str | None = None

    def declared(self) -> dict:
        return {k: v for k, v in self.__dict__.items() if v is not None}


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    params: ModelParams
    kind: str = "simulate"  # simulate | sweep | basin
    initial: SystemState | None = None
    forcing: ForcingProgram = field(default_factory=ForcingProgram)
    cfg: IntegratorConfig = field(default_factory=IntegratorConfig)
    probes: ProbeSchedule | None = None
    control: ControlPolicy | None = None
    sweep: SweepConfig | None = None
    basin: BasinConfig | None = None
    outputs: ScenarioOutputs = field(default_factory=ScenarioOutputs)
    description: str = ""

    def validate(self) -> None:
        if self.kind not in ("simulate", "sweep", "basin"):
            raise ScenarioValidationError(
                f"unknown scenario kind {self.kind!r}", field="kind"
            )
        if self.kind == "simulate" and self.initial is None:
            raise ScenarioValidationError(
                "simulate scenarios need an initial state", field="initial"
            )
        if self.kind == "sweep" and self.sweep is None:
            raise ScenarioValidationError(
                "sweep scenarios need a [sweep] section", field="sweep"
            )
        if self.kind == "basin" and self.basin is None:
            raise ScenarioValidationError(
                "basin scenarios need a [basin] section", field="basin"
            )
        declared = self.outputs.declared()
        paths = list(declared.values())
        if len(set(paths)) != len(paths):
            raise ScenarioValidationError(
                "output paths must be unique", field="outputs"
            )


@dataclass
class RunSummary:
    scenario: str
    kind: str
    terminal_state: dict | None = None
    n_events: int = 0
    first_event_time: float | None = None
    activation_time: float | None = None
    sigma_zero_crossing: float | None = None
    sup_r_after_event: float | None = None
    envelope: dict | None = None
    report: dict | None = None
    outputs: dict = field(default_factory=dict)
    wall_clock_s: float = 0.0

    def to_json_obj(self) -> dict:
        # wall-clock time is intentionally excluded so that re-running a
        # scenario reproduces byte-identical files
        obj = {
            "scenario": self.scenario,
            "kind": self.kind,
            "terminal_state": self.terminal_state,
            "n_events": self.n_events,
            "first_event_time": self.first_event_time,
            "activation_time": self.activation_time,
            "sigma_zero_crossing": self.sigma_zero_crossing,
            "sup_r_after_event": self.sup_r_after_event,
            "envelope": self.envelope,
            "outputs": self.outputs,
        }
        if self.report is not None:
            obj["report"] = self.report
        return obj


# ---------------------------------------------------------------------------
# built-in scenarios


def make_fig2_sweep() -> ScenarioSpec:
    """Fixed-excitability amplitude sweep across the fold level."""
    p = ModelParams(omega=2.0, a=1.0, b=1.0, c1=-0.9, c2=-0.7, c3=0.5, epsilon=0.0)
    return ScenarioSpec(
        name="fig2_sweep",
        kind="sweep",
        params=p,
        cfg=IntegratorConfig(dt=1e-3, horizon=400.0, sample_stride=1),
        sweep=SweepConfig(),
        outputs=ScenarioOutputs(
            sweep_csv="fig2_sweep.csv", summary_json="fig2_sweep_summary.json"
        ),
        description="steady-state amplitude vs fixed excitability "
        "(bifurcation diagram data)",
    )


def make_fig4(delta: float = 0.02) -> ScenarioSpec:
    """Impulse pushes the slow state just past the separatrix at t=40.

    The run starts at the resting equilibrium; the impulse places the
    fast pair at (0.1, 0.1) and the excitability at c2 + delta. Any
    delta > 0 reproduces the delayed transition; 0.02 keeps the radius
    comfortably above the floating-point floor during the quiescent
    stretch before the transition.
    """
    p = ModelParams(omega=2.0, a=1.0, b=1.0, c1=-0.9, c2=-0.7, c3=0.5, epsilon=0.1)
    jump = Impulse(time=40.0, dx=0.1, dy=0.1, dsigma=(p.c2 + delta) - p.c1)
    return ScenarioSpec(
        name="fig4",
        params=p,
        initial=SystemState(t=0.0, x=0.0, y=0.0, sigma=p.c1),
        forcing=ForcingProgram(impulses=(jump,)),
        cfg=IntegratorConfig(dt=1e-3, horizon=320.0, sample_stride=10),
        outputs=ScenarioOutputs(
            trajectory_csv="fig4_trajectory.csv", summary_json="fig4_summary.json"
        ),
        description="impulse past the separatrix, delayed transition to "
        "large oscillations",
    )


def make_fig5(sigma0: float = -0.6) -> ScenarioSpec:
    """Perturbation recovery at a chosen excitability level."""
    p = ModelParams(omega=5.0, a=1.0, b=1.0, c1=-0.9, c2=-0.7, c3=0.5, epsilon=0.01)
    return ScenarioSpec(
        name="fig5",
        params=p,
        initial=SystemState(t=0.0, x=0.1, y=0.1, sigma=sigma0),
        cfg=IntegratorConfig(dt=1e-3, horizon=40.0, sample_stride=10),
        outputs=ScenarioOutputs(
            trajectory_csv="fig5_trajectory.csv", summary_json="fig5_summary.json"
        ),
        description="perturbation recovery transient; slower the closer "
        "the excitability sits to zero",
    )


FIG7_PROBE_START = 3.0


def make_fig7() -> ScenarioSpec:
    """Periodic probing with online estimation and early-warning detection.

    The initial excitability (-0.65, just above the separatrix) and the
    first probe time are scenario configuration, chosen so that a probe
    window completes shortly before the excitability reaches zero; with
    the probe period fixed at 15 time units the detector only gets one
    read inside the warning band per drift-through.
    """
    p = ModelParams(omega=4.0, a=1.0, b=1.0, c1=-0.9, c2=-0.7, c3=0.2, epsilon=0.1)
    return ScenarioSpec(
        name="fig7",
        params=p,
        initial=SystemState(t=0.0, x=0.0, y=0.0, sigma=-0.65),
        cfg=IntegratorConfig(dt=1e-3, horizon=200.0, sample_stride=10),
        probes=ProbeSchedule(
            start=FIG7_PROBE_START,
            period=15.0,
            amplitude=0.5,
            width=0.2,
            threshold=-0.1,
        ),
        outputs=ScenarioOutputs(
            trajectory_csv="fig7_trajectory.csv",
            detection_jsonl="fig7_detections.jsonl",
            summary_json="fig7_summary.json",
        ),
        description="active probing detects the slowing recovery before "
        "the oscillatory transition",
    )


def make_fig8(gain: float = 1.4) -> ScenarioSpec:
    """fig7 plus event-triggered feedback that prevents the transition."""
    base = make_fig7()
    return replace(
        base,
        name="fig8",
        control=ControlPolicy(gain=gain),
        outputs=ScenarioOutputs(
            trajectory_csv="fig8_trajectory.csv",
            detection_jsonl="fig8_detections.jsonl",
            summary_json="fig8_summary.json",
        ),
        description="event-triggered feedback holds the fast channels at "
        "rest after the early warning",
    )


def make_basin_mc() -> ScenarioSpec:
    """Monte-Carlo chart of the resting state's region of attraction."""
    p = ModelParams(omega=2.0, a=1.0, b=1.0, c1=-0.9, c2=-0.7, c3=0.5, epsilon=0.1)
    return ScenarioSpec(
        name="basin_mc",
        kind="basin",
        params=p,
        basin=BasinConfig(),
        outputs=ScenarioOutputs(summary_json="basin_mc_summary.json"),
        description="stratified basin sampling: inside-region starts "
        "converge to rest, outside starts reach the large cycle",
    )


BUILTIN_SCENARIOS = {
    "fig2_sweep": make_fig2_sweep,
    "fig4": make_fig4,
    "fig5": make_fig5,
    "fig7": make_fig7,
    "fig8": make_fig8,
    "basin_mc": make_basin_mc,
}


def list_scenarios() -> list[tuple[str, str]]:
    return [(name, fn().description) for name, fn in BUILTIN_SCENARIOS.items()]


# ---------------------------------------------------------------------------
# bifurcation sweep


@dataclass(frozen=True)
class SweepTable:
    sigma: np.ndarray
    r_steady_low: np.ndarray
    r_steady_high: np.ndarray
    closed_form_stable: np.ndarray
    closed_form_unstable: np.ndarray
    converged_low: np.ndarray
    converged_high: np.ndarray

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(SWEEP_CSV_HEADER + "\n")
            for i in range(self.sigma.shape[0]):
                row = (
                    self.sigma[i],
                    self.r_steady_low[i],
                    self.r_steady_high[i],
                    self.closed_form_stable[i],
                    self.closed_form_unstable[i],
                )
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def bifurcation_sweep(
    p_base: ModelParams,
    sigma_grid,
    per_point: IntegratorConfig,
    r_small: float = SweepConfig.r_small,
    r_large: float = SweepConfig.r_large,
) -> SweepTable:
    """Steady-state amplitude from small and large starts at each fixed
    excitability (the slow dynamics are frozen: epsilon is forced to 0).

    Steady state is declared when the squared radius varies by less than
    1e-9 over one full rotation period; members that never settle within
    per_point.horizon keep their final value and are flagged unconverged.
    """
    p = replace(p_base, epsilon=0.0)
    grid = np.asarray(sigma_grid, dtype=float)
    n = grid.shape[0]

    # ensemble: member 2i starts small, member 2i+1 starts large
    states = np.empty((2 * n, 3))
    states[0::2, 0] = math.sqrt(r_small)
    states[1::2, 0] = math.sqrt(r_large)
    states[:, 1] = 0.0
    states[0::2, 2] = grid
    states[1::2, 2] = grid

    dt = per_point.dt
    chunk = max(1, int(round((2.0 * math.pi / p.omega) / dt)))
    n_chunks = max(1, int(math.ceil(per_point.n_steps / chunk)))

    converged = np.zeros(2 * n, dtype=bool)
    steady = np.full(2 * n, np.nan)
    for _ in range(n_chunks):
        cube = batch_integrate(states, chunk, dt, p, stride=1)
        r = cube[:, :, 0] ** 2 + cube[:, :, 1] ** 2
        variation = r.max(axis=1) - r.min(axis=1)
        newly = (~converged) & (variation < SWEEP_CONVERGENCE_TOL)
        steady[newly] = r[newly, -1]
        converged |= newly
        if converged.all():
            break
    unsettled = ~converged
    if unsettled.any():
        r_final = states[:, 0] ** 2 + states[:, 1] ** 2
        steady[unsettled] = r_final[unsettled]

    fold = p.fold_level
    closed_stable = np.full(n, np.nan)
    closed_unstable = np.full(n, np.nan)
    for i, s in enumerate(grid):
        if s > fold:
            g = radius_offset(p, float(s))
            closed_stable[i] = p.a + g
            if s < 0:
                closed_unstable[i] = p.a - g

    return SweepTable(
        sigma=grid,
        r_steady_low=steady[0::2],
        r_steady_high=steady[1::2],
        closed_form_stable=closed_stable,
        closed_form_unstable=closed_unstable,
        converged_low=converged[0::2],
        converged_high=converged[1::2],
    )


# ---------------------------------------------------------------------------
# basin Monte-Carlo

STRATA = ("r1", "r2", "boundary", "outside")

DEFAULT_STRATA_FRACTIONS = {"r1": 0.35, "r2": 0.35, "boundary": 0.10, "outside": 0.20}


def sample_strata(
    p: ModelParams,
    counts: dict,
    seed: int,
    sigma_standoff: float = 0.02,
) -> dict:
    """Draw stratified initial conditions; returns {stratum: (N,3) array}.

    r1        uniform over the invariant cylinder, radius at 5-95% of the
              bound, excitability in [c1, c2 - standoff]
    r2        excitability in [c1 - 0.4, c1); the fast pair is drawn
              inside the limiting radial bound at c1, where convergence to
              rest is provable (arbitrarily large starts with sigma in
              (fold, c1) can be captured by the small stable cycle
              instead, so the unbounded reading of R2 is not sampled)
    boundary  radius exactly 1e-3 below the radial bound (probes how
              conservative the bound is)
    outside   excitability above the separatrix, small nonzero radius;
              converges to the large cycle
    """
    if not (p.fold_level < p.c1 and p.c2 < 0.0 < p.c3):
        raise RegimeError("basin sampling requires the resting regime")
    rng = np.random.default_rng(seed)
    out = {}
    for stratum in STRATA:
        n = int(counts.get(stratum, 0))
        if n == 0:
            continue
        states = np.empty((n, 3))
        theta = rng.uniform(0.0, 2.0 * math.pi, n)
        if stratum == "r1":
            sig = rng.uniform(p.c1, p.c2 - sigma_standoff, n)
            bound = np.array([radial_bound(s, p) for s in sig])
            r = rng.uniform(0.05, 0.95, n) * bound
        elif stratum == "r2":
            sig = rng.uniform(p.c1 - 0.4, p.c1, n)
            bound_c1 = radial_bound(p.c1, p)
            r = rng.uniform(0.0, 0.95, n) * bound_c1
        elif stratum == "boundary":
            sig = rng.uniform(p.c1, p.c2 - sigma_standoff, n)
            bound = np.array([radial_bound(s, p) for s in sig])
            r = bound - 1e-3
        else:  # outside
            sig = rng.uniform(p.c2 + 0.05, -0.1, n)
            r = rng.uniform(0.001, 0.3, n)
        amp = np.sqrt(r)
        states[:, 0] = amp * np.cos(theta)
        states[:, 1] = amp * np.sin(theta)
        states[:, 2] = sig
        out[stratum] = states
    return out


@dataclass(frozen=True)
class BasinReport:
    strata: dict
    seed: int
    horizon: float
    dt: float

    def to_json_obj(self) -> dict:
        return {
            "seed": self.seed,
            "horizon": self.horizon,
            "dt": self.dt,
            "strata": self.strata,
        }


def _margin_cube(cube: np.ndarray, p: ModelParams) -> np.ndarray:
    """Region margin at every recorded sample of every member."""
    sig = cube[:, :, 2]
    r = cube[:, :, 0] ** 2 + cube[:, :, 1] ** 2
    bound = p.a - np.sqrt(np.maximum(0.0, p.a * p.a + sig / p.b))
    return np.where(
        sig < p.c1, p.c1 - sig, np.where(sig < p.c2, bound - r, p.c2 - sig)
    )


def run_basin(
    p: ModelParams,
    counts: dict,
    seed: int,
    horizon: float = 500.0,
    dt: float = 5e-3,
    sample_stride: int = 200,
    sigma_standoff: float = 0.02,
) -> BasinReport:
    """Integrate every stratified start and classify where it lands."""
    strata_states = sample_strata(p, counts, seed, sigma_standoff)
    n_steps = int(round(horizon / dt))
    cycle3 = p.a + radius_offset(p, p.c3)

    report = {}
    for stratum, states in strata_states.items():
        n = states.shape[0]
        cube = batch_integrate(states, n_steps, dt, p, sample_stride)
        final = states  # batch_integrate advances in place
        dist_e1 = np.sqrt(
            final[:, 0] ** 2 + final[:, 1] ** 2 + (final[:, 2] - p.c1) ** 2
        )
        r_final = final[:, 0] ** 2 + final[:, 1] ** 2
        to_e1 = dist_e1 <= 1e-3
        to_m3 = (np.abs(r_final - cycle3) <= 1e-2) & (np.abs(final[:, 2] - p.c3) <= 1e-3)
        entry = {
            "n": int(n),
            "fraction_to_rest": float(np.mean(to_e1)),
            "fraction_to_cycle": float(np.mean(to_m3)),
            "max_rest_distance": float(dist_e1.max()),
        }
        if stratum in ("r1", "r2", "boundary"):
            margins = _margin_cube(cube, p)
            entry["min_margin"] = float(margins.min())
            entry["max_margin_violation"] = float(max(0.0, -margins.min()))
        report[stratum] = entry
    return BasinReport(strata=report, seed=seed, horizon=horizon, dt=dt)


def basin_mc(p: ModelParams, n_samples: int, seed: int, **kwargs) -> BasinReport:
    """Stratified basin estimate with the default stratum split."""
    counts = {
        name: int(round(frac * n_samples))
        for name, frac in DEFAULT_STRATA_FRACTIONS.items()
    }
    return run_basin(p, counts, seed, **kwargs)


# ---------------------------------------------------------------------------
# running scenarios


def _summarize_simulation(
    spec: ScenarioSpec, result: SimulationResult
) -> RunSummary:
    traj = result.trajectory
    summary = RunSummary(scenario=spec.name, kind=spec.kind)
    fs = traj.final_state
    summary.terminal_state = {"t": fs.t, "x": fs.x, "y": fs.y, "sigma": fs.sigma}
    summary.n_events = sum(1 for rec in result.detections if rec.event)
    summary.first_event_time = result.event_time
    if result.controller is not None and result.controller.latched:
        summary.activation_time = result.controller.activation_time

    crossing = np.nonzero(traj.sigma >= 0.0)[0]
    if crossing.size:
        summary.sigma_zero_crossing = float(traj.t[crossing[0]])

    if summary.first_event_time is not None:
        after = traj.t > summary.first_event_time
        if after.any():
            summary.sup_r_after_event = float(traj.squared_radius[after].max())

    # the decay envelope is a statement about unforced transients; for
    # forced or probed runs the check would be vacuously violated
    unforced = (
        not spec.forcing.pulses
        and not spec.forcing.impulses
        and (spec.forcing.noise is None or spec.forcing.noise.std == 0)
        and spec.probes is None
    )
    if unforced:
        try:
            env = check_envelope(traj, spec.params)
            summary.envelope = {
                "holds": env.holds,
                "first_violation": env.first_violation,
                "exit_time": env.exit_time,
            }
        except PreconditionError:
            summary.envelope = None
    return summary


def run_scenario(
    spec: ScenarioSpec,
    out_dir=None,
    seed: int | None = None,
    dt: float | None = None,
    horizon: float | None = None,
) -> RunSummary:
    """Execute a scenario, write its declared outputs, return the summary.

    ``seed``/``dt``/``horizon`` override the corresponding setting of the
    spec (seed applies to noise, measurement noise, and basin sampling).
    """
    spec = _apply_overrides(spec, seed, dt, horizon)
    spec.validate()
    if out_dir is None:
        out_dir = os.environ.get("SLOWFAST_OUT_DIR", ".")
    os.makedirs(out_dir, exist_ok=True)
    t_start = time.perf_counter()

    declared = spec.outputs.declared()
    written = {}

    if spec.kind == "simulate":
        try:
            result = simulate(
                spec.initial,
                spec.params,
                forcing=spec.forcing,
                cfg=spec.cfg,
                controller=spec.control,
                probes=spec.probes,
            )
        except NonFiniteState as exc:
            _flush_partial(spec, exc, out_dir, declared)
            raise
        summary = _summarize_simulation(spec, result)
        if "trajectory_csv" in declared:
            path = os.path.join(out_dir, declared["trajectory_csv"])
            result.trajectory.to_csv(path)
            written["trajectory_csv"] = declared["trajectory_csv"]
        if "detection_jsonl" in declared:
            path = os.path.join(out_dir, declared["detection_jsonl"])
            write_detections_jsonl(path, result.detections)
            written["detection_jsonl"] = declared["detection_jsonl"]
    elif spec.kind == "sweep":
        table = bifurcation_sweep(
            spec.params,
            spec.sweep.grid(),
            spec.cfg,
            r_small=spec.sweep.r_small,
            r_large=spec.sweep.r_large,
        )
        summary = RunSummary(scenario=spec.name, kind=spec.kind)
        summary.report = {
            "n_points": int(table.sigma.shape[0]),
            "n_converged_low": int(table.converged_low.sum()),
            "n_converged_high": int(table.converged_high.sum()),
        }
        if "sweep_csv" in declared:
            path = os.path.join(out_dir, declared["sweep_csv"])
            table.to_csv(path)
            written["sweep_csv"] = declared["sweep_csv"]
    else:  # basin
        bc = spec.basin
        counts = {
            name: int(round(frac * bc.samples))
            for name, frac in DEFAULT_STRATA_FRACTIONS.items()
        }
        report = run_basin(
            spec.params,
            counts,
            bc.seed,
            horizon=bc.horizon,
            dt=bc.dt,
            sample_stride=bc.sample_stride,
            sigma_standoff=bc.sigma_standoff,
        )
        summary = RunSummary(scenario=spec.name, kind=spec.kind)
        summary.report = report.to_json_obj()

    summary.outputs = written
    if "summary_json" in declared:
        path = os.path.join(out_dir, declared["summary_json"])
        summary.outputs = dict(written, summary_json=declared["summary_json"])
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(summary.to_json_obj(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    summary.wall_clock_s = time.perf_counter() - t_start
    return summary


def _flush_partial(spec, exc: NonFiniteState, out_dir, declared) -> None:
    """Write whatever a numerically aborted run produced before failing."""
    partial = getattr(exc, "partial_result", None)
    if partial is None:
        return
    if "trajectory_csv" in declared:
        partial.trajectory.to_csv(os.path.join(out_dir, declared["trajectory_csv"]))
    if "detection_jsonl" in declared:
        write_detections_jsonl(
            os.path.join(out_dir, declared["detection_jsonl"]), partial.detections
        )
    if "summary_json" in declared:
        fs = partial.trajectory.final_state
        obj = {
            "scenario": spec.name,
            "kind": spec.kind,
            "error": str(exc),
            "aborted_at": exc.time,
            "last_good_state": {"t": fs.t, "x": fs.x, "y": fs.y, "sigma": fs.sigma},
        }
        with open(os.path.join(out_dir, declared["summary_json"]), "w",
                  encoding="utf-8") as fh:
            json.dump(obj, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _apply_overrides(spec, seed, dt, horizon):
    if seed is not None:
        if spec.forcing.noise is not None:
            spec = replace(
                spec, forcing=replace(spec.forcing, noise=replace(spec.forcing.noise, seed=seed))
            )
        if spec.probes is not None and spec.probes.measurement_noise_std > 0:
            spec = replace(spec, probes=replace(spec.probes, measurement_seed=seed))
        if spec.basin is not None:
            spec = replace(spec, basin=replace(spec.basin, seed=seed))
    if dt is not None or horizon is not None:
        cfg = spec.cfg
        cfg = replace(
            cfg,
            dt=dt if dt is not None else cfg.dt,
            horizon=horizon if horizon is not None else cfg.horizon,
        )
        spec = replace(spec, cfg=cfg)
        if spec.basin is not None:
            spec = replace(
                spec,
                basin=replace(
                    spec.basin,
                    dt=dt if dt is not None else spec.basin.dt,
                    horizon=horizon if horizon is not None else spec.basin.horizon,
                ),
            )
    return spec


# ---------------------------------------------------------------------------
# scenario files (flat INI key/value with nested sections)


def _get_float(sec, key, path):
    try:
        return sec.getfloat(key)
    except (ValueError, TypeError) as exc:
        raise ScenarioValidationError(
            f"invalid float for {path}.{key}", field=f"{path}.{key}"
        ) from exc


def load_scenario(path) -> ScenarioSpec:
    """Parse a scenario file; see README for the section layout."""
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    read = cp.read(path)
    if not read:
        raise ScenarioValidationError(f"cannot read scenario file {path}")

    if "params" not in cp:
        raise ScenarioValidationError("missing [params] section", field="params")
    ps = cp["params"]
    try:
        params = ModelParams(
            omega=_get_float(ps, "omega", "params"),
            a=_get_float(ps, "a", "params"),
            b=_get_float(ps, "b", "params"),
            c1=_get_float(ps, "c1", "params"),
            c2=_get_float(ps, "c2", "params"),
            c3=_get_float(ps, "c3", "params"),
            epsilon=_get_float(ps, "epsilon", "params"),
        )
    except ValueError as exc:
        raise ScenarioValidationError(f"params: {exc}", field="params") from exc

    meta = cp["scenario"] if "scenario" in cp else {}
    name = meta.get("name", "scenario")
    kind = meta.get("kind", "simulate")

    initial = None
    if "initial" in cp:
        ins = cp["initial"]
        try:
            initial = SystemState(
                t=ins.getfloat("t", 0.0),
                x=_get_float(ins, "x", "initial"),
                y=_get_float(ins, "y", "initial"),
                sigma=_get_float(ins, "sigma", "initial"),
            )
        except ValueError as exc:
            raise ScenarioValidationError(
                f"initial: {exc}", field="initial"
            ) from exc

    cfg = IntegratorConfig()
    if "integrator" in cp:
        igs = cp["integrator"]
        try:
            cfg = IntegratorConfig(
                dt=igs.getfloat("dt", IntegratorConfig.dt),
                horizon=igs.getfloat("horizon", IntegratorConfig.horizon),
                sample_stride=igs.getint(
                    "sample_stride", IntegratorConfig.sample_stride
                ),
            )
        except ValueError as exc:
            raise ScenarioValidationError(
                f"integrator: {exc}", field="integrator"
            ) from exc

    pulses = []
    impulses = []
    noise = None
    for section in cp.sections():
        if section.startswith("pulse"):
            sec = cp[section]
            try:
                pulses.append(
                    Pulse(
                        channel=sec.get("channel", "x"),
                        start=_get_float(sec, "start", section),
                        width=_get_float(sec, "width", section),
                        amplitude=_get_float(sec, "amplitude", section),
                    )
                )
            except ValueError as exc:
                raise ScenarioValidationError(
                    f"{section}: {exc}", field=section
                ) from exc
        elif section.startswith("impulse"):
            sec = cp[section]
            impulses.append(
                Impulse(
                    time=_get_float(sec, "time", section),
                    dx=sec.getfloat("dx", 0.0),
                    dy=sec.getfloat("dy", 0.0),
                    dsigma=sec.getfloat("dsigma", 0.0),
                )
            )
    if "noise" in cp:
        sec = cp["noise"]
        noise = NoiseSpec(
            channels=tuple(
                ch.strip() for ch in sec.get("channels", "x,y").split(",")
            ),
            std=sec.getfloat("std", 0.0),
            seed=sec.getint("seed", 0),
        )
    forcing = ForcingProgram(
        pulses=tuple(pulses), impulses=tuple(impulses), noise=noise
    )

    probes = None
    if "probes" in cp:
        sec = cp["probes"]
        try:
            probes = ProbeSchedule(
                period=_get_float(sec, "period", "probes"),
                amplitude=_get_float(sec, "amplitude", "probes"),
                width=_get_float(sec, "width", "probes"),
                threshold=_get_float(sec, "threshold", "probes"),
                start=sec.getfloat("start", fallback=None),
                measurement_noise_std=sec.getfloat("measurement_noise_std", 0.0),
                measurement_seed=sec.getint("measurement_seed", 0),
            )
        except ValueError as exc:
            raise ScenarioValidationError(f"probes: {exc}", field="probes") from exc

    control = None
    if "control" in cp:
        sec = cp["control"]
        try:
            control = ControlPolicy(gain=_get_float(sec, "gain", "control"))
        except ValueError as exc:
            raise ScenarioValidationError(
                f"control: {exc}", field="control"
            ) from exc

    sweep = None
    if "sweep" in cp:
        sec = cp["sweep"]
        sweep = SweepConfig(
            sigma_min=sec.getfloat("sigma_min", SweepConfig.sigma_min),
            sigma_max=sec.getfloat("sigma_max", SweepConfig.sigma_max),
            steps=sec.getint("steps", SweepConfig.steps),
        )

    basin = None
    if "basin" in cp:
        sec = cp["basin"]
        basin = BasinConfig(
            samples=sec.getint("samples", BasinConfig.samples),
            seed=sec.getint("seed", BasinConfig.seed),
            horizon=sec.getfloat("horizon", BasinConfig.horizon),
            dt=sec.getfloat("dt", BasinConfig.dt),
        )

    outputs = ScenarioOutputs()
    if "outputs" in cp:
        sec = cp["outputs"]
        outputs = ScenarioOutputs(
            trajectory_csv=sec.get("trajectory_csv", None),
            detection_jsonl=sec.get("detection_jsonl", None),
            summary_json=sec.get("summary_json", None),
            sweep_csv=sec.get("sweep_csv", None),
        )

    spec = ScenarioSpec(
        name=name,
        kind=kind,
        params=params,
        initial=initial,
        forcing=forcing,
        cfg=cfg,
        probes=probes,
        control=control,
        sweep=sweep,
        basin=basin,
        outputs=outputs,
    )
    spec.validate()
    return spec

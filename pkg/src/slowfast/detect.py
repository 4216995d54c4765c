"""Active probing and early-warning detection.

A probe is a short rectangular kick of amplitude K applied to both fast
channels. The squared radius is read right after the kick and again half
a period later; the pair of readings inverts the exponential recovery
envelope into an online excitability estimate. An estimate above the
detection threshold is the early-warning event; the detector then latches
and all further probing stops.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

from .errors import DegenerateRadius
from .model import ModelParams

RADIUS_FLOOR = 1e-12


@dataclass(frozen=True)
class ProbeSchedule:
    """Periodic probe timing plus the detection threshold.

    Probe n (n = 1, 2, ...) starts at start + (n-1)*period, holds
    amplitude on x and y for ``width`` time units, samples the squared
    radius at the pulse end, and samples again half a period later. The
    threshold must sit below zero, the excitability level at which the
    resting state destabilizes. When ``start`` is omitted it defaults to
    one full period of unperturbed observation.
    """

    period: float
    amplitude: float
    width: float
    threshold: float
    start: float | None = None
    measurement_noise_std: float = 0.0
    measurement_seed: int = 0

    def __post_init__(self):
        if not self.period > 0:
            raise ValueError("probe period must be > 0")
        if self.start is None:
            object.__setattr__(self, "start", self.period)
        if not 0 < self.width < self.period / 2:
            raise ValueError("probe width must satisfy 0 < width < period/2")
        if not self.start >= 0:
            raise ValueError("first probe time must be >= 0")
        if not self.threshold < 0:
            raise ValueError("detection threshold must be < 0")
        if self.measurement_noise_std < 0:
            raise ValueError("measurement noise std must be >= 0")

    def probe_time(self, n: int) -> float:
        return self.start + (n - 1) * self.period

    def sample_time(self, n: int) -> float:
        return self.probe_time(n) + self.width

    def final_time(self, n: int) -> float:
        return self.sample_time(n) + self.period / 2.0


@dataclass(frozen=True)
class ProbeSamples:
    """Raw squared-radius readings for one probe."""

    index: int
    t_s: float
    t_f: float
    r_s: float
    r_f: float
    sigma_true: float | None = None


@dataclass(frozen=True)
class DetectionRecord:
    index: int
    t_s: float
    t_f: float
    r_s: float
    r_f: float
    sigma_estimate: float | None
    sigma_true: float | None
    event: bool

    def to_json_obj(self) -> dict:
        return {
            "n": self.index,
            "t_s": self.t_s,
            "t_f": self.t_f,
            "r_s": self.r_s,
            "r_f": self.r_f,
            "sigma_n": self.sigma_estimate,
            "sigma_true": self.sigma_true,
            "event": self.event,
        }


@dataclass(frozen=True)
class DetectionState:
    """Latching detector state owned by one simulation loop."""

    next_index: int
    halted: bool
    event_time: float | None
    last_estimate: float

    @classmethod
    def initial(cls, p: ModelParams) -> "DetectionState":
        # the estimate stream starts at the fold level -a^2*b, the most
        # pessimistic (least excitable) value consistent with the model
        return cls(
            next_index=1,
            halted=False,
            event_time=None,
            last_estimate=p.fold_level,
        )


def probe_forcing(
    t: float, sched: ProbeSchedule, halted: bool = False
) -> tuple[float, float]:
    """(K, K) while t lies inside a probe pulse window, else (0, 0).

    Windows are the closed intervals [t_n, t_n + width]; a halted detector
    forces zero regardless of t.
    """
    if halted:
        return (0.0, 0.0)
    if t < sched.start:
        return (0.0, 0.0)
    k = math.floor((t - sched.start) / sched.period)
    t_n = sched.start + k * sched.period
    if t_n <= t <= t_n + sched.width:
        return (sched.amplitude, sched.amplitude)
    return (0.0, 0.0)


def estimate_from_probe(
    r_s: float, r_f: float, sched: ProbeSchedule, p: ModelParams
) -> float:
    """Excitability estimate from one probe's radius pair.

    Inverts the recovery envelope over the half-period between the two
    readings; the log reference radius is the post-pulse reading r_s, so
    the estimate reduces to the generic two-point estimator evaluated at
    elapsed time period/2 (which is what produces the 1/period prefactor).
    """
    if r_s <= RADIUS_FLOOR or r_f <= RADIUS_FLOOR:
        raise DegenerateRadius(
            f"probe radii too small to estimate from (r_s={r_s}, r_f={r_f})"
        )
    return (
        (1.0 / sched.period) * math.log(r_f / r_s)
        - 2.0 * p.a * p.b * r_s
        + p.b * r_s * r_s
    )


def detector_step(
    samples: ProbeSamples,
    sched: ProbeSchedule,
    p: ModelParams,
    state: DetectionState,
) -> tuple[DetectionRecord, DetectionState]:
    """Process one probe's readings: estimate, threshold, latch.

    A degenerate radius pair (probe failed to displace the state
    measurably) yields a skipped record: no estimate, no event. Once an
    event fires the detector latches; callers must stop probing.
    """
    try:
        est = estimate_from_probe(samples.r_s, samples.r_f, sched, p)
    except DegenerateRadius:
        record = DetectionRecord(
            index=samples.index,
            t_s=samples.t_s,
            t_f=samples.t_f,
            r_s=samples.r_s,
            r_f=samples.r_f,
            sigma_estimate=None,
            sigma_true=samples.sigma_true,
            event=False,
        )
        return record, replace(state, next_index=samples.index + 1)

    event = est > sched.threshold
    record = DetectionRecord(
        index=samples.index,
        t_s=samples.t_s,
        t_f=samples.t_f,
        r_s=samples.r_s,
        r_f=samples.r_f,
        sigma_estimate=est,
        sigma_true=samples.sigma_true,
        event=event,
    )
    new_state = replace(
        state,
        next_index=samples.index + 1,
        last_estimate=est,
        halted=state.halted or event,
        event_time=state.event_time if state.event_time is not None else (
            samples.t_f if event else None
        ),
    )
    return record, new_state


def write_detections_jsonl(path, records) -> None:
    """One JSON object per probe, in probe order."""
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec.to_json_obj()) + "\n")

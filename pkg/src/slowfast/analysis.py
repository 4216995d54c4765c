"""Region-of-attraction predicates, recovery-rate bounds, and estimators.

In the resting regime (fold level < c1 < c2 < 0 < c3) the resting
equilibrium (0, 0, c1) attracts two regions:

  R1: c1 <= sigma < c2 and x^2+y^2 < a - sqrt(a^2 + sigma/b)
  R2: sigma < c1

Inside the guaranteed-decay window, the squared radius r = x^2 + y^2
obeys r(t) <= exp(-t*mu(t)) * r(0) with the decay-rate bound

  mu(t) = -2*(sigma(t) + 2*a*b*r(0) - b*r(0)^2)

which vanishes as the excitability approaches the critical level: the
quantitative face of critical slowing down. Inverting the envelope from
two radius readings gives the excitability estimator used by the
probe-based detector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .detect import RADIUS_FLOOR
from .errors import DegenerateRadius, PreconditionError, RegimeError
from .integrator import Trajectory
from .model import ModelParams, SystemState

R1 = "R1"
R2 = "R2"
OUTSIDE = "outside"

ENVELOPE_SLACK = 1e-8  # relative to r(0); absorbs fixed-step integrator error


@dataclass(frozen=True)
class RegionMembership:
    """Region label plus the signed slack of the binding inequality."""

    label: str
    margin: float


@dataclass(frozen=True)
class RecoveryBound:
    """Exponential decay envelope r(0) * exp(-t * mu)."""

    mu: float
    r0: float

    def envelope(self, t: float) -> float:
        return self.r0 * math.exp(-t * self.mu)


@dataclass(frozen=True)
class EnvelopeReport:
    holds: bool
    first_violation: float | None
    exit_time: float | None
    checked_samples: int


@dataclass(frozen=True)
class RecoveryTime:
    time: float
    reached: bool


def _require_resting_regime(p: ModelParams) -> None:
    if not (p.fold_level < p.c1 and p.c2 < 0.0 < p.c3):
        raise RegimeError(
            "region analysis requires fold_level < c1 < c2 < 0 < c3 "
            f"(got fold={p.fold_level}, c1={p.c1}, c2={p.c2}, c3={p.c3})"
        )


def radial_bound(sigma: float, p: ModelParams) -> float:
    """Radius bound a - sqrt(a^2 + sigma/b) of the guaranteed-decay region."""
    return p.a - math.sqrt(max(0.0, p.a * p.a + sigma / p.b))


def region_membership(s: SystemState, p: ModelParams) -> RegionMembership:
    """Classify a state against the resting-state region of attraction.

    For R1 candidates the margin is the radial slack
    (a - sqrt(a^2 + sigma/b)) - (x^2 + y^2); for R2 it is c1 - sigma; for
    states with sigma >= c2 it is the (negative) slack c2 - sigma.
    """
    _require_resting_regime(p)
    if s.sigma < p.c1:
        return RegionMembership(label=R2, margin=p.c1 - s.sigma)
    if s.sigma < p.c2:
        slack = radial_bound(s.sigma, p) - s.squared_radius
        if slack > 0:
            return RegionMembership(label=R1, margin=slack)
        return RegionMembership(label=OUTSIDE, margin=slack)
    return RegionMembership(label=OUTSIDE, margin=p.c2 - s.sigma)


def mu_bound(sigma_t: float, r0: float, p: ModelParams) -> float:
    """Decay-rate bound -2*(sigma + 2ab*r0 - b*r0^2) on the squared radius.

    Returned as-is even when non-positive (no decay guaranteed near the
    critical level); clipping would hide the slowing-down signal.
    """
    if r0 < 0:
        raise ValueError(f"reference squared radius must be >= 0 (got {r0})")
    return -2.0 * (sigma_t + 2.0 * p.a * p.b * r0 - p.b * r0 * r0)


def check_envelope(traj: Trajectory, p: ModelParams) -> EnvelopeReport:
    """Verify the recovery envelope along one unforced decay transient.

    Preconditions (on the first sample): c2 < sigma(0) < 0 and
    r(0) < a - sqrt(a^2 + sigma(0)/b). The guaranteed-decay window ends at
    the first sample whose radius reaches the sigma-dependent bound
    (horizon end if never); every earlier sample must satisfy
    r(t) <= exp(-t*mu(t))*r(0) up to slack 1e-8*r(0).
    """
    sigma0 = float(traj.sigma[0])
    r = traj.squared_radius
    r0 = float(r[0])
    if not (p.c2 < sigma0 < 0.0):
        raise PreconditionError(
            f"envelope check needs c2 < sigma(0) < 0 (got sigma(0)={sigma0})"
        )
    bound0 = radial_bound(sigma0, p)
    if not r0 < bound0:
        raise PreconditionError(
            f"envelope check needs r(0) < {bound0} (got r(0)={r0})"
        )

    t = traj.t - traj.t[0]
    bounds = p.a - np.sqrt(np.maximum(0.0, p.a * p.a + traj.sigma / p.b))
    crossed = np.nonzero(r >= bounds)[0]
    if crossed.size:
        t_exit = float(traj.t[crossed[0]])
        n_check = int(crossed[0])
    else:
        t_exit = float(traj.t[-1])
        n_check = len(traj)

    mu = -2.0 * (traj.sigma[:n_check] + 2.0 * p.a * p.b * r0 - p.b * r0 * r0)
    envelope = r0 * np.exp(-t[:n_check] * mu)
    bad = np.nonzero(r[:n_check] > envelope + ENVELOPE_SLACK * r0)[0]
    if bad.size:
        return EnvelopeReport(
            holds=False,
            first_violation=float(traj.t[bad[0]]),
            exit_time=t_exit,
            checked_samples=n_check,
        )
    return EnvelopeReport(
        holds=True, first_violation=None, exit_time=t_exit, checked_samples=n_check
    )


def estimate_sigma(r0: float, rt: float, t: float, p: ModelParams) -> float:
    """Two-point excitability estimate from squared radii r(0) and r(t).

    Algebraic inverse of the exponential envelope:
    (1/(2t)) * ln(r(t)/r(0)) - 2ab*r(0) + b*r(0)^2. Refuses radii at or
    below the floor 1e-12 rather than returning infinities.
    """
    if not t > 0:
        raise ValueError(f"elapsed time must be > 0 (got {t})")
    if r0 <= RADIUS_FLOOR or rt <= RADIUS_FLOOR:
        raise DegenerateRadius(
            f"squared radii must exceed {RADIUS_FLOOR} (got r0={r0}, rt={rt})"
        )
    return (
        (1.0 / (2.0 * t)) * math.log(rt / r0)
        - 2.0 * p.a * p.b * r0
        + p.b * r0 * r0
    )


def recovery_time(traj: Trajectory, fraction: float) -> RecoveryTime:
    """First sample time after which r stays at or below fraction*r(0).

    Returns the horizon end flagged unreached when the radius never
    settles below the threshold. A trajectory starting at the origin
    recovers immediately (time 0).
    """
    if not 0.0 < fraction < 1.0:
        raise ValueError(f"fraction must lie in (0, 1) (got {fraction})")
    r = traj.squared_radius
    r0 = float(r[0])
    if r0 <= 0.0:
        return RecoveryTime(time=0.0, reached=True)
    threshold = fraction * r0
    # suffix maximum: settled at i iff r[j] <= threshold for all j >= i
    suffix = np.maximum.accumulate(r[::-1])[::-1]
    idx = np.nonzero(suffix <= threshold)[0]
    if idx.size == 0:
        return RecoveryTime(time=float(traj.t[-1] - traj.t[0]), reached=False)
    return RecoveryTime(time=float(traj.t[idx[0]] - traj.t[0]), reached=True)


def count_regions(traj: Trajectory, p: ModelParams) -> dict:
    """Tally the region label of every sample of a trajectory."""
    counts = {R1: 0, R2: 0, OUTSIDE: 0}
    for i in range(len(traj)):
        counts[region_membership(traj.state_at(i), p).label] += 1
    return counts


def analysis_report(
    region_counts: dict | None = None,
    envelope: EnvelopeReport | None = None,
    recovery_times: dict | None = None,
    sigma_estimates: list | None = None,
) -> dict:
    """Assemble the exportable analysis report object."""
    return {
        "region_counts": region_counts or {},
        "envelope_holds": None if envelope is None else envelope.holds,
        "first_violation": None if envelope is None else envelope.first_violation,
        "recovery_times": recovery_times or {},
        "sigma_estimates": sigma_estimates or [],
    }

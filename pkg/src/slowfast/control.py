"""Event-based proportional feedback on the fast channels.

The gain stays at zero until the detector reports an early-warning event;
from the first step strictly after the event time the inputs
u = (-F*x, -F*y) are applied, and the policy stays latched for the rest
of the run. The slow excitability variable is never actuated: with the
resting state destabilized the controller simply holds the fast channels
at the origin by feedback.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .model import SystemState


@dataclass(frozen=True)
class ControlPolicy:
    """Latching feedback policy: gain F, armed until an event latches it."""

    gain: float
    latched: bool = False
    activation_time: float | None = None

    def __post_init__(self):
        if self.gain < 0:
            raise ValueError(f"feedback gain must be >= 0 (got {self.gain})")


def control_input(s: SystemState, policy: ControlPolicy) -> tuple[float, float]:
    """(0, 0) before the latch; (-F*x, -F*y) after."""
    if not policy.latched:
        return (0.0, 0.0)
    return (-policy.gain * s.x, -policy.gain * s.y)


def on_event(policy: ControlPolicy, t: float) -> ControlPolicy:
    """Latch the policy at event time t; repeated events are ignored.

    Latching is monotone: once set, neither the flag nor the recorded
    activation time ever changes.
    """
    if policy.latched:
        return policy
    return replace(policy, latched=True, activation_time=t)

"""Model definitions: parameters, vector field, and the attractor catalog.

The system couples a planar oscillator pair (x, y) to a slowly drifting
excitability variable sigma:

    dx/dt     = -omega*y + x*f(x, y, sigma)
    dy/dt     =  omega*x + y*f(x, y, sigma)
    dsigma/dt = -epsilon*(sigma - c1)*(sigma - c2)*(sigma - c3)

with f(x, y, sigma) = sigma + 2*a*b*(x^2 + y^2) - b*(x^2 + y^2)^2.

Setting epsilon = 0 freezes sigma and recovers the fixed-excitability
oscillator as a degenerate case; there is deliberately no separate code
path for it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import BoundaryCase

STABLE = "stable"
UNSTABLE = "unstable"
NONEXISTENT = "nonexistent"


@dataclass(frozen=True)
class ModelParams:
    """All model constants; the single source of truth for every formula.

    omega    -- angular frequency of the planar rotation (> 0)
    a, b     -- amplitude-shape and saturation parameters (> 0)
    c1..c3   -- equilibria of the slow subsystem, strictly increasing
    epsilon  -- slow/fast timescale ratio (>= 0; 0 freezes sigma)
    """

    omega: float
    a: float
    b: float
    c1: float
    c2: float
    c3: float
    epsilon: float

    def __post_init__(self):
        if not (self.omega > 0 and self.a > 0 and self.b > 0):
            raise ValueError(
                f"omega, a, b must be positive (got omega={self.omega}, "
                f"a={self.a}, b={self.b})"
            )
        if not (self.c1 < self.c2 < self.c3):
            raise ValueError(
                f"slow equilibria must satisfy c1 < c2 < c3 "
                f"(got {self.c1}, {self.c2}, {self.c3})"
            )
        if not self.epsilon >= 0:
            raise ValueError(f"epsilon must be >= 0 (got {self.epsilon})")
        for name in ("omega", "a", "b", "c1", "c2", "c3", "epsilon"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"parameter {name} must be finite")

    @property
    def fold_level(self) -> float:
        """Excitability value -a^2*b where the cycle pair is born."""
        return -self.a * self.a * self.b

    def slow_targets(self) -> tuple[float, float, float]:
        return (self.c1, self.c2, self.c3)


@dataclass(frozen=True)
class SystemState:
    """One point of the flow: time plus the (x, y, sigma) triple."""

    t: float
    x: float
    y: float
    sigma: float

    def __post_init__(self):
        for name in ("t", "x", "y", "sigma"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"SystemState.{name} must be finite")

    @property
    def squared_radius(self) -> float:
        return self.x * self.x + self.y * self.y


def f_value(x: float, y: float, sigma: float, p: ModelParams) -> float:
    """Radial growth factor sigma + 2ab(x^2+y^2) - b(x^2+y^2)^2."""
    r = x * x + y * y
    return sigma + 2.0 * p.a * p.b * r - p.b * r * r


def vector_field(
    s: SystemState,
    p: ModelParams,
    forcing: tuple[float, float, float] = (0.0, 0.0, 0.0),
) -> tuple[float, float, float]:
    """Time derivative of (x, y, sigma) under additive forcing."""
    f = f_value(s.x, s.y, s.sigma, p)
    zx, zy, zs = forcing
    dx = -p.omega * s.y + s.x * f + zx
    dy = p.omega * s.x + s.y * f + zy
    ds = -p.epsilon * (s.sigma - p.c1) * (s.sigma - p.c2) * (s.sigma - p.c3) + zs
    return (dx, dy, ds)


@dataclass(frozen=True)
class CycleInfo:
    """One invariant circle at a slow-target level: existence and stability."""

    exists: bool
    squared_radius: float | None
    stability: str  # STABLE / UNSTABLE / NONEXISTENT


@dataclass(frozen=True)
class AttractorSet:
    """Equilibrium plus outer/inner cycles associated with one slow target."""

    index: int
    sigma: float
    equilibrium_stability: str
    outer_cycle: CycleInfo
    inner_cycle: CycleInfo


@dataclass(frozen=True)
class AttractorCatalog:
    sets: tuple[AttractorSet, AttractorSet, AttractorSet]

    def at(self, index: int) -> AttractorSet:
        if index not in (1, 2, 3):
            raise ValueError(f"attractor index must be 1, 2 or 3 (got {index})")
        return self.sets[index - 1]


def radius_offset(p: ModelParams, level: float) -> float:
    """sqrt(a^2 + level/b), guarded so it never produces NaN.

    Only meaningful when the corresponding cycle exists; callers must gate
    on the existence predicate first.
    """
    return math.sqrt(max(0.0, p.a * p.a + level / p.b))


def attractor_catalog(p: ModelParams) -> AttractorCatalog:
    """Classify the equilibrium and cycle pair at each slow target.

    For the attracting slow targets (indices 1 and 3) the three parameter
    regimes are, with g = sqrt(a^2 + c_i/b):

      c_i < -a^2*b        equilibrium stable, no cycles
      -a^2*b < c_i < 0    equilibrium and outer cycle (r^2 = a+g) stable,
                          inner cycle (r^2 = a-g) unstable
      c_i > 0             outer cycle stable, equilibrium unstable,
                          inner cycle nonexistent

    Index 2 sits on the repelling slow target, so every object that exists
    there is unstable; the existence rules are identical.

    Raises BoundaryCase when any c_i equals -a^2*b or 0 exactly: the
    classification is degenerate at the bifurcation points and we report
    that explicitly rather than guess.
    """
    fold = p.fold_level
    sets = []
    for index, level in zip((1, 2, 3), p.slow_targets()):
        if level == fold or level == 0.0:
            raise BoundaryCase(
                f"c{index}={level} sits exactly on a bifurcation boundary "
                f"(saddle-node at {fold}, equilibrium loss at 0); "
                "stability is degenerate there"
            )
        slow_attracting = index in (1, 3)
        if level < fold:
            eq_stab = STABLE if slow_attracting else UNSTABLE
            outer = CycleInfo(False, None, NONEXISTENT)
            inner = CycleInfo(False, None, NONEXISTENT)
        else:
            g = radius_offset(p, level)
            if level < 0.0:
                eq_stab = STABLE if slow_attracting else UNSTABLE
                outer = CycleInfo(
                    True, p.a + g, STABLE if slow_attracting else UNSTABLE
                )
                inner = CycleInfo(True, p.a - g, UNSTABLE)
            else:
                eq_stab = UNSTABLE
                outer = CycleInfo(
                    True, p.a + g, STABLE if slow_attracting else UNSTABLE
                )
                inner = CycleInfo(False, None, NONEXISTENT)
        sets.append(
            AttractorSet(
                index=index,
                sigma=level,
                equilibrium_stability=eq_stab,
                outer_cycle=outer,
                inner_cycle=inner,
            )
        )
    return AttractorCatalog(sets=(sets[0], sets[1], sets[2]))

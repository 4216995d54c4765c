"""Model core: radial growth factor, vector field, attractor catalog."""

import math

import numpy as np
import pytest

from slowfast import (
    BoundaryCase,
    ModelParams,
    SystemState,
    attractor_catalog,
    f_value,
    radius_offset,
    vector_field,
)
from helpers import params_fig4


def unit_params(**kw):
    base = dict(omega=1.0, a=1.0, b=1.0, c1=-0.9, c2=-0.7, c3=0.5, epsilon=0.1)
    base.update(kw)
    return ModelParams(**base)


# ---------------------------------------------------------------- f_value


def test_f_at_origin_reduces_to_sigma():
    assert f_value(0.0, 0.0, -0.5, unit_params()) == -0.5


def test_f_direct_evaluation():
    # sigma=0, r=1: 0 + 2*1*1*1 - 1*1 = 1
    assert f_value(1.0, 0.0, 0.0, unit_params()) == 1.0


def test_f_vanishes_on_cycles():
    """Cycle radii are roots of f by construction."""
    rng = np.random.default_rng(7)
    for _ in range(50):
        a = rng.uniform(0.3, 2.0)
        b = rng.uniform(0.3, 2.0)
        c = rng.uniform(-a * a * b + 1e-3, 2.0)
        if abs(c) < 1e-3:
            continue
        p = unit_params(a=a, b=b, c1=min(c, -a * a * b) - 1.0, c2=-a * a * b - 0.5,
                        c3=max(c, -a * a * b) + 2.0)
        r_sq = a + radius_offset(p, c)
        theta = rng.uniform(0.0, 2.0 * math.pi)
        x = math.sqrt(r_sq) * math.cos(theta)
        y = math.sqrt(r_sq) * math.sin(theta)
        assert abs(f_value(x, y, c, p)) < 1e-12


# ------------------------------------------------------------ vector_field


def test_equilibria_are_exact_zeros():
    p = params_fig4()
    for c in (p.c1, p.c2, p.c3):
        s = SystemState(t=0.0, x=0.0, y=0.0, sigma=c)
        assert vector_field(s, p) == (0.0, 0.0, 0.0)


def test_slow_drift_value():
    # dsigma at sigma=0: -0.1 * (0.9) * (0.7) * (-0.5) = +0.0315
    p = params_fig4()
    s = SystemState(t=0.0, x=0.0, y=0.0, sigma=0.0)
    dx, dy, ds = vector_field(s, p)
    assert dx == 0.0 and dy == 0.0
    assert ds == pytest.approx(0.0315, abs=1e-15)


def test_forcing_enters_additively():
    p = params_fig4()
    s = SystemState(t=0.0, x=0.2, y=-0.3, sigma=-0.8)
    base = vector_field(s, p)
    forced = vector_field(s, p, forcing=(0.5, -0.25, 0.1))
    assert forced[0] == pytest.approx(base[0] + 0.5)
    assert forced[1] == pytest.approx(base[1] - 0.25)
    assert forced[2] == pytest.approx(base[2] + 0.1)


def test_radial_reduction_identity():
    """d(x^2+y^2)/dt equals 2*(x^2+y^2)*f: the rotation terms cancel."""
    rng = np.random.default_rng(11)
    for _ in range(200):
        p = unit_params(
            omega=rng.uniform(0.5, 6.0),
            a=rng.uniform(0.3, 2.0),
            b=rng.uniform(0.3, 2.0),
            epsilon=rng.uniform(0.0, 0.2),
        )
        s = SystemState(
            t=0.0,
            x=rng.uniform(-2, 2),
            y=rng.uniform(-2, 2),
            sigma=rng.uniform(-1.5, 1.0),
        )
        dx, dy, _ = vector_field(s, p)
        lhs = 2.0 * s.x * dx + 2.0 * s.y * dy
        rhs = 2.0 * s.squared_radius * f_value(s.x, s.y, s.sigma, p)
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))


# ------------------------------------------------------- attractor catalog


def test_catalog_bistable_level():
    """-a^2 b < c < 0: equilibrium and outer cycle stable, inner unstable."""
    cat = attractor_catalog(unit_params())
    one = cat.at(1)
    assert one.equilibrium_stability == "stable"
    assert one.outer_cycle.stability == "stable"
    assert one.outer_cycle.squared_radius == pytest.approx(1 + math.sqrt(0.1), abs=1e-12)
    assert one.inner_cycle.stability == "unstable"
    assert one.inner_cycle.squared_radius == pytest.approx(1 - math.sqrt(0.1), abs=1e-12)


def test_catalog_oscillatory_level():
    """c > 0: only the outer cycle attracts; the equilibrium repels."""
    cat = attractor_catalog(unit_params())
    three = cat.at(3)
    assert three.equilibrium_stability == "unstable"
    assert three.outer_cycle.stability == "stable"
    assert three.outer_cycle.squared_radius == pytest.approx(
        1 + math.sqrt(1.5), abs=1e-12
    )
    assert not three.inner_cycle.exists
    assert three.inner_cycle.stability == "nonexistent"


def test_catalog_quiescent_level():
    """c < -a^2 b: the equilibrium is the only object."""
    cat = attractor_catalog(unit_params(c1=-1.5))
    one = cat.at(1)
    assert one.equilibrium_stability == "stable"
    assert not one.outer_cycle.exists
    assert not one.inner_cycle.exists


def test_catalog_middle_level_all_unstable():
    cat = attractor_catalog(unit_params())
    two = cat.at(2)
    assert two.equilibrium_stability == "unstable"
    assert two.outer_cycle.exists and two.outer_cycle.stability == "unstable"
    assert two.inner_cycle.exists and two.inner_cycle.stability == "unstable"


@pytest.mark.parametrize("c1", [-1.0, 0.0])
def test_catalog_boundary_refuses(c1):
    p = unit_params(c1=c1, c2=0.3, c3=0.5) if c1 == 0.0 else unit_params(c1=c1)
    with pytest.raises(BoundaryCase):
        attractor_catalog(p)


def test_catalog_existence_rules_exhaustive():
    """Away from the two boundary levels the three regimes partition."""
    p0 = unit_params()
    fold = p0.fold_level
    for c in np.linspace(-2.0, 1.0, 61):
        c = float(c)
        if abs(c - fold) < 1e-9 or abs(c) < 1e-9:
            continue
        p = unit_params(c1=c, c2=c + 0.1, c3=c + 3.0)
        try:
            entry = attractor_catalog(p).at(1)
        except BoundaryCase:
            # c+0.1 or c+3.0 may hit a boundary; not the regime under test
            continue
        assert entry.outer_cycle.exists == (c > fold)
        assert entry.inner_cycle.exists == (fold < c < 0)
        if entry.outer_cycle.exists and entry.inner_cycle.exists:
            assert 0.0 <= entry.inner_cycle.squared_radius
            assert entry.inner_cycle.squared_radius <= entry.outer_cycle.squared_radius


# ------------------------------------------------------------- validation


def test_params_require_order():
    with pytest.raises(ValueError):
        ModelParams(omega=1, a=1, b=1, c1=-0.7, c2=-0.9, c3=0.5, epsilon=0.1)


@pytest.mark.parametrize(
    "kw",
    [
        {"omega": 0.0},
        {"a": -1.0},
        {"b": 0.0},
        {"epsilon": -0.1},
    ],
)
def test_params_positivity(kw):
    with pytest.raises(ValueError):
        unit_params(**kw)


def test_state_requires_finite():
    with pytest.raises(ValueError):
        SystemState(t=0.0, x=float("nan"), y=0.0, sigma=0.0)

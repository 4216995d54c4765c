import pytest

from slowfast import simulate
from slowfast.scenarios import make_fig7, make_fig8


@pytest.fixture(scope="session")
def fig7_result():
    """Shared probed run: estimation, detection, no control."""
    spec = make_fig7()
    return simulate(
        spec.initial, spec.params, spec.forcing, spec.cfg, probes=spec.probes
    )


@pytest.fixture(scope="session")
def fig8_result():
    """Shared controlled twin of fig7 (gain 1.4)."""
    spec = make_fig8()
    return simulate(
        spec.initial,
        spec.params,
        spec.forcing,
        spec.cfg,
        controller=spec.control,
        probes=spec.probes,
    )

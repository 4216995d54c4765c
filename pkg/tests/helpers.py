"""Shared test utilities."""

import numpy as np

from slowfast import IntegratorConfig, ModelParams, SystemState, Trajectory


def params_fig4():
    return ModelParams(omega=2.0, a=1.0, b=1.0, c1=-0.9, c2=-0.7, c3=0.5, epsilon=0.1)


def params_fig5():
    return ModelParams(omega=5.0, a=1.0, b=1.0, c1=-0.9, c2=-0.7, c3=0.5, epsilon=0.01)


def params_fig7():
    return ModelParams(omega=4.0, a=1.0, b=1.0, c1=-0.9, c2=-0.7, c3=0.2, epsilon=0.1)


def synthetic_trajectory(t, squared_radius, sigma, params):
    """Build a Trajectory from prescribed r(t) and sigma(t) arrays.

    The state is placed on the positive x axis (x = sqrt(r), y = 0), which
    is all the radial analyses look at.
    """
    t = np.asarray(t, dtype=float)
    r = np.asarray(squared_radius, dtype=float)
    sig = np.asarray(sigma, dtype=float)
    n = t.shape[0]
    states = np.zeros((n, 3))
    states[:, 0] = np.sqrt(r)
    states[:, 2] = sig
    dt = float(t[1] - t[0]) if n > 1 else 1.0
    cfg = IntegratorConfig(dt=dt, horizon=max(dt, float(t[-1] - t[0])))
    return Trajectory(
        t=t,
        states=states,
        forcing=np.zeros((n, 3)),
        control=np.zeros((n, 2)),
        params=params,
        config=cfg,
        forcing_digest="synthetic",
        final_state=SystemState(
            t=float(t[-1]),
            x=float(states[-1, 0]),
            y=0.0,
            sigma=float(sig[-1]),
        ),
    )

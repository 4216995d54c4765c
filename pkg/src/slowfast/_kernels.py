"""Compiled fixed-step integration cores.

Both kernels implement exactly the same classical 4th-order Runge-Kutta
arithmetic as :func:`slowfast.integrator.step`, in the same operation
order, so a composed-step reference run and a kernel run agree bit for
bit (tests assert this).

Forcing is held constant over each step (the driver re-slices segments at
every pulse edge, so the hold is exact for the piecewise-constant forcing
class the package supports); optional per-step noise rows are added on
top of the constant part.
"""

from __future__ import annotations

import math

import numba
import numpy as np


@numba.njit(cache=True)
def rk4_span(
    x,
    y,
    s,
    k0,
    k1,
    dt,
    omega,
    a,
    b,
    c1,
    c2,
    c3,
    eps,
    zx,
    zy,
    zs,
    gain,
    noise,
    has_noise,
    stride,
    out_t,
    out_state,
    out_zeta,
    out_u,
):  # pragma: no cover - exercised via integrator.simulate
    """Advance steps k0..k1-1; record every stride-th entering state.

    Returns (x, y, s, status); status is -1 on success, else the index of
    the step whose output went non-finite (the returned state is the last
    good one).
    """
    for k in range(k0, k1):
        nzx = zx
        nzy = zy
        nzs = zs
        if has_noise:
            nzx = zx + noise[k - k0, 0]
            nzy = zy + noise[k - k0, 1]
            nzs = zs + noise[k - k0, 2]
        if k % stride == 0:
            row = k // stride
            out_t[row] = k * dt
            out_state[row, 0] = x
            out_state[row, 1] = y
            out_state[row, 2] = s
            out_zeta[row, 0] = nzx
            out_zeta[row, 1] = nzy
            out_zeta[row, 2] = nzs
            out_u[row, 0] = -gain * x
            out_u[row, 1] = -gain * y

        r = x * x + y * y
        f = s + 2.0 * a * b * r - b * r * r
        k1x = -omega * y + x * f + nzx - gain * x
        k1y = omega * x + y * f + nzy - gain * y
        k1s = -eps * (s - c1) * (s - c2) * (s - c3) + nzs

        x2 = x + 0.5 * dt * k1x
        y2 = y + 0.5 * dt * k1y
        s2 = s + 0.5 * dt * k1s
        r = x2 * x2 + y2 * y2
        f = s2 + 2.0 * a * b * r - b * r * r
        k2x = -omega * y2 + x2 * f + nzx - gain * x2
        k2y = omega * x2 + y2 * f + nzy - gain * y2
        k2s = -eps * (s2 - c1) * (s2 - c2) * (s2 - c3) + nzs

        x3 = x + 0.5 * dt * k2x
        y3 = y + 0.5 * dt * k2y
        s3 = s + 0.5 * dt * k2s
        r = x3 * x3 + y3 * y3
        f = s3 + 2.0 * a * b * r - b * r * r
        k3x = -omega * y3 + x3 * f + nzx - gain * x3
        k3y = omega * x3 + y3 * f + nzy - gain * y3
        k3s = -eps * (s3 - c1) * (s3 - c2) * (s3 - c3) + nzs

        x4 = x + dt * k3x
        y4 = y + dt * k3y
        s4 = s + dt * k3s
        r = x4 * x4 + y4 * y4
        f = s4 + 2.0 * a * b * r - b * r * r
        k4x = -omega * y4 + x4 * f + nzx - gain * x4
        k4y = omega * x4 + y4 * f + nzy - gain * y4
        k4s = -eps * (s4 - c1) * (s4 - c2) * (s4 - c3) + nzs

        nx = x + dt / 6.0 * (k1x + 2.0 * (k2x + k3x) + k4x)
        ny = y + dt / 6.0 * (k1y + 2.0 * (k2y + k3y) + k4y)
        ns = s + dt / 6.0 * (k1s + 2.0 * (k2s + k3s) + k4s)
        if not (math.isfinite(nx) and math.isfinite(ny) and math.isfinite(ns)):
            return x, y, s, k
        x = nx
        y = ny
        s = ns
    return x, y, s, -1


@numba.njit(cache=True)
def rk4_batch(
    states,
    n_steps,
    dt,
    omega,
    a,
    b,
    c1,
    c2,
    c3,
    eps,
    stride,
    out,
):  # pragma: no cover - exercised via scenarios/analysis sweeps
    """Unforced ensemble integration; fills out[i, k//stride] per member.

    ``out`` must have shape (N, n_steps//stride + 1, 3); the last row is
    only written when stride divides n_steps.
    """
    n = states.shape[0]
    for i in range(n):
        x = states[i, 0]
        y = states[i, 1]
        s = states[i, 2]
        for k in range(n_steps):
            if k % stride == 0:
                row = k // stride
                out[i, row, 0] = x
                out[i, row, 1] = y
                out[i, row, 2] = s

            r = x * x + y * y
            f = s + 2.0 * a * b * r - b * r * r
            k1x = -omega * y + x * f
            k1y = omega * x + y * f
            k1s = -eps * (s - c1) * (s - c2) * (s - c3)

            x2 = x + 0.5 * dt * k1x
            y2 = y + 0.5 * dt * k1y
            s2 = s + 0.5 * dt * k1s
            r = x2 * x2 + y2 * y2
            f = s2 + 2.0 * a * b * r - b * r * r
            k2x = -omega * y2 + x2 * f
            k2y = omega * x2 + y2 * f
            k2s = -eps * (s2 - c1) * (s2 - c2) * (s2 - c3)

            x3 = x + 0.5 * dt * k2x
            y3 = y + 0.5 * dt * k2y
            s3 = s + 0.5 * dt * k2s
            r = x3 * x3 + y3 * y3
            f = s3 + 2.0 * a * b * r - b * r * r
            k3x = -omega * y3 + x3 * f
            k3y = omega * x3 + y3 * f
            k3s = -eps * (s3 - c1) * (s3 - c2) * (s3 - c3)

            x4 = x + dt * k3x
            y4 = y + dt * k3y
            s4 = s + dt * k3s
            r = x4 * x4 + y4 * y4
            f = s4 + 2.0 * a * b * r - b * r * r
            k4x = -omega * y4 + x4 * f
            k4y = omega * x4 + y4 * f
            k4s = -eps * (s4 - c1) * (s4 - c2) * (s4 - c3)

            x = x + dt / 6.0 * (k1x + 2.0 * (k2x + k3x) + k4x)
            y = y + dt / 6.0 * (k1y + 2.0 * (k2y + k3y) + k4y)
            s = s + dt / 6.0 * (k1s + 2.0 * (k2s + k3s) + k4s)
        if n_steps % stride == 0:
            row = n_steps // stride
            out[i, row, 0] = x
            out[i, row, 1] = y
            out[i, row, 2] = s
        states[i, 0] = x
        states[i, 1] = y
        states[i, 2] = s


def batch_integrate(states: np.ndarray, n_steps: int, dt: float, p, stride: int):
    """Convenience wrapper: integrate an unforced ensemble in place.

    Returns the (N, n_steps//stride + 1, 3) sample cube (last row valid
    only when stride divides n_steps).
    """
    n_rows = n_steps // stride + 1
    out = np.empty((states.shape[0], n_rows, 3), dtype=np.float64)
    rk4_batch(
        states,
        n_steps,
        dt,
        p.omega,
        p.a,
        p.b,
        p.c1,
        p.c2,
        p.c3,
        p.epsilon,
        stride,
        out,
    )
    return out

"""Small numerical integrators: adaptive Simpson quadrature and fixed-step RK4."""
from __future__ import annotations

from typing import Callable

import numpy as np


def adaptive_simpson(f: Callable[[float], float], a: float, b: float, tol: float = 1e-10,
                     max_depth: int = 60) -> float:
    """Integrate a scalar function on [a, b] by adaptive Simpson's rule.

    Each panel is accepted once the two-half estimate differs from the
    whole-panel estimate by at most 15 * tol (the usual Richardson bound),
    with the tolerance split in half at every bisection.
    """
    if a == b:
        return 0.0
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    total = 0.0
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    while stack:
        a0, b0, fa0, fm0, fb0, s0, t0, depth = stack.pop()
        m0 = 0.5 * (a0 + b0)
        lm, rm = 0.5 * (a0 + m0), 0.5 * (m0 + b0)
        flm, frm = f(lm), f(rm)
        left = (m0 - a0) / 6.0 * (fa0 + 4.0 * flm + fm0)
        right = (b0 - m0) / 6.0 * (fm0 + 4.0 * frm + fb0)
        err = left + right - s0
        if depth >= max_depth or abs(err) <= 15.0 * t0:
            total += left + right + err / 15.0
        else:
            stack.append((a0, m0, fa0, flm, fm0, left, 0.5 * t0, depth + 1))
            stack.append((m0, b0, fm0, frm, fb0, right, 0.5 * t0, depth + 1))
    return sign * total


def rk4(fun: Callable[[float, np.ndarray], np.ndarray], t0: float, y0, t1: float, n: int):
    """Classical RK4 with n equal steps. Returns (ts, ys) including both ends."""
    y = np.array(y0, dtype=float)
    ts = np.linspace(t0, t1, n + 1)
    dt = (t1 - t0) / n
    ys = np.empty((n + 1,) + y.shape)
    ys[0] = y
    for i in range(n):
        t = ts[i]
        k1 = fun(t, y)
        k2 = fun(t + 0.5 * dt, y + 0.5 * dt * k1)
        k3 = fun(t + 0.5 * dt, y + 0.5 * dt * k2)
        k4 = fun(t + dt, y + dt * k3)
        y = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        ys[i + 1] = y
    return ts, ys


def rk4_converged(fun, t0: float, y0, t1: float, tol: float = 1e-9, n0: int = 32,
                  max_n: int = 1 << 16):
    """Run RK4, doubling the step count until the endpoint moves by less than tol.

    Returns (ts, ys, n, change) for the finest run; ``change`` is the
    endpoint difference between the last two resolutions.
    """
    n = n0
    ts, ys = rk4(fun, t0, y0, t1, n)
    change = np.inf
    while n < max_n:
        n *= 2
        ts2, ys2 = rk4(fun, t0, y0, t1, n)
        change = float(np.max(np.abs(ys2[-1] - ys[-1])))
        ts, ys = ts2, ys2
        if change < tol:
            break
    return ts, ys, n, change

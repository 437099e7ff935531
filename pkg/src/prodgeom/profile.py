"""Profile curves of the umbilical family and the linear ODE that classifies them.

A profile alpha(s) = (s, alpha_1(s), alpha_2(s), alpha_3(s)) in S^2 x R generates
an umbilical rotational submanifold exactly when alpha_1, alpha_2 solve

    s X(s) f'' + (s^4 - p^2 + q) f' - s^3 f = 0,   X(s) = (s^2 - p)^2 - q,

and alpha_3' = +-s / sqrt(X).  The ODE has the closed-form basis
rho_+- = exp(+-F) with F' = s / sqrt(X); for q > 0 we take F = -log h_{p,q}.

s = 0 is a singular point of the ODE (the leading coefficient vanishes and
the Wronskian -2F' is zero there), so working intervals must stay on one
side of it.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import BranchUnavailable, IntervalLeavesDomain, OutOfDomain
from .family import SQRT2, FamilyParams, h_pq, h_pq_derivatives
from .integrate import adaptive_simpson, rk4_converged

ROOT_MARGIN = 1e-3
QUAD_TOL = 1e-10


def X_poly(p: float, q: float, s):
    s = np.asarray(s, dtype=float)
    return (s * s - p) ** 2 - q


def _x_roots(p: float, q: float) -> list[float]:
    roots = []
    if q < 0:
        return roots
    for v in (p - np.sqrt(q), p + np.sqrt(q)):
        if v >= 0:
            r = float(np.sqrt(v))
            roots.extend([r, -r] if r > 0 else [0.0])
    return roots


@dataclass(frozen=True)
class ODEParams:
    """(p, q) with p^2 > q and a working interval on which X > 0."""

    p: float
    q: float
    interval: tuple[float, float]

    def __post_init__(self):
        if not self.p * self.p > self.q:
            raise OutOfDomain(f"the ODE needs p^2 > q, got p={self.p}, q={self.q}")
        a, b = self.interval
        if not a < b:
            raise IntervalLeavesDomain("working interval must have a < b")
        check_interval(self.p, self.q, a, b)

    @classmethod
    def default(cls, p: float, q: float, lo: float = 0.05, hi: float = 0.95) -> "ODEParams":
        """Interval (lo, hi) * sqrt(p - sqrt(q)), the positive half of J_{p,q}."""
        if q < 0 or p < np.sqrt(max(q, 0.0)):
            raise IntervalLeavesDomain("no default interval: p - sqrt(q) must be positive")
        end = float(np.sqrt(p - np.sqrt(q)))
        return cls(p, q, (lo * end, hi * end))

    @classmethod
    def from_family(cls, fp: FamilyParams, lo: float = 0.05, hi: float = 0.95) -> "ODEParams":
        return cls.default(fp.p, fp.q, lo, hi)

    def X(self, s):
        return X_poly(self.p, self.q, s)

    def grid(self, n: int = 50) -> np.ndarray:
        return np.linspace(*self.interval, n)


def check_interval(p: float, q: float, a: float, b: float, margin: float = ROOT_MARGIN) -> None:
    """Raise IntervalLeavesDomain unless [a, b] keeps `margin` away from 0 and the roots of X."""
    for r in _x_roots(p, q) + [0.0]:
        if a - margin <= r <= b + margin:
            raise IntervalLeavesDomain(
                f"interval [{a:.6g}, {b:.6g}] comes within {margin:g} of the singular point s = {r:.6g}"
            )
    if X_poly(p, q, 0.5 * (a + b)) <= 0:
        raise IntervalLeavesDomain(f"X(s) = (s^2-p)^2-q is negative on [{a:.6g}, {b:.6g}]")


def ode_residual(params: ODEParams, f: Callable, s):
    """Left side of the ODE for ``f(s) -> (f, f', f'')``."""
    s = np.asarray(s, dtype=float)
    f0, f1, f2 = f(s)
    p, q = params.p, params.q
    return s * params.X(s) * f2 + (s ** 4 - p * p + q) * f1 - s ** 3 * f0


def _F_derivatives(params: ODEParams, s):
    """(F, F', F'') for the basis exponent."""
    s = np.asarray(s, dtype=float)
    X = params.X(s)
    rx = np.sqrt(X)
    F1 = s / rx
    F2 = 1.0 / rx - 2.0 * s * s * (s * s - params.p) / (X * rx)
    if params.q == 0:
        F0 = -0.5 * np.log(params.p - s * s)
    else:
        F0 = -np.log(h_pq(FamilyParams(params.p, params.q), s))
    return F0, F1, F2


@dataclass(frozen=True)
class ClosedFormBasis:
    params: ODEParams

    def rho(self, sign: int, s):
        """(rho, rho', rho'') for rho = exp(sign * F)."""
        F0, F1, F2 = _F_derivatives(self.params, s)
        g1, g2 = sign * F1, sign * F2
        r = np.exp(sign * F0)
        return r, r * g1, r * (g2 + g1 * g1)

    def rho_plus(self, s):
        return self.rho(1, s)

    def rho_minus(self, s):
        return self.rho(-1, s)

    def wronskian(self, s):
        rp, dp, _ = self.rho_plus(s)
        rm, dm, _ = self.rho_minus(s)
        return rp * dm - dp * rm


def closed_form_basis(params: ODEParams, n_check: int = 50) -> ClosedFormBasis:
    """The basis exp(+-F) on the working interval.

    Available for q > 0 with the interval inside J_{p,q} (F = -log h_{p,q})
    and for q = 0 < p with s^2 < p (F = -log(p - s^2) / 2).
    """
    p, q = params.p, params.q
    a, b = params.interval
    if q < 0:
        raise BranchUnavailable("closed-form basis only covers q >= 0")
    if q == 0 and p <= 0:
        raise BranchUnavailable("q = 0 needs p > 0")
    end2 = p - np.sqrt(q)
    if max(a * a, b * b) >= end2:
        raise BranchUnavailable(
            f"interval [{a:.6g}, {b:.6g}] leaves |s| < sqrt(p - sqrt(q)) = {np.sqrt(max(end2, 0)):.6g}"
        )
    basis = ClosedFormBasis(params)
    s = params.grid(n_check)
    for sign in (1, -1):
        res = np.max(np.abs(ode_residual(params, lambda t: basis.rho(sign, t), s)))
        if res > 1e-8:
            raise BranchUnavailable(f"closed-form solution fails the ODE (residual {res:.3g})")
    prod = basis.rho_plus(s)[0] * basis.rho_minus(s)[0]
    if np.max(np.abs(prod - 1.0)) > 1e-12:
        raise BranchUnavailable("rho_+ * rho_- differs from 1")
    return basis


@dataclass(frozen=True)
class ODESolution:
    s: np.ndarray
    f: np.ndarray
    df: np.ndarray
    steps: int
    endpoint_change: float


def _ode_rhs(params: ODEParams):
    p, q = params.p, params.q

    def rhs(s, y):
        f, df = y
        d2 = (s ** 3 * f - (s ** 4 - p * p + q) * df) / (s * ((s * s - p) ** 2 - q))
        return np.array([df, d2])

    return rhs


def integrate_ode(params: ODEParams, f0: float, df0: float, interval=None,
                  tol: float = 1e-9) -> ODESolution:
    """RK4 from interval[0] to interval[1], doubling steps until the endpoint settles below tol."""
    a, b = params.interval if interval is None else interval
    check_interval(params.p, params.q, min(a, b), max(a, b))
    ts, ys, n, change = rk4_converged(_ode_rhs(params), a, [f0, df0], b, tol=tol)
    return ODESolution(ts, ys[:, 0], ys[:, 1], n, change)


# --- profile reconstruction -----------------------------------------------

@dataclass(frozen=True)
class ProfileCurve:
    """alpha(s) = (s, alpha_1, alpha_2, alpha_3) reconstructed from (p, q, theta, sign).

    ``sign`` picks the +- of the linear-algebra solution for (alpha_1, alpha_2);
    ``height_sign`` is the sign of alpha_3' = height_sign * s / sqrt(X).
    alpha_3 is anchored at alpha_3(0) = 0.
    """

    family: FamilyParams
    theta: float
    sign: int
    height_sign: int

    def _ab(self, s):
        h, dh, ddh = h_pq_derivatives(self.family, s)
        c = 1.0 - self.family.p
        rd = np.sqrt(self.family.disc)
        a = h + c / h
        da = dh - c * dh / h ** 2
        dda = ddh - c * (ddh / h ** 2 - 2.0 * dh * dh / h ** 3)
        b = rd / h
        db = -rd * dh / h ** 2
        ddb = -rd * (ddh / h ** 2 - 2.0 * dh * dh / h ** 3)
        return (a, da, dda), (b, db, ddb)

    def _plane(self, a, b):
        ct, st = np.cos(self.theta), np.sin(self.theta)
        x = (a * ct - self.sign * b * st) / SQRT2
        y = (a * st + self.sign * b * ct) / SQRT2
        return x, y

    def alpha3(self, s) -> np.ndarray:
        p, q = self.family.p, self.family.q

        def integrand(t):
            return t / np.sqrt((t * t - p) ** 2 - q)

        s = np.atleast_1d(np.asarray(s, dtype=float))
        vals = np.array([adaptive_simpson(integrand, 0.0, float(si), tol=QUAD_TOL) for si in s.ravel()])
        return self.height_sign * vals.reshape(s.shape)

    def value(self, s) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        (a, _, _), (b, _, _) = self._ab(s)
        a1, a2 = self._plane(a, b)
        return np.stack([s, a1, a2, self.alpha3(s)], axis=-1)

    def derivatives(self, s) -> tuple[np.ndarray, np.ndarray]:
        """(alpha', alpha'') from the analytic derivatives of h."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        (a, da, dda), (b, db, ddb) = self._ab(s)
        d1 = self._plane(da, db)
        d2 = self._plane(dda, ddb)
        X = X_poly(self.family.p, self.family.q, s)
        rx = np.sqrt(X)
        h1 = self.height_sign * s / rx
        h2 = self.height_sign * (1.0 / rx - 2.0 * s * s * (s * s - self.family.p) / (X * rx))
        one, zero = np.ones_like(s), np.zeros_like(s)
        return np.stack([one, d1[0], d1[1], h1], -1), np.stack([zero, d2[0], d2[1], h2], -1)


def reconstruct_alpha(family: FamilyParams, theta: float = 0.0, sign: int = 1,
                      height_sign: int | None = None, check_samples: int = 50) -> ProfileCurve:
    """Build the profile for (p, q, theta, +-) and verify s^2 + alpha_1^2 + alpha_2^2 = 1.

    With theta = 0 and sign = +1 this is the profile of the Y chart, whose
    last coordinate decreases (height_sign = -1).  The default height_sign
    is -sign, which also reproduces the Z chart for sign = -1 and
    theta = atan2(sqrt(q - (p-1)^2), 1 - p).
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    height_sign = -sign if height_sign is None else height_sign
    curve = ProfileCurve(family, float(theta), sign, height_sign)
    s = np.linspace(-0.95, 0.95, check_samples) * family.s_end
    (a, _, _), (b, _, _) = curve._ab(s)
    a1, a2 = curve._plane(a, b)
    res = float(np.max(np.abs(s * s + a1 * a1 + a2 * a2 - 1.0)))
    if res > 1e-9:
        raise OutOfDomain(f"reconstructed profile leaves the unit sphere (residual {res:.3g})")
    return curve


def z_chart_theta(family: FamilyParams) -> float:
    """Angle theta at which the sign = -1 profile reproduces the Z chart."""
    return float(np.arctan2(np.sqrt(family.disc), 1.0 - family.p))


def umbilicity_condition_residual(curve: ProfileCurve, s) -> np.ndarray:
    """Max-norm of 2 phi a0 a'' + 2 phi^2 e0 - (a0 phi' + 2 phi a0') a' - 2 phi a0 (a3')^2 abar."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    d1, d2 = curve.derivatives(s)
    a0 = s[..., None]
    phi = np.sum(d1 * d1, axis=-1)[..., None]
    dphi = 2.0 * np.sum(d1 * d2, axis=-1)[..., None]
    abar = curve.value(s).copy()
    abar[..., 3] = 0.0
    e0 = np.zeros(4)
    e0[0] = 1.0
    a3p = d1[..., 3:4]
    res = (2 * phi * a0 * d2 + 2 * phi ** 2 * e0 - (a0 * dphi + 2 * phi * d1[..., 0:1]) * d1
           - 2 * phi * a0 * a3p ** 2 * abar)
    return np.max(np.abs(res), axis=-1)


# --- warping functions -----------------------------------------------------

def varphi(p: float, q: float, s):
    """phi_{p,q}(s) = (p^2 - q) / ((s^2 - p)^2 - q), the squared speed of the profile."""
    if not p * p > q:
        raise OutOfDomain("phi_{p,q} needs p^2 > q")
    return (p * p - q) / X_poly(p, q, s)


def arclength(p: float, q: float, t: float) -> float:
    """S_{p,q}(t) = integral over [0, t] of sqrt(phi_{p,q})."""
    return adaptive_simpson(lambda x: float(np.sqrt(varphi(p, q, x))), 0.0, float(t), tol=QUAD_TOL)


def warping_distance(a: FamilyParams, b: FamilyParams, n: int = 201, frac: float = 0.9) -> float:
    """max |phi_a - phi_b| on a grid over the common interval |s| <= frac * min(s_end)."""
    c = frac * min(a.s_end, b.s_end)
    if not c > 0:
        raise OutOfDomain("the two parameter points share no interval")
    s = np.linspace(-c, c, n)
    return float(np.max(np.abs(varphi(a.p, a.q, s) - varphi(b.p, b.q, s))))


def warping_fingerprint(fp: FamilyParams, samples=(0.25, 0.5, 0.75)) -> tuple[float, ...]:
    """phi_{p,q} at fixed fractions of s_end; a compact congruence fingerprint."""
    return tuple(float(varphi(fp.p, fp.q, t * fp.s_end)) for t in samples)

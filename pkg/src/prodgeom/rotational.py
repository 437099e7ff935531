"""Rotational submanifolds of Q_eps^n x R and their description as partial tubes.

A rotational submanifold is the orbit of a profile curve
(alpha_0, ..., alpha_{n-m+1}, h)(s) under the isometries fixing an axis.
Four regimes are supported:

* ``spherical_eps1``  (eps = 1):  (alpha_0 phi(t), alpha_1, ..., h)
* ``spherical_epsm1`` (eps = -1): (alpha_0, alpha_1 phi(t), alpha_2, ..., h)
* ``hyperbolic``      (eps = -1): (alpha_0 phi_H(t), alpha_1, ..., h)
* ``parabolic``       (eps = -1): coordinates in the null basis
  e^_0 = (-e_0 + e_n)/sqrt 2, e^_n = (e_0 + e_n)/sqrt 2 are
  (alpha_0, alpha_0 t, alpha_1, ..., alpha_{n-m+1} - alpha_0 |t|^2 / 2, h).

Every kind is written as sum_j c_j(s) b_j(t) + h(s) e_t for a family of
vectors b(t) with constant Gram matrix C.  That common form drives the
rotational-to-tube conversion.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import least_squares

from .ambient import (AmbientSpace, Chart, hyperboloid_domain, hyperboloid_param, sphere_domain,
                      sphere_param)
from .errors import ConstraintViolated, KindMismatch, WrongDimension
from .tube import CurveAlpha, ParallelFrame, PartialTubeSpec

KINDS = ("spherical_eps1", "spherical_epsm1", "hyperbolic", "parabolic")
CONSTRAINT_TOL = 1e-10
SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class Profile:
    """Profile (alpha_0, ..., alpha_{n-m+1}, h) with analytic derivatives.

    ``value``, ``d1`` and ``d2`` map s of shape (...) to (..., n - m + 3).
    """

    value: Callable
    d1: Callable
    d2: Callable
    interval: tuple[float, float]

    @classmethod
    def from_curve(cls, curve: CurveAlpha) -> "Profile":
        return cls(curve.value, curve.d1, curve.d2, tuple(curve.interval))

    def samples(self, n: int = 50) -> np.ndarray:
        return np.linspace(*self.interval, n)


@dataclass(frozen=True)
class RotationalSpec:
    kind: str
    n: int
    m: int
    profile: Profile
    polar_margin: float = 1e-2
    flat_half_width: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise KindMismatch(f"unknown rotational kind {self.kind!r}; expected one of {KINDS}")
        if not 2 <= self.m <= self.n:
            raise WrongDimension(f"need 2 <= m <= n, got m={self.m}, n={self.n}")
        width = self.profile.value(np.asarray(self.profile.interval[0])).shape[-1]
        if width != self.n - self.m + 3:
            raise WrongDimension(f"profile has {width} components, expected {self.n - self.m + 3}")

    @property
    def eps(self) -> int:
        return 1 if self.kind == "spherical_eps1" else -1

    @property
    def ambient(self) -> AmbientSpace:
        return AmbientSpace(self.eps, self.n)

    # -- the common form sum_j c_j b_j(t) -----------------------------------

    def gram(self) -> np.ndarray:
        """Gram matrix C of the vectors b_j(t) (independent of t)."""
        j = self.n - self.m + 2
        C = np.eye(j)
        if self.kind in ("spherical_epsm1", "hyperbolic"):
            C[0, 0] = -1.0
        elif self.kind == "parabolic":
            C[0, 0] = 0.0
            C[-1, -1] = 0.0
            C[0, -1] = C[-1, 0] = 1.0
        return C

    def orbit_basis(self, t) -> np.ndarray:
        """b_j(t) as ambient vectors, shape (..., n - m + 2, n + 2)."""
        t = np.asarray(t, float)
        n, m = self.n, self.m
        N = n + 2
        j = n - m + 2
        out = np.zeros(t.shape[:-1] + (j, N))
        if self.kind == "spherical_eps1":
            out[..., 0, :m] = sphere_param(t)
            for i in range(1, j):
                out[..., i, m - 1 + i] = 1.0
        elif self.kind == "hyperbolic":
            out[..., 0, :m] = hyperboloid_param(t)
            for i in range(1, j):
                out[..., i, m - 1 + i] = 1.0
        elif self.kind == "spherical_epsm1":
            out[..., 0, 0] = 1.0
            out[..., 1, 1:m + 1] = sphere_param(t)
            for i in range(2, j):
                out[..., i, m - 1 + i] = 1.0
        else:
            hat = null_basis(n)
            tt = np.sum(t * t, axis=-1)
            out[..., 0, :] = (hat[0] + np.einsum("...i,in->...n", t, hat[1:m])
                              - 0.5 * tt[..., None] * hat[n])
            for i in range(1, j):
                out[..., i, :] = hat[m - 1 + i]
        return out

    def t_domain(self) -> tuple[tuple[float, float], ...]:
        if self.kind in ("spherical_eps1", "spherical_epsm1"):
            return sphere_domain(self.m - 1, self.polar_margin)
        if self.kind == "hyperbolic":
            return hyperboloid_domain(self.m - 1, self.flat_half_width)
        return tuple((-self.flat_half_width, self.flat_half_width) for _ in range(self.m - 1))

    def constraint_residual(self, s) -> np.ndarray:
        a = self.profile.value(np.asarray(s, float))[..., :-1]
        C = self.gram()
        return np.abs(np.einsum("...i,ij,...j->...", a, C, a) - self.eps)

    def half_space_ok(self, s) -> bool:
        """The profile stays in one closed half-space bounded by the axis."""
        a = self.profile.value(np.asarray(s, float))
        col = 1 if self.kind == "spherical_epsm1" else 0
        v = a[..., col]
        return bool(np.all(v >= 0) or np.all(v <= 0))

    def check(self, n: int = 50) -> None:
        s = self.profile.samples(n)
        res = float(np.max(self.constraint_residual(s)))
        if res > CONSTRAINT_TOL:
            raise ConstraintViolated(f"profile violates the {self.kind} constraint (residual {res:.3g})")
        if not self.half_space_ok(s):
            raise ConstraintViolated("profile crosses the axis hyperplane")
        if self.kind == "hyperbolic" and np.any(self.profile.value(s)[..., 0] <= 0):
            raise ConstraintViolated("hyperbolic kind needs alpha_0 > 0")


def null_basis(n: int) -> np.ndarray:
    """Rows e^_0, ..., e^_n: e^_0 = (-e_0 + e_n)/sqrt 2, e^_n = (e_0 + e_n)/sqrt 2, others e_i.

    Returned as vectors of E^{n+2} (the t slot is zero).
    """
    hat = np.zeros((n + 1, n + 2))
    for i in range(1, n):
        hat[i, i] = 1.0
    hat[0, 0], hat[0, n] = -1.0 / SQRT2, 1.0 / SQRT2
    hat[n, 0], hat[n, n] = 1.0 / SQRT2, 1.0 / SQRT2
    return hat


def rotational_point(spec: RotationalSpec, s, t) -> np.ndarray:
    a = spec.profile.value(np.asarray(s, float))
    b = spec.orbit_basis(t)
    out = np.einsum("...j,...jn->...n", a[..., :-1], b).copy()
    out[..., -1] = a[..., -1]
    return out


def rotational_chart(spec: RotationalSpec, check: bool = True) -> Chart:
    """Chart over (s, t) of the orbit of the profile."""
    if check:
        spec.check()

    def func(u):
        u = np.asarray(u, float)
        return direct_formula_point(spec, u[..., 0], u[..., 1:])

    meta = {"kind": "rotational", "rot_kind": spec.kind, "eps": spec.eps}
    return Chart(spec.ambient, spec.m, func, (tuple(spec.profile.interval),) + spec.t_domain(),
                 label=f"rot[{spec.kind},n={spec.n},m={spec.m}]", meta=meta)


def direct_formula_point(spec: RotationalSpec, s, t) -> np.ndarray:
    """The coordinate display of each kind, written out component by component."""
    s = np.asarray(s, float)
    t = np.asarray(t, float)
    a = spec.profile.value(s)
    n, m = spec.n, spec.m
    out = np.zeros(s.shape + (n + 2,))
    if spec.kind == "spherical_eps1":
        out[..., :m] = a[..., 0, None] * sphere_param(t)
        out[..., m:n + 1] = a[..., 1:-1]
    elif spec.kind == "hyperbolic":
        out[..., :m] = a[..., 0, None] * hyperboloid_param(t)
        out[..., m:n + 1] = a[..., 1:-1]
    elif spec.kind == "spherical_epsm1":
        out[..., 0] = a[..., 0]
        out[..., 1:m + 1] = a[..., 1, None] * sphere_param(t)
        out[..., m + 1:n + 1] = a[..., 2:-1]
    else:
        c = np.zeros(s.shape + (n + 1,))
        c[..., 0] = a[..., 0]
        c[..., 1:m] = a[..., 0, None] * t
        c[..., m:n] = a[..., 1:n - m + 1]
        c[..., n] = a[..., n - m + 1] - 0.5 * a[..., 0] * np.sum(t * t, axis=-1)
        out[..., 1:n] = c[..., 1:n]
        out[..., 0] = (c[..., n] - c[..., 0]) / SQRT2
        out[..., n] = (c[..., 0] + c[..., n]) / SQRT2
    out[..., -1] = a[..., -1]
    return out


def parabolic_light_cone_base(n: int, m: int, t) -> np.ndarray:
    """g^(t) = e^_0 + sum t_i e^_i - |t|^2/2 e^_n, which is null."""
    t = np.asarray(t, float)
    hat = null_basis(n)
    return hat[0] + np.einsum("...i,in->...n", t, hat[1:m]) - 0.5 * np.sum(t * t, -1)[..., None] * hat[n]


# --- rotational submanifolds as partial tubes ------------------------------

def _c_orthonormal_complement(C: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Rows: a C-orthonormal basis of {c}^perp (positive definite there)."""
    j = len(c)
    cands = [v for v in np.eye(j)]
    rows: list[np.ndarray] = []
    basis = [c / np.sqrt(abs(c @ C @ c))]
    signs = [np.sign(c @ C @ c)]
    for v in cands:
        w = v.copy()
        for _ in range(2):
            for b, sg in zip(basis, signs):
                w = w - sg * (w @ C @ b) * b
        n2 = w @ C @ w
        if n2 > 1e-10:
            w = w / np.sqrt(n2)
            rows.append(w)
            basis.append(w)
            signs.append(1.0)
        if len(rows) == j - 1:
            break
    return np.array(rows).reshape(j - 1, j)


def rotational_as_tube(spec: RotationalSpec, allow_equidistant: bool = False,
                       s0: float | None = None) -> PartialTubeSpec:
    """The same submanifold as a partial tube over an umbilical base.

    For eps = 1 the base is the totally geodesic S^{m-1} and the frame is
    the constant e_m..e_n.  For the other kinds the base is the slice of
    the orbit at s0 (default: the midpoint of the profile interval), a
    sphere, equidistant hypersurface or horosphere of a totally geodesic
    Q_eps^{m-1}; the normal frame is a constant combination of the orbit
    basis.  The hyperbolic kind needs ``allow_equidistant=True``.
    """
    if spec.kind == "hyperbolic" and not allow_equidistant:
        raise KindMismatch("the hyperbolic kind is a tube only over an equidistant base; "
                           "pass allow_equidistant=True to accept that variant")
    spec.check()
    C = spec.gram()
    j = C.shape[0]
    if spec.kind == "spherical_eps1":
        c = np.zeros(j)
        c[0] = 1.0
    else:
        s0 = 0.5 * sum(spec.profile.interval) if s0 is None else s0
        c = spec.profile.value(np.asarray(s0, float))[:-1]
        c = c / np.sqrt(abs(c @ C @ c))
    rows = np.vstack([c, _c_orthonormal_complement(C, c)])  # (j, j)
    D = np.ones(j)
    D[0] = spec.eps
    L = (D[:, None] * rows) @ C  # a = L p maps orbit coefficients to fiber coefficients
    k = j - 1
    amb = spec.ambient

    def base_func(u):
        b = spec.orbit_basis(np.asarray(u, float))
        return np.einsum("j,...jn->...n", rows[0], b)

    def xi(u):
        b = spec.orbit_basis(np.asarray(u, float))
        return np.einsum("aj,...jn->...an", rows[1:], b)

    base = Chart(amb, spec.m - 1, base_func, spec.t_domain(), label=f"base[{spec.kind}]")

    def lift(fn):
        def g(s):
            p = fn(np.asarray(s, float))
            out = np.empty_like(p)
            out[..., :-1] = p[..., :-1] @ L.T
            out[..., -1] = p[..., -1]
            return out
        return g

    prof = spec.profile
    curve = CurveAlpha(spec.eps, k, lift(prof.value), lift(prof.d1), lift(prof.d2),
                       tuple(prof.interval))
    return PartialTubeSpec(ParallelFrame(base, xi, k), curve, label=f"tube_of[{spec.kind}]",
                           meta={"rot_kind": spec.kind})


def tube_vs_rotational(spec: RotationalSpec, n: int = 7, **kw) -> float:
    """Max pointwise deviation between rotational_chart and the tube chart on an n-per-axis grid."""
    from .tube import build_tube

    rot = rotational_chart(spec)
    tube = build_tube(rotational_as_tube(spec, **kw))
    U = rot.grid(n)
    V = np.concatenate([U[:, 1:], U[:, :1]], axis=-1)  # tube coordinates are (t, s)
    return float(np.max(np.abs(rot(U) - tube(V))))


# --- checks -----------------------------------------------------------------

def geodesic_circle_residual(base: Chart, n: int = 21) -> float:
    """Max of |g3 + <g2, g2> g1| along a curve chart, with g1, g2, g3 the arc-length derivatives.

    Vanishes exactly for circles of Q_eps^n (constant geodesic curvature,
    zero torsion).  Parameter derivatives come from seven-point stencils and
    are converted to arc length by the chain rule.
    """
    if base.m != 1:
        raise WrongDimension("the circle test applies to curves")
    sig = base.ambient.signature
    lo, hi = base.domain[0]
    h = 1e-3 * (hi - lo)
    pad = 3 * h + 1e-2 * (hi - lo)
    worst = 0.0
    for t in np.linspace(lo + pad, hi - pad, n):
        f = base(np.array([[t + k * h] for k in range(-3, 4)]))
        d1 = (-f[0] + 9 * f[1] - 45 * f[2] + 45 * f[4] - 9 * f[5] + f[6]) / (60 * h)
        d2 = (2 * f[0] - 27 * f[1] + 270 * f[2] - 490 * f[3] + 270 * f[4] - 27 * f[5] + 2 * f[6]) / (180 * h * h)
        d3 = (f[0] - 8 * f[1] + 13 * f[2] - 13 * f[4] + 8 * f[5] - f[6]) / (8 * h ** 3)
        v = np.sqrt(np.sum(d1 * sig * d1))
        v1 = np.sum(d1 * sig * d2) / v
        v2 = (np.sum(d2 * sig * d2) + np.sum(d1 * sig * d3)) / v - v1 * v1 / v
        g1 = d1 / v
        g2 = d2 / v ** 2 - v1 * d1 / v ** 3
        g3 = d3 / v ** 3 - 3 * v1 * d2 / v ** 4 + (3 * v1 * v1 / v ** 5 - v2 / v ** 4) * d1
        worst = max(worst, float(np.max(np.abs(g3 + np.sum(g2 * sig * g2) * g1))))
    return worst


def orbit_generator(spec: RotationalSpec, amount: float) -> np.ndarray:
    """An isometry of E^{n+2} fixing the axis: rotation, boost or null rotation by `amount`."""
    N = spec.n + 2
    M = np.eye(N)
    c, s = np.cos(amount), np.sin(amount)
    if spec.kind == "spherical_eps1":
        M[np.ix_([0, 1], [0, 1])] = [[c, -s], [s, c]]
    elif spec.kind == "spherical_epsm1":
        M[np.ix_([1, 2], [1, 2])] = [[c, -s], [s, c]]
    elif spec.kind == "hyperbolic":
        ch, sh = np.cosh(amount), np.sinh(amount)
        M[np.ix_([0, 1], [0, 1])] = [[ch, sh], [sh, ch]]
    else:
        # null rotation: e^_0 -> e^_0 + a e^_1 - a^2/2 e^_n, e^_1 -> e^_1 - a e^_n
        rows = null_basis(spec.n)[:, :-1]
        img = rows.copy()
        img[0] = rows[0] + amount * rows[1] - 0.5 * amount ** 2 * rows[spec.n]
        img[1] = rows[1] - amount * rows[spec.n]
        M[:-1, :-1] = img.T @ np.linalg.inv(rows.T)
    return M


def orbit_invariance_residual(spec: RotationalSpec, amount: float = 0.3, n: int = 5) -> float:
    """Distance from isometry-moved chart points back to the chart image."""
    chart = rotational_chart(spec)
    M = orbit_generator(spec, amount)
    U = chart.grid(n, margin=0.2)
    moved = chart(U) @ M.T
    seeds = chart.grid(15, margin=0.0)
    seed_pts = chart(seeds)
    lo, hi = chart.lower, chart.upper
    worst = 0.0
    for y in moved:
        i = int(np.argmin(np.sum((seed_pts - y) ** 2, axis=-1)))
        sol = least_squares(lambda u: chart(u) - y, seeds[i], bounds=(lo, hi), xtol=1e-15,
                            ftol=1e-15, gtol=1e-15)
        worst = max(worst, float(np.max(np.abs(chart(sol.x) - y))))
    return worst

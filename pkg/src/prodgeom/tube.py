"""Partial tubes over a base immersion g: N^{m-1} -> Q_eps^n with a type-fiber curve.

Given orthonormal parallel normal fields xi_1..xi_k along g and a curve
alpha = (alpha_0, ..., alpha_{k+1}) in Q_eps^k x R, the tube is

    f(x, s) = alpha_0(s) g(x) + sum_i alpha_i(s) xi_i(x) + alpha_{k+1}(s) e_t.

Its horizontal differential is dg o P_s with P_s = alpha_0 I - sum alpha_i A^g_{xi_i},
and its shape operators split into a horizontal block P_s^{-1} A^g_xi and an
eigenvalue <alpha'', zeta> / <alpha', alpha'> along d/ds.  Those closed forms
serve as an oracle for the numerical pipeline in :mod:`prodgeom.geometry`.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .ambient import TOL, Chart
from .errors import ConstraintViolated, FrameNotParallel, SingularP, WrongDimension
from .geometry import frame_at, hessian, sqrt_metric, inv_sqrt_metric, tangent_vectors4

DET_TOL = 1e-10
SPLIT_MARGIN = 1e-2


@dataclass(frozen=True)
class CurveAlpha:
    """Type-fiber curve in Q_eps^k x R with analytic first and second derivatives.

    ``value``, ``d1`` and ``d2`` map an array of s values of shape (...)
    to arrays of shape (..., k + 2).
    """

    eps: int
    k: int
    value: Callable
    d1: Callable
    d2: Callable
    interval: tuple[float, float]
    require_vertical: bool = False

    @property
    def sig(self) -> np.ndarray:
        s = np.ones(self.k + 2)
        s[0] = self.eps
        return s

    def speed2(self, s):
        d = self.d1(np.asarray(s, float))
        return np.sum(d * self.sig * d, axis=-1)

    def samples(self, n: int = 50) -> np.ndarray:
        return np.linspace(*self.interval, n)

    def check(self, n: int = 50, tol: float = 1e-10) -> None:
        s = self.samples(n)
        a = self.value(s)
        if a.shape[-1] != self.k + 2:
            raise WrongDimension(f"curve has {a.shape[-1]} components, expected {self.k + 2}")
        quad = self.eps * a[..., 0] ** 2 + np.sum(a[..., 1:self.k + 1] ** 2, axis=-1)
        res = float(np.max(np.abs(quad - self.eps)))
        if res > tol:
            raise ConstraintViolated(f"curve leaves Q_eps^k x R (residual {res:.3g})")
        if self.eps == -1 and np.any(a[..., 0] <= 0):
            raise ConstraintViolated("curve leaves the upper sheet (alpha_0 <= 0)")
        if self.require_vertical and np.any(np.abs(self.d1(s)[..., -1]) < tol):
            raise ConstraintViolated("alpha'_{k+1} vanishes somewhere on the interval")

    def restricted(self, lo: float, hi: float) -> "CurveAlpha":
        return replace(self, interval=(float(lo), float(hi)))


def line_curve(eps: int = 1, k: int = 0, interval=(-1.0, 1.0), point=None) -> CurveAlpha:
    """alpha(s) = (a, s): a fixed point of Q_eps^k times the vertical line."""
    base = np.zeros(k + 1)
    base[0] = 1.0
    base = base if point is None else np.asarray(point, float)

    def value(s):
        s = np.asarray(s, float)
        out = np.zeros(s.shape + (k + 2,))
        out[..., :k + 1] = base
        out[..., -1] = s
        return out

    def d1(s):
        s = np.asarray(s, float)
        out = np.zeros(s.shape + (k + 2,))
        out[..., -1] = 1.0
        return out

    def d2(s):
        return np.zeros(np.asarray(s, float).shape + (k + 2,))

    return CurveAlpha(eps, k, value, d1, d2, tuple(interval))


@dataclass(frozen=True)
class ParallelFrame:
    """Base immersion g (a Chart with zero t-coordinate) and normal fields xi(x) of shape (..., k, N)."""

    base: Chart
    xi: Callable
    k: int

    def fields(self, x) -> np.ndarray:
        x = np.asarray(x, float)
        if self.k == 0:
            return np.zeros(x.shape[:-1] + (0, self.base.ambient.total_dim))
        return np.asarray(self.xi(x), float)

    def residuals(self, x) -> dict:
        """Orthonormality, normality to g and parallelism of the frame at base point x."""
        amb = self.base.ambient
        sig = amb.signature
        x = np.asarray(x, float)
        g = self.base(x)
        xi = self.fields(x)
        gram = np.einsum("an,n,bn->ab", xi, sig, xi)
        orth = float(np.max(np.abs(gram - np.eye(self.k)))) if self.k else 0.0
        tang = tangent_vectors4(self.base, x)  # (m-1, N)
        perp = 0.0
        if self.k:
            perp = float(np.max(np.abs(np.concatenate([
                np.einsum("an,n,in->ai", xi, sig, tang).ravel(),
                xi @ (sig * g),
                xi[:, -1]]))))
        par = 0.0
        if self.k:
            d = self.base.m
            h = 2.5e-4 * (self.base.upper - self.base.lower)
            shift = h[:, None] * np.eye(d)
            xp = self.fields(x + shift)
            xm = self.fields(x - shift)
            xp2 = self.fields(x + 2 * shift)
            xm2 = self.fields(x - 2 * shift)
            dxi = (8 * (xp - xm) - (xp2 - xm2)) / (12 * h[:, None, None])  # (d, k, N)
            G = np.einsum("in,n,jn->ij", tang, sig, tang)
            coeff = np.einsum("ian,n,jn->iaj", dxi, sig, tang) @ np.linalg.inv(G)
            rest = dxi - np.einsum("iaj,jn->ian", coeff, tang)
            par = float(np.max(np.abs(rest)))
        return {"orthonormal": orth, "normal": perp, "parallel": par}

    def verify(self, n: int = 5, tol: float = TOL.frame, grid_margin: float = 1e-2) -> dict:
        worst = {"orthonormal": 0.0, "normal": 0.0, "parallel": 0.0}
        for x in self.base.grid(n, grid_margin):
            for key, val in self.residuals(x).items():
                worst[key] = max(worst[key], val)
        # orthonormality and normality are algebraic; parallelism carries FD error
        if worst["orthonormal"] > 1e-8 or worst["normal"] > 1e-8 or worst["parallel"] > tol:
            raise FrameNotParallel(f"normal frame fails its invariants: {worst}")
        return worst


@dataclass(frozen=True)
class PartialTubeSpec:
    frame: ParallelFrame
    curve: CurveAlpha
    label: str = ""
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        if self.curve.k != self.frame.k:
            raise WrongDimension(f"curve has k={self.curve.k}, frame has k={self.frame.k}")
        if self.curve.eps != self.frame.base.ambient.epsilon:
            raise WrongDimension("curve and base live over different eps")

    @property
    def m(self) -> int:
        return self.frame.base.m + 1

    def with_interval(self, lo: float, hi: float) -> "PartialTubeSpec":
        return replace(self, curve=self.curve.restricted(lo, hi))


def tube_point(spec: PartialTubeSpec, x, s) -> np.ndarray:
    frame, curve = spec.frame, spec.curve
    x = np.asarray(x, float)
    s = np.asarray(s, float)
    g = frame.base(x)
    a = curve.value(s)
    out = a[..., 0:1] * g
    if frame.k:
        out = out + np.einsum("...a,...an->...n", a[..., 1:frame.k + 1], frame.fields(x))
    out = out.copy()
    out[..., -1] += a[..., -1]
    return out


def build_tube(spec: PartialTubeSpec, verify: bool = True) -> Chart:
    """Chart over (x, s) of the partial tube, on (base domain) x (curve interval)."""
    if verify:
        spec.curve.check()
        spec.frame.verify()

    def func(u):
        u = np.asarray(u, float)
        return tube_point(spec, u[..., :-1], u[..., -1])

    base = spec.frame.base
    meta = {"kind": "tube", "k": spec.frame.k, "eps": base.ambient.epsilon}
    meta.update(spec.meta)
    return Chart(base.ambient, spec.m, func, tuple(base.domain) + (tuple(spec.curve.interval),),
                 label=spec.label or f"tube[{base.label},k={spec.frame.k}]", meta=meta)


# --- closed-form differential geometry -------------------------------------

def base_shape(spec: PartialTubeSpec, x, vec) -> np.ndarray:
    """A^g_vec = G^{-1} <d^2 g, vec> at x, for any vector vec of E^{n+2}."""
    base = spec.frame.base
    sig = base.ambient.signature
    x = np.asarray(x, float)
    tang = tangent_vectors4(base, x)
    G = np.einsum("in,n,jn->ij", tang, sig, tang)
    B = np.einsum("ijn,n,n->ij", hessian(base, x), sig, np.asarray(vec, float))
    return np.linalg.solve(G, 0.5 * (B + B.T))


def P_matrix(spec: PartialTubeSpec, x, s) -> np.ndarray:
    a = spec.curve.value(np.asarray(s, float))
    d = spec.frame.base.m
    P = a[0] * np.eye(d)
    xi = spec.frame.fields(x)
    for i in range(spec.frame.k):
        P = P - a[i + 1] * base_shape(spec, x, xi[i])
    return P


def regularity(spec: PartialTubeSpec, x, s) -> dict:
    det = float(np.linalg.det(P_matrix(spec, x, s)))
    return {"regular": abs(det) > DET_TOL, "det": det}


def fiber_coordinates(spec: PartialTubeSpec, x, vec) -> np.ndarray:
    """zeta with vec = phi_x(zeta) on the fiber: (eps<vec, g>, <vec, xi_i>, vec_t)."""
    amb = spec.frame.base.ambient
    sig = amb.signature
    vec = np.asarray(vec, float)
    g = spec.frame.base(x)
    xi = spec.frame.fields(x)
    return np.concatenate([[amb.epsilon * (vec @ (sig * g))], xi @ (sig * vec), [vec[-1]]])


def tube_shape_closed_form(spec: PartialTubeSpec, x, s, xi) -> np.ndarray:
    """Shape operator A_xi of the tube in chart coordinates (x..., s).

    The horizontal block is P_s^{-1} A^g_xi, the d/ds eigenvalue is
    <alpha'', zeta> / <alpha', alpha'> in the fiber metric, and the
    off-diagonal blocks vanish.
    """
    P = P_matrix(spec, x, s)
    if abs(np.linalg.det(P)) <= DET_TOL:
        raise SingularP(f"P_s is singular at x={x}, s={s}")
    d = spec.frame.base.m
    out = np.zeros((d + 1, d + 1))
    out[:d, :d] = np.linalg.solve(P, base_shape(spec, x, xi))
    curve = spec.curve
    zeta = fiber_coordinates(spec, x, xi)
    out[d, d] = float(np.sum(curve.d2(np.asarray(s, float)) * curve.sig * zeta) / curve.speed2(s))
    return out


def shape_to_onb(metric: np.ndarray, S: np.ndarray) -> np.ndarray:
    """g^{1/2} S g^{-1/2}: the matrix of S in a g-orthonormal basis."""
    return sqrt_metric(metric) @ S @ inv_sqrt_metric(metric)


def closed_form_vs_numeric(spec: PartialTubeSpec, chart: Chart, u) -> float:
    """Largest deviation between closed-form and numerical shape operators at u."""
    from .geometry import fundamental_at

    u = np.asarray(u, float)
    fd = fundamental_at(chart, u)
    g = fd.frame.metric
    worst = 0.0
    for a, xi in enumerate(fd.frame.normal):
        S_cf = tube_shape_closed_form(spec, u[:-1], u[-1], xi)
        diff = shape_to_onb(g, S_cf) - shape_to_onb(g, fd.shape[a])
        worst = max(worst, float(np.max(np.abs(diff))))
    return worst


def tube_T_field(spec: PartialTubeSpec, x, s, chart: Chart | None = None,
                 tol: float = TOL.frame) -> dict:
    """T = alpha'_{k+1} / <alpha', alpha'> d/ds, checked against the numerical frame."""
    curve = spec.curve
    s = float(s)
    coeff = float(curve.d1(np.asarray(s))[-1] / curve.speed2(s))
    chart = build_tube(spec, verify=False) if chart is None else chart
    fr = frame_at(chart, np.concatenate([np.asarray(x, float), [s]]))
    expect = np.zeros(spec.m)
    expect[-1] = coeff
    err = float(np.max(np.abs(sqrt_metric(fr.metric) @ (fr.T - expect))))
    if err > tol:
        raise ConstraintViolated(f"T from the frame differs from the closed form by {err:.3g}")
    return {"T_coeff": coeff, "frame_error": err}


# --- regular intervals ------------------------------------------------------

def singular_values_of_s(spec: PartialTubeSpec, x_samples, n: int = 201) -> list[float]:
    """Roots in s of det P_s(x), collected over the sampled base points."""
    lo, hi = spec.curve.interval
    ss = np.linspace(lo, hi, n)
    roots = []
    for x in np.atleast_2d(x_samples):
        det = np.array([np.linalg.det(P_matrix(spec, x, s)) for s in ss])
        for i in range(n - 1):
            if det[i] == 0.0:
                roots.append(float(ss[i]))
            elif det[i] * det[i + 1] < 0:
                f = lambda t: np.linalg.det(P_matrix(spec, x, t))
                roots.append(float(brentq(f, ss[i], ss[i + 1], xtol=1e-13)))
    return sorted(roots)


def regular_intervals(spec: PartialTubeSpec, x_samples=None, n: int = 201,
                      margin: float = SPLIT_MARGIN) -> list[tuple[float, float]]:
    """Split the curve interval at sign changes of det P_s, keeping margin * length clear."""
    if x_samples is None:
        x_samples = spec.frame.base.grid(5)
    lo, hi = spec.curve.interval
    pad = margin * (hi - lo)
    pieces = [(lo, hi)]
    for r in singular_values_of_s(spec, x_samples, n):
        nxt = []
        for a, b in pieces:
            if r + pad <= a or r - pad >= b:
                nxt.append((a, b))
                continue
            if r - pad - a > pad:
                nxt.append((a, r - pad))
            if b - (r + pad) > pad:
                nxt.append((r + pad, b))
        pieces = nxt
    return pieces


def regular_tube_charts(spec: PartialTubeSpec, **kw) -> list[Chart]:
    """One chart per regular sub-interval."""
    charts = []
    for i, (a, b) in enumerate(regular_intervals(spec, **kw)):
        sub = spec.with_interval(a, b)
        ch = build_tube(sub)
        charts.append(ch.with_label(f"{ch.label}#{i}"))
    return charts

"""Ambient product spaces Q_eps^n x R and parametric charts into them.

Points of Q_eps^n x R are stored as vectors of the flat space E^{n+2} with
coordinates (x_0, ..., x_n, t).  The metric is diag(eps, 1, ..., 1), so the
sphere (eps = 1) or the hyperboloid model of hyperbolic space (eps = -1)
is the quadric <x_hat, x_hat> = eps, where x_hat drops the last coordinate.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .errors import OffSurface, StencilOutOfDomain, WrongDimension


@dataclass(frozen=True)
class Tolerances:
    surface: float = 1e-10
    frame: float = 1e-7
    sff: float = 1e-5
    compat: float = 1e-3
    rank: float = 1e-6

    def override(self, **values: float) -> "Tolerances":
        for name, value in values.items():
            if not hasattr(self, name):
                raise KeyError(f"unknown tolerance {name!r}")
            if not value > 0:
                raise ValueError(f"tolerance {name} must be positive")
        return replace(self, **values)


TOL = Tolerances()


@dataclass(frozen=True)
class AmbientSpace:
    epsilon: int
    n: int

    def __post_init__(self):
        if self.epsilon not in (1, -1):
            raise ValueError("epsilon must be +1 or -1")
        if self.n < 1:
            raise ValueError("n must be positive")

    @property
    def total_dim(self) -> int:
        return self.n + 2

    @property
    def signature(self) -> np.ndarray:
        sig = np.ones(self.total_dim)
        sig[0] = self.epsilon
        return sig

    @property
    def e_t(self) -> np.ndarray:
        """The unit vector spanning the R factor."""
        e = np.zeros(self.total_dim)
        e[-1] = 1.0
        return e

    def inner(self, a, b):
        """Flat inner product of E^{n+2}, broadcast over leading axes."""
        return np.sum(np.asarray(a) * self.signature * np.asarray(b), axis=-1)

    def nu(self, x):
        """Projection of the position onto the E^{n+1} factor."""
        x = np.array(x, dtype=float, copy=True)
        x[..., -1] = 0.0
        return x

    def quadric_residual(self, x):
        x = np.asarray(x, dtype=float)
        xh = x[..., :-1]
        sig = self.signature[:-1]
        return np.abs(np.sum(xh * sig * xh, axis=-1) - self.epsilon)

    def on_surface(self, x, tol: float = TOL.surface) -> bool:
        x = np.asarray(x, dtype=float)
        ok = np.all(self.quadric_residual(x) <= tol)
        if self.epsilon == -1:
            ok = ok and bool(np.all(x[..., 0] > 0))
        return bool(ok)

    def padded(self, extra: int) -> "AmbientSpace":
        return AmbientSpace(self.epsilon, self.n + extra)


@dataclass(frozen=True)
class Chart:
    """A parametric immersion u -> E^{n+2} landing in Q_eps^n x R.

    ``func`` must be vectorised: it maps an array of shape (..., m) to an
    array of shape (..., n + 2).  ``domain`` is the box on which derivative
    stencils are allowed to evaluate; ``func`` itself may be defined on a
    larger set.  Setting ``surface_tol`` to None disables the on-surface
    check (used for deliberately broken negative controls).
    """

    ambient: AmbientSpace
    m: int
    func: Callable[[np.ndarray], np.ndarray]
    domain: tuple[tuple[float, float], ...]
    label: str = ""
    surface_tol: float | None = TOL.surface
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        if len(self.domain) != self.m:
            raise WrongDimension(f"domain has {len(self.domain)} axes, chart dimension is {self.m}")

    def __call__(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        return np.asarray(self.func(u), dtype=float)

    @property
    def lower(self) -> np.ndarray:
        return np.array([lo for lo, _ in self.domain])

    @property
    def upper(self) -> np.ndarray:
        return np.array([hi for _, hi in self.domain])

    def grid_axes(self, n: int = 11, margin: float = 1e-2) -> list[np.ndarray]:
        axes = []
        for lo, hi in self.domain:
            pad = margin * (hi - lo)
            axes.append(np.linspace(lo + pad, hi - pad, n))
        return axes

    def grid(self, n: int = 11, margin: float = 1e-2) -> np.ndarray:
        """Standard test grid: n points per axis on the domain shrunk by margin."""
        mesh = np.meshgrid(*self.grid_axes(n, margin), indexing="ij")
        return np.stack([g.ravel() for g in mesh], axis=-1)

    def check_stencil(self, u, reach) -> None:
        u = np.asarray(u, dtype=float)
        reach = np.broadcast_to(np.asarray(reach, dtype=float), u.shape)
        if np.any(u - reach < self.lower) or np.any(u + reach > self.upper):
            raise StencilOutOfDomain(
                f"stencil of reach {np.max(reach):.3g} at u={u} leaves the domain of {self.label or 'chart'}"
            )

    def check_surface(self, x, tol: float | None = None) -> None:
        tol = self.surface_tol if tol is None else tol
        if tol is None:
            return
        x = np.asarray(x, dtype=float)
        res = float(np.max(self.ambient.quadric_residual(x)))
        if res > tol:
            raise OffSurface(f"surface constraint residual {res:.3g} exceeds {tol:.3g}")
        if self.ambient.epsilon == -1 and np.any(x[..., 0] <= 0):
            raise OffSurface("point on the wrong sheet of the hyperboloid (x0 <= 0)")

    def with_label(self, label: str) -> "Chart":
        return replace(self, label=label)


def pad_chart(chart: Chart, extra: int) -> Chart:
    """View a chart in Q_eps^{n+extra} x R by inserting zero coordinates.

    The new coordinates are placed just before the R factor, so the image
    lies in a totally geodesic Q_eps^n x R of the larger product.
    """
    amb = chart.ambient.padded(extra)
    inner = chart.func

    def func(u):
        x = inner(u)
        zeros = np.zeros(x.shape[:-1] + (extra,))
        return np.concatenate([x[..., :-1], zeros, x[..., -1:]], axis=-1)

    return replace(chart, ambient=amb, func=func, label=f"{chart.label}+pad{extra}")


def perturb_chart(chart: Chart, amplitude: float = 1e-2, center=None, width: float = 0.3,
                  direction=None) -> Chart:
    """Add a Gaussian bump to a chart without re-projecting onto the quadric.

    The result is not a submanifold of Q_eps^n x R any more, so the surface
    check is disabled; it serves as a negative control for the residuals.
    """
    center = np.asarray(chart.grid(3)[len(chart.grid(3)) // 2] if center is None else center, float)
    if direction is None:
        direction = np.zeros(chart.ambient.total_dim)
        direction[0] = 1.0
    direction = np.asarray(direction, float)
    inner = chart.func

    def func(u):
        u = np.asarray(u, float)
        r2 = np.sum(((u - center) / width) ** 2, axis=-1)
        return inner(u) + amplitude * np.exp(-r2)[..., None] * direction

    return replace(chart, func=func, surface_tol=None, label=f"{chart.label}+bump")


# --- parametrisations of the orbit factor ---------------------------------

SPHERE_POLE_MARGIN = 1e-2


def sphere_param(t):
    """Iterated polar angles: (..., k) -> unit vectors (..., k + 1).

    The last angle is azimuthal on [0, 2pi]; the others are polar on
    [0, pi].
    """
    t = np.asarray(t, dtype=float)
    k = t.shape[-1]
    out = []
    prod = np.ones(t.shape[:-1])
    for i in range(k - 1):
        out.append(prod * np.cos(t[..., i]))
        prod = prod * np.sin(t[..., i])
    out.append(prod * np.cos(t[..., k - 1]))
    out.append(prod * np.sin(t[..., k - 1]))
    return np.stack(out, axis=-1)


def sphere_param_inverse(y):
    """Angles for unit vectors y (..., k + 1); inverse of :func:`sphere_param`."""
    y = np.asarray(y, dtype=float)
    k = y.shape[-1] - 1
    angles = []
    for i in range(k - 1):
        rest = np.linalg.norm(y[..., i + 1:], axis=-1)
        angles.append(np.arctan2(rest, y[..., i]))
    angles.append(np.mod(np.arctan2(y[..., -1], y[..., -2]), 2 * np.pi))
    return np.stack(angles, axis=-1)


def sphere_domain(k: int, margin: float = SPHERE_POLE_MARGIN) -> tuple[tuple[float, float], ...]:
    polar = tuple((margin, np.pi - margin) for _ in range(k - 1))
    return polar + ((0.0, 2 * np.pi),)


def hyperboloid_param(t):
    """(..., k) -> points of H^k in L^{k+1}, first coordinate timelike."""
    t = np.asarray(t, dtype=float)
    x0 = np.sqrt(1.0 + np.sum(t * t, axis=-1))
    return np.concatenate([x0[..., None], t], axis=-1)


def hyperboloid_domain(k: int, half_width: float = 1.5) -> tuple[tuple[float, float], ...]:
    return tuple((-half_width, half_width) for _ in range(k))


def as_points(u, m: int) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.shape[-1] != m:
        raise WrongDimension(f"expected parameters with {m} components, got shape {u.shape}")
    return u


def grid_points(axes: Sequence[np.ndarray]) -> np.ndarray:
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in mesh], axis=-1)


def random_isometry(ambient: AmbientSpace, seed: int = 0) -> np.ndarray:
    """A deterministic isometry of E^{n+1} preserving the quadric (and its upper sheet).

    For eps = 1 it is a random orthogonal matrix; for eps = -1 a random
    rotation of the spacelike coordinates composed with a boost.
    """
    rng = np.random.default_rng(seed)
    d = ambient.n + 1
    if ambient.epsilon == 1:
        q, r = np.linalg.qr(rng.normal(size=(d, d)))
        return q * np.sign(np.diag(r))
    q, r = np.linalg.qr(rng.normal(size=(d - 1, d - 1)))
    rot = np.eye(d)
    rot[1:, 1:] = q * np.sign(np.diag(r))
    boost = np.eye(d)
    b = 0.4
    boost[np.ix_([0, 1], [0, 1])] = [[np.cosh(b), np.sinh(b)], [np.sinh(b), np.cosh(b)]]
    return boost @ rot


def isometric_image(chart: Chart, M: np.ndarray) -> Chart:
    """Compose a chart with an isometry M of E^{n+1} acting on the quadric factor."""
    M = np.asarray(M, float)
    sig = chart.ambient.signature[:-1]
    if not np.allclose(M.T @ np.diag(sig) @ M, np.diag(sig), atol=1e-12):
        raise ValueError("M does not preserve the ambient inner product")
    inner = chart.func

    def func(u):
        x = np.asarray(inner(u), float)
        out = x.copy()
        out[..., :-1] = x[..., :-1] @ M.T
        return out

    return replace(chart, func=func, label=f"{chart.label}+iso")

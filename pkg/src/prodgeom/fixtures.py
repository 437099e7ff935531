"""Named charts used by the tests, the demos and the command line.

Each fixture is a small function returning either a Chart or a
PartialTubeSpec.  ``CORPUS`` maps names to zero-argument builders; tube and
rotational fixtures carry enough metadata for the diagnostics to know
what they should satisfy.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial import Polynomial

from .ambient import AmbientSpace, Chart, perturb_chart, sphere_domain, sphere_param
from .tube import CurveAlpha, ParallelFrame, PartialTubeSpec, build_tube, line_curve

TWO_PI = 2.0 * np.pi


# --- base immersions into Q_eps^n (t = 0) ----------------------------------

def great_circle(n: int = 2) -> Chart:
    """t -> (cos t, sin t, 0, ..., 0) in S^n."""
    amb = AmbientSpace(1, n)

    def func(u):
        u = np.asarray(u, float)
        out = np.zeros(u.shape[:-1] + (n + 2,))
        out[..., 0] = np.cos(u[..., 0])
        out[..., 1] = np.sin(u[..., 0])
        return out

    return Chart(amb, 1, func, ((0.0, TWO_PI),), label=f"great_circle[S{n}]")


def small_circle(radius: float, n: int = 2) -> Chart:
    """Circle of spherical radius `radius` about e_2 in S^n."""
    amb = AmbientSpace(1, n)
    sr, cr = np.sin(radius), np.cos(radius)

    def func(u):
        u = np.asarray(u, float)
        out = np.zeros(u.shape[:-1] + (n + 2,))
        out[..., 0] = sr * np.cos(u[..., 0])
        out[..., 1] = sr * np.sin(u[..., 0])
        out[..., 2] = cr
        return out

    return Chart(amb, 1, func, ((0.0, TWO_PI),), label=f"small_circle[{radius:g},S{n}]")


def small_circle_normal(radius: float, n: int = 2) -> Callable:
    """Unit normal of the small circle inside S^2, pointing away from e_2."""
    sr, cr = np.sin(radius), np.cos(radius)

    def xi(u):
        u = np.asarray(u, float)
        out = np.zeros(u.shape[:-1] + (1, n + 2))
        out[..., 0, 0] = cr * np.cos(u[..., 0])
        out[..., 0, 1] = cr * np.sin(u[..., 0])
        out[..., 0, 2] = -sr
        return out

    return xi


def hyperbolic_geodesic(n: int = 2, half_width: float = 1.2) -> Chart:
    """t -> (cosh t, sinh t, 0, ..., 0) in H^n."""
    amb = AmbientSpace(-1, n)

    def func(u):
        u = np.asarray(u, float)
        out = np.zeros(u.shape[:-1] + (n + 2,))
        out[..., 0] = np.cosh(u[..., 0])
        out[..., 1] = np.sinh(u[..., 0])
        return out

    return Chart(amb, 1, func, ((-half_width, half_width),), label=f"geodesic[H{n}]")


def hyperbolic_circle(radius: float, n: int = 2) -> Chart:
    """Geodesic circle of radius `radius` about e_0 in H^n."""
    amb = AmbientSpace(-1, n)
    ch, sh = np.cosh(radius), np.sinh(radius)

    def func(u):
        u = np.asarray(u, float)
        out = np.zeros(u.shape[:-1] + (n + 2,))
        out[..., 0] = ch
        out[..., 1] = sh * np.cos(u[..., 0])
        out[..., 2] = sh * np.sin(u[..., 0])
        return out

    return Chart(amb, 1, func, ((0.0, TWO_PI),), label=f"circle[{radius:g},H{n}]")


def hyperbolic_circle_normal(radius: float, n: int = 2) -> Callable:
    ch, sh = np.cosh(radius), np.sinh(radius)

    def xi(u):
        u = np.asarray(u, float)
        out = np.zeros(u.shape[:-1] + (1, n + 2))
        out[..., 0, 0] = sh
        out[..., 0, 1] = ch * np.cos(u[..., 0])
        out[..., 0, 2] = ch * np.sin(u[..., 0])
        return out

    return xi


def great_sphere(n: int = 3, dim: int = 2, margin: float = 0.2) -> Chart:
    """Totally geodesic S^dim spanned by e_0..e_dim inside S^n."""
    amb = AmbientSpace(1, n)

    def func(u):
        u = np.asarray(u, float)
        out = np.zeros(u.shape[:-1] + (n + 2,))
        out[..., :dim + 1] = sphere_param(u)
        return out

    return Chart(amb, dim, func, sphere_domain(dim, margin), label=f"great_sphere[S{dim}in S{n}]")


def constant_frame(indices, n: int) -> Callable:
    """Constant normal fields e_i, i in indices (parallel along any base avoiding them)."""
    indices = list(indices)

    def xi(u):
        u = np.asarray(u, float)
        out = np.zeros(u.shape[:-1] + (len(indices), n + 2))
        for a, i in enumerate(indices):
            out[..., a, i] = 1.0
        return out

    return xi


# --- type-fiber curves ------------------------------------------------------

def _poly(c) -> tuple[Polynomial, Polynomial, Polynomial]:
    p = Polynomial(c)
    return p, p.deriv(), p.deriv(2)


def angle_curve(eps: int, k: int, sigma, height, beta=(0.0,), interval=(-0.5, 0.5)) -> CurveAlpha:
    """Curve in Q_eps^k x R through polar angles.

    k = 0: (1, h);  k = 1: (C(sigma), S(sigma), h);
    k = 2: (C(sigma), S(sigma) cos beta, S(sigma) sin beta, h),
    with (C, S) = (cos, sin) for eps = 1 and (cosh, sinh) for eps = -1.
    sigma, beta and h are polynomials in s given by coefficient lists.
    """
    if k not in (0, 1, 2):
        raise ValueError("angle_curve supports k = 0, 1, 2")
    sg, hh, bt = _poly(sigma), _poly(height), _poly(beta)
    C, S = (np.cos, np.sin) if eps == 1 else (np.cosh, np.sinh)

    def jets(s):
        s = np.asarray(s, float)
        x, x1, x2 = (f(s) for f in sg)
        c, u = C(x), S(x)
        c1, u1 = -eps * u * x1, c * x1
        c2, u2 = -eps * (c * x1 ** 2 + u * x2), -eps * u * x1 ** 2 + c * x2
        h = [f(s) for f in hh]
        if k == 0:
            one, zero = np.ones_like(s), np.zeros_like(s)
            comps = [(one, zero, zero)]
        elif k == 1:
            comps = [(c, c1, c2), (u, u1, u2)]
        else:
            b, b1, b2 = (f(s) for f in bt)
            cb, sb = np.cos(b), np.sin(b)
            cb1, sb1 = -sb * b1, cb * b1
            cb2, sb2 = -cb * b1 ** 2 - sb * b2, -sb * b1 ** 2 + cb * b2

            def prod(w, w1, w2):
                return (u * w, u1 * w + u * w1, u2 * w + 2 * u1 * w1 + u * w2)

            comps = [(c, c1, c2), prod(cb, cb1, cb2), prod(sb, sb1, sb2)]
        comps.append(tuple(h))
        return [np.stack([cmp[j] for cmp in comps], axis=-1) for j in range(3)]

    return CurveAlpha(eps, k, lambda s: jets(s)[0], lambda s: jets(s)[1], lambda s: jets(s)[2],
                      tuple(interval))


# --- tube fixtures ----------------------------------------------------------

def vertical_cylinder_spec() -> PartialTubeSpec:
    """Equator of S^2 times the vertical line."""
    return PartialTubeSpec(ParallelFrame(great_circle(2), constant_frame([], 2), 0),
                           line_curve(1, 0, (-1.0, 1.0)), label="vertical_cylinder")


def tube_k1_sphere_spec() -> PartialTubeSpec:
    """Over the great circle of S^2 with xi = e_2, a tilted non-geodesic fiber."""
    frame = ParallelFrame(great_circle(2), constant_frame([2], 2), 1)
    curve = angle_curve(1, 1, sigma=[0.2, 0.7, 0.3], height=[0.0, 1.0, 0.2], interval=(-0.5, 0.5))
    return PartialTubeSpec(frame, curve, label="tube_k1_S2")


def tube_small_circle_spec() -> PartialTubeSpec:
    """Over a small circle of S^2 (non-geodesic base), k = 1."""
    r = 0.9
    frame = ParallelFrame(small_circle(r, 2), small_circle_normal(r, 2), 1)
    curve = angle_curve(1, 1, sigma=[0.1, 0.5], height=[0.0, 0.8, -0.3], interval=(-0.5, 0.5))
    return PartialTubeSpec(frame, curve, label="tube_small_circle_S2")


def tube_pinching_spec() -> PartialTubeSpec:
    """Small-circle tube whose fiber crosses the focal set, so det P_s changes sign."""
    r = 0.9
    frame = ParallelFrame(small_circle(r, 2), small_circle_normal(r, 2), 1)
    curve = angle_curve(1, 1, sigma=[0.0, 1.0], height=[0.0, 1.0], interval=(-1.2, 1.2))
    return PartialTubeSpec(frame, curve, label="tube_pinching_S2")


def tube_k2_sphere_spec() -> PartialTubeSpec:
    """Over the great circle of S^3 with xi = (e_2, e_3), fiber in S^2 x R."""
    frame = ParallelFrame(great_circle(3), constant_frame([2, 3], 3), 2)
    curve = angle_curve(1, 2, sigma=[0.6, 0.4], beta=[0.3, 0.8, -0.2], height=[0.1, 0.9, 0.1],
                        interval=(-0.5, 0.5))
    return PartialTubeSpec(frame, curve, label="tube_k2_S3")


def tube_k1_hyperbolic_spec() -> PartialTubeSpec:
    """Over a geodesic of H^2 with xi = e_2, fiber in H^1 x R."""
    frame = ParallelFrame(hyperbolic_geodesic(2), constant_frame([2], 2), 1)
    curve = angle_curve(-1, 1, sigma=[0.2, 0.6, 0.2], height=[0.0, 1.0, 0.3], interval=(-0.5, 0.5))
    return PartialTubeSpec(frame, curve, label="tube_k1_H2")


def tube_hyperbolic_circle_spec() -> PartialTubeSpec:
    """Over a geodesic circle of H^2 (umbilical base), k = 1."""
    r = 0.7
    frame = ParallelFrame(hyperbolic_circle(r, 2), hyperbolic_circle_normal(r, 2), 1)
    curve = angle_curve(-1, 1, sigma=[0.1, 0.4], height=[0.0, 0.9, 0.2], interval=(-0.5, 0.5))
    return PartialTubeSpec(frame, curve, label="tube_circle_H2")


def tube_k2_hyperbolic_spec() -> PartialTubeSpec:
    frame = ParallelFrame(hyperbolic_geodesic(3), constant_frame([2, 3], 3), 2)
    curve = angle_curve(-1, 2, sigma=[0.5, 0.3], beta=[0.2, 0.6], height=[0.0, 1.0, -0.2],
                        interval=(-0.5, 0.5))
    return PartialTubeSpec(frame, curve, label="tube_k2_H3")


def tube_k0_hyperbolic_spec() -> PartialTubeSpec:
    """Vertical cylinder over a geodesic circle of H^2."""
    return PartialTubeSpec(ParallelFrame(hyperbolic_circle(0.7, 2), constant_frame([], 2), 0),
                           line_curve(-1, 0, (-1.0, 1.0)), label="cylinder_H2")


def tube_m3_spec() -> PartialTubeSpec:
    """Three-dimensional tube over the great S^2 in S^3 with xi = e_3."""
    frame = ParallelFrame(great_sphere(3, 2), constant_frame([3], 3), 1)
    curve = angle_curve(1, 1, sigma=[0.3, 0.5], height=[0.0, 1.0, 0.2], interval=(-0.5, 0.5))
    return PartialTubeSpec(frame, curve, label="tube_m3_S3")


TUBE_SPECS: dict[str, Callable[[], PartialTubeSpec]] = {
    "vertical_cylinder": vertical_cylinder_spec,
    "tube_k1_S2": tube_k1_sphere_spec,
    "tube_small_circle_S2": tube_small_circle_spec,
    "tube_k2_S3": tube_k2_sphere_spec,
    "tube_k1_H2": tube_k1_hyperbolic_spec,
    "tube_circle_H2": tube_hyperbolic_circle_spec,
    "tube_k2_H3": tube_k2_hyperbolic_spec,
    "cylinder_H2": tube_k0_hyperbolic_spec,
    "tube_m3_S3": tube_m3_spec,
}


# --- plain charts -----------------------------------------------------------

def slice_sphere(margin: float = 0.2) -> Chart:
    """The totally geodesic slice S^2 x {0}."""
    amb = AmbientSpace(1, 2)

    def func(u):
        u = np.asarray(u, float)
        return np.concatenate([sphere_param(u), np.zeros(u.shape[:-1] + (1,))], axis=-1)

    return Chart(amb, 2, func, sphere_domain(2, margin), label="slice_sphere",
                 meta={"kind": "slice"})


def graph_chart() -> Chart:
    """(cos u1 cos u2, cos u1 sin u2, sin u1, u1 + u2): a graph over S^2, not in class A."""
    amb = AmbientSpace(1, 2)

    def func(u):
        u = np.asarray(u, float)
        a, b = u[..., 0], u[..., 1]
        return np.stack([np.cos(a) * np.cos(b), np.cos(a) * np.sin(b), np.sin(a), a + b], axis=-1)

    return Chart(amb, 2, func, ((-1.0, 1.0), (0.0, 2.0)), label="graph", meta={"kind": "graph"})


def perturbed_slice(amplitude: float = 1e-2) -> Chart:
    ch = slice_sphere()
    direction = np.zeros(4)
    direction[1] = 1.0
    return perturb_chart(ch, amplitude=amplitude, direction=direction, width=0.5)


def veronese_cylinder() -> Chart:
    """Vertical cylinder over the Veronese-type curve of S^4 (k=0 tube with a non-planar base)."""
    amb = AmbientSpace(1, 4)
    c = 1.0 / np.sqrt(2.0)

    def func(u):
        u = np.asarray(u, float)
        t, s = u[..., 0], u[..., 1]
        return np.stack([c * np.cos(t), c * np.sin(t), c * np.cos(2 * t), c * np.sin(2 * t),
                         np.zeros_like(t), s], axis=-1)

    return Chart(amb, 2, func, ((0.0, TWO_PI), (-1.0, 1.0)), label="veronese_cylinder",
                 meta={"kind": "tube", "k": 0, "eps": 1})


@dataclass(frozen=True)
class Fixture:
    name: str
    build: Callable[[], Chart]
    kind: str  # tube, rotational, family, slice, graph, perturbed
    valid: bool = True  # False for negative controls that are not immersions in Q x R


def tube_fixture(name: str) -> Chart:
    return build_tube(TUBE_SPECS[name]())


# --- rotational fixtures ----------------------------------------------------

def parabolic_profile(n: int, m: int, sigma=(0.1, 0.4), middle=((0.2, 0.3),), height=(0.0, 1.0, 0.2),
                      interval=(-0.5, 0.5), sign: int = -1) -> "Profile":
    """Profile with alpha_0 = sign * exp(sigma(s)), polynomial middle entries and the last
    entry fixed by 2 alpha_0 alpha_last + sum alpha_i^2 = -1.

    sign = -1 keeps the orbit on the upper sheet x_0 > 0.
    """
    from .rotational import Profile

    nmid = n - m
    sg = _poly(sigma)
    mids = [_poly(c) for c in list(middle)[:nmid]]
    if len(mids) != nmid:
        raise ValueError(f"need {nmid} middle polynomials")
    hh = _poly(height)

    def jets(s):
        s = np.asarray(s, float)
        x, x1, x2 = (f(s) for f in sg)
        a0 = sign * np.exp(x)
        a01, a02 = a0 * x1, a0 * (x2 + x1 * x1)
        mv = [tuple(f(s) for f in mp) for mp in mids]
        Q = sum((v[0] ** 2 for v in mv), np.zeros_like(s))
        Q1 = sum((2 * v[0] * v[1] for v in mv), np.zeros_like(s))
        Q2 = sum((2 * (v[1] ** 2 + v[0] * v[2]) for v in mv), np.zeros_like(s))
        e = sign * np.exp(-x)
        w = -0.5 * (1 + Q) * e
        w1 = -0.5 * (Q1 - (1 + Q) * x1) * e
        w2 = -0.5 * (Q2 - 2 * Q1 * x1 - (1 + Q) * x2 + (1 + Q) * x1 * x1) * e
        comps = [(a0, a01, a02)] + mv + [(w, w1, w2), tuple(f(s) for f in hh)]
        return [np.stack([c[j] for c in comps], axis=-1) for j in range(3)]

    return Profile(lambda s: jets(s)[0], lambda s: jets(s)[1], lambda s: jets(s)[2], tuple(interval))


def rotational_specs() -> dict:
    from .rotational import Profile, RotationalSpec

    def prof(curve):
        return Profile.from_curve(curve)

    return {
        "rot_sph1_n2": RotationalSpec("spherical_eps1", 2, 2, prof(
            angle_curve(1, 1, sigma=[0.8, 0.4], height=[0.0, 1.0, 0.3], interval=(-0.5, 0.5)))),
        "rot_sph1_n3": RotationalSpec("spherical_eps1", 3, 2, prof(
            angle_curve(1, 2, sigma=[0.7, 0.3], beta=[0.2, 0.5], height=[0.0, 0.8, 0.3],
                        interval=(-0.5, 0.5)))),
        "rot_sph1_m3": RotationalSpec("spherical_eps1", 3, 3, prof(
            angle_curve(1, 1, sigma=[0.8, 0.3], height=[0.0, 1.0, 0.2], interval=(-0.5, 0.5))),
            polar_margin=0.2),
        "rot_sphm1_n2": RotationalSpec("spherical_epsm1", 2, 2, prof(
            angle_curve(-1, 1, sigma=[0.8, 0.4], height=[0.0, 1.0, 0.3], interval=(-0.5, 0.5)))),
        "rot_sphm1_n3": RotationalSpec("spherical_epsm1", 3, 2, prof(
            angle_curve(-1, 2, sigma=[0.8, 0.3], beta=[0.3, 0.4], height=[0.0, 1.0, 0.1],
                        interval=(-0.5, 0.5)))),
        "rot_hyp_n2": RotationalSpec("hyperbolic", 2, 2, prof(
            angle_curve(-1, 1, sigma=[0.3, 0.5], height=[0.0, 1.0, 0.2], interval=(-0.5, 0.5)))),
        "rot_par_n2": RotationalSpec("parabolic", 2, 2, parabolic_profile(2, 2, middle=())),
        "rot_par_n3": RotationalSpec("parabolic", 3, 2, parabolic_profile(3, 2)),
    }


def rotational_fixture(name: str) -> Chart:
    from .rotational import rotational_chart

    return rotational_chart(rotational_specs()[name])


def tube_geodesic_fiber_spec() -> PartialTubeSpec:
    """Fiber is a geodesic (helix) of S^1 x R, so eta is parallel everywhere."""
    frame = ParallelFrame(great_circle(2), constant_frame([2], 2), 1)
    curve = angle_curve(1, 1, sigma=[0.2, 0.6], height=[0.0, 0.8], interval=(-0.5, 0.5))
    return PartialTubeSpec(frame, curve, label="tube_geodesic_fiber")


TUBE_SPECS["tube_geodesic_fiber"] = tube_geodesic_fiber_spec


# --- the named corpus -------------------------------------------------------

FAMILY_SAMPLE = (
    (1.0, 0.0), (2.0, 1.0), (1.5, 0.25), (0.75, 0.0625), (1.25, 0.0625),
    (1.5, 0.5), (3.0, 5.0), (0.6, 0.3), (2.5, 3.0), (1.1, 0.5),
)
"""Ten points of the parameter set: five on the boundary q = (p-1)^2 (h = 0),
including (1, 0), and five interior points (h > 0)."""


def family_charts(p: float, q: float, m: int = 2) -> list[Chart]:
    from .family import FamilyParams, Y_chart, Z_chart

    fp = FamilyParams(p, q, m)
    return [Y_chart(fp)] + ([Z_chart(fp)] if q != 0 else [])


def _corpus() -> dict[str, Fixture]:
    from .family import FamilyParams, Y_chart, Z_chart

    out: dict[str, Fixture] = {}
    for name, mk in TUBE_SPECS.items():
        out[name] = Fixture(name, (lambda mk=mk: build_tube(mk())), "tube")
    for name in rotational_specs():
        out[name] = Fixture(name, (lambda name=name: rotational_fixture(name)), "rotational")
    for p, q in ((2.0, 1.0), (1.5, 0.5), (1.0, 0.0)):
        tag = f"{p:g}_{q:g}"
        out[f"family_Y_{tag}"] = Fixture(f"family_Y_{tag}", (lambda p=p, q=q: Y_chart(FamilyParams(p, q))),
                                         "family")
        if q:
            out[f"family_Z_{tag}"] = Fixture(f"family_Z_{tag}",
                                             (lambda p=p, q=q: Z_chart(FamilyParams(p, q))), "family")
    out["family_Y_1.5_1_m3"] = Fixture("family_Y_1.5_1_m3", lambda: Y_chart(FamilyParams(1.5, 1.0, 3)),
                                       "family")
    out["slice_sphere"] = Fixture("slice_sphere", slice_sphere, "slice")
    out["veronese_cylinder"] = Fixture("veronese_cylinder", veronese_cylinder, "tube")
    out["graph"] = Fixture("graph", graph_chart, "graph")
    out["perturbed_slice"] = Fixture("perturbed_slice", perturbed_slice, "perturbed", valid=False)
    return out


CORPUS: dict[str, Fixture] = _corpus()


def build(name: str) -> Chart:
    try:
        fx = CORPUS[name]
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(sorted(CORPUS))}") from None
    return fx.build()

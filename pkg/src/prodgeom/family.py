"""The two-parameter family of umbilical submanifolds M^m_{r,h} of S^{m+1} x R.

Parameters (p, q) range over the set (p - 1)^2 <= q < p^2.  The charts
Y_{p,q} and Z_{p,q} cover M^m_{r,h}, and the conformal map
phi(x, t) = e^t x carries it onto a round m-sphere of radius r whose centre
sits at height h above the axis point xbar = (sqrt(2)/2) e_m.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .ambient import AmbientSpace, Chart, sphere_domain, sphere_param
from .errors import OutOfDomain, OutOfInterval, QZeroForZ, ZeroVector

SQRT2 = np.sqrt(2.0)
D_AXIS = SQRT2 / 2.0  # |xbar|
MEMBER_SLACK = 1e-12

# default trimming of the positive s half-interval used by the charts
S_LOW = 0.05
S_HIGH = 0.95
# charts with a polar sphere factor (m >= 3) stay further from the poles and
# from s = 0, where the polar coordinates degenerate and the metric becomes
# badly conditioned enough to swamp the finite-difference curvature checks
S_LOW_POLAR = 0.1
POLAR_MARGIN = 0.2


def in_family_domain(p: float, q: float, slack: float = MEMBER_SLACK) -> bool:
    return (p - 1.0) ** 2 <= q + slack and q < p * p


def psi(p: float, q: float) -> tuple[float, float]:
    """(p, q) -> (r, h)."""
    if not in_family_domain(p, q):
        raise OutOfDomain(f"(p, q) = ({p}, {q}) violates (p-1)^2 <= q < p^2")
    r = D_AXIS * np.sqrt(p * p - q)
    h = D_AXIS * np.sqrt(max(q - (p - 1.0) ** 2, 0.0))
    return float(r), float(h)


def psi_inv(r: float, h: float) -> tuple[float, float]:
    """(r, h) -> (p, q), inverse of :func:`psi`."""
    if not (r > 0 and h >= 0):
        raise OutOfDomain(f"(r, h) = ({r}, {h}) needs r > 0 and h >= 0")
    p = r * r + h * h + 0.5
    return float(p), float(p * p - 2.0 * r * r)


@dataclass(frozen=True)
class FamilyParams:
    p: float
    q: float
    m: int = 2

    def __post_init__(self):
        if self.m < 2:
            raise OutOfDomain("dimension m must be at least 2")
        if not in_family_domain(self.p, self.q):
            raise OutOfDomain(
                f"(p, q) = ({self.p}, {self.q}) is not in the parameter set (p-1)^2 <= q < p^2"
            )

    @classmethod
    def from_rh(cls, r: float, h: float, m: int = 2) -> "FamilyParams":
        p, q = psi_inv(r, h)
        return cls(p, q, m)

    @property
    def rh(self) -> tuple[float, float]:
        return psi(self.p, self.q)

    @property
    def r(self) -> float:
        return self.rh[0]

    @property
    def h(self) -> float:
        return self.rh[1]

    @property
    def disc(self) -> float:
        """q - (p - 1)^2, clipped at zero on the boundary."""
        return max(self.q - (self.p - 1.0) ** 2, 0.0)

    @property
    def s_end(self) -> float:
        return float(np.sqrt(self.p - np.sqrt(self.q)))

    @property
    def J(self) -> tuple[float, float]:
        return (-self.s_end, self.s_end)

    @property
    def xbar(self) -> np.ndarray:
        x = np.zeros(self.m + 2)
        x[self.m] = D_AXIS
        return x

    def chart_interval(self, lo: float = S_LOW, hi: float = S_HIGH) -> tuple[float, float]:
        return (lo * self.s_end, hi * self.s_end)


def h_pq(params: FamilyParams, s, check: bool = True):
    """h_{p,q}(s) = sqrt(p - s^2 + sqrt((p - s^2)^2 - q)) on the closed interval."""
    s = np.asarray(s, dtype=float)
    if check and np.any(np.abs(s) > params.s_end * (1 + 1e-12)):
        raise OutOfInterval(f"s outside the closed interval |s| <= {params.s_end:.6g}")
    v = params.p - s * s
    inner = np.sqrt(np.maximum(v * v - params.q, 0.0))
    return np.sqrt(v + inner)


def h_pq_derivatives(params: FamilyParams, s):
    """(h, h', h'') on the open interval, using d(log h)/ds = -s / sqrt(X)."""
    s = np.asarray(s, dtype=float)
    h = h_pq(params, s)
    X = (s * s - params.p) ** 2 - params.q
    rx = np.sqrt(X)
    lp = -s / rx
    lpp = -1.0 / rx + 2.0 * s * s * (s * s - params.p) / (X * rx)
    return h, h * lp, h * (lpp + lp * lp)


def conformal_phi(x, t):
    """phi(x, t) = e^t x."""
    x = np.asarray(x, dtype=float)
    return np.exp(np.asarray(t, dtype=float))[..., None] * x


def conformal_phi_inv(y):
    y = np.asarray(y, dtype=float)
    norm = np.linalg.norm(y, axis=-1)
    if np.any(norm == 0):
        raise ZeroVector("the conformal map is undefined at the origin")
    return y / norm[..., None], np.log(norm)


def reflection_B(params: FamilyParams) -> np.ndarray:
    """The 2x2 reflection used in Psi; symmetric, orthogonal, B^2 = I."""
    if params.q == 0:
        raise QZeroForZ("the second chart needs q != 0")
    sq = np.sqrt(params.q)
    a = 1.0 - params.p
    b = np.sqrt(params.disc)
    return np.array([[a, b], [b, -a]]) / sq


def isometry_A(params: FamilyParams) -> np.ndarray:
    """I_m (+) B acting on the S^{m+1} factor."""
    A = np.eye(params.m + 2)
    A[params.m:, params.m:] = reflection_B(params)
    return A


def Psi(params: FamilyParams, y):
    """Psi(x, t) = (A x, -t + log sqrt(q)) on points of S^{m+1} x R."""
    y = np.asarray(y, dtype=float)
    A = isometry_A(params)
    out = np.empty_like(y)
    out[..., :-1] = y[..., :-1] @ A.T
    out[..., -1] = -y[..., -1] + 0.5 * np.log(params.q)
    return out


def Y_point(params: FamilyParams, x, s):
    """Y_{p,q}(x, s) for unit x in R^m; s may lie anywhere in the closed interval."""
    x = np.asarray(x, dtype=float)
    s = np.asarray(s, dtype=float)
    h = h_pq(params, s)
    a = D_AXIS * (h + (1.0 - params.p) / h)
    b = np.sqrt(params.disc) / (SQRT2 * h)
    return np.concatenate([s[..., None] * x, a[..., None], b[..., None], np.log(h)[..., None]], axis=-1)


def Z_point(params: FamilyParams, x, s):
    return Psi(params, Y_point(params, x, s))


def _family_chart(params: FamilyParams, which: str, interval=None) -> Chart:
    m = params.m
    amb = AmbientSpace(1, m + 1)
    if interval is None:
        interval = params.chart_interval(lo=S_LOW if m == 2 else S_LOW_POLAR)
    lo, hi = interval
    if which == "Z":
        reflection_B(params)  # raises QZeroForZ early

    def func(u):
        u = np.asarray(u, dtype=float)
        x = sphere_param(u[..., :-1])
        s = u[..., -1]
        y = Y_point(params, x, s)
        return Psi(params, y) if which == "Z" else y

    branch = 1 if which == "Y" else -1
    meta = {"kind": "family", "which": which, "p": params.p, "q": params.q, "m": m, "branch": branch}
    return Chart(amb, m, func, sphere_domain(m - 1, margin=POLAR_MARGIN) + ((lo, hi),),
                 label=f"{which}[p={params.p:g},q={params.q:g},m={m}]", meta=meta)


def Y_chart(params: FamilyParams, interval=None) -> Chart:
    """Chart (t, s) -> Y(phi(t), s) over S^{m-1} x a trimmed positive part of J.

    Y(x, -s) = Y(-x, s), so the positive half covers the image; s = 0 is a
    polar singularity of these coordinates and the endpoint of J is a
    singularity of the parametrization, hence the trimming.  The chart
    realises the + branch of the profile formula.
    """
    return _family_chart(params, "Y", interval)


def Z_chart(params: FamilyParams, interval=None) -> Chart:
    """Psi composed with Y; realises the - branch of the profile formula."""
    return _family_chart(params, "Z", interval)


def sphere_center(params: FamilyParams) -> np.ndarray:
    c = params.xbar.copy()
    c[params.m + 1] = params.h
    return c


def _closed_samples(params: FamilyParams, n: int):
    m = params.m
    dom = sphere_domain(m - 1, margin=0.0)
    axes = [np.linspace(lo, hi, n) for lo, hi in dom]
    # with q = 0 the endpoints map to the removed origin, so stay just inside
    end = params.s_end * (1.0 - 1e-9 if params.q == 0 else 1.0)
    axes.append(np.linspace(-end, end, n))
    mesh = np.meshgrid(*axes, indexing="ij")
    u = np.stack([g.ravel() for g in mesh], axis=-1)
    return sphere_param(u[:, :-1]), u[:, -1]


def sphere_image_check(params: FamilyParams, n: int = 9) -> dict:
    """Check that phi maps the charts onto the round sphere S^m_{r,h}.

    Samples the closed interval (endpoints included) and the whole of
    S^{m-1}.  Returns the maximal radius error, the maximal height error of
    the slot that must equal h, and the largest value of that same slot
    after subtracting the centre (identically zero in exact arithmetic).
    """
    x, s = _closed_samples(params, n)
    c = sphere_center(params)
    images = [conformal_phi(*_split(Y_point(params, x, s)))]
    if params.q != 0:
        images.append(conformal_phi(*_split(Z_point(params, x, s))))
    rad = height = zero = 0.0
    for img in images:
        if not np.all(np.isfinite(img)):
            raise OutOfInterval("non-finite image point while sampling the closed interval")
        d = img - c
        rad = max(rad, float(np.max(np.abs(np.linalg.norm(d, axis=-1) - params.r))))
        height = max(height, float(np.max(np.abs(img[:, params.m + 1] - params.h))))
        zero = max(zero, float(np.max(np.abs(d[:, params.m + 1]))))
    return {"max_radius_err": rad, "max_height_err": height, "max_zero_slot": zero}


def _split(y):
    return y[..., :-1], y[..., -1]


def phi_image_point(params: FamilyParams, which: str, u):
    """phi applied to the chart point with parameters u = (angles, s)."""
    u = np.asarray(u, dtype=float)
    x = sphere_param(u[..., :-1])
    y = Y_point(params, x, u[..., -1])
    if which == "Z":
        y = Psi(params, y)
    return conformal_phi(*_split(y))


def distance_to_union(params: FamilyParams, targets, n_seed: int = 121) -> np.ndarray:
    """Distance from each target to the nearest point of phi(Y) or phi(Z).

    A coarse grid over the closed parameter domain supplies the start, then
    a bounded least-squares solve refines it.
    """
    targets = np.atleast_2d(np.asarray(targets, dtype=float))
    m = params.m
    dom = sphere_domain(m - 1, margin=0.0) + ((-params.s_end, params.s_end),)
    lo = np.array([a for a, _ in dom])
    hi = np.array([b for _, b in dom])
    n_axis = max(int(round(n_seed ** (1.0 / m))), 5)
    axes = [np.linspace(a, b, n_axis) for a, b in dom]
    mesh = np.meshgrid(*axes, indexing="ij")
    seeds = np.stack([g.ravel() for g in mesh], axis=-1)
    which_list = ["Y"] + (["Z"] if params.q != 0 else [])
    best = np.full(len(targets), np.inf)
    for which in which_list:
        seed_img = phi_image_point(params, which, seeds)
        for idx, tgt in enumerate(targets):
            d = np.linalg.norm(seed_img - tgt, axis=-1)
            u0 = seeds[np.argmin(d)]
            sol = least_squares(lambda u: phi_image_point(params, which, u) - tgt,
                                u0, bounds=(lo, hi), xtol=1e-15, ftol=1e-15, gtol=1e-15)
            best[idx] = min(best[idx], float(np.linalg.norm(phi_image_point(params, which, sol.x) - tgt)))
    return best


def sample_full_sphere(params: FamilyParams, count: int, seed: int = 0) -> np.ndarray:
    """Uniform random points of the target sphere S^m_{r,h} in R^{m+2}."""
    rng = np.random.default_rng(seed)
    w = rng.normal(size=(count, params.m + 1))
    w /= np.linalg.norm(w, axis=1, keepdims=True)
    pts = np.zeros((count, params.m + 2))
    pts[:, : params.m + 1] = params.r * w
    return pts + sphere_center(params)

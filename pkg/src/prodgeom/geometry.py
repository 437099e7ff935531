"""Numerical frames, fundamental forms and compatibility residuals of a Chart.

Everything here is computed from point evaluations of the chart only.
First derivatives use plain central differences; second derivatives use
a Richardson-extrapolated central stencil (fourth order), because plain
second differences at tiny steps drown in round-off.  Quantities that need
one more derivative (curvatures, covariant derivatives of alpha) are
obtained by central differences of the already-computed fields.

Neighbouring normal frames are obtained by projecting the reference frame
at the base point onto the neighbouring normal space and orthonormalising.
That "extended frame" is smooth and agrees with the reference frame at the
base point, so its finite differences are meaningful.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ambient import Chart
from .errors import SingularMetric

# First derivatives reported by frame_at use the step H_TANGENT * (1 + |u_i|).
# Derivatives feeding second-order quantities use steps proportional to the
# length L_i of each domain axis, so that every stencil fits inside the 1%
# margin of the standard grid whatever the size of the domain.  Third
# derivatives (covariant derivative of the second fundamental form) are
# differences of Hessians, so the Hessian step is kept large enough that its
# rounding error, of order eps / h^2, does not dominate them.
H_TANGENT = 1e-5
C_TANGENT4 = 1e-3
C_HESSIAN = 1e-3
C_FIELD = 5e-4

COND_MAX = 1e10
GS_SKIP = 1e-8


def fd_steps(u, scale: float) -> np.ndarray:
    return scale * (1.0 + np.abs(np.asarray(u, dtype=float)))


def axis_steps(chart: Chart, u, coeff: float) -> np.ndarray:
    """Steps coeff * L_i broadcast against parameter points u."""
    u = np.asarray(u, dtype=float)
    return np.broadcast_to(coeff * (chart.upper - chart.lower), u.shape).copy()


def tangent_vectors(chart: Chart, u, scale: float = H_TANGENT, steps=None) -> np.ndarray:
    """Central-difference tangents. u of shape (..., m) -> (..., m, N)."""
    u = np.asarray(u, dtype=float)
    m = chart.m
    h = fd_steps(u, scale) if steps is None else np.broadcast_to(steps, u.shape)
    shift = h[..., :, None] * np.eye(m)
    fp = chart(u[..., None, :] + shift)
    fm = chart(u[..., None, :] - shift)
    return (fp - fm) / (2.0 * h[..., :, None])


def tangent_vectors4(chart: Chart, u) -> np.ndarray:
    """Fourth-order central tangents, Richardson on steps h and 2h."""
    h = axis_steps(chart, u, C_TANGENT4)
    t1 = tangent_vectors(chart, u, steps=h)
    t2 = tangent_vectors(chart, u, steps=2.0 * h)
    return (4.0 * t1 - t2) / 3.0


def _hessian_plain(chart: Chart, u: np.ndarray, h: np.ndarray) -> np.ndarray:
    m = chart.m
    eye = np.eye(m)
    f0 = chart(u)
    # diagonal: three-point second differences
    sh = h[..., :, None] * eye
    fp = chart(u[..., None, :] + sh)
    fm = chart(u[..., None, :] - sh)
    diag = (fp - 2.0 * f0[..., None, :] + fm) / (h[..., :, None] ** 2)
    out = np.zeros(u.shape[:-1] + (m, m, f0.shape[-1]))
    for i in range(m):
        out[..., i, i, :] = diag[..., i, :]
        for j in range(i + 1, m):
            si = h[..., i, None] * eye[i]
            sj = h[..., j, None] * eye[j]
            f = chart(np.stack([u + si + sj, u + si - sj, u - si + sj, u - si - sj], axis=-2))
            d = (f[..., 0, :] - f[..., 1, :] - f[..., 2, :] + f[..., 3, :])
            d = d / (4.0 * h[..., i, None] * h[..., j, None])
            out[..., i, j, :] = d
            out[..., j, i, :] = d
    return out


def hessian(chart: Chart, u, steps=None, richardson: bool = True) -> np.ndarray:
    """Second derivatives d^2 f / du_i du_j, shape (..., m, m, N).

    With ``richardson`` the estimates at steps h and 2h are combined as
    (4 D(h) - D(2h)) / 3, cancelling the h^2 error term.
    """
    u = np.asarray(u, dtype=float)
    h = axis_steps(chart, u, C_HESSIAN) if steps is None else np.broadcast_to(steps, u.shape).copy()
    if not richardson:
        return _hessian_plain(chart, u, h)
    return (4.0 * _hessian_plain(chart, u, h) - _hessian_plain(chart, u, 2.0 * h)) / 3.0


def jet_reach(chart: Chart) -> np.ndarray:
    """Reach of the stencils used for tangents and Hessians inside jets."""
    return 2.0 * max(C_HESSIAN, C_TANGENT4) * (chart.upper - chart.lower)


def field_reach(chart: Chart) -> np.ndarray:
    """Largest parameter offset touched by differencing derived fields."""
    return 4.0 * C_FIELD * (chart.upper - chart.lower) + jet_reach(chart)


# --- linear algebra in the ambient signature ------------------------------

def _inner(sig, a, b):
    return np.sum(a * sig * b, axis=-1)


def inv_sqrt_metric(g: np.ndarray) -> np.ndarray:
    """Symmetric g^{-1/2}; its columns are a g-orthonormal basis."""
    w, v = np.linalg.eigh(g)
    return (v / np.sqrt(w)) @ v.T


def sqrt_metric(g: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(g)
    return (v * np.sqrt(w)) @ v.T


def orthonormal_complement(g: np.ndarray, vec=None, tol: float = 1e-8) -> np.ndarray:
    """Coordinate columns of a g-orthonormal basis of {vec}^perp.

    Without a usable ``vec`` (None or of g-length below ``tol``) the whole
    tangent space is returned.
    """
    E = inv_sqrt_metric(g)
    if vec is None:
        return E
    vec = np.asarray(vec, float)
    norm = np.sqrt(vec @ g @ vec)
    if norm < tol:
        return E
    w = sqrt_metric(g) @ vec / norm  # orthonormal components of the unit vector
    # complete w to an orthonormal basis of R^m and drop it
    q, _ = np.linalg.qr(np.column_stack([w, np.eye(len(w))]))
    return E @ q[:, 1:]


def _project_out(sig, v, basis, norms2):
    for w, n2 in zip(basis, norms2):
        v = v - _inner(sig, v, w) / n2 * w
    return v


def scan_normal_frame(sig, tangents, nu, count: int) -> np.ndarray:
    """Orthonormal frame of the complement of span{tangents, nu}.

    Candidates are the standard basis vectors in index order; those whose
    projection is shorter than 1e-8 are skipped.  Each accepted vector is
    projected twice to keep round-off from accumulating.
    """
    basis, norms2 = [], []
    for t in tangents:
        t = _project_out(sig, t, basis, norms2)
        basis.append(t)
        norms2.append(_inner(sig, t, t))
    basis.append(nu)
    norms2.append(_inner(sig, nu, nu))
    frame = []
    dim = len(sig)
    for idx in range(dim):
        if len(frame) == count:
            break
        e = np.zeros(dim)
        e[idx] = 1.0
        r = _project_out(sig, e, basis, norms2)
        r = _project_out(sig, r, basis, norms2)
        n2 = _inner(sig, r, r)
        if np.sqrt(abs(n2)) < GS_SKIP:
            continue
        r = r / np.sqrt(n2)
        frame.append(r)
        basis.append(r)
        norms2.append(1.0)
    return np.array(frame).reshape(count, dim)


def extend_frame(sig, ref: np.ndarray, tangents: np.ndarray, nu: np.ndarray) -> np.ndarray:
    """Project a reference normal frame onto nearby normal spaces.

    ``tangents`` has shape (..., m, N) and ``nu`` shape (..., N); the
    result has shape (..., k, N) and is orthonormal at every point.
    """
    g = np.einsum("...in,n,...jn->...ij", tangents, sig, tangents)
    ginv = np.linalg.inv(g)
    nn = _inner(sig, nu, nu)
    out = np.empty(tangents.shape[:-2] + ref.shape)
    prev = []
    for a in range(ref.shape[0]):
        v = np.broadcast_to(ref[a], tangents.shape[:-2] + ref.shape[-1:]).copy()
        for _ in range(2):
            c = np.einsum("...in,n,...n->...i", tangents, sig, v)
            v = v - np.einsum("...i,...ij,...jn->...n", c, ginv, tangents)
            v = v - (_inner(sig, v, nu) / nn)[..., None] * nu
            for w in prev:
                v = v - _inner(sig, v, w)[..., None] * w
        v = v / np.sqrt(_inner(sig, v, v))[..., None]
        out[..., a, :] = v
        prev.append(v)
    return out


# --- per-point data ---------------------------------------------------------

@dataclass(frozen=True)
class FrameData:
    u: np.ndarray
    point: np.ndarray
    tangent: np.ndarray  # (m, N)
    metric: np.ndarray  # (m, m)
    normal: np.ndarray  # (k, N)
    nu: np.ndarray
    T: np.ndarray  # coordinate components of the tangent part of d/dt
    eta: np.ndarray  # E^{n+2} vector
    eta_normal: np.ndarray  # components of eta in the normal frame

    @property
    def m(self) -> int:
        return self.tangent.shape[0]

    @property
    def codim(self) -> int:
        return self.normal.shape[0]

    @property
    def metric_inv(self) -> np.ndarray:
        return np.linalg.inv(self.metric)

    @property
    def T_lower(self) -> np.ndarray:
        return self.metric @ self.T

    @property
    def T_norm(self) -> float:
        return float(np.sqrt(max(self.T @ self.metric @ self.T, 0.0)))

    @property
    def onb(self) -> np.ndarray:
        """Columns: coordinate components of a g-orthonormal tangent basis."""
        return inv_sqrt_metric(self.metric)


@dataclass(frozen=True)
class FundamentalData:
    frame: FrameData
    alpha: np.ndarray  # (k, m, m)
    shape: np.ndarray  # (k, m, m), A_a = g^{-1} alpha^a
    H: np.ndarray  # (k,)
    nconn: np.ndarray  # (m, k, k), omega[i, a, b] = <d_i xi_a, xi_b>
    hess: np.ndarray  # (m, m, N)

    def alpha_onb(self) -> np.ndarray:
        E = self.frame.onb
        return np.einsum("ip,aij,jq->apq", E, self.alpha, E)

    def shape_onb(self) -> np.ndarray:
        """Shape operators in the orthonormal basis (symmetric matrices)."""
        return self.alpha_onb()

    def alpha_vec(self, X, Y) -> np.ndarray:
        return np.einsum("i,aij,j->a", np.asarray(X, float), self.alpha, np.asarray(Y, float))


def _check_metric(g: np.ndarray) -> None:
    c = np.linalg.cond(g)
    if not np.isfinite(c) or c > COND_MAX:
        raise SingularMetric(f"metric condition number {c:.3g} exceeds {COND_MAX:.0e}")


def _frame_from(chart: Chart, u, tangent, point, normal=None) -> FrameData:
    amb = chart.ambient
    sig = amb.signature
    g = np.einsum("in,n,jn->ij", tangent, sig, tangent)
    g = 0.5 * (g + g.T)
    _check_metric(g)
    nu = amb.nu(point)
    k = amb.total_dim - 1 - chart.m
    if normal is None:
        normal = scan_normal_frame(sig, tangent, nu, k)
    else:
        normal = extend_frame(sig, normal, tangent, nu)
    T = np.linalg.solve(g, tangent[:, -1])
    eta = amb.e_t - T @ tangent
    eta_n = normal @ (sig * eta)
    return FrameData(np.asarray(u, float), point, tangent, g, normal, nu, T, eta, eta_n)


def frame_at(chart: Chart, u, ref_normal=None) -> FrameData:
    """Tangent and normal frames, metric and the split of d/dt at u.

    ``ref_normal`` switches from the deterministic scan to the extended
    frame anchored on the given normal vectors.
    """
    u = np.asarray(u, dtype=float)
    chart.check_stencil(u, fd_steps(u, H_TANGENT))
    point = chart(u)
    chart.check_surface(point)
    tangent = tangent_vectors(chart, u)
    return _frame_from(chart, u, tangent, point, ref_normal)


def _normal_field(chart: Chart, U, ref: np.ndarray) -> np.ndarray:
    """Extended normal frame at many parameter points, shape (..., k, N)."""
    U = np.asarray(U, float)
    tangents = tangent_vectors4(chart, U)
    nu = chart.ambient.nu(chart(U))
    return extend_frame(chart.ambient.signature, ref, tangents, nu)


def _nconn(chart: Chart, U, ref: np.ndarray) -> np.ndarray:
    """omega[..., i, a, b] = <d_i xi_a, xi_b> for the extended frame."""
    U = np.asarray(U, float)
    m = chart.m
    h = axis_steps(chart, U, C_FIELD)
    shift = h[..., :, None] * np.eye(m)
    xp = _normal_field(chart, U[..., None, :] + shift, ref)
    xm = _normal_field(chart, U[..., None, :] - shift, ref)
    dxi = (xp - xm) / (2.0 * h[..., :, None, None])  # (..., m, k, N)
    xi = _normal_field(chart, U, ref)  # (..., k, N)
    sig = chart.ambient.signature
    return np.einsum("...ian,n,...bn->...iab", dxi, sig, xi)


def fundamental_at(chart: Chart, u, frame: FrameData | None = None) -> FundamentalData:
    """Second fundamental form, shape operators, mean curvature and normal connection."""
    u = np.asarray(u, dtype=float)
    fr = frame_at(chart, u) if frame is None else frame
    chart.check_stencil(u, C_FIELD * (chart.upper - chart.lower) + jet_reach(chart))
    D2 = hessian(chart, u)
    sig = chart.ambient.signature
    alpha = np.einsum("ijn,n,an->aij", D2, sig, fr.normal)
    alpha = 0.5 * (alpha + np.swapaxes(alpha, 1, 2))
    ginv = fr.metric_inv
    shape = np.einsum("ik,akj->aij", ginv, alpha)
    H = np.einsum("ij,aij->a", ginv, alpha) / chart.m
    omega = _nconn(chart, u, fr.normal)
    return FundamentalData(fr, alpha, shape, H, omega, D2)


# --- local jets: fields and their first derivatives ------------------------

def _fields(chart: Chart, U, ref: np.ndarray) -> dict:
    """Metric, Christoffel symbols, alpha, H, T, eta and the algebraic normal
    curvature at many points, all in the extended frame anchored on ``ref``."""
    U = np.asarray(U, float)
    sig = chart.ambient.signature
    J = tangent_vectors4(chart, U)
    D2 = hessian(chart, U)
    g = np.einsum("...in,n,...jn->...ij", J, sig, J)
    ginv = np.linalg.inv(g)
    nu = chart.ambient.nu(chart(U))
    xi = extend_frame(sig, ref, J, nu)
    gam = np.einsum("...kl,...ijn,n,...ln->...kij", ginv, D2, sig, J)
    alpha = np.einsum("...ijn,n,...an->...aij", D2, sig, xi)
    alpha = 0.5 * (alpha + np.swapaxes(alpha, -1, -2))
    A = np.einsum("...ik,...akj->...aij", ginv, alpha)
    H = np.einsum("...ij,...aij->...a", ginv, alpha) / chart.m
    T = np.einsum("...ij,...j->...i", ginv, J[..., :, -1])
    eta = -np.einsum("...i,...in->...n", T, J)
    eta[..., -1] += 1.0
    eta_n = np.einsum("...an,n,...n->...a", xi, sig, eta)
    rperp = (np.einsum("...bik,...akj->...ijab", alpha, A)
             - np.einsum("...aki,...bkj->...ijab", A, alpha))
    return {"g": g, "gamma": gam, "alpha": alpha, "A": A, "H": H, "T": T,
            "eta": eta_n, "rperp_alg": rperp}


@dataclass(frozen=True)
class LocalJet:
    """Fields at u and their coordinate derivatives, in one extended frame.

    ``d[key][i]`` is the derivative of ``c[key]`` along u_i.
    """
    frame: FrameData
    c: dict
    d: dict
    omega: np.ndarray  # [i, a, b]

    @property
    def onb(self) -> np.ndarray:
        return inv_sqrt_metric(self.c["g"])

    def nabla_perp(self, key: str) -> np.ndarray:
        """Normal covariant derivative of a normal-valued field, index [i, a, ...].

        The field's first axis must be the normal index; tangent slots are
        not corrected (use for sections such as eta and H, or for alpha
        together with explicit Christoffel terms).
        """
        val = self.c[key]
        return self.d[key] + np.einsum("iba,b...->ia...", self.omega, val)


def local_jet(chart: Chart, u) -> LocalJet:
    u = np.asarray(u, float)
    chart.check_stencil(u, field_reach(chart) * 1.001)
    fr = frame_at(chart, u)
    ref = fr.normal
    m = chart.m
    h = axis_steps(chart, u, C_FIELD)
    shift = h[:, None] * np.eye(m)
    pts = np.concatenate([u[None, :], u + shift, u - shift, u + 2 * shift, u - 2 * shift])
    f = _fields(chart, pts, ref)
    c = {key: val[0] for key, val in f.items()}
    d = {key: _d4(val[1:], h) for key, val in f.items()}
    omega = _nconn(chart, u, ref)
    return LocalJet(fr, c, d, omega)


def _d4(stacked, h):
    """Fourth-order central derivative from values at u +- h e_i, u +- 2h e_i.

    ``stacked`` holds the four blocks (+h, -h, +2h, -2h), each of length m.
    """
    m = len(h)
    p1, m1, p2, m2 = (stacked[i * m:(i + 1) * m] for i in range(4))
    hb = h.reshape((m,) + (1,) * (stacked.ndim - 1))
    return (8.0 * (p1 - m1) - (p2 - m2)) / (12.0 * hb)


def _nconn_derivative(chart: Chart, u, ref) -> np.ndarray:
    u = np.asarray(u, float)
    m = chart.m
    h = axis_steps(chart, u, C_FIELD)
    shift = h[:, None] * np.eye(m)
    w = _nconn(chart, np.concatenate([u + shift, u - shift, u + 2 * shift, u - 2 * shift]), ref)
    return _d4(w, h)  # [k_deriv, i, a, b]


def to_onb(E, tensor, slots) -> np.ndarray:
    """Contract the listed covariant slots of ``tensor`` with the columns of E."""
    t = np.asarray(tensor, float)
    for ax in slots:
        t = np.moveaxis(np.tensordot(t, E, axes=([ax], [0])), -1, ax)
    return t


def _maxabs(t) -> float:
    t = np.asarray(t)
    return float(np.max(np.abs(t))) if t.size else 0.0


def riemann_numeric(gamma, dgamma) -> np.ndarray:
    """R^l_{kij} from Christoffel symbols and their derivatives dgamma[i, l, j, k]."""
    return (np.einsum("iljk->lkij", dgamma) - np.einsum("jlik->lkij", dgamma)
            + np.einsum("lip,pjk->lkij", gamma, gamma) - np.einsum("ljp,pik->lkij", gamma, gamma))


def gauss_rhs(eps: int, g, T_low, alpha) -> np.ndarray:
    """Lowered curvature R_{lkij} predicted by the Gauss equation."""
    amb = eps * (np.einsum("jk,il->lkij", g, g) - np.einsum("ik,jl->lkij", g, g)
                 - np.einsum("j,k,il->lkij", T_low, T_low, g) + np.einsum("j,ik,l->lkij", T_low, g, T_low)
                 + np.einsum("i,k,jl->lkij", T_low, T_low, g) - np.einsum("i,jk,l->lkij", T_low, g, T_low))
    sff = np.einsum("ail,ajk->lkij", alpha, alpha) - np.einsum("ajl,aik->lkij", alpha, alpha)
    return amb + sff


def covariant_alpha(jet: LocalJet) -> np.ndarray:
    """(nabla_i alpha)^a_{jk}, indexed [i, a, j, k]."""
    c = jet.c
    gam, alpha = c["gamma"], c["alpha"]
    return (jet.nabla_perp("alpha")
            - np.einsum("pij,apk->iajk", gam, alpha)
            - np.einsum("pik,ajp->iajk", gam, alpha))


def normal_curvature(chart: Chart, u, ref=None) -> np.ndarray:
    """R^perp[i, j, a, b] from differences of the normal connection."""
    u = np.asarray(u, float)
    if ref is None:
        ref = frame_at(chart, u).normal
    omega = _nconn(chart, u, ref)
    domega = _nconn_derivative(chart, u, ref)
    return (domega - np.einsum("jiab->ijab", domega)
            + np.einsum("jac,icb->ijab", omega, omega) - np.einsum("iac,jcb->ijab", omega, omega))


def compatibility_residuals(chart: Chart, u) -> dict:
    """Max-norm residuals of the Gauss, Codazzi and Ricci equations at u.

    Residuals are measured in a g-orthonormal tangent basis and the
    orthonormal normal frame.
    """
    u = np.asarray(u, float)
    jet = local_jet(chart, u)
    eps = chart.ambient.epsilon
    c, d = jet.c, jet.d
    g, alpha = c["g"], c["alpha"]
    T_low = g @ c["T"]
    E = jet.onb

    R_low = np.einsum("pl,pkij->lkij", g, riemann_numeric(c["gamma"], d["gamma"]))
    gauss = _maxabs(to_onb(E, R_low - gauss_rhs(eps, g, T_low, alpha), range(4)))

    cov = covariant_alpha(jet)
    rhs = eps * (np.einsum("ik,j->ijk", g, T_low) - np.einsum("jk,i->ijk", g, T_low))
    # (nabla_i alpha)_jk - (nabla_j alpha)_ik, indexed [i, a, j, k]
    cod = cov - np.einsum("jaik->iajk", cov) - np.einsum("ijk,a->iajk", rhs, c["eta"])
    codazzi = _maxabs(to_onb(E, cod, (0, 2, 3)))

    if alpha.shape[0] > 0:
        rperp = normal_curvature(chart, u, jet.frame.normal)
        ricci = _maxabs(to_onb(E, rperp - c["rperp_alg"], (0, 1)))
    else:
        ricci = 0.0
    return {"gauss": gauss, "codazzi": codazzi, "ricci": ricci}


def shape_nu(fr: FrameData, hess: np.ndarray, sig) -> np.ndarray:
    """Shape operator of the lifted immersion in the direction nu (coordinates)."""
    b = np.einsum("ijn,n,n->ij", hess, sig, fr.nu)
    b = 0.5 * (b + b.T)
    return fr.metric_inv @ b


def inclusion_residuals(chart: Chart, u) -> dict:
    """Deviations from the identities relating f and its lift into E^{n+2}.

    * sffi: the shape operator of Q x R in direction nu, from a numerical
      derivative of the normalised position, equals -Z + <Z, d/dt> d/dt.
    * anu: the nu shape operator of the lift equals -I + T (x) T^flat.
    * nconns: the nu-component of the lifted normal connection equals
      eps <X, T> <xi, eta>.
    * normalnu: the normal derivative of nu equals -<X, T> eta.
    """
    u = np.asarray(u, float)
    fd = fundamental_at(chart, u)
    fr = fd.frame
    amb = chart.ambient
    sig = amb.signature
    eps = amb.epsilon
    E = fr.onb
    m = chart.m

    # sffi: directions are orthonormal tangents, normals and e_t
    x = fr.point
    dirs = np.vstack([E.T @ fr.tangent, fr.normal, amb.e_t[None, :]])
    h = 1e-5

    def nu_hat(y):
        p = amb.nu(y)
        return p / np.sqrt(np.abs(_inner(sig, p, p)))[..., None]

    dnu = (nu_hat(x + h * dirs) - nu_hat(x - h * dirs)) / (2 * h)
    nux = nu_hat(x)
    tang = dnu - (_inner(sig, dnu, nux) / _inner(sig, nux, nux))[:, None] * nux
    expect = -dirs + (dirs[:, -1])[:, None] * amb.e_t
    sffi = _maxabs(-tang - expect)

    Anu = shape_nu(fr, fd.hess, sig)
    expect_anu = -np.eye(m) + np.outer(fr.T, fr.T_lower)
    sq = sqrt_metric(fr.metric)
    anu = _maxabs(sq @ (Anu - expect_anu) @ E)
    eig = Anu @ fr.T + (fr.eta_normal @ fr.eta_normal) * fr.T
    anu = max(anu, _maxabs(sq @ eig))

    hh = axis_steps(chart, u, C_FIELD)
    shift = hh[:, None] * np.eye(m)
    xi = _normal_field(chart, np.concatenate([u + shift, u - shift]), fr.normal)
    dxi = (xi[:m] - xi[m:]) / (2 * hh[:, None, None])  # (m, k, N)
    nu_coeff = eps * np.einsum("ian,n,n->ia", dxi, sig, fr.nu)
    expect_nc = eps * np.outer(fr.T_lower, fr.eta_normal)
    nconns = _maxabs(to_onb(E, nu_coeff - expect_nc, (0,)))

    pts = chart(np.concatenate([u + shift, u - shift]))
    nus = amb.nu(pts)
    dnu_u = (nus[:m] - nus[m:]) / (2 * hh[:, None])
    c = np.einsum("in,n,jn->ij", dnu_u, sig, fr.tangent)
    normal_part = dnu_u - c @ fr.metric_inv @ fr.tangent
    expect_nn = -np.outer(fr.T_lower, fr.eta)
    normalnu = _maxabs(to_onb(E, normal_part - expect_nn, (0,)))
    return {"sffi": sffi, "anu": anu, "nconns": nconns, "normalnu": normalnu}


def frame_invariant_residuals(fr: FrameData, sig) -> dict:
    """How far a FrameData is from its defining invariants."""
    k = fr.codim
    nn = np.einsum("an,n,bn->ab", fr.normal, sig, fr.normal)
    orth = _maxabs(nn - np.eye(k))
    tn = np.einsum("an,n,in->ai", fr.normal, sig, fr.tangent)
    nun = fr.normal @ (sig * fr.nu)
    perp = max(_maxabs(tn), _maxabs(nun))
    e_t = np.zeros_like(fr.point)
    e_t[-1] = 1.0
    recon = _maxabs(fr.T @ fr.tangent + fr.eta - e_t)
    unit = abs(fr.T_norm ** 2 + _inner(sig, fr.eta, fr.eta) - 1.0)
    return {"normal_orthonormal": orth, "normal_perp": perp, "reconstruction": recon,
            "unit_split": float(unit)}

"""Scalar residuals for the geometric properties studied on charts.

All tangent quantities are measured in a g-orthonormal basis and all
normal quantities in the orthonormal normal frame of :func:`frame_at`, so
every residual is a max-norm of an honest tensor, independent of the
parametrisation's scaling.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .ambient import TOL, Chart, Tolerances
from .errors import NonConstantRank, NotApplicable, WrongDimension
from .geometry import (FundamentalData, _maxabs, covariant_alpha, fundamental_at, local_jet,
                       orthonormal_complement, shape_nu, sqrt_metric, to_onb)

T_MIN = 1e-8


def _commutator_norm(A, B) -> float:
    return _maxabs(A @ B - B @ A)


def umbilicity_residual(chart: Chart, u, fd: FundamentalData | None = None) -> float:
    """max |alpha_ij^a - g_ij H^a| in an orthonormal tangent basis."""
    fd = fundamental_at(chart, u) if fd is None else fd
    a = fd.alpha_onb()
    return _maxabs(a - fd.H[:, None, None] * np.eye(chart.m))


def _unit_T(fd: FundamentalData) -> np.ndarray:
    fr = fd.frame
    if fr.T_norm < T_MIN:
        raise NotApplicable(f"|T| = {fr.T_norm:.3g} is below {T_MIN:g}")
    return fr.T / fr.T_norm


def class_a_residual(chart: Chart, u, fd: FundamentalData | None = None) -> float:
    """max_a |A_a T^ - <A_a T^, T^> T^| with T^ = T / |T|.  Raises NotApplicable where T = 0."""
    fd = fundamental_at(chart, u) if fd is None else fd
    That = _unit_T(fd)
    g = fd.frame.metric
    sq = sqrt_metric(g)
    worst = 0.0
    for A in fd.shape:
        v = A @ That
        r = v - (v @ g @ That) * That
        worst = max(worst, _maxabs(sq @ r))
    return worst


@dataclass(frozen=True)
class EtaParallel:
    full: float  # max over unit X of |nabla-perp_X eta|
    perp: float  # the same restricted to X orthogonal to T
    discrepancy: float  # max |nabla-perp_X eta + alpha(X, T)|


def parallel_eta_residual(chart: Chart, u) -> EtaParallel:
    """Normal derivative of eta by finite differences, compared with -alpha(., T)."""
    jet = local_jet(chart, u)
    g, T = jet.c["g"], jet.c["T"]
    dn = jet.nabla_perp("eta")  # [i, a]
    E = jet.onb
    full = _maxabs(to_onb(E, dn, (0,)))
    F = orthonormal_complement(g, T, tol=T_MIN)
    perp = _maxabs(to_onb(F, dn, (0,))) if F.shape[1] else 0.0
    alpha_T = np.einsum("aij,j->ia", jet.c["alpha"], T)
    disc = _maxabs(to_onb(E, dn + alpha_T, (0,)))
    return EtaParallel(full, perp, disc)


def flat_normal_bundle_residual(chart: Chart, u, fd: FundamentalData | None = None) -> float:
    """max over frame pairs of |[A_a, A_b]|."""
    fd = fundamental_at(chart, u) if fd is None else fd
    S = fd.shape_onb()
    worst = 0.0
    for a in range(len(S)):
        for b in range(a + 1, len(S)):
            worst = max(worst, _commutator_norm(S[a], S[b]))
    return worst


def nu_shape_onb(fd: FundamentalData, chart: Chart) -> np.ndarray:
    fr = fd.frame
    A = shape_nu(fr, fd.hess, chart.ambient.signature)
    return sqrt_metric(fr.metric) @ A @ fr.onb


def nu_commutator(chart: Chart, u, fd: FundamentalData | None = None) -> float:
    """max_a |[A_nu, A_a]| for the lift into E^{n+2}."""
    fd = fundamental_at(chart, u) if fd is None else fd
    An = nu_shape_onb(fd, chart)
    return max((_commutator_norm(An, S) for S in fd.shape_onb()), default=0.0)


def extended_commutator(chart: Chart, u, fd: FundamentalData | None = None) -> float:
    """Largest pairwise commutator in {A_a} together with A_nu."""
    fd = fundamental_at(chart, u) if fd is None else fd
    return max(flat_normal_bundle_residual(chart, u, fd), nu_commutator(chart, u, fd))


def restricted_umbilicity_residual(chart: Chart, u, fd: FundamentalData | None = None) -> float:
    """max_{X, Y perp T} |alpha(X, Y) - <X, Y> zeta| with zeta = alpha(X^, X^), X^ a unit vector perp T."""
    fd = fundamental_at(chart, u) if fd is None else fd
    fr = fd.frame
    g = fr.metric
    F = orthonormal_complement(g, fr.T, tol=T_MIN)
    if fr.T_norm >= T_MIN:
        basis = np.column_stack([fr.T / fr.T_norm, F])
    else:
        basis = F
    a = to_onb(basis, fd.alpha, (1, 2))  # [a, p, q] over (T^, Y_1, ...)
    off = 1 if fr.T_norm >= T_MIN else 0
    Y = a[:, :, off:]
    zeta = a[:, off, off]
    target = np.zeros_like(Y)
    for j in range(Y.shape[2]):
        target[:, off + j, j] = zeta
    return _maxabs(Y - target)


def abresch_rosenberg_Q(chart: Chart, u, X, Y, fd: FundamentalData | None = None) -> float:
    """Q(X, Y) = 2 <alpha(X, Y), H> - eps <X, T> <Y, T> for coordinate vectors X, Y."""
    if chart.m != 2:
        raise WrongDimension("the quadratic form Q is defined for surfaces only")
    fd = fundamental_at(chart, u) if fd is None else fd
    X, Y = np.asarray(X, float), np.asarray(Y, float)
    TL = fd.frame.T_lower
    return float(2.0 * fd.alpha_vec(X, Y) @ fd.H - chart.ambient.epsilon * (X @ TL) * (Y @ TL))


# --- normal subspaces and reduction of codimension --------------------------

@dataclass(frozen=True)
class NormalSubspace:
    basis: np.ndarray  # rows, coordinates in the normal frame
    dim: int
    singular_values: np.ndarray
    frame: np.ndarray  # the normal frame (ambient vectors) the basis refers to

    def ambient_basis(self) -> np.ndarray:
        return self.basis @ self.frame

    def complement(self) -> np.ndarray:
        """Rows spanning the orthogonal complement inside the normal space."""
        k = self.frame.shape[0]
        if self.dim == 0:
            return np.eye(k)
        _, _, vt = np.linalg.svd(self.basis, full_matrices=True)
        return vt[self.dim:]


def _span(rows: np.ndarray, frame: np.ndarray, rank_tol: float) -> NormalSubspace:
    k = frame.shape[0]
    rows = np.asarray(rows, float).reshape(-1, k)
    if rows.size == 0 or k == 0:
        return NormalSubspace(np.zeros((0, k)), 0, np.zeros(0), frame)
    _, sv, vt = np.linalg.svd(rows, full_matrices=False)
    # relative threshold with an absolute floor, so that round-off on a
    # vanishing form is not promoted to rank
    thresh = rank_tol * max(sv[0], 1.0)
    dim = int(np.sum(sv > thresh))
    return NormalSubspace(vt[:dim], dim, sv, frame)


def first_normal_space(chart: Chart, u, rank_tol: float = TOL.rank,
                       fd: FundamentalData | None = None) -> NormalSubspace:
    """Span of the values of the second fundamental form."""
    fd = fundamental_at(chart, u) if fd is None else fd
    a = fd.alpha_onb()
    iu = np.triu_indices(chart.m)
    rows = a[:, iu[0], iu[1]].T
    return _span(rows, fd.frame.normal, rank_tol)


def l_space(chart: Chart, u, rank_tol: float = TOL.rank,
            fd: FundamentalData | None = None) -> NormalSubspace:
    """L = N_1 + span{eta}."""
    fd = fundamental_at(chart, u) if fd is None else fd
    n1 = first_normal_space(chart, u, rank_tol, fd)
    rows = np.vstack([n1.basis * n1.singular_values[:n1.dim, None], fd.frame.eta_normal[None, :]])
    return _span(rows, fd.frame.normal, rank_tol)


@dataclass(frozen=True)
class ReductionResult:
    ell: int
    parallel_residual: float
    normal_curvature_residual: float
    mean_curvature_residual: float
    affine_dim: int
    expected_affine_dim: int
    points: int

    @property
    def reduces(self) -> bool:
        return self.affine_dim == self.expected_affine_dim


def _reduction_residuals(chart: Chart, u, rank_tol: float) -> tuple[float, float, float]:
    jet = local_jet(chart, u)
    fd = fundamental_at(chart, u, jet.frame)
    L = l_space(chart, u, rank_tol, fd)
    P = L.complement()  # rows spanning L-perp in frame coordinates
    if P.shape[0] == 0:
        return 0.0, 0.0, 0.0
    E = jet.onb
    cov = covariant_alpha(jet)  # [i, a, j, k]
    par = _maxabs(to_onb(E, np.einsum("ra,iajk->irjk", P, cov), (0, 2, 3)))

    c, d = jet.c, jet.d
    R = c["rperp_alg"]  # [i, j, a, b]
    dR = d["rperp_alg"]  # [k, i, j, a, b]
    gam = c["gamma"]
    om = jet.omega
    nR = (dR - np.einsum("pki,pjab->kijab", gam, R) - np.einsum("pkj,ipab->kijab", gam, R)
          + np.einsum("kca,ijcb->kijab", om, R) + np.einsum("kcb,ijac->kijab", om, R))
    curv = _maxabs(to_onb(E, np.einsum("kijab,rb->kijar", nR, P), (0, 1, 2)))

    nH = jet.nabla_perp("H")  # [i, a]
    mean = _maxabs(to_onb(E, nH @ P.T, (0,)))
    return par, curv, mean


def affine_span_dim(points: np.ndarray, extra=(), rel_tol: float = 1e-8) -> int:
    """Dimension of the linear span of the given points and extra vectors."""
    M = np.vstack([np.asarray(points, float)] + [np.atleast_2d(e) for e in extra])
    sv = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(sv > rel_tol * sv[0]))


def codimension_reduction_check(chart: Chart, grid=None, rank_tol: float = TOL.rank,
                                residual_points: int = 5) -> ReductionResult:
    """Rank of L over the grid, the parallelism of N_1 inside L and the two
    conditions for reduction, plus the dimension of the linear span of the
    image together with e_t (a totally geodesic Q^{m+l-1} x R spans m + l + 1)."""
    grid = chart.grid(5) if grid is None else np.asarray(grid, float)
    dims = []
    for u in grid:
        dims.append(l_space(chart, u, rank_tol).dim)
    if len(set(dims)) != 1:
        raise NonConstantRank(f"dim L varies over the grid: {sorted(set(dims))}")
    ell = dims[0]
    idx = np.linspace(0, len(grid) - 1, min(residual_points, len(grid))).astype(int)
    par = curv = mean = 0.0
    for i in idx:
        a, b, c = _reduction_residuals(chart, grid[i], rank_tol)
        par, curv, mean = max(par, a), max(curv, b), max(mean, c)
    span = affine_span_dim(chart(grid), extra=[chart.ambient.e_t])
    return ReductionResult(ell, par, curv, mean, span, chart.m + ell + 1, len(grid))


# --- three verdicts on T being principal -------------------------------

@dataclass(frozen=True)
class Verdicts:
    class_a: float
    eta_perp: float
    nu_comm: float
    pass_class_a: bool
    pass_eta: bool
    pass_nu: bool

    @property
    def agree(self) -> bool:
        return self.pass_class_a == self.pass_eta == self.pass_nu


def class_a_verdicts(chart: Chart, u, tol: Tolerances = TOL) -> Verdicts:
    """The three independent tests of 'T is a principal direction', with their verdicts."""
    fd = fundamental_at(chart, u)
    ca = class_a_residual(chart, u, fd)
    ep = parallel_eta_residual(chart, u).perp
    nc = nu_commutator(chart, u, fd)
    return Verdicts(ca, ep, nc, ca < tol.sff, ep < tol.compat, nc < tol.sff)


# --- reports -----------------------------------------------------------------

@dataclass
class DiagnosticReport:
    name: str
    max_residual: float
    tolerance: float
    passed: bool
    grid: str
    points: int = 0
    skipped: int = 0
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["max_residual"] = float(self.max_residual)
        return d


def _grid_label(n: int, margin: float, count: int) -> str:
    return f"{n} per axis, margin {margin:g}, {count} points"


def sweep(chart: Chart, name: str, fn, tol: float, grid: np.ndarray, label: str,
          upper: bool = True) -> DiagnosticReport:
    """Evaluate fn at every grid point and compare the maximum with tol.

    NotApplicable points are counted as skipped.  With ``upper=False`` the
    check passes when the *minimum* exceeds tol (negative-control style).
    """
    vals, skipped = [], 0
    for u in grid:
        try:
            vals.append(float(fn(chart, u)))
        except NotApplicable:
            skipped += 1
    if not vals:
        return DiagnosticReport(name, 0.0, tol, True, label, 0, skipped, {"note": "no applicable points"})
    worst = max(vals) if upper else min(vals)
    passed = worst <= tol if upper else worst > tol
    return DiagnosticReport(name, worst, tol, bool(passed), label, len(vals), skipped)


def subsample(grid: np.ndarray, count: int) -> np.ndarray:
    if len(grid) <= count:
        return grid
    idx = np.unique(np.linspace(0, len(grid) - 1, count).round().astype(int))
    return grid[idx]


def expected_checks(chart: Chart) -> list[str]:
    kind = chart.meta.get("kind", "")
    checks = ["frame", "compatibility", "inclusion", "class_a_agreement"]
    if kind == "family":
        checks += ["umbilicity", "class_a"]
    elif kind == "tube":
        checks += ["class_a"]
    elif kind == "rotational":
        checks += ["class_a", "restricted_umbilicity"]
    return checks


def run_suite(chart: Chart, n: int = 11, tol: Tolerances = TOL, compat_points: int = 20,
              checks: list[str] | None = None, margin: float = 1e-2) -> list[DiagnosticReport]:
    """Run the checks appropriate for the chart's kind on the standard grid."""
    from .geometry import compatibility_residuals, frame_at, frame_invariant_residuals, inclusion_residuals

    checks = expected_checks(chart) if checks is None else checks
    grid = chart.grid(n, margin)
    label = _grid_label(n, margin, len(grid))
    small = subsample(grid, compat_points)
    small_label = f"{len(small)} points from {label}"
    out: list[DiagnosticReport] = []
    sig = chart.ambient.signature

    for name in checks:
        if name == "frame":
            def fn(ch, u):
                return max(frame_invariant_residuals(frame_at(ch, u), sig).values())
            out.append(sweep(chart, "frame", fn, tol.frame, grid, label))
        elif name == "compatibility":
            vals = [compatibility_residuals(chart, u) for u in small]
            for key in ("gauss", "codazzi", "ricci"):
                worst = max(v[key] for v in vals)
                out.append(DiagnosticReport(key, worst, tol.compat, worst <= tol.compat, small_label,
                                            len(vals)))
        elif name == "inclusion":
            vals = [inclusion_residuals(chart, u) for u in small]
            for key in ("sffi", "anu", "nconns", "normalnu"):
                worst = max(v[key] for v in vals)
                out.append(DiagnosticReport(key, worst, tol.compat, worst <= tol.compat, small_label,
                                            len(vals)))
        elif name == "umbilicity":
            out.append(sweep(chart, "umbilicity", umbilicity_residual, tol.sff, grid, label))
        elif name == "class_a":
            out.append(sweep(chart, "class_a", class_a_residual, tol.sff, grid, label))
        elif name == "restricted_umbilicity":
            out.append(sweep(chart, "restricted_umbilicity", restricted_umbilicity_residual, tol.sff,
                             grid, label))
        elif name == "flat_normal_bundle":
            out.append(sweep(chart, "flat_normal_bundle", flat_normal_bundle_residual, tol.sff, grid,
                             label))
        elif name == "class_a_agreement":
            disagree, applicable = 0, 0
            for u in small:
                try:
                    v = class_a_verdicts(chart, u, tol)
                except NotApplicable:
                    continue
                applicable += 1
                disagree += 0 if v.agree else 1
            out.append(DiagnosticReport("class_a_agreement", float(disagree), 0.0, disagree == 0,
                                        small_label, applicable, len(small) - applicable,
                                        {"meaning": "number of points where the three verdicts differ"}))
        else:
            raise KeyError(f"unknown check {name!r}")
    return out


def overall_pass(reports: list[DiagnosticReport]) -> bool:
    return all(r.passed for r in reports)


__all__ = [
    "DiagnosticReport", "EtaParallel", "NormalSubspace", "ReductionResult", "Verdicts",
    "abresch_rosenberg_Q", "affine_span_dim", "class_a_residual", "class_a_verdicts",
    "codimension_reduction_check", "extended_commutator", "first_normal_space",
    "flat_normal_bundle_residual", "l_space", "nu_commutator", "overall_pass",
    "parallel_eta_residual", "restricted_umbilicity_residual", "run_suite", "umbilicity_residual",
]

"""Residual diagnostics: umbilicity, class A, eta, normal bundle, normal spaces and reports."""
import numpy as np
import pytest

from prodgeom.ambient import TOL, AmbientSpace, Chart, pad_chart
from prodgeom.diagnostics import (DiagnosticReport, abresch_rosenberg_Q, class_a_residual, class_a_verdicts,
                                  codimension_reduction_check, expected_checks, extended_commutator,
                                  first_normal_space, flat_normal_bundle_residual, l_space, nu_commutator,
                                  overall_pass, parallel_eta_residual, restricted_umbilicity_residual, run_suite,
                                  subsample, sweep, umbilicity_residual)
from prodgeom.errors import NotApplicable, WrongDimension
from prodgeom.family import FamilyParams, Y_chart
from prodgeom.fixtures import (CORPUS, build, constant_frame, graph_chart, slice_sphere, small_circle, tube_geodesic_fiber_spec,
                               tube_k1_sphere_spec, vertical_cylinder_spec)
from prodgeom.geometry import fundamental_at
from prodgeom.tube import ParallelFrame, PartialTubeSpec, build_tube, line_curve


def twisted_surface() -> Chart:
    """A generic surface of S^3 x R whose normal bundle is not flat."""
    def func(u):
        a, b = u[..., 0], u[..., 1]
        w = a * b + 0.3 * a * a
        v = np.stack([np.cos(a), np.sin(a) * np.cos(b), np.sin(a) * np.sin(b) * np.cos(w),
                      np.sin(a) * np.sin(b) * np.sin(w)], axis=-1)
        v = v / np.linalg.norm(v, axis=-1, keepdims=True)
        return np.concatenate([v, (0.4 * a + 0.2 * b * b)[..., None]], axis=-1)

    return Chart(AmbientSpace(1, 3), 2, func, ((0.5, 1.3), (0.4, 1.4)), label="twisted")


# --- umbilicity and class A ---------------------------------------------------------

def test_cylinder_over_a_circle_is_far_from_umbilical():
    chart = build("cylinder_H2")  # horizontal curvature coth(0.7), vertical curvature 0
    assert min(umbilicity_residual(chart, u) for u in chart.grid(5)) >= 0.1


def test_cylinder_over_a_unit_radius_circle_of_S2():
    """Principal curvatures cot(1) and 0, so the residual is cot(1) / 2 everywhere."""
    spec = PartialTubeSpec(ParallelFrame(small_circle(1.0, 2), constant_frame([], 2), 0), line_curve(1, 0))
    chart = build_tube(spec)
    vals = [umbilicity_residual(chart, u) for u in chart.grid(5)]
    assert min(vals) >= 0.1
    assert np.allclose(vals, 0.5 / np.tan(1.0), atol=TOL.sff)


def test_cylinder_over_a_great_circle_is_totally_geodesic():
    chart = build_tube(vertical_cylinder_spec())
    assert max(umbilicity_residual(chart, u) for u in chart.grid(5)) < TOL.sff
    assert np.max(np.abs(fundamental_at(chart, chart.grid(3)[4]).alpha)) < TOL.sff


def test_slice_is_umbilical_but_class_a_does_not_apply():
    chart = slice_sphere()
    u = chart.grid(5)[7]
    assert umbilicity_residual(chart, u) < TOL.sff
    with pytest.raises(NotApplicable):
        class_a_residual(chart, u)


def test_graph_is_not_in_class_a():
    chart = graph_chart()
    vals = [class_a_residual(chart, u) for u in chart.grid(5)]
    assert np.median(vals) > 10 * TOL.sff


@pytest.mark.parametrize("name", [n for n, fx in CORPUS.items() if fx.kind == "family"])
def test_umbilical_family_is_in_class_a(name):
    chart = build(name)
    for u in chart.grid(5):
        fd = fundamental_at(chart, u)
        assert umbilicity_residual(chart, u, fd) < TOL.sff
        assert class_a_residual(chart, u, fd) < TOL.sff
        assert restricted_umbilicity_residual(chart, u, fd) < TOL.sff


def test_extended_commutator_tracks_class_a():
    """T principal goes with A_nu commuting with every A_xi: small on a tube, large on the graph."""
    tube = build_tube(tube_k1_sphere_spec())
    for u in tube.grid(4):
        assert class_a_residual(tube, u) < TOL.sff
        assert extended_commutator(tube, u) < TOL.sff
    graph = graph_chart()
    for u in graph.grid(4)[5:7]:
        assert class_a_residual(graph, u) > 1e-2
        assert nu_commutator(graph, u) > 1e-2


def test_verdicts_agree_on_a_tube_and_on_the_graph():
    tube = build_tube(tube_k1_sphere_spec())
    v = class_a_verdicts(tube, tube.grid(3)[4])
    assert v.agree and v.pass_class_a
    g = graph_chart()
    w = class_a_verdicts(g, g.grid(4)[5])
    assert w.agree and not w.pass_class_a


# --- eta --------------------------------------------------------------------------

def test_eta_parallel_when_the_fiber_is_a_geodesic():
    chart = build_tube(tube_geodesic_fiber_spec())
    for u in chart.grid(3):
        assert parallel_eta_residual(chart, u).full < 1e-3


def test_eta_parallel_only_across_T_for_a_curved_fiber():
    chart = build_tube(tube_k1_sphere_spec())
    res = parallel_eta_residual(chart, [1.0, 0.1])
    assert res.perp < TOL.compat
    assert res.full > 1e-2
    assert res.discrepancy < TOL.compat  # nabla-perp eta = -alpha(., T)


def test_eta_on_the_slice():
    chart = slice_sphere()
    res = parallel_eta_residual(chart, chart.grid(5)[7])
    assert res.full < 1e-9 and res.discrepancy < 1e-9


# --- normal bundle --------------------------------------------------------------------

def test_codimension_one_normal_bundle_is_flat():
    chart = slice_sphere()
    assert flat_normal_bundle_residual(chart, chart.grid(3)[4]) == 0.0


def test_twisted_surface_has_curved_normal_bundle():
    chart = twisted_surface()
    assert max(flat_normal_bundle_residual(chart, u) for u in chart.grid(3)) > 0.1


# --- normal spaces --------------------------------------------------------------------

def test_first_normal_space_dimensions():
    sl = slice_sphere()
    u = sl.grid(5)[7]
    assert first_normal_space(sl, u).dim == 0  # totally geodesic
    assert l_space(sl, u).dim == 1  # eta alone
    for pq, n1, ell in [((2.0, 1.0), 1, 1), ((1.5, 0.5), 1, 2)]:
        chart = Y_chart(FamilyParams(*pq))
        v = chart.grid(5)[7]
        assert first_normal_space(chart, v).dim == n1
        assert l_space(chart, v).dim == ell


def test_normal_subspace_complement():
    chart = pad_chart(Y_chart(FamilyParams(1.5, 0.5)), 1)
    L = l_space(chart, chart.grid(5)[7])
    comp = L.complement()
    assert comp.shape == (L.frame.shape[0] - L.dim, L.frame.shape[0])
    assert np.allclose(L.basis @ comp.T, 0.0, atol=1e-12)


def test_reduction_on_the_totally_geodesic_slice():
    res = codimension_reduction_check(pad_chart(slice_sphere(), 2))
    assert res.ell == 1 and res.reduces
    assert res.parallel_residual < 1e-9


# --- Abresch-Rosenberg form -------------------------------------------------------------

def test_quadratic_form_on_the_vertical_cylinder():
    chart = build_tube(vertical_cylinder_spec())
    u = [1.0, 0.2]
    assert abresch_rosenberg_Q(chart, u, [0, 1], [0, 1]) == pytest.approx(-1.0, abs=1e-8)
    assert abresch_rosenberg_Q(chart, u, [1, 0], [0, 1]) == pytest.approx(0.0, abs=1e-8)


def test_quadratic_form_is_symmetric_and_bilinear():
    chart = graph_chart()
    u = chart.grid(3)[4]
    fd = fundamental_at(chart, u)
    X, Y, Z = np.array([1.0, 0.3]), np.array([-0.2, 0.7]), np.array([0.5, 0.5])
    assert abresch_rosenberg_Q(chart, u, X, Y, fd) == pytest.approx(abresch_rosenberg_Q(chart, u, Y, X, fd))
    lhs = abresch_rosenberg_Q(chart, u, X, 2 * Y + Z, fd)
    rhs = 2 * abresch_rosenberg_Q(chart, u, X, Y, fd) + abresch_rosenberg_Q(chart, u, X, Z, fd)
    assert lhs == pytest.approx(rhs, abs=1e-12)


def test_quadratic_form_vanishes_on_the_slice():
    chart = slice_sphere()
    assert abs(abresch_rosenberg_Q(chart, chart.grid(3)[4], [1, 0], [1, 0])) < 1e-8


def test_quadratic_form_needs_a_surface():
    chart = build("tube_m3_S3")
    with pytest.raises(WrongDimension):
        abresch_rosenberg_Q(chart, chart.grid(3)[4], [1, 0, 0], [1, 0, 0])


# --- sweeps and reports ------------------------------------------------------------------

def test_sweep_counts_inapplicable_points():
    chart = slice_sphere()
    rep = sweep(chart, "class_a", class_a_residual, TOL.sff, chart.grid(3), "3 per axis")
    assert rep.passed and rep.points == 0 and rep.skipped == 9
    assert rep.details["note"] == "no applicable points"


def test_sweep_lower_bound_mode():
    chart = graph_chart()
    rep = sweep(chart, "class_a", class_a_residual, 1e-3, chart.grid(3), "3 per axis", upper=False)
    assert rep.passed == (rep.max_residual > 1e-3)


def test_subsample_keeps_endpoints():
    grid = np.arange(100.0)[:, None]
    sub = subsample(grid, 7)
    assert len(sub) == 7 and sub[0, 0] == 0 and sub[-1, 0] == 99
    assert subsample(grid[:5], 7) is not None and len(subsample(grid[:5], 7)) == 5


def test_expected_checks_by_kind():
    assert "umbilicity" in expected_checks(Y_chart(FamilyParams(2.0, 1.0)))
    assert "restricted_umbilicity" in expected_checks(build("rot_sph1_n2"))
    assert "umbilicity" not in expected_checks(graph_chart())


def test_run_suite_on_a_family_chart():
    reports = run_suite(Y_chart(FamilyParams(2.0, 1.0)), n=5)
    names = [r.name for r in reports]
    for key in ("frame", "gauss", "codazzi", "ricci", "sffi", "umbilicity", "class_a", "class_a_agreement"):
        assert key in names
    assert overall_pass(reports)
    d = reports[0].to_dict()
    assert set(d) >= {"name", "max_residual", "tolerance", "passed", "grid"}
    assert isinstance(d["max_residual"], float)


def test_run_suite_flags_the_perturbed_chart():
    reports = run_suite(build("perturbed_slice"), n=5)
    assert not overall_pass(reports)


def test_run_suite_rejects_unknown_check():
    with pytest.raises(KeyError):
        run_suite(slice_sphere(), n=3, checks=["bogus"])


def test_overall_pass_is_all():
    ok = DiagnosticReport("a", 0.0, 1.0, True, "g")
    bad = DiagnosticReport("b", 2.0, 1.0, False, "g")
    assert overall_pass([ok]) and not overall_pass([ok, bad]) and overall_pass([])

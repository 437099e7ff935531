"""Rotational submanifolds: the four kinds, their tube description and invariance."""
import numpy as np
import pytest

from prodgeom.ambient import TOL
from prodgeom.diagnostics import class_a_residual, restricted_umbilicity_residual, umbilicity_residual
from prodgeom.errors import ConstraintViolated, KindMismatch, WrongDimension
from prodgeom.fixtures import angle_curve, parabolic_profile, rotational_fixture, rotational_specs
from prodgeom.geometry import frame_at
from prodgeom.rotational import (Profile, RotationalSpec, direct_formula_point, geodesic_circle_residual, null_basis,
                                 orbit_generator, orbit_invariance_residual, parabolic_light_cone_base,
                                 rotational_as_tube, rotational_chart, rotational_point, tube_vs_rotational)

SPECS = rotational_specs()
TUBE_KW = {"rot_hyp_n2": {"allow_equidistant": True}}


@pytest.mark.parametrize("name", sorted(SPECS))
def test_common_form_matches_coordinate_display(name):
    spec = SPECS[name]
    chart = rotational_chart(spec)
    U = chart.grid(5)
    assert np.max(np.abs(rotational_point(spec, U[:, 0], U[:, 1:]) - direct_formula_point(spec, U[:, 0], U[:, 1:]))) < 1e-13


@pytest.mark.parametrize("name", sorted(SPECS))
def test_orbit_basis_has_constant_gram(name):
    spec = SPECS[name]
    sig = spec.ambient.signature
    for t in spec_t_samples(spec):
        b = spec.orbit_basis(t)
        assert np.allclose(np.einsum("in,n,jn->ij", b, sig, b), spec.gram(), atol=1e-13)


def spec_t_samples(spec):
    lo = np.array([a for a, _ in spec.t_domain()])
    hi = np.array([b for _, b in spec.t_domain()])
    return [lo + f * (hi - lo) for f in (0.1, 0.5, 0.9)]


@pytest.mark.parametrize("name", sorted(SPECS))
def test_points_lie_in_the_ambient(name):
    chart = rotational_fixture(name)
    amb = chart.ambient
    for y in chart(chart.grid(7)):
        assert amb.on_surface(y)


@pytest.mark.parametrize("name", sorted(SPECS))
def test_tube_description_agrees_with_rotational_chart(name):
    assert tube_vs_rotational(SPECS[name], n=7, **TUBE_KW.get(name, {})) < 1e-12


def test_hyperbolic_kind_needs_the_equidistant_flag():
    with pytest.raises(KindMismatch):
        rotational_as_tube(SPECS["rot_hyp_n2"])


@pytest.mark.parametrize("name", ["rot_sphm1_n2", "rot_hyp_n2", "rot_par_n2"])
def test_tube_base_is_a_circle(name):
    tube = rotational_as_tube(SPECS[name], **TUBE_KW.get(name, {}))
    assert geodesic_circle_residual(tube.frame.base) < 1e-6


def test_circle_residual_detects_a_non_circle():
    from prodgeom.ambient import AmbientSpace, Chart

    def func(u):
        t = u[..., 0]
        v = np.stack([np.cos(t), np.sin(t), 0.3 * np.sin(2 * t)], axis=-1)
        v = v / np.linalg.norm(v, axis=-1, keepdims=True)
        return np.concatenate([v, np.zeros(t.shape + (1,))], axis=-1)

    wobble = Chart(AmbientSpace(1, 2), 1, func, ((0.0, 6.0),))
    assert geodesic_circle_residual(wobble) > 1e-2


def test_parabolic_profile_constraint():
    for n, m, mid in [(2, 2, ()), (3, 2, ((0.2, 0.3),)), (4, 2, ((0.1,), (0.0, 0.5)))]:
        spec = RotationalSpec("parabolic", n, m, parabolic_profile(n, m, middle=mid))
        assert np.max(spec.constraint_residual(spec.profile.samples(50))) < 1e-10


def test_parabolic_base_is_null():
    for n, m in [(2, 2), (3, 2), (3, 3)]:
        sig = np.ones(n + 2)
        sig[0] = -1
        t = np.random.default_rng(5).uniform(-2, 2, size=(10, m - 1))
        g = parabolic_light_cone_base(n, m, t)
        assert np.max(np.abs(np.sum(g * sig * g, axis=-1))) < 1e-12


def test_null_basis_pairing():
    hat = null_basis(3)
    sig = np.array([-1.0, 1, 1, 1, 1])
    G = hat @ np.diag(sig) @ hat.T
    assert G[0, 0] == pytest.approx(0) and G[3, 3] == pytest.approx(0)
    assert G[0, 3] == pytest.approx(1)


def test_bad_kind_and_dimensions_are_rejected():
    prof = SPECS["rot_sph1_n2"].profile
    with pytest.raises(KindMismatch):
        RotationalSpec("elliptic", 2, 2, prof)
    with pytest.raises(WrongDimension):
        RotationalSpec("spherical_eps1", 3, 2, prof)  # needs 4 profile components
    with pytest.raises(WrongDimension):
        RotationalSpec("spherical_eps1", 2, 3, prof)


def test_profile_off_constraint_is_rejected():
    curve = angle_curve(1, 1, sigma=[0.8, 0.4], height=[0.0, 1.0])
    bad = Profile(lambda s: curve.value(s) * 1.01, curve.d1, curve.d2, curve.interval)
    with pytest.raises(ConstraintViolated):
        rotational_chart(RotationalSpec("spherical_eps1", 2, 2, bad))


def test_profile_crossing_the_axis_is_rejected():
    crossing = Profile.from_curve(angle_curve(1, 1, sigma=[np.pi / 2, 1.0], height=[0.0, 1.0]))
    with pytest.raises(ConstraintViolated):
        rotational_chart(RotationalSpec("spherical_eps1", 2, 2, crossing))


@pytest.mark.parametrize("name", sorted(SPECS))
def test_orbit_generator_is_an_isometry_fixing_t(name):
    spec = SPECS[name]
    M = orbit_generator(spec, 0.4)
    sig = np.diag(spec.ambient.signature)
    assert np.allclose(M.T @ sig @ M, sig, atol=1e-12)
    assert np.allclose(M[-1], np.eye(len(M))[-1])


@pytest.mark.parametrize("name", ["rot_sph1_n2", "rot_sphm1_n2", "rot_hyp_n2", "rot_par_n2"])
def test_orbit_invariance(name):
    assert orbit_invariance_residual(SPECS[name], amount=0.3) < 1e-8


@pytest.mark.parametrize("name", sorted(SPECS))
def test_rotational_charts_are_class_a_and_restricted_umbilical(name):
    chart = rotational_fixture(name)
    n = 5 if chart.m == 2 else 4
    for u in chart.grid(n):
        assert class_a_residual(chart, u) < TOL.sff
        assert restricted_umbilicity_residual(chart, u) < TOL.sff


def test_vertical_cylinder_is_not_umbilical():
    # constant polar angle, h = s: the orbit is a vertical cylinder over a circle of S^2
    spec = RotationalSpec("spherical_eps1", 2, 2, Profile.from_curve(
        angle_curve(1, 1, sigma=[0.6], height=[0.0, 1.0])))
    chart = rotational_chart(spec)
    assert max(umbilicity_residual(chart, u) for u in chart.grid(5)) > 0.1
    assert frame_at(chart, chart.grid(3)[4]).T_norm == pytest.approx(1.0, abs=1e-8)

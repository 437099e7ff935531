"""The umbilical family: parameters, charts, the conformal map and the sphere image."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prodgeom.ambient import TOL, pad_chart
from prodgeom.diagnostics import codimension_reduction_check, umbilicity_residual
from prodgeom.errors import OutOfDomain, OutOfInterval, QZeroForZ, ZeroVector
from prodgeom.family import (D_AXIS, FamilyParams, Psi, Y_chart, Y_point, Z_chart, conformal_phi, conformal_phi_inv,
                             distance_to_union, h_pq, in_family_domain, isometry_A, psi, psi_inv,
                             sample_full_sphere, sphere_image_check)


@st.composite
def family_points(draw):
    """(p, q) in the parameter set, with q anywhere between the boundary and just below p^2."""
    p = draw(st.floats(0.55, 3.0))
    f = draw(st.floats(0.0, 0.95))
    lo, hi = (p - 1.0) ** 2, p * p
    return p, lo + f * (hi - lo)


# --- parameters ---------------------------------------------------------------

def test_membership():
    assert in_family_domain(1.0, 0.0)
    assert in_family_domain(2.0, 1.0)
    assert not in_family_domain(1.0, 1.0)  # q = p^2 is excluded
    assert not in_family_domain(2.0, 0.5)  # below the boundary parabola
    with pytest.raises(OutOfDomain, match=r"\(p-1\)\^2 <= q < p\^2"):
        FamilyParams(1.0, 1.5)


def test_psi_known_values():
    assert psi(1.0, 0.0) == pytest.approx((D_AXIS, 0.0), abs=1e-15)
    assert psi(2.0, 1.0) == pytest.approx((np.sqrt(6) / 2, 0.0), abs=1e-15)


@settings(max_examples=60, deadline=None)
@given(family_points())
def test_psi_round_trip(pq):
    p, q = pq
    back = psi_inv(*psi(p, q))
    assert back == pytest.approx((p, q), abs=1e-12)


def test_psi_round_trip_on_grid():
    for p in np.linspace(0.6, 3.0, 5):
        for f in (0.0, 0.3, 0.6, 0.9):
            q = (p - 1) ** 2 + f * (2 * p - 1)
            assert psi_inv(*psi(p, q)) == pytest.approx((p, q), abs=1e-12)


def test_psi_inv_rejects_bad_radius():
    with pytest.raises(OutOfDomain):
        psi_inv(0.0, 0.2)


# --- h_{p,q} ---------------------------------------------------------------------

def test_h_known_values():
    fp = FamilyParams(1.0, 0.0)
    s = np.linspace(-0.9, 0.9, 7)
    assert np.allclose(h_pq(fp, s), np.sqrt(2 * (1 - s * s)), atol=1e-14)
    assert h_pq(FamilyParams(2.0, 1.0), 0.0) == pytest.approx(np.sqrt(2 + np.sqrt(3)), abs=1e-14)


def test_h_endpoint_value():
    fp = FamilyParams(1.5, 0.5)
    assert h_pq(fp, fp.s_end) == pytest.approx(fp.q ** 0.25, abs=1e-7)


def test_h_outside_interval():
    fp = FamilyParams(2.0, 1.0)
    with pytest.raises(OutOfInterval):
        h_pq(fp, 1.01 * fp.s_end)


# --- conformal map ----------------------------------------------------------------

def test_phi_at_zero_height_is_identity():
    x = np.array([0.0, 0.6, 0.8, 0.0])
    assert np.allclose(conformal_phi(x, 0.0), x)


def test_phi_inverse_of_scaled_unit_vector():
    x = np.array([0.0, 0.6, 0.8, 0.0])
    y, t = conformal_phi_inv(2 * x)
    assert np.allclose(y, x) and t == pytest.approx(np.log(2))


def test_phi_round_trip_random(rng):
    x = rng.normal(size=(100, 4))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    t = rng.uniform(-2, 2, size=100)
    y, t2 = conformal_phi_inv(conformal_phi(x, t))
    assert np.max(np.abs(y - x)) < 1e-12 and np.max(np.abs(t2 - t)) < 1e-12


def test_phi_inverse_rejects_origin():
    with pytest.raises(ZeroVector):
        conformal_phi_inv(np.zeros(4))


# --- charts ---------------------------------------------------------------------

def test_Y_2_1_at_s_zero():
    fp = FamilyParams(2.0, 1.0)
    y = Y_point(fp, np.array([1.0, 0.0]), 0.0)
    assert np.allclose(y, [0, 0, 1, 0, np.log(np.sqrt(2 + np.sqrt(3)))], atol=1e-14)


def test_Y_1_0_closed_form():
    fp = FamilyParams(1.0, 0.0)
    x = np.array([0.6, 0.8])
    s = np.linspace(-0.9, 0.9, 9)
    y = Y_point(fp, x, s)
    expect = np.column_stack([s * 0.6, s * 0.8, np.sqrt(1 - s * s), 0 * s, 0.5 * np.log(2 * (1 - s * s))])
    assert np.allclose(y, expect, atol=1e-14)


@pytest.mark.parametrize("pq", [(2.0, 1.0), (1.5, 0.5), (3.0, 5.0)])
def test_sphere_part_has_unit_norm(pq):
    fp = FamilyParams(*pq)
    for chart in (Y_chart(fp), Z_chart(fp)):
        pts = chart(chart.grid(11))
        assert np.max(np.abs(np.linalg.norm(pts[:, :-1], axis=1) - 1)) < TOL.surface


def test_Z_needs_nonzero_q():
    with pytest.raises(QZeroForZ):
        Z_chart(FamilyParams(1.0, 0.0))


def test_isometry_is_an_involution():
    fp = FamilyParams(1.5, 0.5)
    A = isometry_A(fp)
    assert np.allclose(A @ A, np.eye(A.shape[0]), atol=1e-12)
    y = Y_point(fp, np.array([0.6, 0.8]), 0.3)
    assert np.allclose(Psi(fp, Psi(fp, y)), y, atol=1e-12)


def test_charts_record_their_branch():
    fp = FamilyParams(1.5, 0.5)
    assert Y_chart(fp).meta["branch"] == 1
    assert Z_chart(fp).meta["branch"] == -1


@pytest.mark.parametrize("pq", [(2.0, 1.0), (1.5, 0.5), (1.0, 0.0)])
def test_charts_are_umbilical(pq):
    fp = FamilyParams(*pq)
    charts = [Y_chart(fp)] + ([Z_chart(fp)] if fp.q else [])
    for chart in charts:
        assert max(umbilicity_residual(chart, u) for u in chart.grid(11)) < TOL.sff


def test_m3_chart_is_umbilical():
    chart = Y_chart(FamilyParams(1.5, 1.0, m=3))
    assert max(umbilicity_residual(chart, u) for u in chart.grid(5)) < TOL.sff


# --- sphere image -------------------------------------------------------------------

@pytest.mark.parametrize("pq", [(2.0, 1.0), (1.0, 0.0), (1.5, 0.5), (0.6, 0.3)])
def test_sphere_image(pq):
    res = sphere_image_check(FamilyParams(*pq))
    assert max(res.values()) < 1e-9


def test_origin_omitted_for_1_0():
    fp = FamilyParams(1.0, 0.0)
    chart = Y_chart(fp)
    pts = chart(chart.grid(11))
    img = conformal_phi(pts[:, :-1], pts[:, -1])
    assert np.min(np.linalg.norm(img, axis=1)) > 1e-3


def test_zero_slot_of_image():
    fp = FamilyParams(2.0, 1.0)  # h = 0, so the slot equals zero
    chart = Y_chart(fp)
    pts = chart(chart.grid(7))
    img = conformal_phi(pts[:, :-1], pts[:, -1])
    assert np.max(np.abs(img[:, fp.m + 1])) < 1e-12


@pytest.mark.slow
def test_union_covers_full_sphere():
    fp = FamilyParams(1.5, 0.5)
    targets = sample_full_sphere(fp, 12, seed=4)
    assert np.max(distance_to_union(fp, targets)) < 1e-6


# --- codimension -------------------------------------------------------------------

@pytest.mark.parametrize("pq, ell", [((2.0, 1.0), 1), ((1.0, 0.0), 1), ((1.5, 0.5), 2), ((3.0, 5.0), 2)])
def test_codimension_dichotomy(pq, ell):
    fp = FamilyParams(*pq)
    res = codimension_reduction_check(pad_chart(Y_chart(fp), 2))
    assert res.ell == ell
    assert (fp.h == 0) == (ell == 1)
    assert res.reduces

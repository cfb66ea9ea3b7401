import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from univalent_toeplitz.classes import sample_robertson_params
from univalent_toeplitz.determinants import t2_closed, t3_closed
from univalent_toeplitz.errors import DomainError, InvalidMeasure, ParamOutOfRange, UnknownLemmaId
from univalent_toeplitz.typically_real import (
    RegionHull,
    RobertsonMeasure,
    boundary_family_points,
    chebyshev_u,
    chebyshev_u_table,
    convex_hull,
    objective_phi1,
    objective_phi_t22,
    objective_phi_t23,
    objective_psi1,
    objective_t22_chord,
    region_hull,
    robertson_coeffs_array,
    two_atom_array,
    two_atom_family,
    typically_real_coeffs,
)

ts = np.linspace(-1, 1, 2001)
alphas = np.linspace(0, 1, 1001)


# ------------------------------------------------------------- Chebyshev


def test_chebyshev_examples():
    np.testing.assert_allclose(chebyshev_u(1, ts), 2 * ts)
    np.testing.assert_allclose(chebyshev_u(2, ts), 4 * ts**2 - 1)
    for n in range(1, 10):
        assert chebyshev_u(n - 1, 1.0) == n
    assert chebyshev_u(3, 0.5) == pytest.approx(-1)


def test_chebyshev_matches_trigonometric_form():
    th = np.linspace(0.01, math.pi - 0.01, 500)
    for k in range(8):
        np.testing.assert_allclose(chebyshev_u(k, np.cos(th)), np.sin((k + 1) * th) / np.sin(th), atol=1e-10)


def test_chebyshev_domain():
    with pytest.raises(DomainError):
        chebyshev_u(2, 1.5)
    with pytest.raises(DomainError):
        chebyshev_u_table(4, [-1.01])


def test_chebyshev_bounded_by_degree():
    table = chebyshev_u_table(12, ts)
    assert np.all(np.abs(table) <= np.arange(1, 13) + 1e-12)


# --------------------------------------------------------------- measures


def test_measure_examples():
    np.testing.assert_allclose(typically_real_coeffs(RobertsonMeasure.point_mass(1.0), 10).coeffs, np.arange(1, 11))
    f = typically_real_coeffs(RobertsonMeasure(((0.5, 1.0), (0.5, -1.0))), 10)
    n = np.arange(1, 11)
    np.testing.assert_allclose(f.coeffs, np.where(n % 2 == 1, n, 0))


def test_single_atom_is_kernel():
    # k(z, t) = z / (1 - 2tz + z^2), so a_{n+1} = 2t a_n - a_{n-1}
    t = 0.3
    a = typically_real_coeffs(RobertsonMeasure.point_mass(t), 12).coeffs.real
    assert a[0] == 1 and a[1] == pytest.approx(2 * t)
    np.testing.assert_allclose(a[2:], 2 * t * a[1:-1] - a[:-2], atol=1e-12)


def test_measure_validation():
    with pytest.raises(InvalidMeasure):
        RobertsonMeasure(((0.5, 0.0),))
    with pytest.raises(InvalidMeasure):
        RobertsonMeasure(((1.0, 1.2),))
    with pytest.raises(InvalidMeasure):
        RobertsonMeasure(())


def test_coefficients_bounded_on_random_measures():
    rng = np.random.default_rng(21)
    w, t = sample_robertson_params(rng, 10_000)
    a = robertson_coeffs_array(w, t, 10)
    assert np.all(np.abs(a) <= np.arange(1, 11) + 1e-9)


# ---------------------------------------------------------------- family


def test_two_atom_chord_coefficients():
    for al in (0.0, 0.3, 0.5, 1.0):
        a = two_atom_family(al, 1.0, -1.0, 4).coeffs.real
        np.testing.assert_allclose(a, [1, 4 * al - 2, 3, 8 * al - 4], atol=1e-12)


def test_two_atom_collapses_at_alpha_one():
    np.testing.assert_allclose(
        two_atom_family(1.0, 0.4, -0.2, 8).coeffs, typically_real_coeffs(RobertsonMeasure.point_mass(0.4), 8).coeffs
    )


def test_two_atom_order_normalization():
    np.testing.assert_allclose(two_atom_family(0.3, 0.9, -0.5, 8).coeffs, two_atom_family(0.7, -0.5, 0.9, 8).coeffs)


@pytest.mark.parametrize("n", range(2, 9))
def test_two_atom_equality_witness(n):
    f = two_atom_family(0.5, 1.0, -1.0, n + 1)
    expected = n**2 if n % 2 else -((n + 1) ** 2)
    assert t2_closed(f, n) == pytest.approx(expected, abs=1e-12)


def test_family_range_checks():
    with pytest.raises(ParamOutOfRange):
        two_atom_family(1.5, 0, 0, 4)
    with pytest.raises(ParamOutOfRange):
        two_atom_family(0.5, 1.1, 0, 4)
    with pytest.raises(ParamOutOfRange):
        objective_phi_t23(0.5, -2.0)
    with pytest.raises(ParamOutOfRange):
        objective_phi1(1.5)
    with pytest.raises(ParamOutOfRange):
        objective_psi1(-0.5)


# ------------------------------------------------------------ objectives


def test_phi_examples():
    assert objective_phi_t23(0, 0) == pytest.approx(-7)
    assert objective_phi_t23(1, 1) == pytest.approx(t2_closed(two_atom_family(1, 1, -1, 4), 3).real)


def test_phi1_psi1_examples():
    assert objective_phi1(1) == 8 and objective_phi1(-1) == 8
    assert objective_phi1(0.5) == pytest.approx(-1) and objective_phi1(-0.5) == pytest.approx(-1)
    assert objective_phi1(0) == 0
    assert objective_psi1(0) == 8 and objective_psi1(0.5) == pytest.approx(-8)


def test_phi_agrees_with_determinant_pipeline():
    A, T = np.meshgrid(alphas, ts, indexing="ij")
    a = two_atom_array(A, T, -1.0, 4)
    np.testing.assert_allclose(objective_phi_t23(A, T), t2_closed(a, 3).real, atol=1e-12)


def test_phi_reflection_gives_right_family():
    A, T = np.meshgrid(alphas, ts, indexing="ij")
    a = two_atom_array(A, T, 1.0, 4)
    np.testing.assert_allclose(objective_phi_t23(A, -T), t2_closed(a, 3).real, atol=1e-12)


def test_curve_objectives_agree_with_determinant_pipeline():
    single = two_atom_array(np.ones_like(ts), ts, 0.0, 4)
    np.testing.assert_allclose(objective_phi1(ts), t3_closed(single, 1).real, atol=1e-12)
    np.testing.assert_allclose(objective_phi_t22(ts), t2_closed(single, 2).real, atol=1e-12)
    chord = two_atom_array(alphas, 1.0, -1.0, 4)
    np.testing.assert_allclose(objective_psi1(alphas), t3_closed(chord, 1).real, atol=1e-12)
    np.testing.assert_allclose(objective_t22_chord(alphas), t2_closed(chord, 2).real, atol=1e-12)


def test_objective_extrema_on_dense_grids():
    # grid of step 1e-3 is the oracle of record; calculus gives the same critical values
    t = np.linspace(-1, 1, 2001)
    al = np.linspace(0, 1, 1001)
    assert objective_phi_t22(t).max() == pytest.approx(5 / 4, abs=1e-5)
    assert objective_phi_t22(math.sqrt(3 / 8)) == pytest.approx(5 / 4, abs=1e-14)
    assert objective_phi1(t).max() == pytest.approx(8) and objective_phi1(t).min() == pytest.approx(-1, abs=1e-5)
    assert objective_psi1(al).min() == pytest.approx(-8) and objective_psi1(al).max() == pytest.approx(8)
    A, T = np.meshgrid(al, t, indexing="ij")
    phi = objective_phi_t23(A, T)
    assert phi.min() == pytest.approx(-7, abs=1e-9) and phi.max() == pytest.approx(9, abs=1e-9)


# ----------------------------------------------------------------- hulls


def test_convex_hull_square():
    pts = [(0, 0), (1, 0), (1, 1), (0, 1), (0.5, 0.5), (0.5, 0)]
    assert convex_hull(pts) == [(0, 0), (1, 0), (1, 1), (0, 1)]


def test_convex_hull_dedups_within_tolerance():
    pts = [(0, 0), (1e-12, 0), (1, 0), (0, 1)]
    assert len(convex_hull(pts)) == 3


def test_region_a23_contains_corner_points():
    hull = region_hull(2, 3)
    verts = np.asarray(hull.vertices)
    for corner in ((-2.0, 3.0), (2.0, 3.0)):
        assert np.min(np.linalg.norm(verts - corner, axis=1)) < 1e-12
    assert all(hull.contains_many(np.stack([2 * ts, 4 * ts**2 - 1], axis=-1)))
    assert not hull.contains((0.0, 3.5))
    assert not hull.contains((0.0, -1.1))


def test_region_is_convex_and_counterclockwise():
    v = np.asarray(region_hull(3, 4).vertices)
    e1 = np.roll(v, -1, axis=0) - v
    e2 = np.roll(e1, -1, axis=0)
    assert np.all(e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0] > 0)


def test_degenerate_region_is_diagonal_segment():
    hull = region_hull(2, 2)
    assert hull.vertices == [(-2.0, -2.0), (2.0, 2.0)]
    assert hull.contains((0.3, 0.3)) and not hull.contains((0.3, 0.4))


@pytest.mark.parametrize("nm", [(2, 3), (3, 4)])
def test_random_measures_stay_inside_region(nm):
    n, m = nm
    hull = region_hull(n, m)
    rng = np.random.default_rng(22)
    w, t = sample_robertson_params(rng, 2000)
    a = robertson_coeffs_array(w, t, m)
    assert all(hull.contains_many(np.stack([a[:, n - 1], a[:, m - 1]], axis=-1)))


@pytest.mark.parametrize("lemma_id", ["A23", "A34"])
def test_boundary_families_lie_in_hull(lemma_id):
    n, m = (2, 3) if lemma_id == "A23" else (3, 4)
    hull = region_hull(n, m)
    pts = boundary_family_points(lemma_id, grid=41)
    assert all(hull.contains(p) for _, p in pts)
    for (al, t1, t2), (x, y) in pts[:5]:
        c = two_atom_array(al, t1, t2, m)
        assert (x, y) == pytest.approx((c[n - 1], c[m - 1]))


def test_a34_families_contain_single_atom_curve():
    pts = np.array([p for _, p in boundary_family_points("A34", grid=201)])
    hull = RegionHull(3, 4, convex_hull(pts))
    curve = np.stack([chebyshev_u(2, ts), chebyshev_u(3, ts)], axis=-1)
    assert all(hull.contains_many(curve, tol=1e-3))


def test_unknown_lemma_id():
    with pytest.raises(UnknownLemmaId):
        boundary_family_points("A45")


def test_hull_serialization():
    hull = region_hull(2, 3, samples=101)
    rows = hull.to_csv().splitlines()
    assert rows[0] == "x,y" and len(rows) == len(hull.vertices) + 1
    d = json.loads(hull.to_json())
    assert d["n"] == 2 and d["m"] == 3 and len(d["vertices"]) == len(hull.vertices)


@settings(max_examples=50, deadline=None)
@given(
    st.lists(st.tuples(st.floats(0.01, 1), st.floats(-1, 1)), min_size=1, max_size=4),
)
def test_t2_range_holds_for_measures(raw):
    total = sum(w for w, _ in raw)
    m = RobertsonMeasure(tuple((w / total, t) for w, t in raw))
    f = typically_real_coeffs(m, 8)
    for n in range(2, 7):
        v = t2_closed(f, n).real
        assert -((n + 1) ** 2) - 1e-9 <= v <= n**2 + 1e-9

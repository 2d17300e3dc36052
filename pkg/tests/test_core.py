import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mrco.core import (
    Box,
    ConstraintRow,
    Ellipsoid,
    Instance,
    PoleSet,
    Polytope,
    RobustProblem,
    ShadowMatrix,
    box_vertices,
    contains,
    hull_membership,
    support_min,
    validate_problem,
)
from oracles import in_hull_nnls, separating_hyperplane, support_min_by_enumeration


def two_row_problem():
    rows = (
        ConstraintRow([1.0], [[0.5, 0.0]], 1.0, [0.0, 1.0]),
        ConstraintRow([0.0], [[0.0, 0.0]], 0.0, [1.0, 0.0]),
    )
    return RobustProblem([1.0], [[1.0], [-1.0]], rows, 2)


class TestValidateProblem:
    def test_well_formed(self):
        assert validate_problem(two_row_problem()) == []

    def test_recourse_row_count(self):
        p = two_row_problem()
        bad = RobustProblem(p.first_stage_cost, [[1.0]], p.rows, 2)
        assert any("recourse rows" in e for e in validate_problem(bad))

    def test_uncertainty_dim(self):
        rows = (ConstraintRow([1.0], [[0.5]], 1.0, [0.0]),)
        bad = RobustProblem([1.0], [[1.0]], rows, 2)
        msgs = validate_problem(bad)
        assert any("uncertainty dim" in e for e in msgs)

    def test_empty_rows(self):
        bad = RobustProblem([1.0], np.zeros((0, 1)), (), 1)
        assert any("no constraint rows" in e for e in validate_problem(bad))


class TestBoxVertices:
    def test_unit_square(self):
        verts = box_vertices(Box.hypercube(2))
        expected = {(0, 0), (1, 0), (0, 1), (1, 1)}
        assert {tuple(v) for v in verts} == expected

    def test_h9_count(self):
        assert box_vertices(Box.hypercube(9)).shape == (512, 9)

    def test_interval(self):
        verts = box_vertices(Box.hypercube(1))
        assert sorted(v[0] for v in verts) == [0.0, 1.0]

    def test_cap(self):
        with pytest.raises(ValueError):
            box_vertices(Box.hypercube(3), cap=2)


class TestContains:
    def test_ellipsoid_center(self):
        e = Ellipsoid([1.0, -2.0], 0.5)
        assert contains(e, [1.0, -2.0])

    def test_ball_just_outside(self):
        tol = 1e-7
        assert not contains(Ellipsoid([0.0, 0.0], 1.0), [1.0 + 10 * tol, 0.0], tol)

    def test_box_corner(self):
        b = Box([-1.0, 0.0], [2.0, 3.0])
        assert contains(b, b.lower)

    def test_dim_mismatch(self):
        with pytest.raises(ValueError):
            contains(Box.hypercube(2), [0.0])


class TestSupportMin:
    def test_h2_diagonal(self):
        b = Box.hypercube(2)
        a = np.array([-1.0, -1.0])
        assert support_min(b, a) == pytest.approx(support_min_by_enumeration(b, a))
        assert support_min(b, a) == pytest.approx(-2.0)

    def test_unit_ball(self):
        e = Ellipsoid([0.0, 0.0], 1.0)
        assert support_min(e, [1.0, 0.0]) == pytest.approx(-1.0)

    def test_triangle(self):
        tri = Polytope([[-1.0, 0.0], [0.0, -1.0], [1.0, 1.0]], [0.0, 0.0, 1.0])
        assert support_min(tri, [1.0, 1.0]) == pytest.approx(0.0, abs=1e-9)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(1, 6), st.integers(0, 10 ** 6))
    def test_box_matches_vertex_enumeration(self, dim, seed):
        rng = np.random.default_rng(seed)
        lo = rng.uniform(-2, 0, dim)
        hi = lo + rng.uniform(0, 3, dim)
        b = Box(lo, hi)
        a = rng.standard_normal(dim)
        assert support_min(b, a) == pytest.approx(support_min_by_enumeration(b, a), abs=1e-9)

    def test_dim_ten_exhaustive(self):
        rng = np.random.default_rng(10)
        lo = rng.uniform(-1, 0, 10)
        b = Box(lo, lo + rng.uniform(0.1, 2, 10))
        for _ in range(3):
            a = rng.standard_normal(10)
            assert support_min(b, a) == pytest.approx(
                support_min_by_enumeration(b, a), abs=1e-9)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10 ** 6))
    def test_support_below_any_member(self, seed):
        rng = np.random.default_rng(seed)
        e = Ellipsoid(rng.standard_normal(3), rng.uniform(0.1, 2.0))
        x = e.center + e.radius * rng.uniform(0, 1) * _unit(rng, 3)
        for _ in range(5):
            a = rng.standard_normal(3)
            assert support_min(e, a) <= a @ x + 1e-9


def _unit(rng, dim):
    v = rng.standard_normal(dim)
    return v / np.linalg.norm(v)


class TestHullMembership:
    POLES = PoleSet([[0.0, 0.0], [2.0, 0.0], [0.0, 2.0]])

    def test_every_pole_is_member(self):
        for p in self.POLES:
            ok, lam = hull_membership(self.POLES, p)
            assert ok and lam is not None
            assert np.allclose(self.POLES.points.T @ lam, p, atol=1e-7)

    def test_centroid(self):
        centroid = self.POLES.points.mean(axis=0)
        ok, lam = hull_membership(self.POLES, centroid)
        assert ok
        assert lam.sum() == pytest.approx(1.0, abs=1e-8)

    def test_outside_point(self):
        far = 2.0 * self.POLES.points[1]
        ok, lam = hull_membership(self.POLES, far)
        assert not ok and lam is None
        gap, _ = separating_hyperplane(self.POLES.points, far)
        assert gap > 1e-6

    @settings(max_examples=40, deadline=None)
    @given(st.integers(2, 5), st.integers(3, 8), st.integers(0, 10 ** 6))
    def test_agrees_with_nnls(self, dim, npts, seed):
        rng = np.random.default_rng(seed)
        pts = rng.standard_normal((npts, dim))
        poles = PoleSet(pts)
        x = rng.standard_normal(dim) * 0.5
        ok, _ = hull_membership(poles, x)
        assert ok == in_hull_nnls(poles.points, x)


class TestPoleSet:
    def test_duplicates_dropped_preserving_order(self):
        ps = PoleSet([[1.0, 0.0], [0.0, 1.0], [1.0, 0.0]])
        assert len(ps) == 2
        assert np.allclose(ps.points, [[1.0, 0.0], [0.0, 1.0]])

    def test_near_duplicates_below_rounding_collapse(self):
        ps = PoleSet([[1.0, 0.0], [1.0 + 1e-14, 0.0]])
        assert len(ps) == 1

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            PoleSet(np.zeros((0, 2)))

    def test_json_round_trip(self):
        ps = PoleSet([[0.5, -1.0], [2.0, 0.25]])
        assert np.allclose(PoleSet.from_json(ps.to_json()).points, ps.points)


class TestShadowMatrix:
    def test_rank_enforced(self):
        with pytest.raises(ValueError):
            ShadowMatrix([[1.0, 0.0], [2.0, 0.0]])

    def test_projection(self):
        P = ShadowMatrix.coordinate_projection(2, 4)
        assert np.allclose(P @ np.array([1.0, 2.0, 3.0, 4.0]), [1.0, 2.0])


class TestPolytopeCertification:
    def test_empty_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            Polytope([[1.0], [-1.0]], [-1.0, 0.0])

    def test_flat_accepted_with_warning(self):
        with pytest.warns(UserWarning, match="flat"):
            Polytope([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]],
                     [0.0, 0.0, 1.0, 1.0])

    def test_bounding_box(self):
        tri = Polytope([[-1.0, 0.0], [0.0, -1.0], [1.0, 1.0]], [0.0, 0.0, 1.0])
        assert np.allclose(tri.bounding_box.lower, [0.0, 0.0], atol=1e-7)
        assert np.allclose(tri.bounding_box.upper, [1.0, 1.0], atol=1e-7)


class TestBoxVertexProperties:
    @settings(max_examples=25, deadline=None)
    @given(st.integers(1, 6), st.integers(0, 10 ** 6))
    def test_all_vertices_contained_and_counted(self, dim, seed):
        rng = np.random.default_rng(seed)
        lo = rng.uniform(-1, 0, dim)
        b = Box(lo, lo + rng.uniform(0.1, 2, dim))
        verts = box_vertices(b)
        assert verts.shape[0] == 2 ** dim
        assert len({tuple(v) for v in verts}) == 2 ** dim
        assert all(contains(b, v) for v in verts)


def test_instance_json_round_trip(tmp_path):
    problem = two_row_problem()
    inst = Instance(problem, Box.hypercube(2), ShadowMatrix.identity(2),
                    PoleSet([[0.0, 0.0], [2.0, 0.0], [0.0, 2.0]]))
    path = tmp_path / "inst.json"
    inst.save(str(path))
    doc = json.loads(path.read_text())
    assert set(doc) == {"first_stage_cost", "recourse_matrix", "rows", "uncertainty",
                        "shadow", "poles"}
    back = Instance.load(str(path))
    assert np.allclose(back.problem.recourse_matrix, problem.recourse_matrix)
    assert np.allclose(back.poles.points, inst.poles.points)
    assert isinstance(back.uncertainty, Box)


def test_instance_dimension_checks():
    problem = two_row_problem()
    with pytest.raises(ValueError):
        Instance(problem, Box.hypercube(3), ShadowMatrix.identity(2), None)
    with pytest.raises(ValueError):
        Instance(problem, Box.hypercube(2), ShadowMatrix.identity(2),
                 PoleSet([[1.0]]))


def test_ellipsoid_singular_shape_rejected():
    with pytest.raises(ValueError, match="singular"):
        Ellipsoid([0.0, 0.0], 1.0, [[1.0, 0.0], [1.0, 0.0]])


def test_mrc_solution_objective_invariant():
    from mrco.core import MrcSolution

    problem = two_row_problem()
    poles = PoleSet([[0.0, 0.0], [1.0, 1.0]])
    good = MrcSolution(np.array([2.0]), {0: np.zeros(1), 1: np.zeros(1)}, 2.0)
    good.check(problem, poles)
    bad_obj = MrcSolution(np.array([2.0]), {0: np.zeros(1), 1: np.zeros(1)}, 2.5)
    with pytest.raises(ValueError, match="objective"):
        bad_obj.check(problem, poles)
    missing = MrcSolution(np.array([2.0]), {0: np.zeros(1)}, 2.0)
    with pytest.raises(ValueError, match="per pole"):
        missing.check(problem, poles)

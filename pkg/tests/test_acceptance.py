"""Acceptance suite: every criterion at its stated tolerance.

Run with `pytest tests/test_acceptance.py -v -s` to see one line per
criterion with its wall time.  The numeric tolerances here are contractual;
the printed runtimes are informational.
"""

import math
import time

import numpy as np
import pytest

from mrco import bounds, mrc, polegen
from mrco.benchmarks import (
    build_lobbying,
    build_norm_example,
    farc_ball_enumerate,
    farc_ball_simple,
    generate_lobbying,
    unit_volume_ball,
)
from mrco.core import (
    Box,
    PoleSet,
    Polytope,
    ShadowMatrix,
    box_vertices,
    contains,
    hull_membership,
    sample_points,
)
from oracles import lobbying_src_box_analytic


def report(criterion: str, started: float, detail: str = "") -> None:
    print(f"[PASS] {criterion} ({time.perf_counter() - started:.2f}s) {detail}".rstrip())


def test_criterion_01_norm_l1_closed_form():
    started = time.perf_counter()
    checked = 0
    for n in (4, 6, 8):
        for n0 in range(1, n + 1):
            problem, unc, shadow, poles = build_norm_example(n, n0, "l1")
            spec = mrc.MrcSpec(problem, unc, shadow, poles,
                               covering="canonical-cross-poles")
            value = mrc.solve_compact(spec).objective
            assert value == pytest.approx(1 + n - n0, abs=1e-6), (n, n0, value)
            checked += 1
    report("criterion 1: L1 norm example equals 1+n-n0", started, f"{checked} cases")


def test_criterion_02_norm_l2_bounds():
    started = time.perf_counter()
    checked = 0
    for n in (4, 6):
        for n0 in range(1, n + 1):
            problem, unc, shadow, poles = build_norm_example(n, n0, "l2")
            spec = mrc.MrcSpec(problem, unc, shadow, poles,
                               covering="canonical-cross-poles")
            value = mrc.solve_compact(spec).objective
            assert value <= math.sqrt(n0) + n - n0 + 1e-6, (n, n0, value)
            assert value >= math.sqrt(n) - 1e-6, (n, n0, value)
            if n0 == n:
                assert value == pytest.approx(math.sqrt(n), abs=1e-4), (n, value)
            checked += 1
    report("criterion 2: L2 norm example bounds", started, f"{checked} cases")


def test_criterion_03_homothety_closed_form_agreement():
    started = time.perf_counter()
    for n0 in range(2, 7):
        cube = Box.hypercube(n0)
        verts = box_vertices(cube)
        for trial in range(50):
            basis = polegen.random_affine_basis(n0, 1000 * n0 + trial)
            sigma, translate = polegen.hypercube_sigma(basis)
            res = polegen.circumscribe(basis, cube)
            assert abs(sigma - res.sigma) <= 1e-9
            assert np.all(np.abs(translate - res.translate) <= 1e-9)
            for v in verts:
                assert np.all(polegen.barycentric(res.poles.points, v) >= -1e-9)
    report("criterion 3: closed-form homothety matches the general construction",
           started, "5 dims x 50 bases")


def _pole_choices(kind: str, uncertainty, n: int, seed: int) -> PoleSet:
    if kind == "simplex":
        basis = polegen.random_affine_basis(n, seed)
        return polegen.circumscribe(basis, uncertainty).poles
    if kind == "2n":
        return polegen.enclosing_cross_poles(uncertainty)
    start = polegen.enclosing_cross_poles(uncertainty)
    return polegen.tighten(start, uncertainty, max_poles=2 * n + 4)[-1]


def test_criterion_04_cross_method_agreement():
    started = time.perf_counter()
    box_grid = [(3, 2, "simplex"), (5, 3, "2n"), (5, 4, "tighten"), (8, 4, "simplex"),
                (10, 5, "2n"), (5, 6, "simplex"), (8, 6, "simplex"), (10, 8, "simplex"),
                (6, 4, "tighten"), (4, 3, "tighten"), (10, 4, "2n"), (8, 5, "simplex"),
                (3, 8, "simplex"), (10, 6, "simplex"), (5, 5, "2n")]
    ball_grid = [(3, 2, "simplex"), (5, 2, "2n"), (6, 3, "tighten"), (10, 3, "simplex"),
                 (5, 4, "2n"), (10, 4, "simplex"), (4, 2, "2n"), (6, 2, "simplex"),
                 (8, 3, "simplex"), (5, 3, "2n"), (3, 3, "simplex"), (7, 3, "2n"),
                 (8, 2, "tighten"), (4, 4, "2n"), (6, 4, "simplex")]
    checked = 0
    for family, grid in (("box", box_grid), ("ball", ball_grid)):
        for m, n, kind in grid:
            seed = 400 + checked
            inst = generate_lobbying(m, n, seed)
            uncertainty = Box.hypercube(n) if family == "box" else unit_volume_ball(n)
            problem = build_lobbying(inst, uncertainty)
            poles = _pole_choices(kind, uncertainty, n, seed)
            spec = mrc.MrcSpec.certified(problem, uncertainty,
                                         ShadowMatrix.identity(n), poles,
                                         samples=300, seed=seed)
            compact = mrc.solve_compact(spec).objective
            cuts = mrc.solve_cutting_plane(spec, tol=1e-6).objective
            assert abs(compact - cuts) <= 1e-5 * (1.0 + abs(compact)), \
                (family, m, n, kind, compact, cuts)
            checked += 1
    report("criterion 4: compact and cutting-plane values agree", started,
           f"{checked} instances")


def test_criterion_05_value_sandwich():
    started = time.perf_counter()
    m = 5
    cases = [(n, seed) for n in (3, 4, 5, 6, 8) for seed in range(4)]
    for n, seed in cases:
        inst = generate_lobbying(m, n, 500 + seed)
        box = Box.hypercube(n)
        problem = build_lobbying(inst, box)
        shadow = ShadowMatrix.identity(n)
        slack = 1e-5

        omega = polegen.enclosing_cross_poles(box)
        gamma = bounds.project_poleset(omega, box)
        lb = bounds.lower_bound(problem, gamma, uncertainty=box)
        farc = mrc.solve_farc_box(problem, box)
        spec = mrc.MrcSpec(problem, box, shadow, omega, covering="2n")
        mrc_val = mrc.solve_compact(spec).objective
        basis = polegen.random_affine_basis(n, seed)
        aarc = mrc.solve_compact(mrc.MrcSpec(
            problem, box, shadow, polegen.circumscribe(basis, omega).poles,
            covering="simplex-over-poles")).objective
        src = mrc.solve_src(problem, box).objective

        assert lb <= farc + slack, (n, seed, lb, farc)
        assert farc <= mrc_val + slack, (n, seed, farc, mrc_val)
        assert mrc_val <= aarc + slack, (n, seed, mrc_val, aarc)
        assert aarc <= src + slack, (n, seed, aarc, src)
        analytic = lobbying_src_box_analytic(inst.Q, inst.prices, box)
        assert src == pytest.approx(analytic, abs=1e-6), (n, seed)
    report("criterion 5: lower bound <= FARC <= MRC <= AARC <= SRC", started,
           f"{len(cases)} instances")


def test_criterion_06_lemma_equivalence_on_balls():
    started = time.perf_counter()
    checked = 0
    for m in range(1, 7):
        for n in (2, 3, 4):
            for seed in range(20):
                inst = generate_lobbying(m, n, 600 + 97 * m + 13 * n + seed)
                ball = unit_volume_ball(n)
                simple = farc_ball_simple(inst, ball)
                enum = farc_ball_enumerate(inst, ball)
                assert abs(simple - enum) <= 1e-6, (m, n, seed, simple, enum)
                checked += 1
    report("criterion 6: subset enumeration equals its closed form", started,
           f"{checked} instances")


def test_criterion_07_simplex_invariance():
    started = time.perf_counter()
    for combo in range(10):
        m, n = 3 + combo % 4, 2 + combo % 3
        inst = generate_lobbying(m, n, 700 + combo)
        box = Box.hypercube(n)
        problem = build_lobbying(inst, box)
        shadow = ShadowMatrix.identity(n)
        values = []
        for basis_seed in (2 * combo, 2 * combo + 1):
            basis = polegen.random_affine_basis(n, 7000 + basis_seed)
            poles = polegen.circumscribe(basis, box).poles
            spec = mrc.MrcSpec(problem, box, shadow, poles,
                               covering="circumscribed-simplex")
            values.append(mrc.solve_compact(spec).objective)
        assert abs(values[0] - values[1]) <= 1e-5 * (1.0 + abs(values[0])), \
            (combo, values)
    # a simplex uncertainty set: affine adjustability is already fully adjustable
    n = 3
    simplex = Polytope(np.vstack([-np.eye(n), np.ones(n)]),
                       np.concatenate([np.zeros(n), [1.0]]))
    inst = generate_lobbying(5, n, 799)
    problem = build_lobbying(inst, simplex)
    aarc = mrc.solve_aarc(problem, simplex, ShadowMatrix.identity(n), rng=1)
    farc = mrc.protect_at_scenarios(
        problem, np.vstack([np.zeros(n), np.eye(n)])).objective
    assert abs(aarc - farc) <= 1e-5 * (1.0 + abs(farc)), (aarc, farc)
    report("criterion 7: value invariance across covering simplices", started,
           "10 pairs + simplex-set equality")


def test_criterion_08_tightening_soundness():
    started = time.perf_counter()
    cases = [(n, seed) for n in (3, 4, 5, 6, 8) for seed in range(2)]
    for n, seed in cases:
        box = Box.hypercube(n)
        inst = generate_lobbying(4, n, 800 + seed)
        problem = build_lobbying(inst, box)
        shadow = ShadowMatrix.identity(n)
        basis = polegen.random_affine_basis(n, seed)
        start = polegen.circumscribe(basis, box).poles
        trajectory = polegen.tighten(start, box, max_poles=3 * n)
        verts = box_vertices(box)
        dists = []
        values = []
        for omega in trajectory:
            for v in verts:
                ok, _ = hull_membership(omega, v, tol=1e-7)
                assert ok, (n, seed, len(omega))
            dists.append(polegen.hausdorff(omega, box))
            spec = mrc.MrcSpec(problem, box, shadow, omega, covering="trajectory")
            values.append(mrc.solve_compact(spec).objective)
        assert all(b <= a + 1e-9 for a, b in zip(dists, dists[1:])), (n, seed, dists)
        assert all(b <= a + 1e-5 for a, b in zip(values, values[1:])), (n, seed, values)
    report("criterion 8: tightening keeps coverage, shrinks distance and value",
           started, f"{len(cases)} trajectories")


def test_criterion_09_scenario_replay():
    started = time.perf_counter()
    n = 3
    setups = []
    box = Box.hypercube(n)
    ball = unit_volume_ball(n)
    l1 = Polytope.l1_ball(n)
    for seed, uncertainty in ((900, box), (901, ball), (902, l1), (903, box)):
        inst = generate_lobbying(4, n, seed)
        problem = build_lobbying(inst, uncertainty)
        poles = polegen.enclosing_cross_poles(uncertainty)
        spec = mrc.MrcSpec.certified(problem, uncertainty, ShadowMatrix.identity(n),
                                     poles, samples=300, seed=seed)
        setups.append((spec, mrc.solve_compact(spec)))
    total = 0
    for spec, sol in setups:
        for xi in sample_points(spec.uncertainty, 100, rng=11):
            lam, v = mrc.recourse_for_scenario(spec, sol, xi)
            u = sol.first_stage
            for i, row in enumerate(spec.problem.rows):
                lhs = float((row.lhs_nominal + row.lhs_uncertain @ xi) @ u)
                lhs += float(spec.problem.recourse_matrix[i] @ v)
                rhs = row.rhs_nominal + float(row.rhs_uncertain @ xi)
                assert lhs <= rhs + 1e-6, (spec.covering, i)
            total += 1
    report("criterion 9: recourse replay is feasible at sampled scenarios",
           started, f"{total} scenarios across {len(setups)} solved instances")


def test_criterion_10_structure_not_numbers():
    started = time.perf_counter()
    # counts are reproduced exactly: vertex counts and pole-set cardinalities
    for n in (9, 10, 12):
        assert box_vertices(Box.hypercube(n)).shape[0] == 2 ** n
    for n0 in (5, 9, 10, 12):
        basis = polegen.random_affine_basis(n0, n0)
        simplex = polegen.circumscribe(basis, Box.hypercube(n0)).poles
        assert len(simplex) == n0 + 1
        assert len(polegen.cross_polytope_poles(n0)) == 2 * n0
    # trend structure on fresh instances: theta and shadow monotonicity are
    # covered by the module tests; published table values are NOT asserted
    # anywhere because the generating instances were never published.
    report("criterion 10: structural counts reproduced; published table values "
           "are out of scope by design", started)

"""Multipolar robust counterparts: compact duals, cutting planes, special cases.

Protection semantics: a first-stage decision u and one recourse vector per
pole are feasible when every constraint row holds for every scenario xi in
the uncertainty set and every convex-combination weight vector lam that
reproduces the observed image P xi from the poles.  Per row this is a
maximization over (lam, xi); dualizing it yields the compact counterparts,
while solving it directly provides the separation oracle for cut generation.

The static (one recourse for all scenarios), affine (simplex pole-set), and
fully adjustable (all box vertices as poles) counterparts are special cases
and have dedicated entry points.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import conic, polegen
from .core import (
    Box,
    Ellipsoid,
    MrcSolution,
    PoleSet,
    Polytope,
    RobustProblem,
    ShadowMatrix,
    UncertaintySet,
    box_vertices,
    halfspace_form,
    hull_membership,
    support_point,
    validate_problem,
)

__all__ = [
    "MrcSpec",
    "SeparationResult",
    "CoveringError",
    "RobustInfeasibleError",
    "certify_covering",
    "build_compact_polytope",
    "build_compact_ellipsoid",
    "solve_compact",
    "separate",
    "solve_cutting_plane",
    "solve_src",
    "solve_aarc",
    "solve_farc_box",
    "protect_at_scenarios",
    "recourse_for_scenario",
]

FARC_ENUM_CAP = 20
FARC_WARN_DIM = 16
POLYTOPE_VERTEX_CAP = 2 ** 16


class CoveringError(ValueError):
    """The pole-set does not cover the observed uncertainty image."""


class RobustInfeasibleError(RuntimeError):
    """No decision is feasible for every admissible scenario."""


@dataclass(frozen=True)
class MrcSpec:
    """A robust problem together with its uncertainty, shadow map and poles.

    Construction checks dimensions only; use :meth:`certified` to also run
    the sampling-based covering certificate (the string records the strategy
    used, since exact certification for general polytopes is itself vertex
    enumeration).
    """

    problem: RobustProblem
    uncertainty: UncertaintySet
    shadow: ShadowMatrix
    poles: PoleSet
    covering: str = "caller-certified"

    def __post_init__(self):
        errors = validate_problem(self.problem)
        if errors:
            raise ValueError("invalid problem: " + "; ".join(errors))
        if self.uncertainty.dim != self.problem.uncertainty_dim:
            raise ValueError("uncertainty set dimension != problem uncertainty_dim")
        if self.shadow.dim != self.problem.uncertainty_dim:
            raise ValueError("shadow column count != problem uncertainty_dim")
        if self.poles.dim != self.shadow.n_obs:
            raise ValueError("pole dimension != shadow row count")

    @classmethod
    def certified(cls, problem, uncertainty, shadow, poles, *,
                  samples: int = 1000, seed: int = 0, tol: float = 1e-8) -> "MrcSpec":
        cert = certify_covering(poles, uncertainty, shadow,
                                samples=samples, seed=seed, tol=tol)
        return cls(problem, uncertainty, shadow, poles, covering=cert)


@dataclass(frozen=True)
class SeparationResult:
    """Worst scenario and weights for one row at a candidate solution."""

    row_index: int
    violation: float
    scenario: np.ndarray
    weights: np.ndarray


def certify_covering(poles: PoleSet, uncertainty: UncertaintySet, shadow: ShadowMatrix,
                     samples: int = 1000, seed: int = 0, tol: float = 1e-8) -> str:
    """Check that the image of the uncertainty set lies in the pole hull.

    Boxes are checked at their vertices (all of them while 2^dim stays below
    4096, a seeded vertex sample beyond); ellipsoids at boundary points of
    the image; polytopes at enumerated vertices when qhull can produce them,
    at support points in random directions otherwise.  Raises CoveringError
    on the first failing point.
    """
    P = shadow.entries
    rng = np.random.default_rng(seed)
    if isinstance(uncertainty, Box):
        if 2 ** uncertainty.dim <= 4096:
            pts = box_vertices(uncertainty)
            label = f"box-vertices:{pts.shape[0]}"
        else:
            bits = rng.integers(0, 2, size=(samples, uncertainty.dim))
            pts = np.where(bits == 1, uncertainty.upper, uncertainty.lower)
            label = f"box-vertex-sample:{samples}"
        images = pts @ P.T
    elif isinstance(uncertainty, Ellipsoid):
        G = P @ uncertainty.shape
        img_center = P @ uncertainty.center
        if uncertainty.radius == 0.0:
            images = img_center[None, :]
            label = "ellipsoid-point:1"
        else:
            dirs = rng.standard_normal((samples, shadow.n_obs))
            dirs /= np.maximum(np.linalg.norm(dirs, axis=1, keepdims=True), 1e-300)
            pulls = dirs @ G
            pulls /= np.maximum(np.linalg.norm(pulls, axis=1, keepdims=True), 1e-300)
            images = img_center + uncertainty.radius * (pulls @ G.T)
            label = f"ellipsoid-boundary:{samples}"
    elif isinstance(uncertainty, Polytope):
        verts = _polytope_vertices(uncertainty)
        if verts is not None and verts.shape[0] <= POLYTOPE_VERTEX_CAP:
            images = verts @ P.T
            label = f"polytope-vertices:{verts.shape[0]}"
        else:
            images = np.array([
                support_point(uncertainty, rng.standard_normal(uncertainty.dim))
                for _ in range(samples)
            ]) @ P.T
            label = f"polytope-support-sample:{samples}"
    else:
        raise TypeError(f"unsupported set type {type(uncertainty).__name__}")

    for x in images:
        ok, _ = hull_membership(poles, x, tol=max(tol, 1e-8))
        if not ok:
            raise CoveringError(
                f"image point {np.round(x, 6).tolist()} escapes the pole hull "
                f"({label})")
    return label


def _polytope_vertices(s: Polytope) -> np.ndarray | None:
    if s.inscribed_radius <= 1e-9:
        return None
    try:
        from scipy.spatial import HalfspaceIntersection

        hs = HalfspaceIntersection(np.hstack([s.C, -s.d[:, None]]), s.chebyshev_center)
        verts = np.unique(np.round(hs.intersections, 9), axis=0)
        return verts
    except Exception:
        return None


# ---------------------------------------------------------------------------
# compact counterparts


class _Layout:
    """Variable offsets shared by the compact builders and solution extraction."""

    def __init__(self, spec: MrcSpec, per_row_extra: int):
        self.n_u = spec.problem.n_first_stage
        self.n_v = spec.problem.n_recourse
        self.k = len(spec.poles)
        self.m = spec.problem.n_rows
        self.per_row_extra = per_row_extra
        self.total = self.n_u + self.k * self.n_v + self.m * per_row_extra

    def v_slice(self, w: int) -> np.ndarray:
        start = self.n_u + w * self.n_v
        return np.arange(start, start + self.n_v)

    def row_extra(self, i: int) -> int:
        return self.n_u + self.k * self.n_v + i * self.per_row_extra

    def extract(self, spec: MrcSpec, res: conic.SolveResult, meta: dict) -> MrcSolution:
        u = res.primal[: self.n_u]
        recourses = {w: res.primal[self.v_slice(w)].copy() for w in range(self.k)}
        meta = dict(meta, covering=spec.covering)
        return MrcSolution(u, recourses, float(spec.problem.first_stage_cost @ u), meta)


def _compact_polytope_parts(spec: MrcSpec) -> tuple[conic.ConicProgram, _Layout]:
    C, d = halfspace_form(spec.uncertainty)
    P = spec.shadow.entries
    n0, dim = P.shape
    n_d = d.size
    problem = spec.problem
    W = spec.poles.points
    lay = _Layout(spec, n_d + n0)
    objective = np.zeros(lay.total)
    objective[: lay.n_u] = problem.first_stage_cost
    prog = conic.ConicProgram(lay.total, objective)

    u_idx = np.arange(lay.n_u)
    for i, row in enumerate(problem.rows):
        Vi = problem.recourse_matrix[i]
        eta = lay.row_extra(i) + np.arange(n_d)
        sig = lay.row_extra(i) + n_d + np.arange(n0)
        # one inequality per pole: row constant + recourse + support dual <= 0
        for w in range(lay.k):
            idx = np.concatenate([u_idx, lay.v_slice(w), eta, sig])
            val = np.concatenate([row.lhs_nominal, Vi, d, -W[w]])
            prog.add_le_sparse(idx, val, row.rhs_nominal)
        # coupling of the support dual to the row's affine xi-dependence
        for j in range(dim):
            idx = np.concatenate([eta, sig, u_idx])
            val = np.concatenate([C[:, j], -P[:, j], -row.lhs_uncertain[:, j]])
            prog.add_eq_sparse(idx, val, -row.rhs_uncertain[j])
        for t in eta:
            prog.add_le_sparse([t], [-1.0], 0.0)
    return prog, lay


def _compact_ellipsoid_parts(spec: MrcSpec) -> tuple[conic.ConicProgram, _Layout]:
    e = spec.uncertainty
    P = spec.shadow.entries
    n0, dim = P.shape
    problem = spec.problem
    W = spec.poles.points
    lay = _Layout(spec, n0)
    objective = np.zeros(lay.total)
    objective[: lay.n_u] = problem.first_stage_cost
    prog = conic.ConicProgram(lay.total, objective)

    img_center = P @ e.center
    rhoMT = e.radius * e.shape.T
    for i, row in enumerate(problem.rows):
        Vi = problem.recourse_matrix[i]
        sig = lay.row_extra(i) + np.arange(n0)
        A = np.zeros((dim, lay.total))
        A[:, : lay.n_u] = rhoMT @ row.lhs_uncertain.T
        A[:, sig] = rhoMT @ P.T
        b = -rhoMT @ row.rhs_uncertain
        base_c = np.zeros(lay.total)
        base_c[: lay.n_u] = -(row.lhs_nominal + row.lhs_uncertain @ e.center)
        base_c[sig] = -img_center
        d_const = row.rhs_nominal + float(row.rhs_uncertain @ e.center)
        for w in range(lay.k):
            cvec = base_c.copy()
            cvec[lay.v_slice(w)] -= Vi
            cvec[sig] += W[w]
            prog.add_soc(A, b, cvec, d_const)
    return prog, lay


def build_compact_polytope(spec: MrcSpec) -> conic.ConicProgram:
    """Compact LP counterpart for polytopal (or box) uncertainty."""
    if not isinstance(spec.uncertainty, (Box, Polytope)):
        raise TypeError("compact polytope counterpart needs polytopal uncertainty")
    return _compact_polytope_parts(spec)[0]


def build_compact_ellipsoid(spec: MrcSpec) -> conic.ConicProgram:
    """Compact cone-program counterpart for ellipsoidal uncertainty."""
    if not isinstance(spec.uncertainty, Ellipsoid):
        raise TypeError("compact ellipsoid counterpart needs ellipsoidal uncertainty")
    return _compact_ellipsoid_parts(spec)[0]


def solve_compact(spec: MrcSpec, accuracy: float | None = None) -> MrcSolution:
    """Solve the counterpart matching the uncertainty kind."""
    if isinstance(spec.uncertainty, Ellipsoid):
        prog, lay = _compact_ellipsoid_parts(spec)
    else:
        prog, lay = _compact_polytope_parts(spec)
    res = conic.solve(prog, accuracy)
    if res.status is conic.Status.INFEASIBLE:
        raise RobustInfeasibleError("compact counterpart is infeasible")
    if not res.ok:
        raise conic.SolverError(f"compact solve failed: {res.status.value} {res.message}")
    return lay.extract(spec, res, {"method": "compact"})


# ---------------------------------------------------------------------------
# separation and cut generation


def separate(spec: MrcSpec, candidate: MrcSolution, row_index: int,
             accuracy: float | None = None) -> SeparationResult:
    """Worst-case violation of one row over scenarios and admissible weights."""
    problem = spec.problem
    row = problem.rows[row_index]
    P = spec.shadow.entries
    n0, dim = P.shape
    W = spec.poles.points
    k = W.shape[0]
    u = candidate.first_stage
    g = np.array([float(problem.recourse_matrix[row_index] @ candidate.pole_recourses[w])
                  for w in range(k)])
    a = row.xi_coefficient(u)
    const = row.constant(u)

    if isinstance(spec.uncertainty, Ellipsoid):
        e = spec.uncertainty
        # variables: lam (k), s (dim); xi = center + radius * shape @ s
        raw = -np.concatenate([g, e.radius * (e.shape.T @ a)])
        scale = max(1.0, float(np.abs(raw).max()))  # keep cvxopt well-scaled
        prog = conic.ConicProgram(k + dim, raw / scale)
        for j in range(n0):
            coeff = np.concatenate([W[:, j], -e.radius * (P @ e.shape)[j]])
            prog.add_eq(coeff, float(P[j] @ e.center))
        prog.add_eq(np.concatenate([np.ones(k), np.zeros(dim)]), 1.0)
        for w in range(k):
            prog.add_le_sparse([w], [-1.0], 0.0)
        A = np.hstack([np.zeros((dim, k)), np.eye(dim)])
        prog.add_soc(A, np.zeros(dim), np.zeros(k + dim), 1.0)
        res = conic.solve(prog, accuracy)
        if not res.ok:
            raise conic.SolverError(f"separation failed: {res.status.value} {res.message}")
        lam = np.maximum(res.primal[:k], 0.0)
        s = res.primal[k:]
        xi = e.center + e.radius * (e.shape @ s)
        violation = const + float(a @ xi) + float(g @ lam)
    else:
        C, d = halfspace_form(spec.uncertainty)
        # variables: lam (k), xi (dim)
        prog = conic.ConicProgram(k + dim, -np.concatenate([g, a]))
        for j in range(n0):
            prog.add_eq(np.concatenate([W[:, j], -P[j]]), 0.0)
        prog.add_eq(np.concatenate([np.ones(k), np.zeros(dim)]), 1.0)
        for w in range(k):
            prog.add_le_sparse([w], [-1.0], 0.0)
        for crow, rhs in zip(C, d):
            prog.add_le(np.concatenate([np.zeros(k), crow]), rhs)
        res = conic.solve(prog, accuracy)
        if res.status is conic.Status.INFEASIBLE:
            raise CoveringError("separation program infeasible: poles do not cover the image")
        if not res.ok:
            raise conic.SolverError(f"separation failed: {res.status.value} {res.message}")
        lam = np.maximum(res.primal[:k], 0.0)
        xi = res.primal[k:]
        violation = const + float(a @ xi) + float(g @ lam)

    total = lam.sum()
    if abs(total - 1.0) > 1e-6:
        raise conic.SolverError("separation returned weights off the simplex")
    return SeparationResult(row_index, violation, xi, lam / total)


def _any_scenario(s: UncertaintySet) -> np.ndarray:
    if isinstance(s, Box):
        return s.center
    if isinstance(s, Ellipsoid):
        return s.center.copy()
    if isinstance(s, Polytope):
        return np.asarray(s.chebyshev_center, dtype=float)
    raise TypeError(f"unsupported set type {type(s).__name__}")


def _pole_preimage(spec: MrcSpec, w: int) -> np.ndarray | None:
    """Any scenario whose image is pole w, or None when the pole is outside."""
    omega = spec.poles.points[w]
    P = spec.shadow.entries
    s = spec.uncertainty
    if isinstance(s, Ellipsoid):
        G = P @ s.shape
        target = omega - P @ s.center
        y = G.T @ np.linalg.solve(G @ G.T, target)
        if s.radius == 0.0:
            return s.center.copy() if np.linalg.norm(target) <= 1e-9 else None
        y /= s.radius
        if np.linalg.norm(y) > 1.0 + 1e-9:
            return None
        return s.center + s.radius * (s.shape @ y)
    C, d = halfspace_form(s)
    dim = s.dim
    prog = conic.ConicProgram(dim, np.zeros(dim))
    for crow, rhs in zip(C, d):
        prog.add_le(crow, rhs)
    for j in range(P.shape[0]):
        prog.add_eq(P[j], omega[j])
    res = conic.solve(prog)
    return res.primal if res.ok else None


def solve_cutting_plane(spec: MrcSpec, tol: float = 1e-6,
                        accuracy: float | None = None,
                        max_iters: int = 10000) -> MrcSolution:
    """Delayed constraint generation for the multipolar counterpart.

    The master is an LP over (u, recourses); every iteration separates all
    rows and adds one cut per row whose violation exceeds tol.  The master
    starts from the pole-scenario cuts (weights concentrated on one pole,
    scenario any preimage of that pole; poles without preimages contribute
    nothing).
    """
    problem = spec.problem
    lay = _Layout(spec, 0)
    objective = np.zeros(lay.total)
    objective[: lay.n_u] = problem.first_stage_cost
    master = conic.ConicProgram(lay.total, objective)
    u_idx = np.arange(lay.n_u)

    def add_cut(row_index: int, lam: np.ndarray, xi: np.ndarray) -> None:
        row = problem.rows[row_index]
        Vi = problem.recourse_matrix[row_index]
        idx = [u_idx]
        val = [row.lhs_nominal + row.lhs_uncertain @ xi]
        for w in range(lay.k):
            if lam[w] > 1e-12 and lay.n_v:
                idx.append(lay.v_slice(w))
                val.append(lam[w] * Vi)
        master.add_le_sparse(np.concatenate(idx), np.concatenate(val),
                             row.rhs_nominal + float(row.rhs_uncertain @ xi))

    seeded = 0
    for w in range(lay.k):
        xi = _pole_preimage(spec, w)
        if xi is None:
            continue
        seeded += 1
        lam = np.zeros(lay.k)
        lam[w] = 1.0
        for i in range(lay.m):
            add_cut(i, lam, xi)
    # a central scenario keeps the first master bounded even when every pole
    # lies outside the image and contributes no seed cut
    xi0 = _any_scenario(spec.uncertainty)
    ok, lam0 = hull_membership(spec.poles, spec.shadow.entries @ xi0)
    if ok:
        seeded += 1
        for i in range(lay.m):
            add_cut(i, lam0, xi0)

    boxed = False
    iterations = 0
    cuts_added = seeded * lay.m
    while iterations < max_iters:
        iterations += 1
        res = conic.solve(master, accuracy)
        if res.status is conic.Status.INFEASIBLE:
            raise RobustInfeasibleError("cutting-plane master is infeasible")
        if res.status is conic.Status.UNBOUNDED:
            if boxed:
                raise conic.SolverError("master unbounded even inside safety bounds")
            boxed = True
            for j in range(lay.total):
                master.add_le_sparse([j], [1.0], 1e7)
                master.add_le_sparse([j], [-1.0], 1e7)
            continue
        if not res.ok:
            raise conic.SolverError(f"master solve failed: {res.status.value} {res.message}")
        candidate = lay.extract(spec, res, {})
        worst = 0.0
        new_cuts = 0
        for i in range(lay.m):
            sep = separate(spec, candidate, i, accuracy)
            worst = max(worst, sep.violation)
            if sep.violation > tol:
                add_cut(i, sep.weights, sep.scenario)
                new_cuts += 1
        if new_cuts == 0:
            if boxed and np.abs(res.primal).max() > 9e6:
                raise conic.SolverError("solution pinned at safety bounds; problem unbounded")
            return lay.extract(spec, res, {
                "method": "cuts", "iterations": iterations,
                "cuts": cuts_added, "max_violation": worst})
        cuts_added += new_cuts
    raise conic.SolverError(f"cut generation did not converge in {max_iters} iterations")


# ---------------------------------------------------------------------------
# special cases


def protect_at_scenarios(problem: RobustProblem, scenarios: np.ndarray,
                         accuracy: float | None = None) -> MrcSolution:
    """Exact counterpart when the uncertainty is the hull of finitely many
    scenarios: protect every row at every scenario with its own recourse."""
    errors = validate_problem(problem)
    if errors:
        raise ValueError("invalid problem: " + "; ".join(errors))
    scenarios = np.atleast_2d(np.asarray(scenarios, dtype=float))
    t_count = scenarios.shape[0]
    n_u, n_v = problem.n_first_stage, problem.n_recourse
    total = n_u + t_count * n_v
    objective = np.zeros(total)
    objective[:n_u] = problem.first_stage_cost
    prog = conic.ConicProgram(total, objective)
    u_idx = np.arange(n_u)
    for t, xi in enumerate(scenarios):
        v_idx = n_u + t * n_v + np.arange(n_v)
        for i, row in enumerate(problem.rows):
            idx = np.concatenate([u_idx, v_idx])
            val = np.concatenate([row.lhs_nominal + row.lhs_uncertain @ xi,
                                  problem.recourse_matrix[i]])
            prog.add_le_sparse(idx, val, row.rhs_nominal + float(row.rhs_uncertain @ xi))
    res = conic.solve(prog, accuracy)
    if res.status is conic.Status.INFEASIBLE:
        raise RobustInfeasibleError("scenario counterpart is infeasible")
    if not res.ok:
        raise conic.SolverError(f"scenario solve failed: {res.status.value} {res.message}")
    u = res.primal[:n_u]
    recourses = {t: res.primal[n_u + t * n_v: n_u + (t + 1) * n_v].copy()
                 for t in range(t_count)}
    return MrcSolution(u, recourses, float(problem.first_stage_cost @ u),
                       {"method": "scenario", "scenarios": t_count})


def solve_src(problem: RobustProblem, uncertainty: UncertaintySet,
              accuracy: float | None = None) -> MrcSolution:
    """Static robust counterpart: one recourse protected against every scenario.

    Equivalent to tying all pole recourses together in the multipolar
    counterpart; implemented independently by dualizing each row's worst
    case, which keeps it usable as a cross-check on the pole machinery.
    """
    errors = validate_problem(problem)
    if errors:
        raise ValueError("invalid problem: " + "; ".join(errors))
    n_u, n_v, m = problem.n_first_stage, problem.n_recourse, problem.n_rows
    dim = problem.uncertainty_dim

    if isinstance(uncertainty, Ellipsoid):
        e = uncertainty
        total = n_u + n_v
        objective = np.zeros(total)
        objective[:n_u] = problem.first_stage_cost
        prog = conic.ConicProgram(total, objective)
        rhoMT = e.radius * e.shape.T
        for i, row in enumerate(problem.rows):
            A = np.zeros((dim, total))
            A[:, :n_u] = rhoMT @ row.lhs_uncertain.T
            b = -rhoMT @ row.rhs_uncertain
            cvec = np.zeros(total)
            cvec[:n_u] = -(row.lhs_nominal + row.lhs_uncertain @ e.center)
            cvec[n_u:] = -problem.recourse_matrix[i]
            d_const = row.rhs_nominal + float(row.rhs_uncertain @ e.center)
            prog.add_soc(A, b, cvec, d_const)
    else:
        C, d = halfspace_form(uncertainty)
        n_d = d.size
        total = n_u + n_v + m * n_d
        objective = np.zeros(total)
        objective[:n_u] = problem.first_stage_cost
        prog = conic.ConicProgram(total, objective)
        u_idx = np.arange(n_u)
        v_idx = n_u + np.arange(n_v)
        for i, row in enumerate(problem.rows):
            eta = n_u + n_v + i * n_d + np.arange(n_d)
            idx = np.concatenate([u_idx, v_idx, eta])
            val = np.concatenate([row.lhs_nominal, problem.recourse_matrix[i], d])
            prog.add_le_sparse(idx, val, row.rhs_nominal)
            for j in range(dim):
                prog.add_eq_sparse(np.concatenate([eta, u_idx]),
                                   np.concatenate([C[:, j], -row.lhs_uncertain[:, j]]),
                                   -row.rhs_uncertain[j])
            for t in eta:
                prog.add_le_sparse([t], [-1.0], 0.0)

    res = conic.solve(prog, accuracy)
    if res.status is conic.Status.INFEASIBLE:
        raise RobustInfeasibleError("static counterpart is infeasible")
    if not res.ok:
        raise conic.SolverError(f"static solve failed: {res.status.value} {res.message}")
    u = res.primal[:n_u]
    return MrcSolution(u, {0: res.primal[n_u:n_u + n_v].copy()},
                       float(problem.first_stage_cost @ u), {"method": "static"})


def solve_aarc(problem: RobustProblem, uncertainty: UncertaintySet,
               shadow: ShadowMatrix, basis: polegen.SimplexBasis | None = None,
               rng=0, accuracy: float | None = None) -> float:
    """Best policy affine in the observed image, via a circumscribed simplex.

    Any simplex whose hull covers the image yields the same optimum (the
    counterpart then optimizes over exactly the affine policies), so the
    reference basis only needs to be affinely independent.
    """
    if basis is None:
        basis = polegen.random_affine_basis(shadow.n_obs, rng)
    hres = polegen.circumscribe(basis, uncertainty, shadow=shadow)
    spec = MrcSpec(problem, uncertainty, shadow, hres.poles,
                   covering=f"circumscribed-simplex:{len(hres.poles)}")
    return solve_compact(spec, accuracy).objective


def solve_farc_box(problem: RobustProblem, box: Box, cap: int = FARC_ENUM_CAP,
                   accuracy: float | None = None) -> float:
    """Fully adjustable optimum over a box, by protecting at every vertex."""
    if box.dim > cap:
        raise ValueError(f"box dimension {box.dim} above enumeration cap {cap}")
    if box.dim >= FARC_WARN_DIM:
        warnings.warn(f"enumerating 2^{box.dim} vertices; this will be slow", stacklevel=2)
    return protect_at_scenarios(problem, box_vertices(box, cap), accuracy).objective


def recourse_for_scenario(spec: MrcSpec, solution: MrcSolution, xi,
                          tol: float = 1e-8) -> tuple[np.ndarray, np.ndarray]:
    """Weights and combined recourse realizing the policy at one scenario."""
    xi = np.asarray(xi, dtype=float)
    image = spec.shadow.entries @ xi
    ok, lam = hull_membership(spec.poles, image, tol=tol)
    if not ok:
        raise CoveringError("scenario image lies outside the pole hull")
    n_v = spec.problem.n_recourse
    v = np.zeros(n_v)
    for w, weight in enumerate(lam):
        if weight > 0.0:
            v += weight * solution.pole_recourses[w]
    return lam, v

"""Independent cross-checks used by the test suite.

Everything here deliberately avoids the code paths it verifies: brute-force
enumeration, nonnegative least squares, separating hyperplanes, and a direct
affine-decision-rule dualization.
"""

import numpy as np
from scipy.optimize import linprog, nnls

from mrco import conic
from mrco.core import Box, Ellipsoid, Polytope, box_vertices


def support_min_by_enumeration(box: Box, a: np.ndarray) -> float:
    """min a.x over a box by checking every vertex."""
    return float(min(v @ a for v in box_vertices(box)))


def in_hull_nnls(points: np.ndarray, x: np.ndarray, tol: float = 1e-8) -> bool:
    """Hull membership through nonnegative least squares on the lifted system."""
    A = np.vstack([points.T, np.ones(points.shape[0])])
    target = np.concatenate([x, [1.0]])
    _, residual = nnls(A, target)
    return residual <= tol * max(1.0, np.abs(target).max())


def separating_hyperplane(points: np.ndarray, x: np.ndarray):
    """A direction a with a.x > max_w a.w when x is outside conv(points).

    Solves max_{a, b} a.x - b subject to a.w <= b for all w and ||a||_inf <= 1;
    a positive optimum certifies separation.  Returns (gap, a).
    """
    k, n = points.shape
    c = np.concatenate([-x, [1.0]])  # minimize -(a.x - b)
    A_ub = np.hstack([points, -np.ones((k, 1))])
    b_ub = np.zeros(k)
    bounds = [(-1.0, 1.0)] * n + [(None, None)]
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs")
    assert res.status == 0
    return -res.fun, res.x[:n]


def lobbying_farc_box_bruteforce(Q: np.ndarray, r: np.ndarray, box: Box) -> float:
    """Fully adjustable lobbying optimum over a box, by vertex enumeration.

    For a fixed scenario the best recourse is v_i = max(0, Q_i.xi), so the
    value is the maximum of sum_i r_i max(0, Q_i.xi) over the box vertices
    (the objective is convex in xi, hence vertex-attained).
    """
    best = 0.0
    for xi in box_vertices(box):
        best = max(best, float(r @ np.maximum(0.0, Q @ xi)))
    return best


def lobbying_src_box_analytic(Q: np.ndarray, r: np.ndarray, box: Box) -> float:
    """Static lobbying optimum: per-voter worst case, summed."""
    per_row = np.where(Q > 0, Q * box.upper, Q * box.lower).sum(axis=1)
    return float(r @ np.maximum(0.0, per_row))


def affine_policy_value(problem, uncertainty, shadow, accuracy=1e-8) -> float:
    """Best affine-in-(P xi) policy via direct row-wise dualization.

    Decision variables: u, w (n_v), W (n_v x n0) with v(xi) = w + W P xi.
    Each row is protected by dualizing max_{xi in set} of its affine-in-xi
    value.  Entirely independent of the pole machinery.
    """
    P = shadow.entries
    n_u, n_v, n0 = problem.n_first_stage, problem.n_recourse, shadow.n_obs
    dim = problem.uncertainty_dim
    nw = n_u + n_v + n_v * n0

    def w_index(i):
        return n_u + i

    def W_index(i, j):
        return n_u + n_v + i * n0 + j

    extra = 0
    if isinstance(uncertainty, Box):
        extra_per_row = dim  # |coef| majorants
    elif isinstance(uncertainty, Polytope):
        extra_per_row = uncertainty.C.shape[0]
    elif isinstance(uncertainty, Ellipsoid):
        extra_per_row = 0
    else:
        raise TypeError(type(uncertainty))
    total = nw + extra_per_row * problem.n_rows
    prog = conic.ConicProgram(total, np.concatenate(
        [problem.first_stage_cost, np.zeros(total - n_u)]))

    for i, row in enumerate(problem.rows):
        Vi = problem.recourse_matrix[i]
        # row value: const(u) + Vi.w + (R_i^T u - s_i + P^T W^T Vi) . xi
        base = np.zeros(total)
        base[:n_u] = row.lhs_nominal
        for a in range(n_v):
            base[w_index(a)] += Vi[a]

        def coef_column(j):
            # coefficient of xi_j as a linear functional of the variables
            col = np.zeros(total)
            col[:n_u] = row.lhs_uncertain[:, j]
            for a in range(n_v):
                for b in range(n0):
                    col[W_index(a, b)] += Vi[a] * P[b, j]
            return col, -row.rhs_uncertain[j]

        off = nw + i * extra_per_row
        if isinstance(uncertainty, Box):
            # t_j >= |coef_j| scaled by halfwidth; worst case at center + spread
            rowvec = base.copy()
            const = -row.rhs_nominal
            for j in range(dim):
                col, c0 = coef_column(j)
                rowvec += uncertainty.center[j] * col
                const += uncertainty.center[j] * c0
                tj = off + j
                up = col.copy()
                up[tj] = -1.0
                prog.add_le(up, -c0)
                dn = -col
                dn[tj] = -1.0
                prog.add_le(dn, c0)
                rowvec[tj] += uncertainty.halfwidth[j]
            prog.add_le(rowvec, -const)
        elif isinstance(uncertainty, Polytope):
            C, d = uncertainty.C, uncertainty.d
            rowvec = base.copy()
            rowvec[off:off + d.size] = d
            prog.add_le(rowvec, row.rhs_nominal)
            for j in range(dim):
                col, c0 = coef_column(j)
                eq = -col
                eq[off:off + d.size] = C[:, j]
                prog.add_eq(eq, c0)
            for kk in range(d.size):
                prog.add_le_sparse([off + kk], [-1.0], 0.0)
        else:
            center, rho, M = uncertainty.center, uncertainty.radius, uncertainty.shape
            rowvec = base.copy()
            const = -row.rhs_nominal
            cols = []
            consts = []
            for j in range(dim):
                col, c0 = coef_column(j)
                rowvec += center[j] * col
                const += center[j] * c0
                cols.append(col)
                consts.append(c0)
            A = rho * (M.T @ np.asarray(cols))
            b = rho * (M.T @ np.asarray(consts))
            prog.add_soc(A, b, -rowvec, -const)
    res = conic.solve(prog, accuracy)
    if not res.ok:
        raise conic.SolverError(f"affine oracle failed: {res.status.value}")
    return res.objective

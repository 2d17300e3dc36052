"""Conic programming backend: linear programs and second-order-cone programs.

One program representation serves both problem classes so that the polytope
and the ellipsoid robust counterparts share a single code path.  Pure LPs are
handed to scipy's HiGHS interface, programs with second-order cones to
cvxopt's cone solver.  Both paths report status, primal values, objective,
and per-linear-constraint dual multipliers under a common sign convention:

    minimize c.x  s.t.  a_i.x <= b_i  (multiplier lam_i >= 0)
                        e_j.x == f_j  (multiplier mu_j, free)

with stationarity c + sum_i lam_i a_i + sum_j mu_j e_j = 0 and dual objective
-(lam.b + mu.f) <= c.x (weak duality).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import linprog
import scipy.sparse as sparse

DEFAULT_ACCURACY = 1e-8

LE = "<="
EQ = "=="


class Status(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    NUMERICAL_FAILURE = "numerical-failure"


class SolverError(RuntimeError):
    """Raised when a backend cannot certify its answer."""


def backend_accuracy(default: float = DEFAULT_ACCURACY) -> float:
    """Solver accuracy, overridable through the MRCO_ACCURACY env variable."""
    raw = os.environ.get("MRCO_ACCURACY")
    return float(raw) if raw else default


@dataclass(frozen=True)
class LinearConstraint:
    """Sparse row `sum(values[k] * x[indices[k]]) (<=|==) rhs`."""

    indices: np.ndarray
    values: np.ndarray
    relation: str
    rhs: float

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        val = np.asarray(self.values, dtype=float)
        if self.relation not in (LE, EQ):
            raise ValueError(f"relation must be {LE!r} or {EQ!r}")
        if idx.shape != val.shape:
            raise ValueError("indices/values shape mismatch")
        if idx.size != np.unique(idx).size:
            # coalesce repeated indices so dense/sparse views agree
            uniq, inv = np.unique(idx, return_inverse=True)
            summed = np.zeros(uniq.size)
            np.add.at(summed, inv, val)
            idx, val = uniq, summed
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", val)

    @classmethod
    def from_dense(cls, coeffs, relation: str, rhs: float) -> "LinearConstraint":
        coeffs = np.asarray(coeffs, dtype=float)
        nz = np.nonzero(coeffs)[0]
        return cls(nz, coeffs[nz], relation, float(rhs))

    def to_dense(self, num_vars: int) -> np.ndarray:
        row = np.zeros(num_vars)
        row[self.indices] = self.values
        return row


@dataclass(frozen=True)
class SocConstraint:
    """Second-order-cone row `||A x + b||_2 <= c.x + d`."""

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: float

    def __post_init__(self):
        object.__setattr__(self, "A", np.atleast_2d(np.asarray(self.A, dtype=float)))
        object.__setattr__(self, "b", np.asarray(self.b, dtype=float))
        object.__setattr__(self, "c", np.asarray(self.c, dtype=float))
        if self.A.shape[0] != self.b.shape[0]:
            raise ValueError("A/b row mismatch")


@dataclass
class ConicProgram:
    """Minimization program with linear rows and optional second-order cones."""

    num_vars: int
    objective: np.ndarray
    linear: list[LinearConstraint] = field(default_factory=list)
    socs: list[SocConstraint] = field(default_factory=list)

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float)
        if self.objective.shape != (self.num_vars,):
            raise ValueError("objective length != num_vars")

    def validate(self) -> list[str]:
        errors = []
        for k, row in enumerate(self.linear):
            if row.indices.size and (row.indices.min() < 0 or row.indices.max() >= self.num_vars):
                errors.append(f"linear[{k}]: index out of range")
        for k, soc in enumerate(self.socs):
            if soc.A.shape[1] != self.num_vars or soc.c.shape != (self.num_vars,):
                errors.append(f"soc[{k}]: width != num_vars")
        return errors

    @property
    def is_lp(self) -> bool:
        return not self.socs

    def add_le(self, coeffs, rhs: float) -> None:
        self.linear.append(LinearConstraint.from_dense(coeffs, LE, rhs))

    def add_eq(self, coeffs, rhs: float) -> None:
        self.linear.append(LinearConstraint.from_dense(coeffs, EQ, rhs))

    def add_le_sparse(self, indices, values, rhs: float) -> None:
        self.linear.append(LinearConstraint(np.asarray(indices), np.asarray(values), LE, float(rhs)))

    def add_eq_sparse(self, indices, values, rhs: float) -> None:
        self.linear.append(LinearConstraint(np.asarray(indices), np.asarray(values), EQ, float(rhs)))

    def add_soc(self, A, b, c, d: float) -> None:
        self.socs.append(SocConstraint(np.asarray(A), np.asarray(b), np.asarray(c), float(d)))


@dataclass
class SolveResult:
    status: Status
    primal: np.ndarray | None
    duals: np.ndarray | None
    objective: float
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.status is Status.OPTIMAL


def _split(program: ConicProgram):
    """Stack the linear rows into (A_ub, b_ub, A_eq, b_eq) plus position maps."""
    ub_rows, eq_rows = [], []
    for k, row in enumerate(program.linear):
        (ub_rows if row.relation == LE else eq_rows).append(k)

    def assemble(which):
        if not which:
            return None, None
        data, ri, ci, rhs = [], [], [], []
        for r, k in enumerate(which):
            row = program.linear[k]
            data.append(row.values)
            ci.append(row.indices)
            ri.append(np.full(row.indices.shape, r, dtype=np.int64))
            rhs.append(row.rhs)
        mat = sparse.coo_matrix(
            (np.concatenate(data) if data else [],
             (np.concatenate(ri), np.concatenate(ci))),
            shape=(len(which), program.num_vars),
        ).tocsr()
        return mat, np.asarray(rhs, dtype=float)

    A_ub, b_ub = assemble(ub_rows)
    A_eq, b_eq = assemble(eq_rows)
    return A_ub, b_ub, A_eq, b_eq, ub_rows, eq_rows


def _solve_lp(program: ConicProgram, accuracy: float) -> SolveResult:
    A_ub, b_ub, A_eq, b_eq, ub_rows, eq_rows = _split(program)
    tol = max(accuracy, 1e-10)
    attempts = [
        {"primal_feasibility_tolerance": tol, "dual_feasibility_tolerance": tol},
        # HiGHS presolve can misreport status on near-duplicate rows at tight
        # tolerances; retry without it, then with stock tolerances
        {"primal_feasibility_tolerance": tol, "dual_feasibility_tolerance": tol,
         "presolve": False},
        {},
    ]
    for options in attempts:
        res = linprog(
            program.objective,
            A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq,
            bounds=(None, None),
            method="highs",
            options=options,
        )
        if res.status != 4:
            break
    if res.status == 2:
        return SolveResult(Status.INFEASIBLE, None, None, np.nan, res.message)
    if res.status == 3:
        return SolveResult(Status.UNBOUNDED, None, None, -np.inf, res.message)
    if res.status != 0:
        return SolveResult(Status.NUMERICAL_FAILURE, None, None, np.nan, res.message)
    duals = np.zeros(len(program.linear))
    # HiGHS marginals are d(obj)/d(rhs); our multipliers flip the sign.
    if ub_rows:
        duals[ub_rows] = -np.asarray(res.ineqlin.marginals)
    if eq_rows:
        duals[eq_rows] = -np.asarray(res.eqlin.marginals)
    return SolveResult(Status.OPTIMAL, np.asarray(res.x), duals, float(res.fun))


def _solve_socp(program: ConicProgram, accuracy: float) -> SolveResult:
    from cvxopt import matrix as cvx_matrix, solvers, spmatrix

    A_ub, b_ub, A_eq, b_eq, ub_rows, eq_rows = _split(program)
    n = program.num_vars
    n_l = 0 if A_ub is None else A_ub.shape[0]

    g_blocks, h_parts, q_dims = [], [], []
    if A_ub is not None:
        g_blocks.append(A_ub)
        h_parts.append(b_ub)
    for soc in program.socs:
        g_blocks.append(sparse.vstack([sparse.csr_matrix(-soc.c), sparse.csr_matrix(-soc.A)]))
        h_parts.append(np.concatenate([[soc.d], soc.b]))
        q_dims.append(soc.A.shape[0] + 1)
    G = sparse.vstack(g_blocks).tocoo()
    h = np.concatenate(h_parts)

    # cvxopt requires Rank([G; A]) == n: pin variables that appear nowhere.
    used = np.zeros(n, dtype=bool)
    used[G.col] = True
    if A_eq is not None:
        used[A_eq.tocoo().col] = True
    pin = np.nonzero(~used)[0]
    eq_mat = A_eq
    eq_rhs = b_eq
    if pin.size:
        pin_mat = sparse.coo_matrix((np.ones(pin.size), (np.arange(pin.size), pin)), shape=(pin.size, n))
        eq_mat = pin_mat if eq_mat is None else sparse.vstack([eq_mat, pin_mat])
        eq_rhs = np.zeros(pin.size) if eq_rhs is None else np.concatenate([eq_rhs, np.zeros(pin.size)])

    Gc = spmatrix(G.data, G.row.tolist(), G.col.tolist(), (G.shape[0], n))
    kwargs = {}
    if eq_mat is not None:
        E = eq_mat.tocoo()
        kwargs["A"] = spmatrix(E.data, E.row.tolist(), E.col.tolist(), (E.shape[0], n))
        kwargs["b"] = cvx_matrix(eq_rhs)

    tol = float(np.clip(accuracy, 1e-9, 1e-6))
    options = {
        "show_progress": False,
        "abstol": tol,
        "reltol": tol,
        "feastol": tol,
        "maxiters": 200,
    }
    try:
        sol = solvers.conelp(
            cvx_matrix(program.objective), Gc, cvx_matrix(h),
            dims={"l": n_l, "q": q_dims, "s": []},
            options=options, **kwargs,
        )
    except (ValueError, ArithmeticError, ZeroDivisionError) as exc:
        return SolveResult(Status.NUMERICAL_FAILURE, None, None, np.nan, f"cvxopt: {exc}")

    status = sol["status"]
    if status == "primal infeasible":
        return SolveResult(Status.INFEASIBLE, None, None, np.nan, "cvxopt: primal infeasible")
    if status == "dual infeasible":
        return SolveResult(Status.UNBOUNDED, None, None, -np.inf, "cvxopt: dual infeasible")
    if status not in ("optimal", "unknown") or sol["x"] is None:
        return SolveResult(Status.NUMERICAL_FAILURE, None, None, np.nan, f"cvxopt: {status}")

    x = np.asarray(sol["x"]).ravel()
    if status == "unknown":
        # cvxopt gave up on certifying; accept only a verifiably good iterate.
        gap = sol.get("relative gap")
        pinf, dinf = sol.get("primal infeasibility"), sol.get("dual infeasibility")
        cert = [v for v in (gap, pinf, dinf) if v is not None]
        if not cert or max(cert) > 1e-6:
            return SolveResult(Status.NUMERICAL_FAILURE, None, None, np.nan,
                               "cvxopt: unknown status without a usable iterate")

    duals = np.zeros(len(program.linear))
    z = np.asarray(sol["z"]).ravel() if sol["z"] is not None else None
    if ub_rows and z is not None:
        duals[ub_rows] = z[:n_l]
    if eq_rows and sol.get("y") is not None:
        duals[eq_rows] = np.asarray(sol["y"]).ravel()[: len(eq_rows)]
    return SolveResult(Status.OPTIMAL, x, duals, float(program.objective @ x))


def solve(program: ConicProgram, accuracy: float | None = None) -> SolveResult:
    """Solve a conic program; never returns an uncertified optimum."""
    if accuracy is None:
        accuracy = backend_accuracy()
    errors = program.validate()
    if errors:
        raise SolverError("malformed program: " + "; ".join(errors))
    if program.is_lp:
        return _solve_lp(program, accuracy)
    return _solve_socp(program, accuracy)


def lp_dual_values(program: ConicProgram, result: SolveResult) -> np.ndarray:
    """Multipliers of an optimally solved LP, in constraint order."""
    if not program.is_lp:
        raise SolverError("dual extraction requires a program without cones")
    if result.status is not Status.OPTIMAL or result.duals is None:
        raise SolverError(f"dual extraction requires an optimal result, got {result.status.value}")
    return result.duals


def write_lp_file(program: ConicProgram, path: str) -> None:
    """Export an LP (no cones) in CPLEX LP text format for external checking."""
    if not program.is_lp:
        raise SolverError("LP-format export is limited to programs without cones")

    def expr(indices, values) -> str:
        terms = []
        for j, v in zip(indices, values):
            sign = "-" if v < 0 else "+"
            terms.append(f"{sign} {abs(v):.17g} x{j}")
        if not terms:
            return "0 x0"
        joined = " ".join(terms)
        return joined[2:] if joined.startswith("+ ") else joined

    lines = ["Minimize", " obj: " + expr(*_dense_pair(program.objective)), "Subject To"]
    for k, row in enumerate(program.linear):
        rel = "<=" if row.relation == LE else "="
        lines.append(f" c{k}: {expr(row.indices, row.values)} {rel} {row.rhs:.17g}")
    lines.append("Bounds")
    lines.extend(f" x{j} free" for j in range(program.num_vars))
    lines.append("End")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _dense_pair(vec: np.ndarray):
    nz = np.nonzero(vec)[0]
    return nz, vec[nz]

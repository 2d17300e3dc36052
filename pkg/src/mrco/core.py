"""Data model: uncertain two-stage LPs, uncertainty sets, shadow maps, pole-sets.

Constraint rows are affine in the uncertain vector on both sides,

    (lhs_nominal + lhs_uncertain @ xi) . u  +  V_i . v(xi)  <=  rhs_nominal + rhs_uncertain . xi,

which subsumes the stacked-[U, b] block layout as a special case (see
``RobustProblem.from_blocks``) and directly expresses problems whose
uncertainty enters only through the right-hand side.

All types are immutable after construction and safe to share across tasks.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from . import conic

FEASIBILITY_TOL = 1e-7
MEMBERSHIP_TOL = 1e-8
OBJECTIVE_RTOL = 1e-5
VERTEX_ENUM_CAP = 20

__all__ = [
    "Box",
    "Polytope",
    "Ellipsoid",
    "UncertaintySet",
    "ShadowMatrix",
    "PoleSet",
    "ConstraintRow",
    "RobustProblem",
    "MrcSolution",
    "Instance",
    "validate_problem",
    "box_vertices",
    "contains",
    "support_min",
    "support_point",
    "hull_membership",
    "set_dim",
]


def _freeze(obj, **arrays):
    for name, value in arrays.items():
        arr = np.array(value, dtype=float)
        arr.flags.writeable = False
        object.__setattr__(obj, name, arr)


@dataclass(frozen=True)
class Box:
    """Axis-aligned box { x : lower <= x <= upper }."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        _freeze(self, lower=self.lower, upper=self.upper)
        if self.lower.ndim != 1 or self.lower.shape != self.upper.shape:
            raise ValueError("box bounds must be equal-length vectors")
        if np.any(self.lower > self.upper):
            raise ValueError("box is empty: lower > upper somewhere")

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)

    @property
    def halfwidth(self) -> np.ndarray:
        return 0.5 * (self.upper - self.lower)

    @classmethod
    def hypercube(cls, dim: int) -> "Box":
        """The unit hypercube [0, 1]^dim."""
        return cls(np.zeros(dim), np.ones(dim))


@dataclass(frozen=True)
class Polytope:
    """Polytope { x : C x <= d }, certified nonempty and bounded at construction.

    Nonemptiness comes from one Chebyshev-center LP; a near-zero inscribed
    radius means the set is flat, which is accepted with a warning.
    Boundedness comes from 2*dim support solves, whose optima also provide
    the bounding box used by sampling code.
    """

    C: np.ndarray
    d: np.ndarray
    bounding_box: Box = field(init=False, compare=False, repr=False)
    inscribed_radius: float = field(init=False, compare=False, repr=False)
    chebyshev_center: np.ndarray = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        _freeze(self, C=np.atleast_2d(self.C), d=self.d)
        if self.C.shape[0] != self.d.size:
            raise ValueError("C row count != len(d)")
        radius, center = self._chebyshev()
        if radius < -FEASIBILITY_TOL:
            raise ValueError("polytope is empty")
        if radius < 1e-9:
            warnings.warn("polytope has (numerically) empty interior; accepted as a flat set",
                          stacklevel=2)
        object.__setattr__(self, "inscribed_radius", float(max(radius, 0.0)))
        object.__setattr__(self, "chebyshev_center", center)
        lo, hi = self._extent()
        object.__setattr__(self, "bounding_box", Box(lo, hi))

    def _chebyshev(self):
        n = self.C.shape[1]
        norms = np.linalg.norm(self.C, axis=1)
        prog = conic.ConicProgram(n + 1, np.concatenate([np.zeros(n), [-1.0]]))
        for row, nrm, rhs in zip(self.C, norms, self.d):
            prog.add_le(np.concatenate([row, [nrm]]), rhs)
        prog.add_le(np.concatenate([np.zeros(n), [1.0]]), max(1.0, np.abs(self.d).max()))
        res = conic.solve(prog)
        if res.status is conic.Status.INFEASIBLE:
            return -1.0, None
        if not res.ok:
            raise ValueError(f"polytope certification failed: {res.status.value}")
        return res.primal[-1], res.primal[:-1]

    def _extent(self):
        n = self.C.shape[1]
        lo = np.empty(n)
        hi = np.empty(n)
        for j in range(n):
            e = np.zeros(n)
            e[j] = 1.0
            lo[j] = support_min(self, e)
            hi[j] = -support_min(self, -e)
        return lo, hi

    @property
    def dim(self) -> int:
        return self.C.shape[1]

    @classmethod
    def from_box(cls, box: Box) -> "Polytope":
        eye = np.eye(box.dim)
        return cls(np.vstack([eye, -eye]), np.concatenate([box.upper, -box.lower]))

    @classmethod
    def l1_ball(cls, dim: int, radius: float = 1.0) -> "Polytope":
        """{ x : ||x||_1 <= radius } via its 2^dim sign-pattern facets."""
        if dim > VERTEX_ENUM_CAP:
            raise ValueError("l1 ball facet count 2^dim above enumeration cap")
        signs = box_vertices(Box(-np.ones(dim), np.ones(dim)))
        return cls(signs, np.full(signs.shape[0], float(radius)))


@dataclass(frozen=True)
class Ellipsoid:
    """Ellipsoid { center + radius * shape @ s : ||s||_2 <= 1 }.

    ``shape`` is a nonsingular square matrix; identity gives a ball.  An
    off-center ball is the common case, so the center/radius parametrization
    is primary and the normalized form is derived from it where needed.
    """

    center: np.ndarray
    radius: float
    shape: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "radius", float(self.radius))
        shape = np.eye(len(self.center)) if self.shape is None else np.atleast_2d(self.shape)
        _freeze(self, center=self.center, shape=shape)
        if self.radius < 0:
            raise ValueError("radius must be nonnegative")
        if self.shape.shape != (self.dim, self.dim):
            raise ValueError("shape matrix must be square of the ellipsoid dimension")
        sv = np.linalg.svd(self.shape, compute_uv=False)
        if sv[-1] <= 1e-12 * max(sv[0], 1.0):
            raise ValueError("shape matrix is singular")
        inv = np.linalg.inv(self.shape)
        inv.flags.writeable = False
        object.__setattr__(self, "_shape_inv", inv)

    @property
    def dim(self) -> int:
        return self.center.size

    @property
    def shape_inv(self) -> np.ndarray:
        return self._shape_inv


UncertaintySet = Union[Box, Polytope, Ellipsoid]


def set_dim(s: UncertaintySet) -> int:
    return s.dim


@dataclass(frozen=True)
class ShadowMatrix:
    """Full-row-rank linear map from uncertainty space to observation space."""

    entries: np.ndarray

    def __post_init__(self):
        _freeze(self, entries=np.atleast_2d(self.entries))
        n0, dim = self.entries.shape
        if n0 > dim:
            raise ValueError("shadow has more rows than the uncertainty dimension")
        sv = np.linalg.svd(self.entries, compute_uv=False)
        if sv[-1] <= 1e-10 * max(sv[0], 1.0):
            raise ValueError("shadow matrix is not full row rank")

    @property
    def n_obs(self) -> int:
        return self.entries.shape[0]

    @property
    def dim(self) -> int:
        return self.entries.shape[1]

    def __matmul__(self, xi: np.ndarray) -> np.ndarray:
        return self.entries @ xi

    @classmethod
    def identity(cls, dim: int) -> "ShadowMatrix":
        return cls(np.eye(dim))

    @classmethod
    def coordinate_projection(cls, n_obs: int, dim: int) -> "ShadowMatrix":
        """Keep the first n_obs coordinates, drop the rest."""
        return cls(np.eye(dim)[:n_obs])


@dataclass(frozen=True)
class PoleSet:
    """Finite, duplicate-free, ordered list of points in observation space."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.size == 0:
            raise ValueError("pole-set must be nonempty")
        seen = {}
        for k, p in enumerate(np.round(pts, 12)):
            seen.setdefault(p.tobytes(), k)
        pts = pts[sorted(seen.values())]
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.shape[0]

    def __iter__(self):
        return iter(self.points)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def to_json(self) -> list[list[float]]:
        return self.points.tolist()

    @classmethod
    def from_json(cls, data) -> "PoleSet":
        return cls(np.asarray(data, dtype=float))


@dataclass(frozen=True)
class ConstraintRow:
    """One row, affine in the uncertain vector on both sides."""

    lhs_nominal: np.ndarray
    lhs_uncertain: np.ndarray
    rhs_nominal: float
    rhs_uncertain: np.ndarray

    def __post_init__(self):
        _freeze(self, lhs_nominal=self.lhs_nominal,
                lhs_uncertain=np.atleast_2d(self.lhs_uncertain),
                rhs_uncertain=self.rhs_uncertain)
        object.__setattr__(self, "rhs_nominal", float(self.rhs_nominal))

    def xi_coefficient(self, u: np.ndarray) -> np.ndarray:
        """Coefficient of xi in the row value at first-stage decision u."""
        return self.lhs_uncertain.T @ u - self.rhs_uncertain

    def constant(self, u: np.ndarray) -> float:
        return float(self.lhs_nominal @ u - self.rhs_nominal)


@dataclass(frozen=True)
class RobustProblem:
    """min c.u subject to per-row protection over the uncertainty set."""

    first_stage_cost: np.ndarray
    recourse_matrix: np.ndarray
    rows: tuple[ConstraintRow, ...]
    uncertainty_dim: int

    def __post_init__(self):
        # shape problems are left to validate_problem so callers can collect
        # every diagnostic at once; solver entry points check before use
        _freeze(self, first_stage_cost=self.first_stage_cost,
                recourse_matrix=np.atleast_2d(self.recourse_matrix))
        object.__setattr__(self, "rows", tuple(self.rows))

    @property
    def n_first_stage(self) -> int:
        return self.first_stage_cost.size

    @property
    def n_recourse(self) -> int:
        return self.recourse_matrix.shape[1]

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @classmethod
    def from_blocks(cls, cost, recourse_matrix, U_nominal, b_nominal,
                    uncertain_rows: list[int] | None = None) -> "RobustProblem":
        """Stacked-[U, b] layout: xi holds one (U_i, b_i) block per uncertain row.

        Rows not listed in ``uncertain_rows`` keep their nominal data.
        """
        cost = np.asarray(cost, dtype=float)
        V = np.atleast_2d(np.asarray(recourse_matrix, dtype=float))
        U0 = np.atleast_2d(np.asarray(U_nominal, dtype=float))
        b0 = np.asarray(b_nominal, dtype=float)
        m, n_u = U0.shape
        if uncertain_rows is None:
            uncertain_rows = list(range(m))
        block = n_u + 1
        dim = block * len(uncertain_rows)
        rows = []
        for i in range(m):
            lhs_unc = np.zeros((n_u, dim))
            rhs_unc = np.zeros(dim)
            if i in uncertain_rows:
                off = uncertain_rows.index(i) * block
                lhs_unc[:, off:off + n_u] = np.eye(n_u)
                rhs_unc[off + n_u] = 1.0
            rows.append(ConstraintRow(U0[i], lhs_unc, b0[i], rhs_unc))
        return cls(cost, V, tuple(rows), dim)


def validate_problem(p: RobustProblem) -> list[str]:
    """All dimension diagnostics at once; empty list means the invariants hold."""
    errors = []
    if not p.rows:
        errors.append("problem has no constraint rows")
    if p.recourse_matrix.shape[0] != len(p.rows):
        errors.append(f"recourse rows: V has {p.recourse_matrix.shape[0]} rows "
                      f"for {len(p.rows)} constraint rows")
    n_u = p.first_stage_cost.size
    for i, row in enumerate(p.rows):
        if row.lhs_nominal.size != n_u:
            errors.append(f"row {i}: lhs_nominal length {row.lhs_nominal.size} != {n_u}")
        if row.lhs_uncertain.shape != (n_u, p.uncertainty_dim):
            errors.append(f"row {i}: uncertainty dim: lhs_uncertain is "
                          f"{row.lhs_uncertain.shape}, expected ({n_u}, {p.uncertainty_dim})")
        if row.rhs_uncertain.size != p.uncertainty_dim:
            errors.append(f"row {i}: uncertainty dim: rhs_uncertain length "
                          f"{row.rhs_uncertain.size} != {p.uncertainty_dim}")
    return errors


@dataclass(frozen=True)
class MrcSolution:
    """First-stage decision plus one recourse vector per pole."""

    first_stage: np.ndarray
    pole_recourses: dict[int, np.ndarray]
    objective: float
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        _freeze(self, first_stage=self.first_stage)
        object.__setattr__(self, "objective", float(self.objective))
        object.__setattr__(self, "pole_recourses",
                           {int(k): np.asarray(v, dtype=float)
                            for k, v in self.pole_recourses.items()})

    def check(self, problem: RobustProblem, poles: PoleSet) -> None:
        if set(self.pole_recourses) != set(range(len(poles))):
            raise ValueError("one recourse vector per pole is required")
        cu = float(problem.first_stage_cost @ self.first_stage)
        if abs(cu - self.objective) > 1e-9 * (1.0 + abs(cu)):
            raise ValueError("objective does not match c.u")


# ---------------------------------------------------------------------------
# geometric queries


def halfspace_form(s: UncertaintySet) -> tuple[np.ndarray, np.ndarray]:
    """(C, d) with s = {x : C x <= d}; boxes are lowered, ellipsoids have none."""
    if isinstance(s, Box):
        eye = np.eye(s.dim)
        return np.vstack([eye, -eye]), np.concatenate([s.upper, -s.lower])
    if isinstance(s, Polytope):
        return s.C, s.d
    raise TypeError(f"no halfspace form for {type(s).__name__}")


def box_vertices(b: Box, cap: int = VERTEX_ENUM_CAP) -> np.ndarray:
    """All 2^dim corner points, coordinate j of vertex k set by bit j of k."""
    if b.dim > cap:
        raise ValueError(f"box dimension {b.dim} above enumeration cap {cap}")
    k = np.arange(2 ** b.dim)
    bits = (k[:, None] >> np.arange(b.dim)) & 1
    return np.where(bits == 1, b.upper, b.lower)


def contains(s: UncertaintySet, x, tol: float = FEASIBILITY_TOL) -> bool:
    """Whether x satisfies the defining inequalities of s within tol."""
    x = np.asarray(x, dtype=float)
    if x.size != s.dim:
        raise ValueError(f"point dimension {x.size} != set dimension {s.dim}")
    if isinstance(s, Box):
        return bool(np.all(x >= s.lower - tol) and np.all(x <= s.upper + tol))
    if isinstance(s, Polytope):
        return bool(np.all(s.C @ x <= s.d + tol * np.maximum(1.0, np.linalg.norm(s.C, axis=1))))
    if isinstance(s, Ellipsoid):
        if s.radius == 0.0:
            return bool(np.linalg.norm(x - s.center) <= tol)
        return bool(np.linalg.norm(s.shape_inv @ (x - s.center)) <= s.radius + tol)
    raise TypeError(f"unsupported set type {type(s).__name__}")


def support_min(s: UncertaintySet, a) -> float:
    """min_{x in s} a.x; closed form for boxes and ellipsoids, one LP otherwise."""
    a = np.asarray(a, dtype=float)
    if a.size != s.dim:
        raise ValueError("direction dimension mismatch")
    if isinstance(s, Box):
        return float(np.minimum(a * s.lower, a * s.upper).sum())
    if isinstance(s, Ellipsoid):
        return float(a @ s.center - s.radius * np.linalg.norm(s.shape.T @ a))
    if isinstance(s, Polytope):
        prog = conic.ConicProgram(s.dim, a)
        for row, rhs in zip(s.C, s.d):
            prog.add_le(row, rhs)
        res = conic.solve(prog)
        if not res.ok:
            raise conic.SolverError(f"support solve failed: {res.status.value}")
        return res.objective
    raise TypeError(f"unsupported set type {type(s).__name__}")


def support_point(s: UncertaintySet, a) -> np.ndarray:
    """A minimizer of a.x over s (a vertex for polytopes and boxes)."""
    a = np.asarray(a, dtype=float)
    if isinstance(s, Box):
        return np.where(a > 0, s.lower, s.upper).astype(float)
    if isinstance(s, Ellipsoid):
        g = s.shape.T @ a
        nrm = np.linalg.norm(g)
        if nrm == 0.0 or s.radius == 0.0:
            return s.center.copy()
        return s.center - s.radius * (s.shape @ g) / nrm
    if isinstance(s, Polytope):
        prog = conic.ConicProgram(s.dim, a)
        for row, rhs in zip(s.C, s.d):
            prog.add_le(row, rhs)
        res = conic.solve(prog)
        if not res.ok:
            raise conic.SolverError(f"support solve failed: {res.status.value}")
        return res.primal
    raise TypeError(f"unsupported set type {type(s).__name__}")


def sample_points(s: UncertaintySet, count: int, rng) -> np.ndarray:
    """Points drawn from s: uniform for boxes and ellipsoids, rejection (with a
    convex-combination fallback) for polytopes."""
    gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    if isinstance(s, Box):
        return gen.uniform(s.lower, s.upper, size=(count, s.dim))
    if isinstance(s, Ellipsoid):
        d = gen.standard_normal((count, s.dim))
        d /= np.maximum(np.linalg.norm(d, axis=1, keepdims=True), 1e-300)
        r = gen.uniform(0.0, 1.0, count) ** (1.0 / s.dim)
        return s.center + s.radius * (d * r[:, None]) @ s.shape.T
    if isinstance(s, Polytope):
        out = []
        bb = s.bounding_box
        attempts = 0
        while len(out) < count and attempts < 200 * count:
            x = gen.uniform(bb.lower, bb.upper)
            attempts += 1
            if contains(s, x):
                out.append(x)
        while len(out) < count:
            # thin set: mix random extreme points instead
            k = min(s.dim + 1, 4)
            pts = np.array([support_point(s, gen.standard_normal(s.dim)) for _ in range(k)])
            w = gen.dirichlet(np.ones(k))
            out.append(w @ pts)
        return np.asarray(out)
    raise TypeError(f"unsupported set type {type(s).__name__}")


def hull_membership(omega_set: PoleSet, x, tol: float = MEMBERSHIP_TOL):
    """Convex-combination weights for x over the poles, by one LP.

    Minimizes the max-norm residual of  sum(lam_w * w) = x, sum(lam) = 1,
    lam >= 0; membership holds when the residual is within tol.  Returns
    (True, weights) or (False, None).
    """
    x = np.asarray(x, dtype=float)
    if x.size != omega_set.dim:
        raise ValueError("point dimension != pole dimension")
    W = omega_set.points
    k, n0 = W.shape
    # variables: lam (k), t
    prog = conic.ConicProgram(k + 1, np.concatenate([np.zeros(k), [1.0]]))
    for j in range(n0):
        prog.add_le(np.concatenate([W[:, j], [-1.0]]), x[j])
        prog.add_le(np.concatenate([-W[:, j], [-1.0]]), -x[j])
    prog.add_eq(np.concatenate([np.ones(k), [0.0]]), 1.0)
    for i in range(k):
        prog.add_le_sparse([i], [-1.0], 0.0)
    res = conic.solve(prog)
    if not res.ok:
        raise conic.SolverError(f"membership solve failed: {res.status.value}")
    scale = max(1.0, float(np.abs(W).max()), float(np.abs(x).max()))
    if res.primal[-1] > tol * scale:
        return False, None
    lam = np.maximum(res.primal[:k], 0.0)
    return True, lam / lam.sum()


# ---------------------------------------------------------------------------
# JSON document


@dataclass(frozen=True)
class Instance:
    """One solvable unit: problem + uncertainty + shadow (+ optional poles)."""

    problem: RobustProblem
    uncertainty: UncertaintySet
    shadow: ShadowMatrix
    poles: PoleSet | None = None

    def __post_init__(self):
        if self.uncertainty.dim != self.problem.uncertainty_dim:
            raise ValueError("uncertainty set dimension != problem uncertainty_dim")
        if self.shadow.dim != self.problem.uncertainty_dim:
            raise ValueError("shadow column count != problem uncertainty_dim")
        if self.poles is not None and self.poles.dim != self.shadow.n_obs:
            raise ValueError("pole dimension != shadow row count")

    def to_dict(self) -> dict:
        doc = {
            "first_stage_cost": self.problem.first_stage_cost.tolist(),
            "recourse_matrix": self.problem.recourse_matrix.tolist(),
            "rows": [
                {
                    "lhs_nominal": r.lhs_nominal.tolist(),
                    "lhs_uncertain": r.lhs_uncertain.tolist(),
                    "rhs_nominal": r.rhs_nominal,
                    "rhs_uncertain": r.rhs_uncertain.tolist(),
                }
                for r in self.problem.rows
            ],
            "uncertainty": uncertainty_to_dict(self.uncertainty),
            "shadow": self.shadow.entries.tolist(),
        }
        if self.poles is not None:
            doc["poles"] = self.poles.to_json()
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "Instance":
        uncertainty = uncertainty_from_dict(doc["uncertainty"])
        rows = tuple(
            ConstraintRow(r["lhs_nominal"], r["lhs_uncertain"],
                          r["rhs_nominal"], r["rhs_uncertain"])
            for r in doc["rows"]
        )
        problem = RobustProblem(doc["first_stage_cost"], doc["recourse_matrix"],
                                rows, uncertainty.dim)
        poles = PoleSet.from_json(doc["poles"]) if "poles" in doc else None
        return cls(problem, uncertainty, ShadowMatrix(doc["shadow"]), poles)

    def save(self, path: str) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1)

    @classmethod
    def load(cls, path: str) -> "Instance":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def uncertainty_to_dict(s: UncertaintySet) -> dict:
    if isinstance(s, Box):
        return {"kind": "box", "lower": s.lower.tolist(), "upper": s.upper.tolist()}
    if isinstance(s, Polytope):
        return {"kind": "polytope", "C": s.C.tolist(), "d": s.d.tolist()}
    if isinstance(s, Ellipsoid):
        return {"kind": "ellipsoid", "center": s.center.tolist(),
                "radius": s.radius, "shape": s.shape.tolist()}
    raise TypeError(f"unsupported set type {type(s).__name__}")


def uncertainty_from_dict(doc: dict) -> UncertaintySet:
    kind = doc.get("kind")
    if kind == "box":
        return Box(np.asarray(doc["lower"]), np.asarray(doc["upper"]))
    if kind == "polytope":
        return Polytope(np.asarray(doc["C"]), np.asarray(doc["d"]))
    if kind == "ellipsoid":
        shape = np.asarray(doc["shape"]) if "shape" in doc else None
        return Ellipsoid(np.asarray(doc["center"]), doc["radius"], shape)
    raise ValueError(f"unknown uncertainty kind {kind!r}")

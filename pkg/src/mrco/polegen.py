"""Pole-set construction and refinement.

A pole-set is valid for an observed uncertainty image when its convex hull
covers that image.  The constructions here are: the smallest homothetic copy
of a reference simplex that covers a convex target, a closed form of the same
for unit hypercubes, cross-polytope pole-sets for balls, and an iterative
project-and-cut tightening that trades extra poles for a smaller hull.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import conic
from .core import (
    Box,
    Ellipsoid,
    PoleSet,
    Polytope,
    ShadowMatrix,
    UncertaintySet,
    contains,
    halfspace_form,
    hull_membership,
    support_min,
)

__all__ = [
    "SimplexBasis",
    "HomothetyResult",
    "ProjectedSet",
    "random_affine_basis",
    "circumscribe",
    "hypercube_sigma",
    "project",
    "hausdorff",
    "cross_polytope_poles",
    "enclosing_cross_poles",
    "tighten_once",
    "tighten",
    "barycentric",
    "TightenError",
]


class TightenError(RuntimeError):
    """Tightening hit a degenerate geometry it cannot cut."""


@dataclass(frozen=True)
class SimplexBasis:
    """n0+1 affinely independent points plus the barycentric coefficient rows.

    ``barycentric_rows`` is the inverse of the matrix stacking the points as
    columns over a row of ones, so row i gives the affine functional whose
    value at x is the i-th barycentric coordinate.
    """

    points: np.ndarray
    barycentric_rows: np.ndarray

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        L = np.asarray(self.barycentric_rows, dtype=float)
        pts.flags.writeable = False
        L.flags.writeable = False
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "barycentric_rows", L)
        n0 = pts.shape[1]
        if pts.shape[0] != n0 + 1 or L.shape != (n0 + 1, n0 + 1):
            raise ValueError("simplex basis needs n0+1 points of dimension n0")
        col_sums = L.sum(axis=0)
        if not (np.allclose(col_sums[:n0], 0.0, atol=1e-9)
                and abs(col_sums[n0] - 1.0) <= 1e-9):
            raise ValueError("barycentric rows fail the column-sum identity")

    @property
    def n0(self) -> int:
        return self.points.shape[1]

    @classmethod
    def from_points(cls, points) -> "SimplexBasis":
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        D = np.vstack([pts.T, np.ones(pts.shape[0])])
        if not _nonsingular(D):
            raise ValueError("points are affinely dependent")
        return cls(pts, np.linalg.inv(D))

    def linear_part(self, i: int) -> np.ndarray:
        return self.barycentric_rows[i, :-1]

    def coordinates(self, x) -> np.ndarray:
        """Barycentric coordinates of x; nonnegative iff x lies in the simplex."""
        return self.barycentric_rows @ np.concatenate([np.asarray(x, dtype=float), [1.0]])


def _nonsingular(D: np.ndarray, tol: float = 1e-10) -> bool:
    # scale rows first so the determinant threshold is scale-free
    norms = np.abs(D).max(axis=1)
    norms[norms == 0.0] = 1.0
    return abs(np.linalg.det(D / norms[:, None])) > tol


@dataclass(frozen=True)
class HomothetyResult:
    """Smallest covering copy sigma * S + t of a reference simplex S."""

    sigma: float
    translate: np.ndarray
    poles: PoleSet


class ProjectedSet:
    """Image of an uncertainty set under a shadow map, for pole generation.

    Supports the three queries pole construction needs (linear support,
    membership, Euclidean projection); projections cost one cone solve.
    """

    def __init__(self, base: UncertaintySet, shadow: ShadowMatrix):
        if shadow.dim != base.dim:
            raise ValueError("shadow column count != set dimension")
        self.base = base
        self.shadow = shadow

    @property
    def dim(self) -> int:
        return self.shadow.n_obs

    def support_min(self, a) -> float:
        return support_min(self.base, self.shadow.entries.T @ np.asarray(a, dtype=float))

    def contains(self, x, tol: float = 1e-7) -> bool:
        x = np.asarray(x, dtype=float)
        base, P = self.base, self.shadow.entries
        if isinstance(base, Ellipsoid):
            G = P @ base.shape
            target = x - P @ base.center
            s = G.T @ np.linalg.solve(G @ G.T, target)
            if base.radius == 0.0:
                return bool(np.linalg.norm(target) <= tol)
            return bool(np.linalg.norm(s) <= base.radius + tol)
        C, d = halfspace_form(base)
        n = base.dim
        prog = conic.ConicProgram(n, np.zeros(n))
        for row, rhs in zip(C, d):
            prog.add_le(row, rhs)
        for j in range(P.shape[0]):
            prog.add_eq(P[j], x[j])
        res = conic.solve(prog)
        if res.status is conic.Status.INFEASIBLE:
            # allow tol-slack on the image equality before giving up
            return bool(np.linalg.norm(self.project(x) - x) <= tol)
        return res.ok

    def project(self, omega) -> np.ndarray:
        omega = np.asarray(omega, dtype=float)
        base, P = self.base, self.shadow.entries
        n0 = P.shape[0]
        if isinstance(base, Ellipsoid):
            # image is itself an ellipsoid: project radially in its own metric
            G = P @ base.shape
            img_center = P @ base.center
            y = G.T @ np.linalg.solve(G @ G.T, omega - img_center)
            nrm = np.linalg.norm(y)
            if base.radius == 0.0:
                return img_center
            if nrm <= base.radius:
                return omega.copy()
            return img_center + base.radius * (G @ y) / nrm
        C, d = halfspace_form(base)
        n = base.dim
        # variables: xi (n), t
        prog = conic.ConicProgram(n + 1, np.concatenate([np.zeros(n), [1.0]]))
        for row, rhs in zip(C, d):
            prog.add_le(np.concatenate([row, [0.0]]), rhs)
        A = np.hstack([-P, np.zeros((n0, 1))])
        cvec = np.zeros(n + 1)
        cvec[-1] = 1.0
        prog.add_soc(A, omega, cvec, 0.0)
        res = conic.solve(prog)
        if not res.ok:
            raise conic.SolverError(f"image projection failed: {res.status.value}")
        return P @ res.primal[:n]


def random_affine_basis(n0: int, rng) -> SimplexBasis:
    """n0+1 affinely independent points, coordinates uniform on [-1, 1]."""
    if n0 < 1:
        raise ValueError("n0 must be at least 1")
    gen = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    for _ in range(100):
        pts = gen.uniform(-1.0, 1.0, size=(n0 + 1, n0))
        D = np.vstack([pts.T, np.ones(n0 + 1)])
        if _nonsingular(D):
            return SimplexBasis(pts, np.linalg.inv(D))
    raise RuntimeError("could not draw an affinely independent basis in 100 attempts")


def _target_support_min(target, a) -> float:
    if isinstance(target, PoleSet):
        return float((target.points @ np.asarray(a, dtype=float)).min())
    if isinstance(target, ProjectedSet):
        return target.support_min(a)
    return support_min(target, a)


def circumscribe(basis: SimplexBasis, target, shadow: ShadowMatrix | None = None) -> HomothetyResult:
    """Smallest homothetic copy of the basis simplex covering the target.

    The target may be an uncertainty set living in observation space, a
    finite pole cloud, or an uncertainty set viewed through a shadow map.
    Each barycentric functional is minimized over the target; those optima
    determine the scale and the translate, with a zero scale collapsing to
    the single point the target then is.
    """
    if shadow is not None:
        target = ProjectedSet(target, shadow)
    tdim = target.dim
    if tdim != basis.n0:
        raise ValueError(f"target dimension {tdim} != basis dimension {basis.n0}")
    z = np.array([_target_support_min(target, basis.linear_part(i))
                  for i in range(basis.n0 + 1)])
    sigma = float(-z.sum())
    translate = z @ basis.points
    if sigma <= 0.0:
        sigma = 0.0  # target is a single point; its location is the translate
        poles = PoleSet(translate[None, :])
    else:
        poles = PoleSet(sigma * basis.points + translate)
    return HomothetyResult(sigma, translate, poles)


def hypercube_sigma(basis: SimplexBasis) -> tuple[float, np.ndarray]:
    """Closed form of ``circumscribe`` when the target is the unit hypercube."""
    lin = basis.barycentric_rows[:, :-1]
    sigma = 0.5 * np.abs(lin).sum()
    z = np.minimum(lin, 0.0).sum(axis=1)
    translate = z @ basis.points
    return float(sigma), translate


def project(s, omega) -> np.ndarray:
    """Point of s closest to omega.

    Boxes clamp coordinatewise; ellipsoids pull the point radially in the
    coordinates of their shape matrix (the exact Euclidean projection when
    the shape is the identity); polytopes solve one cone program.
    """
    omega = np.asarray(omega, dtype=float)
    if isinstance(s, ProjectedSet):
        return s.project(omega)
    if omega.size != s.dim:
        raise ValueError("point dimension != set dimension")
    if isinstance(s, Box):
        return np.clip(omega, s.lower, s.upper)
    if isinstance(s, Ellipsoid):
        if s.radius == 0.0:
            return s.center.copy()
        y = s.shape_inv @ (omega - s.center)
        nrm = np.linalg.norm(y)
        if nrm <= s.radius:
            return omega.copy()
        return s.center + s.radius * (s.shape @ y) / nrm
    if isinstance(s, Polytope):
        n = s.dim
        prog = conic.ConicProgram(n + 1, np.concatenate([np.zeros(n), [1.0]]))
        for row, rhs in zip(s.C, s.d):
            prog.add_le(np.concatenate([row, [0.0]]), rhs)
        A = np.hstack([-np.eye(n), np.zeros((n, 1))])
        cvec = np.zeros(n + 1)
        cvec[-1] = 1.0
        prog.add_soc(A, omega, cvec, 0.0)
        res = conic.solve(prog)
        if not res.ok:
            raise conic.SolverError(f"projection failed: {res.status.value}")
        return res.primal[:n]
    raise TypeError(f"unsupported set type {type(s).__name__}")


def hausdorff(omega_set: PoleSet, s) -> float:
    """max over poles of the Euclidean distance to s (zero when all inside)."""
    return max(float(np.linalg.norm(w - project(s, w))) for w in omega_set)


def cross_polytope_poles(n0: int, radius: float | None = None) -> PoleSet:
    """The 2*n0 points +-radius*e_i; the default radius sqrt(n0) covers the unit ball."""
    if n0 < 1:
        raise ValueError("n0 must be at least 1")
    if radius is None:
        radius = float(np.sqrt(n0))
    if radius <= 0:
        raise ValueError("radius must be positive")
    eye = np.eye(n0)
    pts = np.vstack([radius * eye, -radius * eye])
    return PoleSet(pts)


def enclosing_cross_poles(s) -> PoleSet:
    """A 2*dim pole-set covering s, centered on s and scaled by support values.

    Covers via the enclosing box: with halfwidths h around the center,
    every point satisfies ||x - c||_1 <= sum(h), so the scaled cross-polytope
    contains the box and hence s.
    """
    if isinstance(s, Box):
        center, half = s.center, s.halfwidth
    elif isinstance(s, Ellipsoid):
        center = s.center
        half = np.array([-support_min(s, e) + float(e @ center)
                         for e in np.eye(s.dim)])
    else:
        dim = s.dim
        lo = np.empty(dim)
        hi = np.empty(dim)
        for j in range(dim):
            e = np.zeros(dim)
            e[j] = 1.0
            lo[j] = _target_support_min(s, e)
            hi[j] = -_target_support_min(s, -e)
        center, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    reach = float(half.sum())
    if reach <= 0.0:
        return PoleSet(center[None, :])
    eye = np.eye(center.size)
    return PoleSet(np.vstack([center + reach * eye, center - reach * eye]))


def tighten_once(omega_set: PoleSet, s, tol: float = 1e-9) -> PoleSet:
    """One project-and-cut step.

    Picks the pole farthest from s (ties to the lowest index), separates it
    from s with the hyperplane through its projection, keeps the strictly
    inner poles, replaces the rest by the hyperplane's intersections with
    the inner-outer segments, and drops intersection points that are convex
    combinations of the other new points.  Poles already on the hyperplane
    move straight into the new layer rather than being traced through
    segments.  Returns the input unchanged when every pole is within tol
    of s.
    """
    pts = omega_set.points
    projections = np.array([project(s, w) for w in pts])
    dists = np.linalg.norm(pts - projections, axis=1)
    k0 = int(np.argmax(dists))
    if dists[k0] <= tol:
        return omega_set
    z = projections[k0]
    alpha = pts[k0] - z
    side = (pts - z) @ alpha
    thr = 1e-9 * float(np.linalg.norm(alpha))

    inner = [i for i in range(len(pts)) if side[i] < -thr]
    if not inner:
        raise TightenError(
            "no pole strictly inside the separating hyperplane; "
            "the covered set is degenerate along the cut direction")

    new_layer: list[np.ndarray] = []
    for i in range(len(pts)):
        if side[i] < -thr:
            continue
        if side[i] <= thr:
            new_layer.append(pts[i])
            continue
        for j in inner:
            t = side[i] / (side[i] - side[j])
            new_layer.append(pts[i] + t * (pts[j] - pts[i]))

    kept = list(new_layer)
    idx = 0
    while idx < len(kept):
        others = kept[:idx] + kept[idx + 1:]
        if others:
            member, _ = hull_membership(PoleSet(np.asarray(others)), kept[idx])
            if member:
                kept.pop(idx)
                continue
        idx += 1

    return PoleSet(np.vstack([pts[inner], np.asarray(kept)]))


def tighten(omega_set: PoleSet, s, max_poles: int, max_iters: int = 1000,
            tol: float = 1e-9) -> list[PoleSet]:
    """Iterate ``tighten_once``, recording every intermediate pole-set.

    Stops once the current set has max_poles or more poles, when a step
    leaves the set unchanged, or after max_iters steps.
    """
    trajectory = [omega_set]
    for _ in range(max_iters):
        current = trajectory[-1]
        if len(current) >= max_poles:
            break
        nxt = tighten_once(current, s, tol=tol)
        if nxt is current:
            break
        trajectory.append(nxt)
    return trajectory


def barycentric(points: np.ndarray, x) -> np.ndarray:
    """Barycentric coordinates of x w.r.t. a full-dimensional simplex."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    D = np.vstack([pts.T, np.ones(pts.shape[0])])
    return np.linalg.solve(D, np.concatenate([np.asarray(x, dtype=float), [1.0]]))

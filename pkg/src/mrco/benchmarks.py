"""Benchmark families: the lobbying problem and the analytic norm examples.

The lobbying problem asks for the smallest budget covering per-voter
convincing effort when voter opinions are linear in uncertain authority
opinions: one budget row, one opinion row and one nonnegativity row per
voter.  Closed-form or enumeration oracles for the ball case and the two
norm examples make the families usable as correctness anchors, not just as
timing fodder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import conic, polegen
from .core import (
    Box,
    ConstraintRow,
    Ellipsoid,
    PoleSet,
    Polytope,
    RobustProblem,
    ShadowMatrix,
    UncertaintySet,
    box_vertices,
)
from .mrc import MrcSpec, solve_compact

__all__ = [
    "RNG_ALGORITHM",
    "LobbyingInstance",
    "AdaptabilitySpec",
    "generate_lobbying",
    "build_lobbying",
    "unit_volume_ball",
    "farc_ball_enumerate",
    "farc_ball_simple",
    "build_norm_example",
    "shadow_projection_experiment",
]

# pinned so generated instances are portable across implementations
RNG_ALGORITHM = "numpy-default_rng(PCG64):uniform"

BALL_ENUM_CAP = 12
BALL_SIMPLE_CAP = 24


@dataclass(frozen=True)
class LobbyingInstance:
    """Opinion matrix with entries in [-1, 1] plus per-voter effort prices."""

    Q: np.ndarray
    prices: np.ndarray
    seed: int | None = None
    rng_algorithm: str = RNG_ALGORITHM

    def __post_init__(self):
        Q = np.atleast_2d(np.asarray(self.Q, dtype=float))
        prices = np.asarray(self.prices, dtype=float)
        Q.flags.writeable = False
        prices.flags.writeable = False
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "prices", prices)
        if np.abs(self.Q).max() > 1.0 + 1e-12:
            raise ValueError("opinion weights must lie in [-1, 1]")
        if self.prices.shape != (self.Q.shape[0],):
            raise ValueError("one price per voter required")

    @property
    def m(self) -> int:
        return self.Q.shape[0]

    @property
    def n(self) -> int:
        return self.Q.shape[1]


@dataclass(frozen=True)
class AdaptabilitySpec:
    """Fraction of recourse components allowed to adapt; the rest stay static."""

    theta: float
    m: int
    adjustable_count: int = field(init=False)

    def __post_init__(self):
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError("theta must lie in [0, 1]")
        object.__setattr__(self, "adjustable_count", int(math.floor(self.theta * self.m)))


def generate_lobbying(m: int, n: int, seed: int) -> LobbyingInstance:
    """Uniform [-1, 1] opinion matrix, unit prices, deterministic per seed."""
    if m < 1 or n < 1:
        raise ValueError("need at least one voter and one authority")
    rng = np.random.default_rng(seed)
    Q = rng.uniform(-1.0, 1.0, size=(m, n))
    return LobbyingInstance(Q, np.ones(m), seed=seed)


def build_lobbying(inst: LobbyingInstance, s: UncertaintySet,
                   adapt: AdaptabilitySpec | None = None) -> RobustProblem:
    """The budget-minimization problem; 2m+1 rows.

    With partial adaptability the trailing voters' recourse components are
    duplicated as first-stage variables, so theta=1 keeps every component
    adjustable and theta=0 recovers the static counterpart.
    """
    m, n = inst.m, inst.n
    if s.dim != n:
        raise ValueError("uncertainty dimension != number of authorities")
    k_adj = m if adapt is None else adapt.adjustable_count
    if adapt is not None and adapt.m != m:
        raise ValueError("adaptability spec sized for a different voter count")
    n_static = m - k_adj
    n_u = 1 + n_static
    rows = []
    V = []

    def static_slot(i: int) -> int:
        return 1 + (i - k_adj)

    # budget row: sum of priced efforts within the budget
    lhs = np.zeros(n_u)
    lhs[0] = -1.0
    vrow = np.zeros(k_adj)
    for i in range(m):
        if i < k_adj:
            vrow[i] = inst.prices[i]
        else:
            lhs[static_slot(i)] = inst.prices[i]
    rows.append(ConstraintRow(lhs, np.zeros((n_u, n)), 0.0, np.zeros(n)))
    V.append(vrow)
    # opinion rows: effort covers the voter's (uncertain) opinion
    for i in range(m):
        lhs = np.zeros(n_u)
        vrow = np.zeros(k_adj)
        if i < k_adj:
            vrow[i] = -1.0
        else:
            lhs[static_slot(i)] = -1.0
        rows.append(ConstraintRow(lhs, np.zeros((n_u, n)), 0.0, -inst.Q[i]))
        V.append(vrow)
    # nonnegative effort
    for i in range(m):
        lhs = np.zeros(n_u)
        vrow = np.zeros(k_adj)
        if i < k_adj:
            vrow[i] = -1.0
        else:
            lhs[static_slot(i)] = -1.0
        rows.append(ConstraintRow(lhs, np.zeros((n_u, n)), 0.0, np.zeros(n)))
        V.append(vrow)

    cost = np.zeros(n_u)
    cost[0] = 1.0
    return RobustProblem(cost, np.array(V), tuple(rows), n)


def unit_volume_ball(n: int) -> Ellipsoid:
    """Ball of volume one centered at (1/2, ..., 1/2)."""
    log_rho = (math.lgamma(n / 2.0 + 1.0) - (n / 2.0) * math.log(math.pi)) / n
    return Ellipsoid(np.full(n, 0.5), math.exp(log_rho))


def farc_ball_enumerate(inst: LobbyingInstance, ball: Ellipsoid,
                        cap: int = BALL_ENUM_CAP,
                        accuracy: float | None = None) -> float:
    """Fully adjustable optimum over a ball by sign-pattern enumeration.

    For every subset J of voters, maximize the priced opinion sum of J over
    the scenarios where exactly the voters in J have nonnegative opinions;
    empty sign regions drop out.  Exponential in the voter count.
    """
    m, n = inst.m, inst.n
    if m > cap:
        raise ValueError(f"{m} voters exceeds the 2^m enumeration cap {cap}")
    if ball.dim != n:
        raise ValueError("ball dimension != number of authorities")
    rQ = inst.prices[:, None] * inst.Q
    G = ball.radius * (ball.shape.T @ inst.Q.T)  # column i: radius * M^T Q_i
    base = inst.Q @ ball.center
    slack = 1e-9  # keeps thin sign regions solvable
    best = 0.0
    for mask in range(2 ** m):
        members = [i for i in range(m) if mask >> i & 1]
        obj = np.zeros(n)
        for i in members:
            obj -= ball.radius * (ball.shape.T @ rQ[i])
        prog = conic.ConicProgram(n, obj)
        for i in range(m):
            if mask >> i & 1:
                prog.add_le(-G[:, i], base[i] + slack)
            else:
                prog.add_le(G[:, i], -base[i] + slack)
        prog.add_soc(np.eye(n), np.zeros(n), np.zeros(n), 1.0)
        res = conic.solve(prog, accuracy)
        if res.status is conic.Status.INFEASIBLE:
            continue
        if not res.ok:
            raise conic.SolverError(
                f"sign-region solve failed for mask {mask}: {res.status.value}")
        value = -res.objective + float(sum(inst.prices[i] * base[i] for i in members))
        best = max(best, value)
    return best


def farc_ball_simple(inst: LobbyingInstance, ball: Ellipsoid,
                     cap: int = BALL_SIMPLE_CAP) -> float:
    """Closed-form equivalent of the sign-pattern enumeration.

    max over subsets J of  radius * ||M^T sum_J r_i Q_i|| + sum_J r_i Q_i . center,
    evaluated without any solver; the empty subset pins the value at >= 0.
    """
    m = inst.m
    if m > cap:
        raise ValueError(f"{m} voters exceeds the 2^m evaluation cap {cap}")
    if ball.dim != inst.n:
        raise ValueError("ball dimension != number of authorities")
    rQ = inst.prices[:, None] * inst.Q
    best = 0.0
    chunk = 1 << 14
    for start in range(0, 2 ** m, chunk):
        masks = np.arange(start, min(start + chunk, 2 ** m))
        bits = (masks[:, None] >> np.arange(m)) & 1
        sums = bits @ rQ
        vals = ball.radius * np.linalg.norm(sums @ ball.shape, axis=1) + sums @ ball.center
        best = max(best, float(vals.max()))
    return best


def build_norm_example(n: int, n0: int, norm: str):
    """The two analytic examples: effort covers |xi_i|, budget covers total.

    Returns (problem, uncertainty, shadow, poles).  For the "l1" norm the
    uncertainty is the unit cross-polytope and the poles are the 2*n0 unit
    coordinate vectors; for "l2" it is the unit ball and the poles are
    scaled by sqrt(n0) to cover the observed disk.
    """
    if not 1 <= n0 <= n:
        raise ValueError("need 1 <= n0 <= n")
    rows = []
    V = []
    for i in range(n):
        vrow = np.zeros(n)
        vrow[i] = -1.0
        ei = np.zeros(n)
        ei[i] = 1.0
        rows.append(ConstraintRow(np.zeros(1), np.zeros((1, n)), 0.0, -ei))
        V.append(vrow)
        rows.append(ConstraintRow(np.zeros(1), np.zeros((1, n)), 0.0, ei))
        V.append(vrow)
    rows.append(ConstraintRow(np.array([-1.0]), np.zeros((1, n)), 0.0, np.zeros(n)))
    V.append(np.ones(n))
    problem = RobustProblem(np.array([1.0]), np.array(V), tuple(rows), n)
    shadow = ShadowMatrix.coordinate_projection(n0, n)
    if norm == "l1":
        uncertainty: UncertaintySet = Polytope.l1_ball(n)
        poles = polegen.cross_polytope_poles(n0, radius=1.0)
    elif norm == "l2":
        uncertainty = Ellipsoid(np.zeros(n), 1.0)
        poles = polegen.cross_polytope_poles(n0)
    else:
        raise ValueError("norm must be 'l1' or 'l2'")
    return problem, uncertainty, shadow, poles


def shadow_projection_experiment(inst: LobbyingInstance, projection_dims,
                                 accuracy: float | None = None) -> dict[int, float]:
    """Counterpart values for coordinate shadows of increasing width.

    For each n0 the shadow keeps the first n0 authorities and the poles are
    all vertices of the observed sub-hypercube, so finer observation can
    only help: values are non-increasing in n0.
    """
    box = Box.hypercube(inst.n)
    problem = build_lobbying(inst, box)
    values: dict[int, float] = {}
    for n0 in projection_dims:
        if not 1 <= n0 <= inst.n:
            raise ValueError("projection dims must lie in [1, n]")
        poles = PoleSet(box_vertices(Box.hypercube(n0)))
        shadow = ShadowMatrix.coordinate_projection(n0, inst.n)
        spec = MrcSpec(problem, box, shadow, poles,
                       covering=f"box-image-vertices:{len(poles)}")
        values[n0] = solve_compact(spec, accuracy).objective
    return values

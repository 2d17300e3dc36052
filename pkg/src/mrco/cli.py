"""Command-line front end: pole generation, solving, benchmarking, convergence.

Every run is reproducible from its flags: all randomness flows from --seed,
CSV rows carry a hash of the parsed configuration, and timing columns stay
zero unless --timing is passed so that reruns are byte-identical at
parallelism 1.  Exit codes: 0 success, 1 solver or infeasibility
diagnostics, 2 configuration errors.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from . import benchmarks as bm
from . import bounds, conic, mrc, polegen
from .core import Box, Ellipsoid, Instance, PoleSet, ShadowMatrix, box_vertices


class ConfigError(ValueError):
    """Bad flags, missing files, or inconsistent dimensions."""


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    instance: str | None = None
    poles: str | None = None
    mode: str | None = None
    method: str | None = None
    family: str | None = None
    m: int | None = None
    n: int | None = None
    n0: int | None = None
    theta: float = 1.0
    seeds: str | None = None
    max_poles: int = 0
    budget: float | None = None
    tol: float = 1e-6
    seed: int = 0
    out: str | None = None
    poles_out: str | None = None
    trajectory_csv: str | None = None
    gap_file: str | None = None
    parallel: int = 1
    timing: bool = False

    def __post_init__(self):
        if self.tol <= 0:
            raise ConfigError("tolerance must be positive")
        if self.parallel < 1:
            raise ConfigError("parallelism must be at least 1")
        for path in (self.instance, self.poles):
            if path and not path.startswith("auto:") and not os.path.exists(path):
                raise ConfigError(f"file not found: {path}")

    def digest(self) -> str:
        payload = json.dumps(asdict(self), sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:12]


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _append_rows(path: str | None, header: list[str], rows: list[list]) -> None:
    out = open(path, "a", newline="") if path else sys.stdout
    try:
        writer = csv.writer(out, lineterminator="\n")
        if not path or out.tell() == 0:
            writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(x) for x in row])
    finally:
        if path:
            out.close()


def _load_instance(config: RunConfig) -> Instance:
    if not config.instance:
        raise ConfigError("an --instance file is required")
    try:
        return Instance.load(config.instance)
    except (KeyError, ValueError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot parse instance: {exc}") from exc


def _resolve_poles(spec: str, uncertainty, shadow: ShadowMatrix, seed: int,
                   trajectory_csv: str | None = None,
                   config_hash: str = "") -> tuple[PoleSet, str]:
    """Load poles from a JSON file or build them from an auto: recipe."""
    if not spec.startswith("auto:"):
        with open(spec) as fh:
            return PoleSet.from_json(json.load(fh)), f"file:{os.path.basename(spec)}"
    recipe = spec[len("auto:"):]
    identity = shadow.n_obs == shadow.dim and np.allclose(shadow.entries, np.eye(shadow.dim))
    target = uncertainty if identity else polegen.ProjectedSet(uncertainty, shadow)
    if recipe == "simplex":
        basis = polegen.random_affine_basis(shadow.n_obs, seed)
        return polegen.circumscribe(basis, target).poles, "auto:simplex"
    if recipe == "2n":
        return polegen.enclosing_cross_poles(target), "auto:2n"
    if recipe.startswith("tighten:"):
        try:
            cap = int(recipe.split(":", 1)[1])
        except ValueError as exc:
            raise ConfigError(f"bad tighten cap in {spec!r}") from exc
        basis = polegen.random_affine_basis(shadow.n_obs, seed)
        start = polegen.circumscribe(basis, target).poles
        trajectory = polegen.tighten(start, target, max_poles=cap)
        if trajectory_csv:
            rows = [[i, len(om), polegen.hausdorff(om, target), config_hash]
                    for i, om in enumerate(trajectory)]
            _append_rows(trajectory_csv, ["iteration", "poles", "hausdorff", "config"], rows)
        return trajectory[-1], f"auto:tighten:{cap}"
    raise ConfigError(f"unknown pole recipe {spec!r}")


def run_polegen(config: RunConfig) -> int:
    inst = _load_instance(config)
    poles, label = _resolve_poles(config.poles or "auto:simplex", inst.uncertainty,
                                  inst.shadow, config.seed,
                                  trajectory_csv=config.trajectory_csv,
                                  config_hash=config.digest())
    out = config.poles_out or "poles.json"
    with open(out, "w") as fh:
        json.dump(poles.to_json(), fh)
    print(f"wrote {len(poles)} poles ({label}) to {out}")
    return 0


def _solve_one(inst: Instance, mode: str, method: str, poles: PoleSet | None,
               tol: float, seed: int) -> tuple[float, int, int]:
    """Returns (value, pole_count, iterations)."""
    if mode == "src":
        return mrc.solve_src(inst.problem, inst.uncertainty).objective, 1, 1
    if mode == "aarc":
        value = mrc.solve_aarc(inst.problem, inst.uncertainty, inst.shadow, rng=seed)
        return value, inst.shadow.n_obs + 1, 1
    if mode == "farc":
        if not isinstance(inst.uncertainty, Box):
            raise mrc.RobustInfeasibleError(
                "exact fully adjustable solve is limited to box uncertainty")
        value = mrc.solve_farc_box(inst.problem, inst.uncertainty)
        return value, 2 ** inst.uncertainty.dim, 1
    if mode == "mrc":
        if poles is None:
            raise ConfigError("mode mrc needs --poles")
        spec = mrc.MrcSpec.certified(inst.problem, inst.uncertainty, inst.shadow,
                                     poles, samples=500, seed=seed)
        if method == "cuts":
            sol = mrc.solve_cutting_plane(spec, tol=tol)
            return sol.objective, len(poles), int(sol.meta["iterations"])
        sol = mrc.solve_compact(spec)
        return sol.objective, len(poles), 1
    raise ConfigError(f"unknown mode {mode!r}")


def run_solve(config: RunConfig) -> int:
    inst = _load_instance(config)
    mode = config.mode or "mrc"
    method = config.method or "compact"
    poles = None
    if mode == "mrc":
        spec_str = config.poles or ("auto:simplex" if inst.poles is None else None)
        if spec_str is None:
            poles = inst.poles
        else:
            poles, _ = _resolve_poles(spec_str, inst.uncertainty, inst.shadow, config.seed)
    t0 = time.perf_counter()
    value, k, iters = _solve_one(inst, mode, method, poles, config.tol, config.seed)
    wall = (time.perf_counter() - t0) * 1e3 if config.timing else 0.0
    _append_rows(config.out,
                 ["instance", "mode", "method", "poles", "value", "wall_ms", "iters", "config"],
                 [[os.path.basename(config.instance), mode, method, k, value, wall,
                   iters, config.digest()]])
    return 0


def _parse_seed_range(text: str) -> list[int]:
    if ".." in text:
        a, b = text.split("..", 1)
        return list(range(int(a), int(b) + 1))
    return [int(text)]


def _bench_cell(config: RunConfig, seed: int) -> list[list]:
    family = config.family
    timing = config.timing
    digest = config.digest()

    def clock(fn):
        t0 = time.perf_counter()
        value = fn()
        return value, (time.perf_counter() - t0) * 1e3 if timing else 0.0

    rows = []
    if family in ("lobby-box", "lobby-ball"):
        m, n = config.m or 5, config.n or 4
        inst = bm.generate_lobbying(m, n, seed)
        uncertainty = Box.hypercube(n) if family == "lobby-box" else bm.unit_volume_ball(n)
        adapt = bm.AdaptabilitySpec(config.theta, m)
        problem = bm.build_lobbying(inst, uncertainty, adapt)
        shadow = ShadowMatrix.identity(n)
        label = f"{family}-m{m}-n{n}-t{config.theta:g}-s{seed}"

        static, wall = clock(lambda: mrc.solve_src(problem, uncertainty).objective)
        rows.append([label, "static", 1, static, "", wall, digest])
        basis = polegen.random_affine_basis(n, seed)
        simplex = polegen.circumscribe(basis, uncertainty).poles
        affine, wall = clock(lambda: mrc.solve_compact(
            mrc.MrcSpec(problem, uncertainty, shadow, simplex,
                        covering="circumscribed-simplex")).objective)
        rows.append([label, "affine", len(simplex), affine, "", wall, digest])

        poles, pole_label = _resolve_poles(config.poles or "auto:2n", uncertainty,
                                           shadow, seed)
        spec = mrc.MrcSpec.certified(problem, uncertainty, shadow, poles,
                                     samples=500, seed=seed)
        value, wall = clock(lambda: mrc.solve_compact(spec).objective)

        optimum = None
        if config.theta == 1.0:
            if family == "lobby-box" and n <= 12:
                optimum, _ = clock(lambda: mrc.solve_farc_box(problem, uncertainty))
            elif family == "lobby-ball" and m <= bm.BALL_SIMPLE_CAP:
                optimum, _ = clock(lambda: bm.farc_ball_simple(inst, uncertainty))
        gap = ""
        if optimum is not None and affine - optimum > 1e-9:
            gap = 100.0 * (affine - value) / (affine - optimum)
        rows.append([label, f"mrc[{pole_label}]", len(poles), value, gap, wall, digest])
        if optimum is not None:
            rows.append([label, "farc", "", optimum, 100.0, 0.0, digest])
    elif family in ("norm-l1", "norm-l2"):
        n, n0 = config.n or 4, config.n0 or 2
        problem, uncertainty, shadow, poles = bm.build_norm_example(
            n, n0, family.split("-")[1])
        label = f"{family}-n{n}-n0{n0}"
        static, wall = clock(lambda: mrc.solve_src(problem, uncertainty).objective)
        rows.append([label, "static", 1, static, "", wall, digest])
        affine, wall = clock(lambda: mrc.solve_aarc(
            problem, uncertainty, ShadowMatrix.identity(n), rng=seed))
        rows.append([label, "affine", n + 1, affine, "", wall, digest])
        spec = mrc.MrcSpec(problem, uncertainty, shadow, poles,
                           covering="canonical-cross-poles")
        value, wall = clock(lambda: mrc.solve_compact(spec).objective)
        if family == "norm-l1":
            optimum = mrc.protect_at_scenarios(
                problem, np.vstack([np.eye(n), -np.eye(n)])).objective
        else:
            full = bm.build_norm_example(n, n, "l2")
            optimum = mrc.solve_compact(mrc.MrcSpec(
                full[0], full[1], full[2], full[3],
                covering="canonical-cross-poles")).objective
        gap = ""
        if affine - optimum > 1e-9:
            gap = 100.0 * (affine - value) / (affine - optimum)
        rows.append([label, f"mrc[n0={n0}]", len(poles), value, gap, wall, digest])
        rows.append([label, "farc", "", optimum, 100.0, 0.0, digest])
    else:
        raise ConfigError(f"unknown family {config.family!r}")
    return rows


def run_bench(config: RunConfig) -> int:
    seeds = _parse_seed_range(config.seeds or str(config.seed))
    header = ["instance", "mode", "poles", "value", "closed_gap_pct", "wall_ms", "config"]
    if config.parallel > 1:
        with ThreadPoolExecutor(max_workers=config.parallel) as pool:
            for rows in pool.map(lambda s: _bench_cell(config, s), seeds):
                _append_rows(config.out, header, rows)
    else:
        for s in seeds:
            _append_rows(config.out, header, _bench_cell(config, s))
    return 0


def run_converge(config: RunConfig) -> int:
    inst = _load_instance(config)
    if inst.shadow.n_obs != inst.shadow.dim or \
            not np.allclose(inst.shadow.entries, np.eye(inst.shadow.dim)):
        raise ConfigError("the convergence driver requires an identity shadow")
    if config.poles:
        poles, _ = _resolve_poles(config.poles, inst.uncertainty, inst.shadow, config.seed)
    elif inst.poles is not None:
        poles = inst.poles
    else:
        poles, _ = _resolve_poles("auto:simplex", inst.uncertainty, inst.shadow, config.seed)
    max_poles = config.max_poles or 4 * inst.uncertainty.dim
    trace = bounds.converge(inst.problem, inst.uncertainty, poles, max_poles,
                            budget_s=config.budget, record_time=config.timing)
    digest = config.digest()
    rows = [[r.iteration, r.pole_count, r.hausdorff, r.upper_bound, r.lower_bound,
             r.wall_ms, digest] for r in trace.rows]
    _append_rows(config.out,
                 ["iteration", "poles", "hausdorff", "upper_bound", "lower_bound",
                  "wall_ms", "config"], rows)
    if config.gap_file:
        with open(config.gap_file, "w") as fh:
            for r in trace.rows:
                fh.write(f"{r.iteration} {_fmt(r.upper_bound - r.lower_bound)}\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mrco", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=float, default=1e-6)
        p.add_argument("--out", help="CSV output path (default: stdout)")
        p.add_argument("--parallel", type=int, default=1)
        p.add_argument("--timing", action="store_true",
                       help="record wall-clock columns (breaks byte-level rerun identity)")

    p = sub.add_parser("polegen", help="generate a pole-set for an instance")
    common(p)
    p.add_argument("--instance", required=True)
    p.add_argument("--poles", default="auto:simplex",
                   help="FILE or auto:{simplex|2n|tighten:K}")
    p.add_argument("--poles-out", default="poles.json")
    p.add_argument("--trajectory-csv", help="tightening trajectory CSV")

    p = sub.add_parser("solve", help="solve one instance")
    common(p)
    p.add_argument("--instance", required=True)
    p.add_argument("--mode", choices=["src", "aarc", "farc", "mrc"], default="mrc")
    p.add_argument("--method", choices=["compact", "cuts"], default="compact")
    p.add_argument("--poles", help="FILE or auto:{simplex|2n|tighten:K}")

    p = sub.add_parser("bench", help="run a benchmark family over seeds")
    common(p)
    p.add_argument("--family", required=True,
                   choices=["lobby-box", "lobby-ball", "norm-l1", "norm-l2"])
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--n0", type=int)
    p.add_argument("--theta", type=float, default=1.0)
    p.add_argument("--seeds", help="a..b inclusive, or a single seed")
    p.add_argument("--poles", help="FILE or auto:{simplex|2n|tighten:K}")

    p = sub.add_parser("converge", help="paired upper/lower bound trace")
    common(p)
    p.add_argument("--instance", required=True)
    p.add_argument("--poles", help="FILE or auto:{simplex|2n|tighten:K}")
    p.add_argument("--max-poles", type=int, default=0)
    p.add_argument("--budget", type=float, help="wall-clock budget in seconds")
    p.add_argument("--gap-file", help="two-column iteration/gap file")
    return parser


_RUNNERS = {
    "polegen": run_polegen,
    "solve": run_solve,
    "bench": run_bench,
    "converge": run_converge,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        fields = {f for f in RunConfig.__dataclass_fields__}
        kwargs = {k.replace("-", "_"): v for k, v in vars(ns).items()}
        config = RunConfig(**{k: v for k, v in kwargs.items() if k in fields})
        return _RUNNERS[config.subcommand](config)
    except ConfigError as exc:
        print(f"mrco: error: config: {exc}", file=sys.stderr)
        return 2
    except (mrc.RobustInfeasibleError, mrc.CoveringError, conic.SolverError,
            bounds.BoundsError) as exc:
        print(f"mrco: error: solver: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"mrco: error: config: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

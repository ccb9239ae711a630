"""Built-in scaling scenarios and the logarithmic entropy fit.

A scenario expands into instance families; each family runs one anneal per
size and yields one aggregate table. Runs are independent, so they may be
spread over a process pool; the aggregate is written once by the caller
after all runs finish, in size order.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from qwa_sim import io
from qwa_sim.annealer import AnnealParams, run_qwa
from qwa_sim.errors import ConfigError, InvalidInputError
from qwa_sim.exact import BRUTE_FORCE_MAX_N, brute_force_minimum
from qwa_sim.instance import GraphInstance, generate_instance
from qwa_sim.ordering import resolve_path

logger = logging.getLogger(__name__)

SCALING_SCENARIOS = ("scaling_1d", "strip_2d", "regular_3")
SOLVED_TOL = 1e-9


@dataclass(frozen=True)
class Family:
    """One instance family of a scenario.

    Attributes:
        name: Used in artifact names.
        kind: Instance kind passed to ``generate_instance``.
        dist: Coupling distribution.
        width: Strip width for grids (sizes are then lengths); None otherwise.
    """

    name: str
    kind: str
    dist: str
    width: int | None = None

    def instance(self, size: int, seed: int) -> GraphInstance:
        if self.kind == "grid":
            return generate_instance("grid", {"w": self.width, "h": size}, self.dist, seed)
        if self.kind == "regular":
            return generate_instance("regular", {"n": size, "d": 3}, self.dist, seed)
        return generate_instance(self.kind, {"n": size}, self.dist, seed)


def scenario_families(scenario: str) -> tuple[Family, ...]:
    """Families of a scaling scenario.

    ``scaling_1d`` runs uniform ferromagnetic and gaussian chains, ``strip_2d``
    runs gaussian ``w x L`` strips with ``w`` in {2, 4} (sizes are lengths
    ``L``), and ``regular_3`` runs gaussian random 3-regular graphs.
    """
    if scenario == "scaling_1d":
        return (Family("chain_ferro", "chain", "ferro"), Family("chain_gaussian", "chain", "gaussian"))
    if scenario == "strip_2d":
        return (
            Family("strip_w2_gaussian", "grid", "gaussian", width=2),
            Family("strip_w4_gaussian", "grid", "gaussian", width=4),
        )
    if scenario == "regular_3":
        return (Family("regular3_gaussian", "regular", "gaussian"),)
    raise ConfigError(f"Unknown scaling scenario {scenario!r}; expected one of {SCALING_SCENARIOS}")


@dataclass(frozen=True)
class ScalingJob:
    family: Family
    size: int
    seed: int
    path_spec: str
    params: AnnealParams
    out_dir: Path

    @property
    def stem(self) -> str:
        return f"{self.family.name}_{self.size}"


def run_job(job: ScalingJob) -> tuple[dict, bool]:
    """Run one scaling instance and write its per-instance artifacts.

    Returns:
        The aggregate row and whether the run aborted.
    """
    inst = job.family.instance(job.size, job.seed)
    path = resolve_path(inst, job.path_spec)
    report = run_qwa(inst, path, job.params)

    io.save_instance(inst, job.out_dir / f"{job.stem}_instance.json")
    io.write_telemetry(report, job.out_dir / f"{job.stem}_telemetry.csv")
    io.write_cut_telemetry(report, job.out_dir / f"{job.stem}_cuts.csv")
    io.write_summary(report, job.out_dir / f"{job.stem}_summary.json")

    solved = None
    if inst.n <= BRUTE_FORCE_MAX_N:
        _, best = brute_force_minimum(inst)
        solved = int(abs(report.final_classical_energy - best) <= SOLVED_TOL)
    row = {
        "n": inst.n,
        "global_max_entropy": report.global_max_entropy,
        "global_max_bond_dim": report.global_max_bond_dim,
        "s_peak_entropy": report.s_peak_entropy,
        "solved": solved,
    }
    logger.info(
        "%s: S_max=%.6f m_max=%d solved=%s",
        job.stem, row["global_max_entropy"], row["global_max_bond_dim"], solved,
    )
    return row, report.aborted


def run_scaling(
    scenario: str,
    sizes: Sequence[int],
    seed: int,
    params: AnnealParams,
    out_dir: Path,
    path_spec: str = "heuristic",
    workers: int = 1,
) -> bool:
    """Run every family of ``scenario`` over ``sizes``.

    Writes per-instance artifacts, ``aggregate_<family>.csv`` per family and
    ``fit_<family>.json`` where at least three distinct sizes ran.

    Returns:
        True if any run aborted.
    """
    if not sizes:
        raise ConfigError(f"Scenario {scenario} needs a non-empty size list")
    families = scenario_families(scenario)
    out_dir = Path(out_dir)
    jobs = [
        ScalingJob(family, int(size), seed, path_spec, params, out_dir)
        for family in families
        for size in sorted(set(sizes))
    ]

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_job, jobs))
    else:
        results = [run_job(job) for job in jobs]

    any_aborted = False
    for family in families:
        rows = [row for job, (row, _) in zip(jobs, results) if job.family == family]
        any_aborted |= any(aborted for job, (_, aborted) in zip(jobs, results) if job.family == family)
        io.write_aggregate(rows, out_dir / f"aggregate_{family.name}.csv")
        points = [(row["n"], row["global_max_entropy"]) for row in rows]
        if len({n for n, _ in points}) >= 3:
            alpha, beta, residual = fit_log_scaling(points)
            io.write_json(
                {"family": family.name, "alpha": alpha, "beta": beta, "rms_residual": residual, "points": points},
                out_dir / f"fit_{family.name}.json",
            )
    return any_aborted


def fit_log_scaling(points: Iterable[tuple[float, float]]) -> tuple[float, float, float]:
    """Least-squares fit ``S = alpha ln(n) + beta``.

    Example:
        >>> import math
        >>> a, b, r = fit_log_scaling([(n, math.log(n)) for n in (8, 16, 32)])
        >>> abs(a - 1) < 1e-12 and abs(b) < 1e-12 and r < 1e-12
        True

    Raises:
        InvalidInputError: Fewer than three distinct sizes.
    """
    points = [(float(n), float(s)) for n, s in points]
    if len({n for n, _ in points}) < 3:
        raise InvalidInputError(f"Need at least 3 distinct sizes for a log fit, got {len(points)} points")
    if any(n <= 0 for n, _ in points):
        raise InvalidInputError("Sizes must be positive")

    x = np.array([math.log(n) for n, _ in points])
    y = np.array([s for _, s in points])
    design = np.column_stack([x, np.ones_like(x)])
    (alpha, beta), *_ = np.linalg.lstsq(design, y, rcond=None)
    residual = float(np.sqrt(np.mean((design @ np.array([alpha, beta]) - y) ** 2)))
    return float(alpha), float(beta), residual

"""Quantum wavefunction annealing: follow the ground state of H(s) from s=0.

Starting from the exact ground state of H(0) (all spins along +X), each
proposal ``s -> s + ds`` is solved by DMRG seeded with the current state. A
proposal whose fidelity with the current state, taken modulo the global
spin flip, is below ``f_min`` is rejected and ``ds`` halved; ``growth_after``
consecutive acceptances double ``ds`` up to ``ds_max``. At ``s_final`` the
state is read out in S^z.
"""

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable

from qwa_sim.dmrg import DmrgSettings, solve_ground
from qwa_sim.errors import InvalidInputError, NumericalFailure
from qwa_sim.instance import GraphInstance, SpinConfiguration, classical_energy
from qwa_sim.mpo import build_hamiltonian
from qwa_sim.mps import all_spectra, flip_fidelity, product_plus_x, readout_z
from qwa_sim.ordering import SitePath
from qwa_sim.spectrum_metrics import DEFAULT_EPSILONS, spectrum_report

logger = logging.getLogger(__name__)

TELEMETRY_COLUMNS = (
    "step",
    "s",
    "ds",
    "fidelity",
    "energy",
    "max_bond_dim",
    "max_vn_entropy",
    "max_index_sigma",
    "m_eff_1e2",
    "m_eff_1e3",
    "sweeps_used",
    "wall_time_ms",
)


@dataclass(frozen=True)
class AnnealParams:
    """Step control for one annealing run.

    Attributes:
        ds_init: First proposed step.
        ds_min: Abort when a halved step drops below this.
        ds_max: Cap for step growth.
        f_min: Fidelity a proposal needs to be accepted.
        s_final: Readout point.
        growth_after: Consecutive acceptances before ``ds`` doubles.
        dmrg: Settings for every ground-state solve.
        timing: Record wall-clock milliseconds per step (otherwise 0).
    """

    ds_init: float = 0.05
    ds_min: float = 1e-6
    ds_max: float = 0.1
    f_min: float = 0.9
    s_final: float = 0.999
    growth_after: int = 2
    dmrg: DmrgSettings = field(default_factory=DmrgSettings)
    timing: bool = False

    def __post_init__(self):
        if not 0 < self.ds_min <= self.ds_init <= self.ds_max <= 1:
            raise InvalidInputError(
                f"Need 0 < ds_min <= ds_init <= ds_max <= 1, got "
                f"{self.ds_min}, {self.ds_init}, {self.ds_max}"
            )
        if not 0 < self.f_min < 1:
            raise InvalidInputError(f"f_min must lie in (0, 1), got {self.f_min}")
        if not 0 < self.s_final <= 1:
            raise InvalidInputError(f"s_final must lie in (0, 1], got {self.s_final}")
        if self.growth_after < 1:
            raise InvalidInputError(f"growth_after must be positive, got {self.growth_after}")


@dataclass
class StepRecord:
    s: float
    ds: float
    fidelity: float
    energy: float
    max_bond_dim: int
    max_vn_entropy: float
    max_index_sigma: float
    m_eff_1e2: int
    m_eff_1e3: int
    sweeps_used: int
    wall_time_ms: int = 0

    @property
    def fidelity_susceptibility(self) -> float:
        """``2 (1 - F) / ds^2``, the rate at which the ground state turns."""
        return 2.0 * (1.0 - self.fidelity) / (self.ds * self.ds)


@dataclass
class CutRecord:
    """Spectrum statistics of one cut of one accepted state."""

    step: int
    s: float
    cut: int
    bond_dim: int
    vn_entropy: float
    index_mean: float
    index_sigma: float
    m_eff: dict[float, int]
    chebyshev_m: dict[float, int]


@dataclass
class RunReport:
    steps: list[StepRecord]
    final_config: SpinConfiguration
    final_classical_energy: float
    global_max_bond_dim: int
    global_max_entropy: float
    s_peak_entropy: float | None
    aborted: bool = False
    abort_reason: str | None = None
    rejected_steps: int = 0
    cut_records: list[CutRecord] = field(default_factory=list)

    def summary(self) -> dict:
        """Mapping for the summary JSON file."""
        return {
            "final_config": list(self.final_config.values),
            "final_classical_energy": self.final_classical_energy,
            "global_max_bond_dim": self.global_max_bond_dim,
            "global_max_entropy": self.global_max_entropy,
            "s_peak_entropy": self.s_peak_entropy,
            "aborted": self.aborted,
            "abort_reason": self.abort_reason,
        }

    def telemetry_rows(self) -> list[dict]:
        return [
            {
                "step": k,
                "s": r.s,
                "ds": r.ds,
                "fidelity": r.fidelity,
                "energy": r.energy,
                "max_bond_dim": r.max_bond_dim,
                "max_vn_entropy": r.max_vn_entropy,
                "max_index_sigma": r.max_index_sigma,
                "m_eff_1e2": r.m_eff_1e2,
                "m_eff_1e3": r.m_eff_1e3,
                "sweeps_used": r.sweeps_used,
                "wall_time_ms": r.wall_time_ms,
            }
            for k, r in enumerate(self.steps, start=1)
        ]


def _measure(step: int, s: float, psi) -> tuple[list[CutRecord], dict]:
    """Per-cut records plus the per-step maxima over cuts."""
    records = []
    bond_dims = psi.bond_dims
    for spec in all_spectra(psi):
        report = spectrum_report(spec, DEFAULT_EPSILONS)
        records.append(
            CutRecord(
                step=step,
                s=s,
                cut=spec.cut,
                bond_dim=bond_dims[spec.cut],
                vn_entropy=report.vn_entropy,
                index_mean=report.index_mean,
                index_sigma=report.index_sigma,
                m_eff=report.m_eff,
                chebyshev_m=report.chebyshev_m,
            )
        )
    maxima = {
        "max_vn_entropy": max((r.vn_entropy for r in records), default=0.0),
        "max_index_sigma": max((r.index_sigma for r in records), default=0.0),
        "m_eff_1e2": max((r.m_eff[1e-2] for r in records), default=1),
        "m_eff_1e3": max((r.m_eff[1e-3] for r in records), default=1),
    }
    return records, maxima


def run_qwa(
    inst: GraphInstance,
    path: SitePath,
    params: AnnealParams | None = None,
    clock: Callable[[], float] = time.perf_counter,
) -> RunReport:
    """Anneal ``inst`` from ``s = 0`` to ``params.s_final`` along ``path``.

    Never raises for step underflow or DMRG numerical failure; those end the
    run early with ``aborted`` set and the reason recorded.

    Args:
        inst: Problem instance.
        path: DMRG path.
        params: Step control; defaults when None.
        clock: Seconds source used when ``params.timing`` is on.

    Returns:
        RunReport with one StepRecord per accepted step.
    """
    params = params or AnnealParams()
    if len(path) != inst.n:
        raise InvalidInputError(f"Path has {len(path)} slots, instance has {inst.n} spins")

    psi = product_plus_x(inst.n)
    s, ds = 0.0, params.ds_init
    streak = 0
    steps: list[StepRecord] = []
    cut_records: list[CutRecord] = []
    rejected = 0
    aborted, reason = False, None

    while s < params.s_final:
        s_new = min(s + ds, params.s_final)
        started = clock() if params.timing else 0.0
        try:
            result = solve_ground(psi, build_hamiltonian(inst, path, s_new), params.dmrg)
        except NumericalFailure as exc:
            aborted, reason = True, f"DMRG numerical failure at s={s_new:.6g}: {exc}"
            logger.warning(reason)
            break

        fidelity = flip_fidelity(psi, result.psi)
        if fidelity < params.f_min:
            rejected += 1
            streak = 0
            ds /= 2
            logger.info("Rejected s=%.6g (fidelity %.6f), ds -> %.3g", s_new, fidelity, ds)
            if ds < params.ds_min:
                aborted, reason = True, f"step underflow: ds={ds:.3g} < ds_min={params.ds_min:.3g} at s={s:.6g}"
                logger.warning(reason)
                break
            continue

        step_index = len(steps) + 1
        records, maxima = _measure(step_index, s_new, result.psi)
        elapsed = int(round((clock() - started) * 1000)) if params.timing else 0
        steps.append(
            StepRecord(
                s=s_new,
                ds=s_new - s,
                fidelity=fidelity,
                energy=result.energy,
                max_bond_dim=result.max_bond_dim,
                sweeps_used=result.sweeps_used,
                wall_time_ms=elapsed,
                **maxima,
            )
        )
        cut_records.extend(records)
        logger.info(
            "Accepted s=%.6g ds=%.3g F=%.8f E=%.10f m=%d",
            s_new, s_new - s, fidelity, result.energy, result.max_bond_dim,
        )

        psi, s = result.psi, s_new
        streak += 1
        if streak >= params.growth_after:
            ds = min(2 * ds, params.ds_max)
            streak = 0

    config = readout_z(psi, path)
    s_peak = None
    if steps:
        s_peak, _ = _peak(steps)
    return RunReport(
        steps=steps,
        final_config=config,
        final_classical_energy=classical_energy(inst, config),
        global_max_bond_dim=max((r.max_bond_dim for r in steps), default=psi.max_bond_dim),
        global_max_entropy=max((r.max_vn_entropy for r in steps), default=0.0),
        s_peak_entropy=s_peak,
        aborted=aborted,
        abort_reason=reason,
        rejected_steps=rejected,
        cut_records=cut_records,
    )


def _peak(steps: list[StepRecord]) -> tuple[float, float]:
    best = steps[0]
    for record in steps[1:]:
        if record.max_vn_entropy > best.max_vn_entropy or (
            record.max_vn_entropy == best.max_vn_entropy and record.s < best.s
        ):
            best = record
    return best.s, best.max_vn_entropy


def peak_entropy_location(report: RunReport) -> tuple[float, float]:
    """``(s, S)`` of the accepted step with the largest entropy, ties to smaller s.

    Raises:
        InvalidInputError: The report has no accepted steps.
    """
    if not report.steps:
        raise InvalidInputError("Run has no accepted steps")
    return _peak(report.steps)


def fidelity_susceptibilities(report: RunReport) -> list[tuple[float, float]]:
    """``(s, chi_F)`` per accepted step; peaks where the state changes fastest."""
    return [(r.s, r.fidelity_susceptibility) for r in report.steps if r.ds > 0 and math.isfinite(r.fidelity)]

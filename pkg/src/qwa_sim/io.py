"""
Reading and writing run artifacts.

Instance files and summaries are JSON, telemetry and aggregates are CSV
written through pandas and checked against the pandera schemas on the way
out and on the way back in. Every write goes to a temporary sibling first
and is moved into place, so an artifact is either complete or absent.
"""

import json
import logging
import os
import tempfile
from pathlib import Path

import pandas as pd

from qwa_sim.annealer import TELEMETRY_COLUMNS, CutRecord, RunReport
from qwa_sim.errors import InvalidInstanceError
from qwa_sim.instance import GraphInstance
from qwa_sim.mps import Mps, mps_from_dict, mps_to_dict
from qwa_sim.schemas import validate_aggregate, validate_cut_telemetry, validate_telemetry
from qwa_sim.spectrum_metrics import DEFAULT_EPSILONS

logger = logging.getLogger(__name__)

AGGREGATE_COLUMNS = ("n", "global_max_entropy", "global_max_bond_dim", "s_peak_entropy", "solved")

_EPS_SUFFIX = {1e-1: "1e1", 1e-2: "1e2", 1e-3: "1e3"}


def _atomic_write_text(path: Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        Path(tmp).replace(path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    logger.info("Wrote %s", path)
    return path


def _write_json(path: Path, data) -> Path:
    return _atomic_write_text(path, json.dumps(data, indent=2) + "\n")


def _write_csv(path: Path, df: pd.DataFrame) -> Path:
    return _atomic_write_text(path, df.to_csv(index=False, lineterminator="\n"))


def save_instance(inst: GraphInstance, path) -> Path:
    """Write ``inst`` as an instance JSON file (edges sorted, full-precision J)."""
    return _write_json(Path(path), inst.to_dict())


def load_instance(path) -> GraphInstance:
    """
    Load an instance JSON file.

    Args:
        path: Path to the instance file.

    Returns:
        The validated GraphInstance.

    Raises:
        FileNotFoundError: The file does not exist.
        InvalidInstanceError: The file is not a valid instance.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Instance file not found: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InvalidInstanceError(f"Instance file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise InvalidInstanceError(f"Instance file {path} must hold a JSON object")
    return GraphInstance.from_dict(data)


_TELEMETRY_DTYPES = {
    "step": "int64",
    "s": "float64",
    "ds": "float64",
    "fidelity": "float64",
    "energy": "float64",
    "max_bond_dim": "int64",
    "max_vn_entropy": "float64",
    "max_index_sigma": "float64",
    "m_eff_1e2": "int64",
    "m_eff_1e3": "int64",
    "sweeps_used": "int64",
    "wall_time_ms": "int64",
}


def telemetry_frame(report: RunReport) -> pd.DataFrame:
    df = pd.DataFrame(report.telemetry_rows(), columns=list(TELEMETRY_COLUMNS))
    return df.astype(_TELEMETRY_DTYPES)


def cut_frame(records: list[CutRecord]) -> pd.DataFrame:
    """One row per (accepted step, cut)."""
    rows = []
    for r in records:
        row = {
            "step": r.step,
            "s": r.s,
            "cut": r.cut,
            "bond_dim": r.bond_dim,
            "vn_entropy": r.vn_entropy,
            "index_mean": r.index_mean,
            "index_sigma": r.index_sigma,
        }
        for eps in DEFAULT_EPSILONS:
            row[f"m_eff_{_EPS_SUFFIX[eps]}"] = r.m_eff[eps]
        for eps in DEFAULT_EPSILONS:
            row[f"chebyshev_m_{_EPS_SUFFIX[eps]}"] = r.chebyshev_m[eps]
        rows.append(row)
    columns = ["step", "s", "cut", "bond_dim", "vn_entropy", "index_mean", "index_sigma"]
    columns += [f"m_eff_{_EPS_SUFFIX[e]}" for e in DEFAULT_EPSILONS]
    columns += [f"chebyshev_m_{_EPS_SUFFIX[e]}" for e in DEFAULT_EPSILONS]
    df = pd.DataFrame(rows, columns=columns)
    floats = ("s", "vn_entropy", "index_mean", "index_sigma")
    return df.astype({c: "float64" if c in floats else "int64" for c in columns})


def write_telemetry(report: RunReport, path) -> Path:
    return _write_csv(Path(path), validate_telemetry(telemetry_frame(report)))


def write_cut_telemetry(report: RunReport, path) -> Path:
    return _write_csv(Path(path), validate_cut_telemetry(cut_frame(report.cut_records)))


def load_telemetry(path) -> pd.DataFrame:
    """
    Load a telemetry CSV and validate it.

    Raises:
        FileNotFoundError: The file does not exist.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Telemetry file not found: {path}")
    return validate_telemetry(pd.read_csv(path, dtype=_TELEMETRY_DTYPES))


def load_cut_telemetry(path) -> pd.DataFrame:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Cut telemetry file not found: {path}")
    return validate_cut_telemetry(pd.read_csv(path))


def write_summary(report: RunReport, path) -> Path:
    return _write_json(Path(path), report.summary())


def write_json(data: dict, path) -> Path:
    """Atomic JSON write for validation reports and fits."""
    return _write_json(Path(path), data)


def aggregate_frame(rows: list[dict]) -> pd.DataFrame:
    df = pd.DataFrame(rows, columns=list(AGGREGATE_COLUMNS))
    df = df.astype(
        {
            "n": "int64",
            "global_max_entropy": "float64",
            "global_max_bond_dim": "int64",
            "s_peak_entropy": "float64",
            "solved": "Int64",
        }
    )
    return df.sort_values("n", kind="stable").reset_index(drop=True)


def write_aggregate(rows: list[dict], path) -> Path:
    return _write_csv(Path(path), validate_aggregate(aggregate_frame(rows)))


def load_aggregate(path) -> pd.DataFrame:
    """
    Load a scaling aggregate CSV.

    Raises:
        FileNotFoundError: The file does not exist.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Aggregate file not found: {path}")
    df = pd.read_csv(path, dtype={"solved": "Int64"})
    return validate_aggregate(df)


def save_mps(psi: Mps, path) -> Path:
    return _write_json(Path(path), mps_to_dict(psi))


def load_mps(path) -> Mps:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"MPS file not found: {path}")
    return mps_from_dict(json.loads(path.read_text(encoding="utf-8")))

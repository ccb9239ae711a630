"""Quantum wavefunction annealing simulator.

Tracks the ground state of a transverse-field spin glass from the pure-field
point to the classical point with seeded two-site DMRG, recording the
entanglement spectrum along the way, and checks small instances against
exact diagonalisation and brute force.
"""

from qwa_sim.annealer import AnnealParams, RunReport, StepRecord, peak_entropy_location, run_qwa
from qwa_sim.dmrg import DmrgSettings, GroundResult, solve_ground
from qwa_sim.instance import GraphInstance, SpinConfiguration, classical_energy, generate_instance
from qwa_sim.mpo import Mpo, SchedulePoint, build_hamiltonian
from qwa_sim.mps import EntanglementSpectrum, Mps, entanglement_spectrum, overlap, product_plus_x
from qwa_sim.ordering import SitePath, bandwidth, heuristic_path, identity_path

__version__ = "0.1.0"

__all__ = [
    "AnnealParams",
    "DmrgSettings",
    "EntanglementSpectrum",
    "GraphInstance",
    "GroundResult",
    "Mpo",
    "Mps",
    "RunReport",
    "SchedulePoint",
    "SitePath",
    "SpinConfiguration",
    "StepRecord",
    "bandwidth",
    "build_hamiltonian",
    "classical_energy",
    "entanglement_spectrum",
    "generate_instance",
    "heuristic_path",
    "identity_path",
    "overlap",
    "peak_entropy_location",
    "product_plus_x",
    "run_qwa",
    "solve_ground",
]

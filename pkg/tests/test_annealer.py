"""Tests for the annealing loop, its telemetry and the peak-entropy locator."""

import math

import numpy as np
import pytest

from qwa_sim import annealer
from qwa_sim.annealer import (
    AnnealParams,
    RunReport,
    StepRecord,
    fidelity_susceptibilities,
    peak_entropy_location,
    run_qwa,
)
from qwa_sim.dmrg import DmrgSettings
from qwa_sim.errors import InvalidInputError, NumericalFailure
from qwa_sim.exact import brute_force_minimum, exact_cut_spectrum, exact_entropy_profile, ground_space
from qwa_sim.instance import SpinConfiguration, classical_energy, generate_instance
from qwa_sim.mps import all_spectra, basis_state
from qwa_sim.ordering import heuristic_path, identity_path
from qwa_sim.spectrum_metrics import DEFAULT_EPSILONS, chebyshev_m, m_eff


def record(s, entropy, ds=0.1, fidelity=0.99):
    return StepRecord(
        s=s,
        ds=ds,
        fidelity=fidelity,
        energy=-1.0,
        max_bond_dim=2,
        max_vn_entropy=entropy,
        max_index_sigma=0.1,
        m_eff_1e2=1,
        m_eff_1e3=2,
        sweeps_used=1,
    )


def report_of(steps):
    return RunReport(
        steps=steps,
        final_config=SpinConfiguration((1,)),
        final_classical_energy=0.0,
        global_max_bond_dim=2,
        global_max_entropy=max((r.max_vn_entropy for r in steps), default=0.0),
        s_peak_entropy=None,
    )


class TestAnnealParams:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"ds_min": 0.0},
            {"ds_init": 0.2},
            {"ds_min": 0.06},
            {"f_min": 1.0},
            {"f_min": 0.0},
            {"s_final": 0.0},
            {"growth_after": 0},
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(InvalidInputError):
            AnnealParams(**kwargs)

    def test_defaults(self):
        params = AnnealParams()
        assert (params.ds_init, params.ds_min, params.ds_max) == (0.05, 1e-6, 0.1)
        assert (params.f_min, params.s_final, params.growth_after) == (0.9, 0.999, 2)
        assert params.dmrg == DmrgSettings()


class TestRunQwa:
    """End-to-end anneals on small instances."""

    def test_two_spin_ferromagnet(self, two_spin_ferro):
        report = run_qwa(two_spin_ferro, identity_path(2))
        assert not report.aborted
        assert report.final_config.values in ((1, 1), (-1, -1))
        assert report.final_classical_energy == -1.0

    def test_gaussian_chain_matches_brute_force(self, gaussian_chain_8):
        report = run_qwa(gaussian_chain_8, identity_path(8))
        _, best = brute_force_minimum(gaussian_chain_8)
        assert report.final_classical_energy == pytest.approx(best, abs=1e-9)

    def test_telemetry_invariants(self, gaussian_chain_8):
        params = AnnealParams()
        report = run_qwa(gaussian_chain_8, identity_path(8), params)
        assert report.steps, "Expected accepted steps"
        assert report.steps[-1].s == params.s_final
        for prev, cur in zip(report.steps, report.steps[1:]):
            assert cur.s > prev.s
            assert cur.ds == pytest.approx(cur.s - prev.s)
        for r in report.steps:
            assert params.f_min <= r.fidelity <= 1.0
            assert r.max_vn_entropy <= math.log(r.max_bond_dim) + 1e-9
            assert r.ds <= params.ds_max + 1e-15
            assert r.wall_time_ms == 0
        assert report.global_max_bond_dim == max(r.max_bond_dim for r in report.steps)
        assert report.global_max_entropy == max(r.max_vn_entropy for r in report.steps)
        assert report.final_classical_energy == classical_energy(gaussian_chain_8, report.final_config)

    def test_cut_records_respect_bounds(self, gaussian_chain_8):
        report = run_qwa(gaussian_chain_8, identity_path(8))
        assert len(report.cut_records) == 7 * len(report.steps)
        for c in report.cut_records:
            assert c.vn_entropy <= math.log(c.bond_dim) + 1e-9
            for eps, m in c.m_eff.items():
                assert m <= c.chebyshev_m[eps]

    def test_chebyshev_tail_on_recorded_spectra(self, monkeypatch, gaussian_chain_8):
        spectra = []
        original = annealer._measure

        def capture(step, s, psi):
            spectra.extend(all_spectra(psi))
            return original(step, s, psi)

        monkeypatch.setattr(annealer, "_measure", capture)
        run_qwa(gaussian_chain_8, identity_path(8))
        assert spectra
        for spec in spectra:
            for eps in DEFAULT_EPSILONS:
                bound = chebyshev_m(spec, eps)
                assert spec.probs[bound:].sum() < eps, f"cut {spec.cut}: tail beyond {bound} >= {eps}"
                assert m_eff(spec, eps) <= bound

    def test_step_growth_reaches_cap(self):
        """An easy instance accepts every step, so ds doubles up to ds_max."""
        inst = generate_instance("chain", {"n": 4}, "ferro", seed=0)
        report = run_qwa(inst, identity_path(4), AnnealParams(f_min=0.5))
        assert report.rejected_steps == 0
        assert report.steps[0].ds == pytest.approx(0.05)
        assert max(r.ds for r in report.steps) == pytest.approx(0.1)

    def test_energy_continuity(self, gaussian_chain_8):
        report = run_qwa(gaussian_chain_8, identity_path(8))
        bound = gaussian_chain_8.n / 2 + np.abs(gaussian_chain_8.couplings).sum() / 4
        for prev, cur in zip(report.steps, report.steps[1:]):
            assert abs(cur.energy - prev.energy) <= bound * cur.ds + 1e-9

    def test_deterministic(self, gaussian_chain_8):
        a = run_qwa(gaussian_chain_8, identity_path(8))
        b = run_qwa(gaussian_chain_8, identity_path(8))
        assert a.telemetry_rows() == b.telemetry_rows()
        assert a.summary() == b.summary()

    def test_underflow_aborts_without_raising(self, gaussian_chain_8):
        params = AnnealParams(ds_init=0.05, ds_min=0.04, f_min=1 - 1e-12)
        report = run_qwa(gaussian_chain_8, identity_path(8), params)
        assert report.aborted
        assert "underflow" in report.abort_reason
        assert report.steps == []
        assert report.s_peak_entropy is None
        assert report.final_classical_energy == classical_energy(gaussian_chain_8, report.final_config)

    def test_numerical_failure_aborts(self, monkeypatch, gaussian_chain_8):
        def explode(*args, **kwargs):
            raise NumericalFailure("Non-finite local eigenpair", {"sweep": 1, "site": 3})

        monkeypatch.setattr(annealer, "solve_ground", explode)
        report = run_qwa(gaussian_chain_8, identity_path(8))
        assert report.aborted
        assert "site=3" in report.abort_reason

    def test_sector_swaps_near_the_end_are_accepted(self, monkeypatch, two_spin_ferro):
        """Late proposals alternate between |up,up> and |down,down>; the run still finishes."""
        seen_s = []
        calls = iter(range(10_000))
        real_build, real_solve = annealer.build_hamiltonian, annealer.solve_ground

        def build(inst, path, s):
            seen_s.append(s)
            return real_build(inst, path, s)

        def solve(psi, hamiltonian, settings):
            result = real_solve(psi, hamiltonian, settings)
            if seen_s[-1] >= 0.9:
                result.psi = basis_state([1, 1] if next(calls) % 2 == 0 else [-1, -1])
            return result

        monkeypatch.setattr(annealer, "build_hamiltonian", build)
        monkeypatch.setattr(annealer, "solve_ground", solve)
        report = run_qwa(two_spin_ferro, identity_path(2))
        assert not report.aborted, report.abort_reason
        assert report.steps[-1].s == AnnealParams().s_final
        assert report.final_classical_energy == pytest.approx(-1.0)
        late = [r for r in report.steps if r.s >= 0.9]
        assert len(late) >= 2
        assert all(r.fidelity == pytest.approx(1.0) for r in late[1:])

    def test_timing_uses_clock(self, two_spin_ferro):
        ticks = iter(range(0, 10_000))
        report = run_qwa(
            two_spin_ferro, identity_path(2), AnnealParams(timing=True), clock=lambda: next(ticks) * 0.002
        )
        assert all(r.wall_time_ms == 2 for r in report.steps)

    def test_path_length_mismatch(self, two_spin_ferro):
        with pytest.raises(InvalidInputError):
            run_qwa(two_spin_ferro, identity_path(3))


class TestGroundStateTracking:
    def test_uniform_chain_tracks_exact_ground_state(self, monkeypatch):
        """Every accepted state overlaps the exact ground space by at least 0.999."""
        inst = generate_instance("chain", {"n": 8}, "ferro", seed=0)
        path = identity_path(8)
        states = {}
        original = annealer._measure

        def capture(step, s, psi):
            states[s] = psi.to_statevector()
            return original(step, s, psi)

        monkeypatch.setattr(annealer, "_measure", capture)
        report = run_qwa(inst, path, AnnealParams(f_min=0.9, dmrg=DmrgSettings(epsilon=1e-8)))
        assert len(states) == len(report.steps)

        for s, v in states.items():
            values, vectors = ground_space(inst, path, s, k=2)
            k = 2 if values[1] - values[0] < 1e-8 else 1
            weight = np.linalg.norm(vectors[:, :k].T @ v) / np.linalg.norm(v)
            assert weight >= 0.999, f"s={s}: overlap with exact ground space {weight}"

    def test_spectra_agree_with_exact_state(self, monkeypatch):
        inst = generate_instance("chain", {"n": 8}, "ferro", seed=0)
        path = identity_path(8)
        states = {}
        original = annealer._measure

        def capture(step, s, psi):
            states[s] = psi
            return original(step, s, psi)

        monkeypatch.setattr(annealer, "_measure", capture)
        run_qwa(inst, path, AnnealParams(s_final=0.5, dmrg=DmrgSettings(epsilon=1e-12)))
        psi = states[0.5]
        values, vectors = ground_space(inst, path, 0.5, k=1)
        exact = exact_cut_spectrum(vectors[:, 0], 4).probs
        ours = all_spectra(psi)[3].probs
        size = max(len(exact), len(ours))
        padded = [np.pad(p, (0, size - len(p))) for p in (ours, exact)]
        np.testing.assert_allclose(padded[0], padded[1], atol=1e-8)


class TestPeakEntropyLocation:
    def test_argmax(self):
        report = report_of([record(0.2, 0.1), record(0.5, 0.5), record(0.8, 0.3)])
        assert peak_entropy_location(report) == (0.5, 0.5)

    def test_single_step(self):
        assert peak_entropy_location(report_of([record(0.3, 0.2)])) == (0.3, 0.2)

    def test_ties_go_to_smaller_s(self):
        report = report_of([record(0.2, 0.1), record(0.4, 0.7), record(0.6, 0.7)])
        assert peak_entropy_location(report) == (0.4, 0.7)

    def test_empty_run_raises(self):
        with pytest.raises(InvalidInputError):
            peak_entropy_location(report_of([]))

    def test_matches_exact_entropy_maximum(self):
        """The QWA entropy peak of a uniform chain sits near the exact one."""
        inst = generate_instance("chain", {"n": 10}, "ferro", seed=0)
        path = identity_path(10)
        report = run_qwa(inst, path)
        s_peak, _ = peak_entropy_location(report)
        assert report.s_peak_entropy == s_peak

        grid = [round(0.05 * k, 2) for k in range(1, 20)]
        profile = exact_entropy_profile(inst, path, grid)
        s_exact = max(profile, key=lambda p: (p[1], -p[0]))[0]
        assert abs(s_peak - s_exact) <= 0.1, f"QWA peak at {s_peak}, exact peak at {s_exact}"


class TestFidelitySusceptibility:
    def test_formula(self):
        r = record(0.5, 0.1, ds=0.1, fidelity=0.995)
        assert r.fidelity_susceptibility == pytest.approx(2 * 0.005 / 0.01)

    def test_listed_per_step(self, two_spin_ferro):
        report = run_qwa(two_spin_ferro, identity_path(2))
        chis = fidelity_susceptibilities(report)
        assert [s for s, _ in chis] == [r.s for r in report.steps]
        assert all(chi >= 0 for _, chi in chis)


@pytest.mark.slow
class TestOracleEquivalence:
    """Final answers equal brute-force minima on seeded gaussian chains."""

    @pytest.mark.parametrize("seed", range(20))
    def test_n8(self, seed):
        inst = generate_instance("chain", {"n": 8}, "gaussian", seed=seed)
        report = run_qwa(inst, identity_path(8))
        assert not report.aborted, report.abort_reason
        assert report.steps[-1].s == AnnealParams().s_final
        assert report.final_classical_energy == pytest.approx(brute_force_minimum(inst)[1], abs=1e-9)

    @pytest.mark.parametrize("seed", range(5))
    def test_n16(self, seed):
        inst = generate_instance("chain", {"n": 16}, "gaussian", seed=seed)
        report = run_qwa(inst, identity_path(16))
        assert not report.aborted, report.abort_reason
        assert report.steps[-1].s == AnnealParams().s_final
        assert report.final_classical_energy == pytest.approx(brute_force_minimum(inst)[1], abs=1e-9)

    @pytest.mark.parametrize("seed", range(3))
    def test_two_leg_strip(self, seed):
        inst = generate_instance("grid", {"w": 2, "h": 6}, "gaussian", seed=seed)
        report = run_qwa(inst, heuristic_path(inst))
        assert not report.aborted, report.abort_reason
        assert report.steps[-1].s == AnnealParams().s_final
        assert report.final_classical_energy == pytest.approx(brute_force_minimum(inst)[1], abs=1e-9)

#!/usr/bin/env python3
"""
Verify Setup Script

Checks that the environment can run the simulator: interpreter version,
required packages, and a smoke anneal of a small chain compared against
the brute-force minimum.

Usage:
    python scripts/verify_setup.py
"""

import sys
from importlib import metadata

REQUIRED_PACKAGES = ["numpy", "scipy", "networkx", "opt-einsum", "pandas", "pandera", "python-dotenv"]
MIN_PYTHON = (3, 10)


def check_python_version():
    """Check Python version is 3.10+."""
    version = sys.version_info
    if (version.major, version.minor) < MIN_PYTHON:
        return False, f"Python {version.major}.{version.minor} (need {MIN_PYTHON[0]}.{MIN_PYTHON[1]}+)"
    return True, f"Python {version.major}.{version.minor}.{version.micro}"


def check_package_installed(package_name):
    """Check if a package is installed and report its version."""
    try:
        return True, metadata.version(package_name)
    except metadata.PackageNotFoundError:
        return False, "not installed"


def check_smoke_anneal(n=6, seed=1):
    """Anneal a small gaussian chain and compare with brute force."""
    try:
        from qwa_sim import generate_instance, heuristic_path, run_qwa
        from qwa_sim.exact import brute_force_minimum
    except ImportError as e:
        return False, f"qwa_sim not importable: {e}"

    inst = generate_instance("chain", {"n": n}, "gaussian", seed)
    report = run_qwa(inst, heuristic_path(inst))
    _, best = brute_force_minimum(inst)
    if report.aborted:
        return False, f"anneal aborted: {report.abort_reason}"
    if abs(report.final_classical_energy - best) > 1e-9:
        return False, f"energy {report.final_classical_energy:.10f} != brute force {best:.10f}"
    return True, f"n={n} chain solved, E={best:.6f}, {len(report.steps)} steps"


def run_checks():
    checks = [("Python Version", *check_python_version())]
    for package in REQUIRED_PACKAGES:
        checks.append((f"Package: {package}", *check_package_installed(package)))
    if all(passed for _, passed, _ in checks):
        checks.append(("Smoke anneal", *check_smoke_anneal()))
    return checks


def main():
    print("=" * 60)
    print("  QWA simulator - Environment Verification")
    print("=" * 60)
    print()

    checks = run_checks()

    print("Environment Checks:")
    print("-" * 60)
    for name, passed, info in checks:
        status = "[PASS]" if passed else "[FAIL]"
        print(f"  {status} {name}: {info}")
    print("-" * 60)

    if all(passed for _, passed, _ in checks):
        print()
        print("  All checks passed!")
        print()
        return 0

    print()
    print("  Some checks failed. Common fixes:")
    print("    - Python version: Install Python 3.10 or higher")
    print("    - Missing packages: Run 'pip install -r requirements.txt'")
    print("    - qwa_sim not importable: Run 'pip install -e .' from the repository root")
    print()
    return 1


if __name__ == "__main__":
    sys.exit(main())

"""
Command-line entry point.

Subcommands:
    gen       generate an instance file
    run       anneal one instance and write telemetry and a summary
    validate  anneal one instance and compare with the brute-force minimum
    scaling   run a built-in scaling scenario over a size list

Exit status: 0 on success, 1 when a run aborted or a validation failed,
2 for bad arguments, missing files or instances beyond exact capacity.

Usage:
    qwa run --kind chain --n 16 --dist gaussian --seed 3 --out results/
    qwa scaling --scenario scaling_1d --sizes 16,32,64 --workers 3
"""

import argparse
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

from qwa_sim import io
from qwa_sim.annealer import AnnealParams, run_qwa
from qwa_sim.config import Settings, configure_logging
from qwa_sim.dmrg import DmrgSettings
from qwa_sim.errors import ConfigError, QwaError
from qwa_sim.exact import brute_force_minimum
from qwa_sim.instance import DISTRIBUTIONS, GraphInstance, generate_instance
from qwa_sim.ordering import resolve_path
from qwa_sim.scaling import SCALING_SCENARIOS, SOLVED_TOL, run_scaling

logger = logging.getLogger(__name__)

SCENARIOS = ("gen", "run", "validate") + SCALING_SCENARIOS
EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


@dataclass
class ExperimentConfig:
    """Everything one CLI invocation needs.

    Attributes:
        scenario: ``gen``, ``run``, ``validate`` or a scaling scenario name.
        instance_path: Instance file to load; generator fields are used when None.
        kind, size_params, dist, seed: Generator spec.
        sizes: Size list for scaling scenarios.
        params: Anneal and DMRG parameters.
        out_dir: Directory for artifacts.
        path_spec: ``identity``, ``heuristic`` or an explicit permutation.
        workers: Process count for scaling scenarios.
    """

    scenario: str
    out_dir: Path
    instance_path: Path | None = None
    kind: str = "chain"
    size_params: dict = field(default_factory=dict)
    dist: str = "gaussian"
    seed: int = 0
    sizes: tuple[int, ...] = ()
    params: AnnealParams = field(default_factory=AnnealParams)
    path_spec: str = "heuristic"
    workers: int = 1

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"Unknown scenario {self.scenario!r}; expected one of {SCENARIOS}")
        if self.scenario in SCALING_SCENARIOS and not self.sizes:
            raise ConfigError(f"Scenario {self.scenario} needs --sizes")
        if any(n < 2 for n in self.sizes):
            raise ConfigError(f"Sizes must be at least 2, got {list(self.sizes)}")
        if self.workers < 1:
            raise ConfigError(f"--workers must be positive, got {self.workers}")
        if self.seed < 0 or self.seed >= 2**64:
            raise ConfigError(f"--seed must be an unsigned 64-bit integer, got {self.seed}")

    def instance(self) -> GraphInstance:
        if self.instance_path is not None:
            return io.load_instance(self.instance_path)
        return generate_instance(self.kind, self.size_params, self.dist, self.seed)

    def stem(self, inst: GraphInstance) -> str:
        """Artifact name prefix: the instance file stem, or the generator spec."""
        if self.instance_path is not None:
            return Path(self.instance_path).stem
        size = "x".join(str(inst.params[k]) for k in ("w", "h")) if inst.kind == "grid" else str(inst.n)
        return f"{inst.kind}_{size}_{inst.dist}_seed{inst.seed}"


def _ensure_out_dir(out_dir: Path) -> None:
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"Output directory {out_dir} is not writable: {exc}") from exc


def _run_single(cfg: ExperimentConfig, validate: bool) -> int:
    inst = cfg.instance()
    path = resolve_path(inst, cfg.path_spec)
    stem = cfg.stem(inst)
    brute = brute_force_minimum(inst) if validate else None

    report = run_qwa(inst, path, cfg.params)
    telemetry = io.write_telemetry(report, cfg.out_dir / f"{stem}_telemetry.csv")
    io.write_cut_telemetry(report, cfg.out_dir / f"{stem}_cuts.csv")
    summary = io.write_summary(report, cfg.out_dir / f"{stem}_summary.json")
    print(f"Telemetry: {telemetry}")
    print(f"Summary:   {summary}")
    print(f"Final energy {report.final_classical_energy:.12g}, max entropy {report.global_max_entropy:.6f}")
    status = EXIT_OK
    if report.aborted:
        print(f"Run aborted: {report.abort_reason}", file=sys.stderr)
        status = EXIT_FAILED

    if validate:
        best_config, best_energy = brute
        match = not report.aborted and abs(report.final_classical_energy - best_energy) <= SOLVED_TOL
        validation = io.write_json(
            {
                "n": inst.n,
                "qwa_energy": report.final_classical_energy,
                "qwa_config": list(report.final_config.values),
                "brute_force_energy": best_energy,
                "brute_force_config": list(best_config.values),
                "tolerance": SOLVED_TOL,
                "match": match,
                "aborted": report.aborted,
            },
            cfg.out_dir / f"{stem}_validation.json",
        )
        print(f"Validation: {validation}")
        print("[PASS] QWA matches brute force" if match else "[FAIL] QWA differs from brute force")
        if not match:
            status = EXIT_FAILED
    return status


def run_scenario(cfg: ExperimentConfig) -> int:
    """Execute ``cfg`` and return the process exit status."""
    try:
        _ensure_out_dir(cfg.out_dir)
        if cfg.scenario == "gen":
            inst = cfg.instance()
            path = io.save_instance(inst, cfg.out_dir / f"{cfg.stem(inst)}.json")
            print(f"Instance: {path}")
            return EXIT_OK
        if cfg.scenario in ("run", "validate"):
            return _run_single(cfg, validate=cfg.scenario == "validate")
        aborted = run_scaling(
            cfg.scenario, cfg.sizes, cfg.seed, cfg.params, cfg.out_dir, cfg.path_spec, cfg.workers
        )
        print(f"Scenario {cfg.scenario} written to {cfg.out_dir}")
        return EXIT_FAILED if aborted else EXIT_OK
    except (QwaError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def _sizes(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid size list {text!r}") from exc


def _add_shared(p: argparse.ArgumentParser, settings: Settings) -> None:
    dmrg, anneal = DmrgSettings(), AnnealParams()
    p.add_argument("--seed", type=int, default=0, help="Generator seed (unsigned 64-bit)")
    p.add_argument("--out", type=Path, default=settings.out_dir, help="Output directory")
    p.add_argument("--path", default="heuristic", help="identity, heuristic or a permutation like 2,0,1")
    p.add_argument("--eps", type=float, default=dmrg.epsilon, help="Discarded-probability tolerance")
    p.add_argument("--m-max", type=int, default=dmrg.m_max, help="Bond-dimension cap")
    p.add_argument("--energy-tol", type=float, default=dmrg.energy_tol)
    p.add_argument("--max-sweeps", type=int, default=dmrg.max_sweeps)
    p.add_argument("--eig-tol", type=float, default=dmrg.eig_tol)
    p.add_argument("--eig-max-iter", type=int, default=dmrg.eig_max_iter)
    p.add_argument("--f-min", type=float, default=anneal.f_min, help="Fidelity acceptance threshold")
    p.add_argument("--ds", type=float, default=anneal.ds_init, help="Initial step in s")
    p.add_argument("--ds-min", type=float, default=anneal.ds_min)
    p.add_argument("--ds-max", type=float, default=anneal.ds_max)
    p.add_argument("--growth-after", type=int, default=anneal.growth_after)
    p.add_argument("--s-final", type=float, default=anneal.s_final, help="Readout point")
    p.add_argument("--timing", action="store_true", default=settings.timing, help="Record wall time per step")
    p.add_argument("--log-level", default=settings.log_level)


def _add_generator(p: argparse.ArgumentParser) -> None:
    p.add_argument("--kind", choices=("chain", "grid", "regular"), default="chain")
    p.add_argument("--n", type=int, help="Spin count (chain, regular)")
    p.add_argument("--w", type=int, help="Grid width")
    p.add_argument("--h", type=int, help="Grid height")
    p.add_argument("--d", type=int, default=3, help="Degree (regular)")
    p.add_argument("--dist", choices=DISTRIBUTIONS, default="gaussian")


def build_parser(settings: Settings | None = None) -> argparse.ArgumentParser:
    settings = settings or Settings.from_env()
    parser = argparse.ArgumentParser(prog="qwa", description="Quantum wavefunction annealing simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="Generate an instance file")
    _add_generator(gen)
    _add_shared(gen, settings)

    for name, text in (("run", "Anneal one instance"), ("validate", "Anneal and compare with brute force")):
        p = sub.add_parser(name, help=text)
        _add_generator(p)
        p.add_argument("--instance", type=Path, help="Instance JSON file (overrides the generator flags)")
        _add_shared(p, settings)

    scaling = sub.add_parser("scaling", help="Run a built-in scaling scenario")
    scaling.add_argument("--scenario", choices=SCALING_SCENARIOS, required=True)
    scaling.add_argument(
        "--sizes", type=_sizes, required=True, help="Comma-separated sizes (strip lengths for strip_2d)"
    )
    scaling.add_argument("--workers", type=int, default=1)
    _add_shared(scaling, settings)
    return parser


def _size_params(args: argparse.Namespace) -> dict:
    if args.kind == "grid":
        if args.w is None or args.h is None:
            raise ConfigError("--kind grid needs --w and --h")
        return {"w": args.w, "h": args.h}
    if args.n is None:
        raise ConfigError(f"--kind {args.kind} needs --n")
    return {"n": args.n, "d": args.d} if args.kind == "regular" else {"n": args.n}


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    """Translate parsed arguments into an ExperimentConfig.

    Raises:
        ConfigError: Inconsistent or out-of-range arguments.
    """
    try:
        params = AnnealParams(
            ds_init=args.ds,
            ds_min=args.ds_min,
            ds_max=args.ds_max,
            f_min=args.f_min,
            s_final=args.s_final,
            growth_after=args.growth_after,
            dmrg=DmrgSettings(
                epsilon=args.eps,
                m_max=args.m_max,
                energy_tol=args.energy_tol,
                max_sweeps=args.max_sweeps,
                eig_tol=args.eig_tol,
                eig_max_iter=args.eig_max_iter,
            ),
            timing=args.timing,
        )
    except QwaError as exc:
        raise ConfigError(str(exc)) from exc

    common = dict(out_dir=Path(args.out), seed=args.seed, params=params, path_spec=args.path)
    if args.command == "scaling":
        return ExperimentConfig(scenario=args.scenario, sizes=args.sizes, workers=args.workers, **common)
    instance_path = getattr(args, "instance", None)
    return ExperimentConfig(
        scenario=args.command,
        instance_path=instance_path,
        kind=args.kind,
        size_params={} if instance_path else _size_params(args),
        dist=args.dist,
        **common,
    )


def main(argv: list[str] | None = None) -> int:
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE

    configure_logging(args.log_level)
    try:
        cfg = config_from_args(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return run_scenario(cfg)


if __name__ == "__main__":
    sys.exit(main())

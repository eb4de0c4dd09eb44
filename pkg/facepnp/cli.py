"""Command-line entry point of the experiments.

Every subcommand writes JSON (or JSON lines) to a file or to stdout; logs
go to stderr. Exit codes: 0 success, 1 usage error, 2 data error, 3 an
``--assert`` threshold was missed.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional

from pydantic import ValidationError

from facepnp.config import config
from facepnp.container import Container
from facepnp.core.domain.errors import DatasetError, FacePnPError
from facepnp.core.domain.scene import Dataset, FinetuneConfig, SceneConfig
from facepnp.infrastructure.dto.reportdto import EvalReportDTO, SampleRowDTO
from facepnp.infrastructure.utils.blobs import write_bytes
from facepnp.infrastructure.utils.consts import PCA_MODEL_FILE, SHAPES_DIR

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_THRESHOLD = 3

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

MIN_WIN_RATE = 0.7


class UsageError(Exception):
    """Bad arguments or an unreadable configuration file."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        raise UsageError(f"{self.prog}: {message}")


def _read_config_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read config {path}: {e}") from e


def _write_text(path: str, text: str) -> None:
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise DatasetError(f"cannot create {target.parent}: {e}") from e
    write_bytes(target, text.encode("utf-8"))


def _emit(line: str) -> None:
    sys.stdout.write(line + "\n")


def _add_weighting(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--weighted", dest="weighted", action="store_true", default=None,
                       help="Weight the PnP by the landmark sigmas (default: FACEPNP_WEIGHTED_PNP).")
    group.add_argument("--unweighted", dest="weighted", action="store_false", default=None,
                       help="Ignore the landmark sigmas.")


def _load_dataset(container: Container, path: str) -> Dataset:
    return container.dataset_repository().read(Path(path))


def cmd_synth_gen(args: argparse.Namespace, container: Container) -> int:
    """Generate a shape space and a dataset of synthetic scenes."""
    cfg = SceneConfig.model_validate_json(_read_config_text(args.config))
    synth_service = container.synth_service()

    model, meshes = synth_service.gen_shape_space(cfg)
    samples = synth_service.gen_dataset(model, cfg)

    out = Path(args.out)
    container.dataset_repository().write(out, Dataset(cfg=cfg, samples=samples))
    container.mesh_repository().save(out / SHAPES_DIR, meshes)
    container.pca_model_repository().save(out / PCA_MODEL_FILE, model)
    logger.info("Generated %d samples (N=%d, K=%d) in %s", len(samples), cfg.n_vertices, cfg.k, out)
    return EXIT_OK


def cmd_pca_build(args: argparse.Namespace, container: Container) -> int:
    """Build a PCA model from a mesh collection directory."""
    meshes = container.mesh_repository().load(Path(args.meshes))
    model = container.pca_service().build(meshes, args.k)
    out = Path(args.out)
    try:
        out.parent.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise DatasetError(f"cannot create {out.parent}: {e}") from e
    container.pca_model_repository().save(out, model)
    return EXIT_OK


def cmd_solve(args: argparse.Namespace, container: Container) -> int:
    """Solve every sample and print one JSON line each, then the aggregate."""
    dataset = _load_dataset(container, args.dataset)
    report, outcomes = container.evaluation_service().run_pose_eval(dataset, weighted=args.weighted)
    for outcome in outcomes:
        _emit(SampleRowDTO.from_evaluation(outcome).model_dump_json())
    _emit(EvalReportDTO.from_report(report).model_dump_json())
    return EXIT_OK


def cmd_eval(args: argparse.Namespace, container: Container) -> int:
    """Write the aggregated pose evaluation report."""
    dataset = _load_dataset(container, args.dataset)
    report, _ = container.evaluation_service().run_pose_eval(dataset, weighted=args.weighted)
    dto = EvalReportDTO.from_report(report)
    _write_text(args.out, dto.to_json() + "\n")
    if args.csv:
        _write_text(args.csv, dto.csv_header() + "\n" + dto.to_csv_row() + "\n")
    logger.info(
        "ADD %.4f mm, MAE_r %.4f deg, MAE_t %.4f mm over %d samples (%d failed)",
        report.add, report.mae_r, report.mae_t, report.sample_count, report.failure_count,
    )
    return EXIT_OK


def cmd_grad_check(args: argparse.Namespace, container: Container) -> int:
    """Print the finite-difference gradient audit table."""
    report = container.audit_service().run_grad_audit(args.seed, args.n)
    _emit(report.model_dump_json(indent=2))
    if args.assert_ and not report.passed:
        failed = [row.op for row in report.rows if not row.passed]
        logger.error("Gradient audit failed for %s", ", ".join(failed))
        return EXIT_THRESHOLD
    return EXIT_OK


def cmd_finetune_bench(args: argparse.Namespace, container: Container) -> int:
    """Run the PnP finetune benchmark on a generated dataset."""
    cfg = FinetuneConfig.model_validate_json(_read_config_text(args.config))
    dataset = _load_dataset(container, args.dataset)
    model = container.pca_model_repository().load(Path(args.dataset) / PCA_MODEL_FILE)

    result = container.benchmark_service().run_finetune_benchmark(dataset, model, cfg)
    _write_text(args.out, result.model_dump_json(indent=2) + "\n")

    if args.assert_:
        improved = result.mean_add_after < result.mean_add_before
        if result.win_rate < MIN_WIN_RATE or not improved:
            logger.error(
                "Benchmark below threshold: win rate %.3f (need %.2f), mean ADD %.4f -> %.4f",
                result.win_rate, MIN_WIN_RATE, result.mean_add_before, result.mean_add_after,
            )
            return EXIT_THRESHOLD
    return EXIT_OK


def cmd_recon_eval(args: argparse.Namespace, container: Container) -> int:
    """Compare noisy direct vertices against their PCA projection."""
    dataset = _load_dataset(container, args.dataset)
    model = container.pca_model_repository().load(Path(args.dataset) / PCA_MODEL_FILE)
    report = container.evaluation_service().run_reconstruction_eval(
        dataset, model, args.noise, seed=dataset.cfg.seed
    )
    _write_text(args.out, report.model_dump_json(indent=2) + "\n")
    return EXIT_OK


COMMANDS: Dict[str, Callable[[argparse.Namespace, Container], int]] = {
    "synth-gen": cmd_synth_gen,
    "pca-build": cmd_pca_build,
    "solve": cmd_solve,
    "eval": cmd_eval,
    "grad-check": cmd_grad_check,
    "finetune-bench": cmd_finetune_bench,
    "recon-eval": cmd_recon_eval,
}


def build_parser() -> argparse.ArgumentParser:
    """Return the argument parser of every subcommand."""
    parser = _Parser(prog="facepnp", description="Uncertainty-weighted PnP face pose experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth-gen", help="Generate a synthetic dataset.")
    p.add_argument("--config", required=True, help="SceneConfig JSON file.")
    p.add_argument("--out", required=True, help="Output dataset directory.")

    p = sub.add_parser("pca-build", help="Build a PCA model from a mesh collection.")
    p.add_argument("--meshes", required=True, help="Directory holding meshes.json and meshes.bin.")
    p.add_argument("--k", type=int, required=True, help="Number of components.")
    p.add_argument("--out", required=True, help="Output model file.")

    p = sub.add_parser("solve", help="Solve every sample, print JSON lines.")
    p.add_argument("--dataset", required=True, help="Dataset directory.")
    _add_weighting(p)

    p = sub.add_parser("eval", help="Write the aggregated pose report.")
    p.add_argument("--dataset", required=True, help="Dataset directory.")
    p.add_argument("--out", required=True, help="Output JSON report.")
    p.add_argument("--csv", default=None, help="Also write the report as a CSV row.")
    _add_weighting(p)

    p = sub.add_parser("grad-check", help="Audit analytic gradients against finite differences.")
    p.add_argument("--seed", type=int, default=0, help="Root seed.")
    p.add_argument("--n", type=int, default=20, help="Instances per operation.")
    p.add_argument("--assert", dest="assert_", action="store_true", help="Exit 3 if an operation fails.")

    p = sub.add_parser("finetune-bench", help="Run the PnP finetune benchmark.")
    p.add_argument("--dataset", required=True, help="Dataset directory (with pca_model.bin).")
    p.add_argument("--config", required=True, help="FinetuneConfig JSON file.")
    p.add_argument("--out", required=True, help="Output JSON result.")
    p.add_argument("--assert", dest="assert_", action="store_true",
                   help=f"Exit 3 unless win rate >= {MIN_WIN_RATE} and mean ADD decreased.")

    p = sub.add_parser("recon-eval", help="Compare direct and PCA reconstructions.")
    p.add_argument("--dataset", required=True, help="Dataset directory (with pca_model.bin).")
    p.add_argument("--noise", type=float, required=True, help="Vertex noise std (mm).")
    p.add_argument("--out", required=True, help="Output JSON report.")

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Parse the arguments, run the subcommand and return its exit code."""
    logging.basicConfig(level=config.LOG_LEVEL, format=LOG_FORMAT, stream=sys.stderr)
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args, Container())
    except (UsageError, ValidationError) as e:
        logger.error("%s", e)
        return EXIT_USAGE
    except FacePnPError as e:
        logger.error("%s: %s", type(e).__name__, e)
        return EXIT_DATA
    except ValueError as e:
        logger.error("%s", e)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())

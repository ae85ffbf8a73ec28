"""``factorhd`` command line: run experiments and manage codebook files.

Exit status: 0 on success, 1 on usage errors, 2 on runtime errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .. import kernels
from ..codebook import generate_hierarchy, load, save
from ..errors import FactorHDError, UnsupportedConfigurationError
from ..factorizer import ThresholdConfig
from .experiment import MODELS, ExperimentConfig, run_experiment, scaling_study, sweep_threshold
from .report import format_result, format_scaling, format_sweep

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2
DEFAULT_SWEEP = "0.02:0.08:0.005"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage; we want 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma list of integers, got {text!r}") from None
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError(f"expected positive integers, got {text!r}")
    return values


def _th_values(text: str) -> list[float]:
    """Either ``a,b,c`` or ``start:stop:step`` (stop inclusive)."""
    try:
        if ":" in text:
            start, stop, step = (float(v) for v in text.split(":"))
            count = int(round((stop - start) / step)) + 1
            return [round(start + i * step, 10) for i in range(count)]
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad threshold list {text!r}") from None


def _experiment_flags(p: argparse.ArgumentParser, need_branching: bool = True, objects: int = 1) -> None:
    p.add_argument("--dim", type=int, required=True, help="hypervector dimension D")
    p.add_argument("--classes", type=int, default=3, help="number of classes F")
    if need_branching:
        p.add_argument("--branching", type=_int_list, required=True, help="items per level, comma list")
    p.add_argument("--objects", type=int, default=objects, help="objects per target N")
    p.add_argument("--trials", type=int, default=1024)
    p.add_argument("--batch", type=int, default=512, help="trials sharing one codebook")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--model", choices=MODELS, default="factorhd")
    th = p.add_mutually_exclusive_group()
    th.add_argument("--th", type=float, help="fixed similarity threshold")
    th.add_argument("--th-auto", action="store_true", help="fitted threshold (default)")
    p.add_argument("--n-assumed", type=int, help="object count fed to the fitted threshold")
    p.add_argument("--halve-dim", action="store_true", help="give FactorHD dim/2 to match storage")
    p.add_argument("--acceptance", choices=("batch", "sequential"), default="batch")
    p.add_argument("--codebook-scope", choices=("batch", "trial"), default="batch")
    p.add_argument("--max-iterations", type=int, default=200, help="resonator iteration cap")
    p.add_argument("--null-prob", type=float, default=0.0, help="chance a class is absent")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--out", type=Path, help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "jsonl"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="factorhd", description="FactorHD experiments and codebook tools.")
    parser.add_argument("--kernels", choices=("auto", *kernels.available_backends()), default="auto")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    _experiment_flags(sub.add_parser("rep1", help="single object, one level"))
    _experiment_flags(sub.add_parser("rep2", help="single object, multi-level hierarchy"))
    _experiment_flags(sub.add_parser("rep3", help="multi-object targets"), objects=2)

    sw = sub.add_parser("sweep-th", help="accuracy against fixed thresholds")
    _experiment_flags(sw, objects=3)
    sw.add_argument("--th-values", type=_th_values, default=_th_values(DEFAULT_SWEEP), help="a,b,c or start:stop:step")

    sc = sub.add_parser("scaling", help="cost against items per class")
    _experiment_flags(sc, need_branching=False)
    sc.add_argument("--m-values", type=_int_list, default=(16, 64, 256))

    cb = sub.add_parser("codebook", help="generate or inspect codebook files")
    cbsub = cb.add_subparsers(dest="action", required=True, parser_class=_Parser)
    gen = cbsub.add_parser("gen", help="generate and save a hierarchy")
    gen.add_argument("--dim", type=int, required=True)
    gen.add_argument("--classes", type=int, default=3)
    gen.add_argument("--branching", type=_int_list, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", type=Path, required=True)
    ins = cbsub.add_parser("inspect", help="summarize a saved hierarchy")
    ins.add_argument("path", type=Path)
    return parser


def _config(args, branching=None) -> ExperimentConfig:
    if args.th is not None:
        th = ThresholdConfig.fixed(args.th)
    else:
        th = ThresholdConfig.auto(args.n_assumed)
    try:
        return ExperimentConfig(
            model=args.model,
            dim=args.dim,
            num_classes=args.classes,
            branching=branching or args.branching,
            num_objects=args.objects,
            trials=args.trials,
            batch_size=args.batch,
            threshold=th,
            seed=args.seed,
            dimension_halving=args.halve_dim,
            acceptance=args.acceptance,
            codebook_scope=args.codebook_scope,
            max_iterations=args.max_iterations,
            null_prob=args.null_prob,
        )
    except UnsupportedConfigurationError:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def _inspect(path: Path) -> str:
    h = load(path)
    info = {
        "dim": h.dim,
        "num_classes": h.num_classes,
        "branching": list(h.branching),
        "seed": h.seed,
        "items_per_class": [int(lv.shape[1]) for lv in h.levels],
        "total_items": h.num_classes * sum(int(lv.shape[1]) for lv in h.levels),
        "max_abs_label_similarity": _max_offdiag(h.labels),
    }
    return json.dumps(info, indent=2) + "\n"


def _max_offdiag(rows: np.ndarray) -> float:
    if rows.shape[0] < 2:
        return 0.0
    r = rows.astype(np.int64)
    g = np.abs(r @ r.T) / rows.shape[1]
    np.fill_diagonal(g, 0)
    return float(g.max())


def _dispatch(args) -> str | None:
    cmd = args.command
    if cmd == "codebook":
        if args.action == "gen":
            save(generate_hierarchy(args.dim, args.classes, args.branching, args.seed), args.out)
            return None
        return _inspect(args.path)

    if cmd == "rep1" and len(args.branching) != 1:
        raise UsageError("rep1 takes a single-level --branching (use rep2 for hierarchies)")
    if cmd in ("rep1", "rep2") and args.objects != 1:
        raise UsageError(f"{cmd} decodes single objects; use rep3 for --objects > 1")
    if cmd == "scaling":
        cfg = _config(args, branching=(args.m_values[0],))
        return format_scaling(scaling_study(cfg, args.m_values, args.jobs), args.format)
    cfg = _config(args)
    if cmd == "sweep-th":
        return format_sweep(sweep_threshold(cfg, args.th_values, args.jobs), args.format)
    return format_result(run_experiment(cfg, args.jobs), args.format)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with EXIT_USAGE on bad flags
    if args.kernels != "auto":
        kernels.set_backend(args.kernels)
    try:
        text = _dispatch(args)
    except (UsageError, UnsupportedConfigurationError) as exc:
        parser.print_usage(sys.stderr)
        print(f"factorhd: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FactorHDError, OSError, ValueError) as exc:
        print(f"factorhd: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    if text is not None:
        _emit(text, args.out if args.command != "codebook" else None)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point.

    powertrace <suite> [--config PATH] [--out DIR] [--seed INT] [--jobs INT]
               [per-suite overrides: --k --eps --qubits --rank --shots --K ...]

Each suite writes records.json, table.csv, and summary.json under
out/<suite>/<config-hash>/ and exits 0 when its aggregate pass condition
holds, 1 when it does not, and 2 on configuration errors.
"""

from __future__ import annotations

import argparse
import sys

from .errors import PowertraceError, ValidationError
from .suites import SUITES, load_config_file, resolve_config, run_suite_config


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part != ""]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="powertrace",
        description="Trace-power estimation experiments with exact self-validation.",
    )
    sub = parser.add_subparsers(dest="suite", required=True, metavar="|".join(SUITES))
    for suite in SUITES:
        sp = sub.add_parser(suite, help=f"run the {suite} suite")
        sp.add_argument("--config", help="flat JSON config file")
        sp.add_argument("--out", default="out", help="output directory root (default: out)")
        sp.add_argument("--seed", type=int, help="master RNG seed override")
        sp.add_argument("--jobs", type=int, default=1, help="parallel record workers")
        sp.add_argument("--k", type=_int_list, help="comma-separated k values")
        sp.add_argument("--eps", type=float, help="target additive accuracy")
        sp.add_argument("--qubits", type=int, help="system qubit count")
        sp.add_argument("--rank", type=int, help="state rank")
        sp.add_argument("--shots", type=_int_list, help="comma-separated shot counts")
        sp.add_argument("--K", type=int, dest="ae_grid", help="force the amplitude-estimation grid size")
        sp.add_argument("--runs", type=int, help="number of records to run")
        sp.add_argument("--q", type=float, help="weight parameter for the reduction suite")
        sp.add_argument("--c", type=float, help="bias constant for the discrimination suite")
    return parser


def _overrides_from_args(suite: str, args: argparse.Namespace) -> dict:
    over: dict = {}
    if args.seed is not None:
        over["seed"] = args.seed
    if args.eps is not None:
        over["eps" if suite != "apps" else "vd_eps"] = args.eps
    if args.qubits is not None:
        over["qubits"] = args.qubits
    if args.rank is not None:
        over["rank"] = args.rank
    if args.runs is not None:
        over["runs" if suite != "apps" else "vd_runs"] = args.runs
    if args.k is not None:
        if suite == "baseline":
            over["k"] = args.k[0]
        elif suite == "apps":
            over["vd_k"] = args.k[0]
        else:
            over["k_values"] = args.k
    if args.shots is not None:
        over["shots_list"] = args.shots
    if args.ae_grid is not None:
        over["ae_grid_override"] = args.ae_grid
    if args.q is not None:
        over["q_values"] = [args.q]
    if args.c is not None:
        over["c"] = args.c
    return over


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    suite = args.suite
    try:
        file_cfg = load_config_file(args.config) if args.config else None
        cfg = resolve_config(suite, file_cfg, _overrides_from_args(suite, args))
        code = run_suite_config(suite, cfg, out_root=args.out, jobs=args.jobs)
    except ValidationError as exc:
        print(f"powertrace: {exc}", file=sys.stderr)
        return 2
    except PowertraceError as exc:
        print(f"powertrace: {exc}", file=sys.stderr)
        return 1
    return code


if __name__ == "__main__":
    sys.exit(main())

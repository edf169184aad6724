"""
CLI for harmonic_bimodules

This script provides a command-line interface to the Workbench, allowing
users to list builtin groups, compute single objects (irreps, harmonic
spaces, saturations, the Poisson boundary, ...) and run theorem-verification
suites over generated or file-based corpora.

---

Structure:

1. Helpers
   - `_configure_logging(verbose: bool)`
     Root logger level and format.

   - `_write_document(document: dict, out: Optional[str])`
     Dump a JSON document (sorted keys, 2-space indent) to a file.

   - `_summary_line(report: Report) -> str`
     One row of the verification summary table.

2. Commands
   - `groups()`
     List the builtin groups with their orders.

   - `export(workbench: Workbench, group: str, out: Optional[str])`
     Write a group file for a builtin group.

   - `compute(workbench: Workbench, config: RunConfig)`
     Compute one object and export it.

   - `verify(workbench: Workbench, config: RunConfig) -> int`
     Run the selected theorems, write the reports, print a summary.

3. CLI Entrypoint (`main()`)
   Uses argparse to parse command-line arguments:
     --workbench : optional path to a dumped Workbench configuration.
     -v/--verbose : debug logging.
     Subcommands:
       - groups
       - export
       - compute
       - verify

Exit codes: 0 all reports pass, 1 a theorem check failed, 2 invalid
configuration or input, 3 internal cross-check failure.

Example usage:

    # List builtin groups
    harmonic-cli groups

    # Exhaustive J(E) corpus on S3
    harmonic-cli verify --theorem main-duality --group S3 --ideals exhaustive-JE

    # Crossed-product picture for the uniform measure on Z4
    harmonic-cli verify --theorem cross-iso --group Z4 --measure uniform --seed 7 --out z4.json

    # Harmonic functions of the uniform measure on Z5
    harmonic-cli compute harmonic --group Z5 --measure uniform --out h.json
"""

import argparse
import json
import logging
import sys
from json import JSONDecodeError
from pathlib import Path
from typing import List, Optional

import numpy as np

from .exceptions import (
    BoundaryStructureException,
    CrossCheckException,
    DecompositionException,
    DimensionMismatchException,
    GroupAxiomException,
    GroupFormatException,
    GroupSizeException,
    InvalidBackendTypeException,
    InvalidConfigException,
    InvalidIdealException,
    InvalidSubspaceChoiceException,
    NonAbelianGroupException,
    NotHarmonicException,
    NotLeftIdealException,
    ProbabilityMeasureException,
)
from .models.case import THEOREM_IDS
from .models.group import BUILTIN_GROUPS, DEFAULT_MAX_ORDER
from .models.report import Report
from .models.run_config import COMPUTE_OBJECTS, RunConfig
from .workbench import Workbench

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_THEOREM_FAILED = 1
EXIT_CONFIG = 2
EXIT_INTERNAL = 3

CONFIG_ERRORS = (
    InvalidConfigException,
    InvalidBackendTypeException,
    GroupFormatException,
    GroupAxiomException,
    GroupSizeException,
    DimensionMismatchException,
    InvalidSubspaceChoiceException,
    InvalidIdealException,
    NotLeftIdealException,
    NonAbelianGroupException,
    ProbabilityMeasureException,
    JSONDecodeError,
    FileNotFoundError,
    KeyError,
    ValueError,
)

INTERNAL_ERRORS = (
    CrossCheckException,
    DecompositionException,
    BoundaryStructureException,
    NotHarmonicException,
    np.linalg.LinAlgError,
)


# ----------------------------------------------------------------------
# Helpers
# ----------------------------------------------------------------------
def _configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def _write_document(document: dict, out: Optional[str]) -> None:
    """Write a JSON document to `out`; nothing is written when `out` is None."""
    if out is None:
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(document, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _summary_line(report: Report) -> str:
    case = report.case.get("type", "-")
    angle = "-" if report.max_principal_angle is None else f"{report.max_principal_angle:.2e}"
    return f"{report.theorem_id:<15} {report.group:<10} {case:<10} {report.status:<5} {angle}"


# ----------------------------------------------------------------------
# Commands
# ----------------------------------------------------------------------
def groups(max_order: int = DEFAULT_MAX_ORDER):
    """List builtin groups with their orders."""
    for name, build in BUILTIN_GROUPS.items():
        group = build(max_order)
        kind = "abelian" if group.is_abelian() else "non-abelian"
        print(f"{name:<8} order {group.order:<3} {kind}")


def export(workbench: Workbench, group: str, out: Optional[str]):
    """Write a group file."""
    g = workbench.group(group)
    if out is None:
        print(g.to_json())
    else:
        g.save_to_file(out)
        print(f"Group {g.name} of order {g.order} written to {out}.")


def compute(workbench: Workbench, config: RunConfig):
    """Compute one object and export it."""
    result = workbench.compute(config)
    document = {"run_config": config.to_dict(), "workbench": json.loads(workbench.to_json()), "result": result}
    _write_document(document, config.out)
    subspace = result.get("subspace")
    if subspace is not None:
        print(f"{config.obj} on {result['group']}: dim {subspace['dim']}")
    else:
        print(f"{config.obj} on {result['group']} computed.")


def verify(workbench: Workbench, config: RunConfig) -> int:
    """Run the selected theorems; returns the exit status."""
    reports: List[Report] = workbench.verify(config)
    document = {
        "run_config": config.to_dict(),
        "workbench": json.loads(workbench.to_json()),
        "reports": [r.to_dict() for r in reports],
    }
    _write_document(document, config.out)

    for report in reports:
        print(_summary_line(report))
    failed = [r for r in reports if not r.passed]
    print(f"{len(reports) - len(failed)}/{len(reports)} reports passed.")
    return EXIT_THEOREM_FAILED if failed else EXIT_OK


# ----------------------------------------------------------------------
# CLI Entrypoint
# ----------------------------------------------------------------------
def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="harmonic-cli",
        description="Harmonic analysis and bimodule duality on finite groups",
    )
    parser.add_argument(
        "--workbench",
        default=None,
        help="Path to dumped workbench configuration (defaults are used when omitted)",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging")

    subparsers = parser.add_subparsers(dest="command", required=True)

    # groups
    subparsers.add_parser("groups", help="List builtin groups")

    # export
    export_parser = subparsers.add_parser("export", help="Write a group file")
    export_parser.add_argument("--group", required=True, action="append", help="Group spec")
    export_parser.add_argument("--out", default=None, help="Output path (stdout when omitted)")

    # compute
    compute_parser = subparsers.add_parser("compute", help="Compute and export one object")
    compute_parser.add_argument("object", choices=COMPUTE_OBJECTS, help="Object to compute")
    compute_parser.add_argument("--group", required=True, action="append", help="Group spec or group file")
    compute_parser.add_argument("--measure", default=None, help="uniform, delta, random, random-adapted or a measure file")
    compute_parser.add_argument("--ideal", default=None, help="Ideal file")
    compute_parser.add_argument("--seed", type=int, default=None, help="Seed of random measures")
    compute_parser.add_argument("--tol", type=float, default=None, help="Angle tolerance")
    compute_parser.add_argument("--out", default=None, help="Output path")

    # verify
    verify_parser = subparsers.add_parser("verify", help="Run theorem verifications")
    verify_parser.add_argument(
        "--theorem",
        default="all",
        choices=list(THEOREM_IDS) + ["all"],
        help="Theorem id",
    )
    verify_parser.add_argument("--group", required=True, action="append", help="Group spec or group file (repeatable)")
    verify_parser.add_argument("--ideals", "--ideal", dest="ideals", default="random", help="random, exhaustive-JE or an ideal file")
    verify_parser.add_argument("--measure", default=None, help="uniform, delta, random, random-adapted or a measure file")
    verify_parser.add_argument("--trials", type=int, default=3, help="Random cases per theorem and group")
    verify_parser.add_argument("--seed", type=int, default=None, help="Corpus seed")
    verify_parser.add_argument("--tol", type=float, default=None, help="Angle tolerance")
    verify_parser.add_argument("--out", default=None, help="Path of the report document")
    verify_parser.add_argument("--jobs", type=int, default=1, help="Worker cap")
    return parser


def main() -> int:
    parser = _build_parser()
    args = parser.parse_args()
    _configure_logging(args.verbose)

    try:
        workbench = Workbench.load_from_file(args.workbench) if args.workbench else Workbench()

        if args.command == "groups":
            groups(workbench.max_order)
            return EXIT_OK

        elif args.command == "export":
            export(workbench, args.group[0], args.out)
            return EXIT_OK

        elif args.command == "compute":
            compute(workbench, RunConfig.from_args(args))
            return EXIT_OK

        elif args.command == "verify":
            return verify(workbench, RunConfig.from_args(args))

    except INTERNAL_ERRORS as e:
        logger.error("Internal error: %s", e)
        print(f"Internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    except CONFIG_ERRORS as e:
        logger.error("Invalid configuration: %s", e)
        print(f"Invalid configuration: {e}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

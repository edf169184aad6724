"""
Run configuration assembled from command line arguments.
"""

import argparse
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional

from ..exceptions import InvalidConfigException
from .case import ABELIAN_ONLY, THEOREM_IDS

COMPUTE_OBJECTS = (
    "irreps",
    "dual-group",
    "harmonic",
    "harmonic-operators",
    "ideal",
    "bim",
    "ran",
    "ran-perp",
    "expectation",
    "boundary",
    "crossed-product",
)

IDEAL_CORPORA = ("random", "exhaustive-JE")


@dataclass
class RunConfig:
    """
    Everything a `verify` or `compute` run depends on.

    Attributes:
        command: "verify" or "compute".
        groups: Group specs, builtin names or group file paths.
        theorem: A theorem id or "all".
        ideals: "random", "exhaustive-JE" or an ideal file path.
        measure: "uniform", "delta", "random", "random-adapted" or a measure file path.
        trials: Size of the random corpus per theorem and group.
        seed: Corpus seed; None falls back to the workbench seed.
        tol: Angle tolerance override.
        out: Output path of the report (or object) document.
        jobs: Worker cap for case-parallel runs.
        obj: Object computed by `compute`.
    """

    command: str
    groups: List[str] = field(default_factory=list)
    theorem: str = "all"
    ideals: str = "random"
    measure: Optional[str] = None
    trials: int = 3
    seed: Optional[int] = None
    tol: Optional[float] = None
    out: Optional[str] = None
    jobs: int = 1
    obj: Optional[str] = None

    def theorems(self, abelian: bool = True) -> List[str]:
        """
        Theorem ids selected for a group.

        Under "all", theorems that need an abelian group are skipped for
        non-abelian ones.
        """
        if self.theorem == "all":
            return [t for t in THEOREM_IDS if abelian or t not in ABELIAN_ONLY]
        return [self.theorem]

    def validate(self) -> None:
        """
        Raises:
            InvalidConfigException: Unknown ids, empty group list or bad numbers.
        """
        if self.command not in ("verify", "compute"):
            raise InvalidConfigException(f"Unknown command {self.command!r}.")
        if not self.groups:
            raise InvalidConfigException("At least one --group is required.")
        if self.theorem != "all" and self.theorem not in THEOREM_IDS:
            raise InvalidConfigException(f"Unknown theorem {self.theorem!r}. Supported: {list(THEOREM_IDS)} or 'all'.")
        if self.command == "compute":
            if self.obj not in COMPUTE_OBJECTS:
                raise InvalidConfigException(f"Unknown object {self.obj!r}. Supported: {list(COMPUTE_OBJECTS)}.")
            if len(self.groups) != 1:
                raise InvalidConfigException("compute works on exactly one group.")
        if self.trials < 0:
            raise InvalidConfigException("--trials must be non-negative.")
        if self.jobs < 1:
            raise InvalidConfigException("--jobs must be at least 1.")
        if self.tol is not None and not self.tol > 0:
            raise InvalidConfigException("--tol must be positive.")

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        config = cls(
            command=args.command,
            groups=list(args.group or []),
            theorem=getattr(args, "theorem", "all"),
            ideals=getattr(args, "ideals", None) or getattr(args, "ideal", None) or "random",
            measure=getattr(args, "measure", None),
            trials=getattr(args, "trials", 3),
            seed=getattr(args, "seed", None),
            tol=getattr(args, "tol", None),
            out=getattr(args, "out", None),
            jobs=getattr(args, "jobs", 1),
            obj=getattr(args, "object", None),
        )
        config.validate()
        return config

    def to_dict(self) -> Dict:
        return asdict(self)

    def __repr__(self) -> str:
        return (
            f"RunConfig(command={self.command!r}, groups={self.groups!r}, theorem={self.theorem!r}, "
            f"ideals={self.ideals!r}, measure={self.measure!r}, trials={self.trials!r}, seed={self.seed!r})"
        )

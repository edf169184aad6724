"""
Workbench module.

Provides the Workbench class, the stateful entry point of the package:
- Numerical settings (tolerances, orthonormalization backend, order cap)
- Group, irrep and dual-group caches
- Corpus generation for every theorem id
- Case dispatch to the verifiers and concurrent batches
- Optional per-report log files

Raises custom exceptions for invalid settings and malformed inputs.
"""

import asyncio
import itertools
import json
import logging
import os
import time
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from .duality import (
    bim,
    ran,
    ran_perp,
    verify_blocks,
    verify_diagonals,
    verify_inclusion,
    verify_je_perp,
    verify_joint_harmonic,
    verify_main_theorem,
    verify_masa_slice,
    verify_membership_lemma,
)
from .exceptions import InvalidBackendTypeException, InvalidConfigException, NonAbelianGroupException
from .fourier import DualGroup, dual_group, lemma_psi_report, verify_theorem21
from .harmonic import (
    annihilator_ideal,
    harmonic_functions,
    harmonic_operators,
    ideal_from_dict,
    ideal_from_measures,
    ideal_from_subspaces,
)
from .models.case import ABELIAN_ONLY, IDEAL_THEOREMS, VerificationCase
from .models.group import DEFAULT_MAX_ORDER, FiniteGroup, resolve_group
from .models.measure import LeftIdeal, Measure
from .models.report import Report
from .models.representation import Irrep, decompose_regular
from .models.run_config import RunConfig
from .models.subspace import Numerics
from .poisson import (
    boundary_algebra,
    boundary_report,
    crossed_product,
    poisson_projection,
    validate_cesaro,
    verify_cross_iso,
)
from .services import ORTHONORMALIZER_CLASSES

logger = logging.getLogger(__name__)


class Workbench:
    """
    Entry point for computations and theorem verification on finite groups.

    Handles:
        - Numerical settings shared by every computation
        - Caching of groups, irreps and dual groups
        - Building verification corpora from a RunConfig
        - Running cases, alone or as concurrent batches

    Attributes:
        ORTHONORMALIZER_CLASSES: Supported orthonormalization backends.
    """

    ORTHONORMALIZER_CLASSES = ORTHONORMALIZER_CLASSES

    def __init__(
        self,
        rank_tol: float = 1e-9,
        angle_tol: float = 1e-8,
        seed: int = 0,
        orthonormalizer: str = "svd",
        max_order: int = DEFAULT_MAX_ORDER,
        logging: bool = False,
        log_dir: str = "logs",
        record_timings: bool = False,
    ) -> None:
        self.rank_tol = rank_tol
        self.angle_tol = angle_tol
        self.seed = seed
        self.orthonormalizer = orthonormalizer
        self.max_order = max_order
        self.logging = logging
        self.log_dir = log_dir
        self.record_timings = record_timings
        self.numerics: Numerics

        self._groups: Dict[str, FiniteGroup] = {}
        self._irreps: Dict[str, List[Irrep]] = {}
        self._duals: Dict[str, DualGroup] = {}

        self._init_numerics()

    def _init_numerics(self) -> None:
        """Validate the backend name and build the shared Numerics."""
        if self.orthonormalizer not in self.ORTHONORMALIZER_CLASSES:
            raise InvalidBackendTypeException(
                f"Unsupported orthonormalizer: {self.orthonormalizer}\n"
                f"Supported types: {list(self.ORTHONORMALIZER_CLASSES.keys())}"
            )
        self.numerics = Numerics(rank_tol=self.rank_tol, angle_tol=self.angle_tol, orthonormalizer=self.orthonormalizer)

    def _log_report(self, case: VerificationCase, report: Report) -> None:
        """Write a finished case and its report to a file in the log directory."""
        os.makedirs(self.log_dir, exist_ok=True)
        datetime_string = (
            datetime.now()
            .isoformat(timespec="milliseconds")
            .replace("T", "-")
            .replace(":", "")
            .replace(".", "-")
        )
        log_path = os.path.join(self.log_dir, f"{datetime_string}-{case.theorem_id}.log")
        with open(log_path, "w", encoding="utf-8") as log_file:
            log_file.write("Workbench:\n")
            log_file.write(f"{self!r}\n")
            log_file.write("Case:\n")
            log_file.write(f"{json.dumps(case.to_dict(), sort_keys=True)}\n")
            log_file.write("Report:\n")
            log_file.write(f"{report.to_json()}\n")

    # -------------------------------------------------------------------------
    # Caches
    # -------------------------------------------------------------------------

    def group(self, spec: str) -> FiniteGroup:
        if spec not in self._groups:
            group = resolve_group(spec, self.max_order)
            group.validate()
            self._groups[spec] = group
        return self._groups[spec]

    def irreps(self, spec: str) -> List[Irrep]:
        if spec not in self._irreps:
            self._irreps[spec] = decompose_regular(self.group(spec), seed=self.seed)
        return self._irreps[spec]

    def dual(self, spec: str) -> DualGroup:
        if spec not in self._duals:
            group = self.group(spec)
            if not group.is_abelian():
                raise NonAbelianGroupException(f"{group.name} is not abelian.")
            self._duals[spec] = dual_group(group, irreps=self.irreps(spec))
        return self._duals[spec]

    def _warm(self, spec: str, theorems: Sequence[str]) -> None:
        """Fill the caches needed by `theorems` before cases run in worker threads."""
        group = self.group(spec)
        self.irreps(spec)
        if group.is_abelian() and any(t in ABELIAN_ONLY for t in theorems):
            self.dual(spec)

    # -------------------------------------------------------------------------
    # Measures and ideals
    # -------------------------------------------------------------------------

    def resolve_measure(self, spec: str, group: FiniteGroup, rng: np.random.Generator) -> Measure:
        """
        A measure from a short spec: "uniform", "delta", "random",
        "random-adapted", or a measure file path.
        """
        match spec:
            case "uniform":
                return Measure.uniform(group)
            case "delta":
                return Measure.delta(group)
            case "random":
                return Measure.random(group, rng)
            case "random-adapted":
                return Measure.random(group, rng, adapted=True, label="random-adapted")
            case _:
                if not Path(spec).is_file():
                    raise InvalidConfigException(f"Unknown measure spec {spec!r}.")
                return Measure.load_from_file(spec, group)

    def ideal(self, spec: str, payload: Dict[str, Any]) -> LeftIdeal:
        return ideal_from_dict(payload, self.group(spec), self.irreps(spec), self.numerics)

    def _load_payloads(self, path: str) -> List[Dict[str, Any]]:
        if not Path(path).is_file():
            raise InvalidConfigException(f"Ideal spec {path!r} is neither a corpus name nor a file.")
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return list(data) if isinstance(data, list) else [data]

    def _random_ideal_payloads(self, spec: str, rng: np.random.Generator, count: int) -> List[Dict[str, Any]]:
        """`count` ideals J_Lambda, each from an independently drawn random measure; J(E) lives in the exhaustive corpus."""
        group = self.group(spec)
        return [
            {"type": "J_Lambda", "measures": [Measure.random(group, rng, label=f"mu{k}").to_dict()]}
            for k in range(count)
        ]

    def _exhaustive_je(self, spec: str) -> List[Dict[str, Any]]:
        ranges = [range(pi.dim + 1) for pi in self.irreps(spec)]
        return [{"type": "J_E", "s": list(s)} for s in itertools.product(*ranges)]

    # -------------------------------------------------------------------------
    # Corpus generation
    # -------------------------------------------------------------------------

    def build_cases(self, config: RunConfig) -> List[VerificationCase]:
        """
        Expand a RunConfig into cases; every random choice is frozen into the
        payloads so equal configs give equal cases.

        Raises:
            InvalidConfigException: An abelian-only theorem was selected
                explicitly for a non-abelian group.
        """
        seed = self.seed if config.seed is None else config.seed
        cases: List[VerificationCase] = []
        for spec in config.groups:
            group = self.group(spec)
            abelian = group.is_abelian()
            if config.theorem in ABELIAN_ONLY and not abelian:
                raise InvalidConfigException(f"{config.theorem} needs an abelian group, {group.name} is not.")
            theorems = config.theorems(abelian)
            self._warm(spec, theorems)
            for index, theorem in enumerate(theorems):
                rng = np.random.default_rng([seed, index, group.order])
                payloads = self._payloads(theorem, spec, config, rng)
                base = len(cases)
                cases.extend(
                    VerificationCase(theorem_id=theorem, group=spec, payload=p, seed=seed + base + k)
                    for k, p in enumerate(payloads)
                )
        logger.info("Built %d verification cases for %s", len(cases), config.groups)
        return cases

    def _payloads(self, theorem: str, spec: str, config: RunConfig, rng: np.random.Generator) -> List[Dict[str, Any]]:
        group = self.group(spec)
        n = group.order
        trials = config.trials

        if theorem in IDEAL_THEOREMS or theorem == "je-perp":
            match config.ideals:
                case "exhaustive-JE":
                    payloads = self._exhaustive_je(spec)
                case "random":
                    if theorem == "je-perp":
                        payloads = [
                            {"type": "J_E", "s": [int(rng.integers(0, pi.dim + 1)) for pi in self.irreps(spec)]}
                            for _ in range(trials)
                        ]
                    else:
                        payloads = self._random_ideal_payloads(spec, rng, trials)
                case path:
                    payloads = self._load_payloads(path)
            if theorem == "je-perp":
                payloads = [p for p in payloads if p.get("type") == "J_E"]
            return payloads

        match theorem:
            case "joint-harmonic":
                if config.measure:
                    return [{"type": "measures", "measures": [self.resolve_measure(config.measure, group, rng).to_dict()]}]
                payloads = []
                for k in range(trials):
                    count = 1 if k % 2 == 0 else 2
                    measures = [Measure.random(group, rng, label=f"mu{k}_{j}") for j in range(count)]
                    payloads.append({"type": "measures", "measures": [mu.to_dict() for mu in measures]})
                return payloads
            case "cross-iso":
                if config.measure:
                    return [{"type": "measure", "measure": self.resolve_measure(config.measure, group, rng).to_dict()}]
                return [
                    {"type": "measure", "measure": Measure.random(group, rng, adapted=True, label=f"mu{k}").to_dict()}
                    for k in range(trials)
                ]
            case "theorem21":
                if config.ideals not in ("random", "exhaustive-JE"):
                    return [p for p in self._load_payloads(config.ideals) if p.get("type") == "A_Gamma"]
                payloads = [{"type": "A_Gamma", "support": []}, {"type": "A_Gamma", "support": list(range(n))}]
                for _ in range(trials):
                    size = int(rng.integers(1, n + 1))
                    payloads.append({"type": "A_Gamma", "support": sorted(int(x) for x in rng.permutation(n)[:size])})
                return payloads
            case "lemma-psi":
                return [{"type": "random", "trials": max(trials, 1)}]
            case _:
                raise InvalidConfigException(f"Unknown theorem {theorem!r}.")

    # -------------------------------------------------------------------------
    # Case execution
    # -------------------------------------------------------------------------

    def run_case(self, case: VerificationCase, tol: Optional[float] = None) -> Report:
        """
        Run one verification case.

        Raises:
            CrossCheckException, DecompositionException, BoundaryStructureException:
                internal inconsistencies, as opposed to failed theorems.
        """
        numerics = self.numerics.with_tol(tol)
        group = self.group(case.group)
        rng = np.random.default_rng(case.seed)
        payload = case.payload
        start = time.perf_counter()

        match case.theorem_id:
            case "inclusion":
                report = verify_inclusion(group, self.ideal(case.group, payload), numerics)
            case "masa-slice":
                report = verify_masa_slice(group, self.ideal(case.group, payload), numerics)
            case "main-duality":
                report = verify_main_theorem(group, self.ideal(case.group, payload), numerics)
            case "membership":
                report = verify_membership_lemma(group, self.ideal(case.group, payload), rng, numerics, case.seed)
            case "diagonals":
                report = verify_diagonals(group, self.ideal(case.group, payload), rng, numerics, case.seed)
            case "blocks":
                ideal = self.ideal(case.group, payload)
                report = verify_blocks(group, ideal, self.irreps(case.group), rng, numerics, case.seed)
            case "je-perp":
                report = verify_je_perp(group, self.irreps(case.group), payload["s"], numerics)
            case "joint-harmonic":
                measures = [Measure.from_dict(m) for m in payload["measures"]]
                report = verify_joint_harmonic(group, measures, numerics)
            case "cross-iso":
                mu = Measure.from_dict(payload["measure"])
                report = verify_cross_iso(group, mu, rng, numerics, case.seed)
            case "theorem21":
                report = verify_theorem21(self.dual(case.group), payload["support"], rng, numerics, case.seed)
            case "lemma-psi":
                report = lemma_psi_report(self.dual(case.group), rng, int(payload.get("trials", 10)), numerics, case.seed)
            case _:
                raise InvalidConfigException(f"Unknown theorem {case.theorem_id!r}.")

        if self.record_timings:
            report.runtime_ms = round((time.perf_counter() - start) * 1000.0, 3)
        if not report.passed:
            logger.warning("%s failed on %s: %s", case.theorem_id, group.name, report.failures)
        if self.logging:
            self._log_report(case, report)
        return report

    async def verify_batch(
        self,
        cases: Sequence[VerificationCase],
        jobs: int = 1,
        tol: Optional[float] = None,
    ) -> List[Report]:
        """Run cases in worker threads, at most `jobs` at a time; reports keep case order."""
        for spec in {case.group for case in cases}:
            self._warm(spec, [case.theorem_id for case in cases if case.group == spec])
        semaphore = asyncio.Semaphore(max(jobs, 1))

        async def _run(case: VerificationCase) -> Report:
            async with semaphore:
                return await asyncio.to_thread(self.run_case, case, tol)

        return await asyncio.gather(*[_run(case) for case in cases])

    def verify(self, config: RunConfig) -> List[Report]:
        cases = self.build_cases(config)
        return asyncio.run(self.verify_batch(cases, config.jobs, config.tol))

    # -------------------------------------------------------------------------
    # Computation of single objects
    # -------------------------------------------------------------------------

    def _measures(self, config: RunConfig, group: FiniteGroup, rng: np.random.Generator) -> List[Measure]:
        return [self.resolve_measure(config.measure or "uniform", group, rng)]

    def _ideal_for(self, config: RunConfig, spec: str, rng: np.random.Generator) -> LeftIdeal:
        group = self.group(spec)
        match config.ideals:
            case "random" | "exhaustive-JE":
                if config.measure:
                    return ideal_from_measures(group, self._measures(config, group, rng), self.numerics)
                return ideal_from_subspaces(group, self.irreps(spec), [pi.dim // 2 for pi in self.irreps(spec)], self.numerics)
            case path:
                return self.ideal(spec, self._load_payloads(path)[0])

    def compute(self, config: RunConfig) -> Dict[str, Any]:
        """Compute and export one object of the `compute` command."""
        spec = config.groups[0]
        group = self.group(spec)
        seed = self.seed if config.seed is None else config.seed
        rng = np.random.default_rng(seed)
        numerics = self.numerics.with_tol(config.tol)
        result: Dict[str, Any] = {"object": config.obj, "group": group.name, "seed": seed}

        match config.obj:
            case "irreps":
                result["irreps"] = [pi.to_dict() for pi in self.irreps(spec)]
            case "dual-group":
                result["dual_group"] = self.dual(spec).to_dict()
            case "harmonic":
                measures = self._measures(config, group, rng)
                result["measures"] = [mu.to_dict() for mu in measures]
                result["subspace"] = harmonic_functions(group, measures, numerics).to_dict()
            case "harmonic-operators":
                measures = self._measures(config, group, rng)
                result["measures"] = [mu.to_dict() for mu in measures]
                result["subspace"] = harmonic_operators(group, measures, numerics).to_dict()
            case "ideal":
                ideal = self._ideal_for(config, spec, rng)
                result["ideal"] = ideal.to_dict()
                result["subspace"] = ideal.subspace.to_dict()
            case "bim":
                ideal = self._ideal_for(config, spec, rng)
                space = bim(group, annihilator_ideal(ideal, numerics), numerics)
                result["ideal"] = ideal.to_dict()
                result["generator_log"] = space.generator_log
                result["subspace"] = space.subspace.to_dict()
            case "ran":
                ideal = self._ideal_for(config, spec, rng)
                result["ideal"] = ideal.to_dict()
                result["subspace"] = ran(group, ideal, numerics).subspace.to_dict()
            case "ran-perp":
                ideal = self._ideal_for(config, spec, rng)
                result["ideal"] = ideal.to_dict()
                result["subspace"] = ran_perp(group, ideal, numerics).to_dict()
            case "expectation":
                mu = self._measures(config, group, rng)[0]
                expectation = poisson_projection(group, mu, numerics)
                result["expectation"] = expectation.to_dict()
                result["cesaro"] = validate_cesaro(group, expectation).to_dict()
            case "boundary":
                mu = self._measures(config, group, rng)[0]
                result["boundary"] = boundary_algebra(group, mu, numerics, rng=rng).to_dict()
                result["report"] = boundary_report(group, mu, rng, numerics, seed).to_dict()
            case "crossed-product":
                mu = self._measures(config, group, rng)[0]
                crossed = crossed_product(group, mu, numerics)
                result["measure"] = mu.to_dict()
                result["generator_log"] = crossed.generator_log
                result["subspace"] = crossed.subspace.to_dict()
            case _:
                raise InvalidConfigException(f"Unknown object {config.obj!r}.")
        return result

    # -------------------------------------------------------------------------
    # Serialization / JSON handling
    # -------------------------------------------------------------------------

    def to_json(self) -> str:
        """Serialize Workbench settings to a JSON string."""
        return json.dumps(
            {
                "rank_tol": self.rank_tol,
                "angle_tol": self.angle_tol,
                "seed": self.seed,
                "orthonormalizer": self.orthonormalizer,
                "max_order": self.max_order,
                "logging": self.logging,
                "log_dir": self.log_dir,
                "record_timings": self.record_timings,
            },
            indent=4,
        )

    @classmethod
    def from_json(cls, json_str: str) -> "Workbench":
        """Deserialize Workbench settings from a JSON string."""
        data = json.loads(json_str)
        return cls(
            rank_tol=data.get("rank_tol", 1e-9),
            angle_tol=data.get("angle_tol", 1e-8),
            seed=data.get("seed", 0),
            orthonormalizer=data.get("orthonormalizer", "svd"),
            max_order=data.get("max_order", DEFAULT_MAX_ORDER),
            logging=data.get("logging", False),
            log_dir=data.get("log_dir", "logs"),
            record_timings=data.get("record_timings", False),
        )

    def save_to_file(self, filepath: str | Path) -> None:
        """Save workbench settings to a JSON file."""
        path = Path(filepath)
        path.write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def load_from_file(cls, filepath: str | Path) -> "Workbench":
        """Load workbench settings from a JSON file."""
        path = Path(filepath)
        return cls.from_json(path.read_text(encoding="utf-8"))

    def __repr__(self) -> str:
        return (
            f"Workbench(rank_tol={self.rank_tol!r}, angle_tol={self.angle_tol!r}, seed={self.seed!r}, "
            f"orthonormalizer={self.orthonormalizer!r}, max_order={self.max_order!r}, "
            f"logging={self.logging!r}, log_dir={self.log_dir!r}, record_timings={self.record_timings!r})"
        )

"""
Tests for Workbench settings, caches, corpus generation and case dispatch.

These tests ensure that:
1. The Workbench picks the requested orthonormalization backend and refuses unknown ones.
2. Corpora have the expected sizes and are reproducible for a fixed seed.
3. Batches of cases run concurrently and every report passes.
4. Single objects are computed for the compute command.
5. The acceptance corpora pass on the cyclic groups up to Z8, D4 and Z2xZ4.
"""

import json
from pathlib import Path

import numpy as np
import pytest
from harmonic_bimodules.exceptions import (
    GroupSizeException,
    InvalidBackendTypeException,
    InvalidConfigException,
    NonAbelianGroupException,
)
from harmonic_bimodules.models.case import VerificationCase
from harmonic_bimodules.models.measure import Measure
from harmonic_bimodules.models.run_config import COMPUTE_OBJECTS, RunConfig
from harmonic_bimodules.services import GramSchmidtOrthonormalizer, SvdOrthonormalizer
from harmonic_bimodules.workbench import Workbench

DUMPED = Path(__file__).parent / "dumped_workbenches"


@pytest.fixture
def workbench(backend):
    return Workbench(orthonormalizer=backend)


def test_init_svd() -> None:
    """A Workbench loaded from an 'svd' dump uses the SVD backend."""
    workbench = Workbench.load_from_file(DUMPED / "svd.json")
    assert isinstance(workbench.numerics.backend, SvdOrthonormalizer)


def test_init_gram_schmidt() -> None:
    """A Workbench loaded from a 'gram-schmidt' dump uses the Gram-Schmidt backend."""
    workbench = Workbench.load_from_file(DUMPED / "gram_schmidt.json")
    assert isinstance(workbench.numerics.backend, GramSchmidtOrthonormalizer)


def test_init_nonsense() -> None:
    """An unsupported backend raises InvalidBackendTypeException."""
    with pytest.raises(InvalidBackendTypeException):
        Workbench.load_from_file(DUMPED / "nonsense_backend.json")


def test_settings_round_trip(tmp_path) -> None:
    workbench = Workbench.load_from_file(DUMPED / "small_cap.json")
    assert workbench.max_order == 8
    assert workbench.record_timings
    path = tmp_path / "workbench.json"
    workbench.save_to_file(path)
    restored = Workbench.load_from_file(path)
    assert restored.to_json() == workbench.to_json()
    assert repr(restored) == repr(workbench)


def test_group_cache(workbench) -> None:
    assert workbench.group("S3") is workbench.group("S3")
    with pytest.raises(ValueError):
        workbench.group("nonsense")
    with pytest.raises(GroupSizeException):
        Workbench(max_order=8).group("S4")


def test_group_file(workbench, tmp_path) -> None:
    path = tmp_path / "d4.json"
    workbench.group("D4").save_to_file(path)
    assert workbench.group(str(path)).order == 8


def test_dual_requires_abelian(workbench) -> None:
    assert workbench.dual("Z4").order == 4
    with pytest.raises(NonAbelianGroupException):
        workbench.dual("S3")


def test_resolve_measure(workbench, tmp_path) -> None:
    group = workbench.group("Z4")
    rng = np.random.default_rng(0)
    assert workbench.resolve_measure("uniform", group, rng).support == (0, 1, 2, 3)
    assert workbench.resolve_measure("delta", group, rng).support == (0,)
    assert workbench.resolve_measure("random", group, rng).probability
    assert workbench.resolve_measure("random-adapted", group, rng).is_adapted(group)

    path = tmp_path / "measure.json"
    path.write_text(json.dumps(Measure.on_subset(group, [0, 2], label="half").to_dict()), encoding="utf-8")
    assert workbench.resolve_measure(str(path), group, rng).label == "half"
    with pytest.raises(InvalidConfigException):
        workbench.resolve_measure("nonsense", group, rng)


def test_build_cases_exhaustive(workbench) -> None:
    config = RunConfig(command="verify", groups=["S3"], theorem="main-duality", ideals="exhaustive-JE")
    cases = workbench.build_cases(config)
    assert len(cases) == 12
    assert {tuple(c.payload["s"]) for c in cases} == {
        (a, b, c) for a in range(2) for b in range(2) for c in range(3)
    }


def test_build_cases_all_theorems(workbench) -> None:
    non_abelian = workbench.build_cases(RunConfig(command="verify", groups=["S3"], trials=2))
    assert len(non_abelian) == 6 * 2 + 2 + 2 + 2
    assert not {c.theorem_id for c in non_abelian} & {"theorem21", "lemma-psi"}

    abelian = workbench.build_cases(RunConfig(command="verify", groups=["Z4"], trials=2))
    assert len(abelian) == 6 * 2 + 2 + 2 + 2 + 4 + 1
    assert [c.payload for c in abelian if c.theorem_id == "lemma-psi"] == [{"type": "random", "trials": 2}]


def test_build_cases_abelian_only_on_non_abelian(workbench) -> None:
    with pytest.raises(InvalidConfigException):
        workbench.build_cases(RunConfig(command="verify", groups=["S3"], theorem="theorem21"))


def test_build_cases_from_ideal_file(workbench, tmp_path) -> None:
    path = tmp_path / "ideals.json"
    path.write_text(json.dumps([{"type": "J_E", "s": [1, 0, 1]}, {"type": "explicit", "basis": [[1.0] * 6]}]))
    config = RunConfig(command="verify", groups=["S3"], theorem="je-perp", ideals=str(path))
    cases = workbench.build_cases(config)
    assert [c.payload for c in cases] == [{"type": "J_E", "s": [1, 0, 1]}]
    with pytest.raises(InvalidConfigException):
        workbench.build_cases(RunConfig(command="verify", groups=["S3"], theorem="inclusion", ideals="missing.json"))


def test_build_cases_deterministic(workbench) -> None:
    config = RunConfig(command="verify", groups=["Z4", "S3"], trials=2, seed=42)
    first = [c.to_dict() for c in workbench.build_cases(config)]
    second = [c.to_dict() for c in Workbench().build_cases(config)]
    assert json.dumps(first, sort_keys=True) == json.dumps(second, sort_keys=True)


def test_verify_reports_pass(workbench) -> None:
    config = RunConfig(command="verify", groups=["Z4", "S3"], trials=1, seed=7, jobs=3)
    reports = workbench.verify(config)
    assert len(reports) == len(workbench.build_cases(config))
    failed = [(r.theorem_id, r.group, r.failures) for r in reports if not r.passed]
    assert failed == []
    assert all(r.runtime_ms is None for r in reports)


def test_verify_deterministic() -> None:
    config = RunConfig(command="verify", groups=["klein4"], theorem="main-duality", trials=3, seed=1, jobs=2)
    keys = ("theorem_id", "group", "ideal_spec", "dims", "pass", "failures", "seed")
    first = [{k: r.to_dict()[k] for k in keys} for r in Workbench().verify(config)]
    second = [{k: r.to_dict()[k] for k in keys} for r in Workbench().verify(config)]
    assert first == second


def test_run_case_timings_and_logging(tmp_path) -> None:
    workbench = Workbench(record_timings=True, logging=True, log_dir=str(tmp_path / "logs"))
    case = VerificationCase("je-perp", "S3", {"type": "J_E", "s": [0, 1, 1]}, seed=0)
    report = workbench.run_case(case)
    assert report.passed
    assert report.runtime_ms is not None and report.runtime_ms >= 0.0
    logs = list((tmp_path / "logs").glob("*-je-perp.log"))
    assert len(logs) == 1
    assert "Report:" in logs[0].read_text(encoding="utf-8")


def test_run_case_unknown_theorem(workbench) -> None:
    with pytest.raises(InvalidConfigException):
        workbench.run_case(VerificationCase("fermat", "Z2", {}))


def test_run_case_tolerance_override(workbench) -> None:
    case = VerificationCase("main-duality", "Z3", {"type": "J_E", "s": [1, 0, 1]})
    assert workbench.run_case(case, tol=1e-6).tol == 1e-6


@pytest.mark.parametrize("obj", COMPUTE_OBJECTS)
def test_compute_objects(obj, workbench) -> None:
    config = RunConfig(command="compute", groups=["Z3"], obj=obj, measure="uniform")
    result = workbench.compute(config)
    assert result["object"] == obj
    assert result["group"] == "Z3"
    json.dumps(result)


def test_compute_values(workbench) -> None:
    harmonic = workbench.compute(RunConfig(command="compute", groups=["Z5"], obj="harmonic", measure="uniform"))
    assert harmonic["subspace"]["dim"] == 1
    irreps = workbench.compute(RunConfig(command="compute", groups=["S3"], obj="irreps"))
    assert [pi["dim"] for pi in irreps["irreps"]] == [1, 1, 2]
    expectation = workbench.compute(RunConfig(command="compute", groups=["S3"], obj="expectation", measure="uniform"))
    assert expectation["expectation"]["fixed_dim"] == 6
    assert expectation["cesaro"]["passed"]
    ideal = workbench.compute(RunConfig(command="compute", groups=["S3"], obj="ideal"))
    assert ideal["ideal"]["spec"] == {"type": "J_E", "s": [0, 0, 1]}
    with pytest.raises(NonAbelianGroupException):
        workbench.compute(RunConfig(command="compute", groups=["S3"], obj="dual-group"))


EXAMPLES = Path(__file__).parent.parent / "example_input_files"


def test_example_input_files(workbench) -> None:
    group_file = str(EXAMPLES / "z4_group.json")
    assert workbench.group(group_file).order == 4

    config = RunConfig(command="verify", groups=["Z4"], theorem="theorem21", ideals=str(EXAMPLES / "z4_a_gamma_ideals.json"))
    reports = workbench.verify(config)
    assert [r.case["support"] for r in reports] == [[0, 2], [1]]
    assert all(r.passed for r in reports)

    config = RunConfig(command="verify", groups=["S3"], theorem="main-duality", ideals=str(EXAMPLES / "s3_je_ideals.json"))
    assert [r.dims["J"] for r in workbench.verify(config)] == [3, 5]

    config = RunConfig(command="verify", groups=["Z4"], theorem="blocks", ideals=str(EXAMPLES / "z4_j_lambda_ideal.json"))
    assert [r.dims["Ran_perp"] for r in workbench.verify(config)] == [8]

    config = RunConfig(command="verify", groups=["Z4"], theorem="cross-iso", measure=str(EXAMPLES / "z4_lazy_measure.json"))
    (report,) = workbench.verify(config)
    assert report.passed, report.failures
    assert report.dims["H_tilde"] == 4


ACCEPTANCE_GROUPS = ["Z2", "Z3", "Z4", "Z5", "Z6", "Z7", "Z8", "D4", "Z2xZ4"]


@pytest.mark.parametrize("spec", ACCEPTANCE_GROUPS)
def test_main_duality_acceptance(spec, workbench) -> None:
    exhaustive = RunConfig(command="verify", groups=[spec], theorem="main-duality", ideals="exhaustive-JE")
    sampled = RunConfig(command="verify", groups=[spec], theorem="main-duality", trials=20, seed=0)
    for config in (exhaustive, sampled):
        failed = [(r.case, r.failures) for r in workbench.verify(config) if not r.passed]
        assert failed == []


def test_random_corpus_is_j_lambda(workbench) -> None:
    config = RunConfig(command="verify", groups=["D4"], theorem="main-duality", trials=20, seed=3)
    cases = workbench.build_cases(config)
    assert len(cases) == 20
    assert {c.payload["type"] for c in cases} == {"J_Lambda"}
    assert len({json.dumps(c.payload, sort_keys=True) for c in cases}) == 20


def test_je_perp_acceptance_d4(workbench) -> None:
    config = RunConfig(command="verify", groups=["D4"], theorem="je-perp", ideals="exhaustive-JE")
    reports = workbench.verify(config)
    assert len(reports) == 48
    assert all(r.passed for r in reports)


@pytest.mark.parametrize("n", range(2, 13))
def test_lemma_psi_acceptance(n, workbench) -> None:
    config = RunConfig(command="verify", groups=[f"Z{n}"], theorem="lemma-psi", trials=100, seed=0)
    (report,) = workbench.verify(config)
    assert report.case == {"type": "random", "trials": 100}
    assert report.passed, report.failures

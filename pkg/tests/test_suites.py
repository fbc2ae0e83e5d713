from __future__ import annotations

import pytest

from agendalab import ValidationError
from agendalab.suites import ExperimentDescriptor, run_suite


def test_unknown_suite_rejected():
    with pytest.raises(ValidationError):
        ExperimentDescriptor(suite="thm99")


def test_fixture_suite_passes():
    record = run_suite(ExperimentDescriptor(suite="fixtures"))
    assert record.summary["failed"] == 0
    assert record.summary["rows"] == 12


def test_lemma1_suite_zero_samples_vacuous():
    record = run_suite(ExperimentDescriptor(suite="lemma1", samples=0))
    assert record.summary == {"rows": 0, "failed": 0, "passed": 0}


def test_small_suite_roundup():
    for suite, kwargs in [
        ("lemma1", {"samples": 6}),
        ("thm1", {"samples": 6}),
        ("thm3_bounds", {"samples": 5}),
        ("thm4_mc", {"samples": 50}),
        ("thm4_witness", {"samples": 2}),
        ("thm5", {"samples": 4}),
        ("thm6_7_dtd", {}),
        ("thm8", {"samples": 6}),
    ]:
        record = run_suite(ExperimentDescriptor(suite=suite, **kwargs))
        assert record.summary["failed"] == 0, (suite, record.rows)


def test_record_files_written(tmp_path):
    record = run_suite(ExperimentDescriptor(suite="fixtures",
                                            out_dir=str(tmp_path)))
    assert record.summary["failed"] == 0
    assert (tmp_path / "fixtures.csv").exists()
    assert (tmp_path / "fixtures.json").exists()
    assert (tmp_path / "fixtures.meta.json").exists()
    header = (tmp_path / "fixtures.csv").read_text().splitlines()[0]
    assert header == "instance,default,rounds,expected,engine,oracle,pass"

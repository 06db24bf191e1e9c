"""Check suites: registry shape, grading, and run-to-run determinism.

The individual claims behind each suite entry have their own unit tests;
here we exercise the suite layer itself and pin that a default-config run
grades everything "pass".
"""

import pytest

from ultragrowth.config import RunConfig
from ultragrowth.specio import canonical_json
from ultragrowth.suites import INVARIANTS, PAPER_CLAIMS, SUITES, run_suite

ENTRY_KEYS = {"id", "description", "expected", "observed", "grade", "data"}


class TestRegistry:
    def test_both_suites_are_registered(self):
        assert set(SUITES) == {"paper-claims", "invariants"}

    def test_unknown_suite_is_rejected(self):
        with pytest.raises(ValueError, match="unknown suite"):
            run_suite("frobnicate")

    def test_ids_are_unique_within_and_across_suites(self):
        ids = [c.id for c in PAPER_CLAIMS + INVARIANTS]
        assert len(ids) == len(set(ids))

    def test_every_check_documents_itself(self):
        for check in PAPER_CLAIMS + INVARIANTS:
            assert check.id and check.description and check.expected


class TestInvariantsSuite:
    def test_all_entries_pass_under_the_default_config(self):
        doc = run_suite("invariants")
        bad = [e["id"] for e in doc["entries"] if e["grade"] != "pass"]
        assert bad == []
        assert doc["summary"] == {"pass": len(INVARIANTS), "fail": 0,
                                  "open": 0, "total": len(INVARIANTS)}

    def test_report_document_shape(self):
        doc = run_suite("invariants")
        assert doc["suite"] == "invariants"
        assert doc["config"] == RunConfig().to_dict()
        for entry in doc["entries"]:
            assert set(entry) == ENTRY_KEYS
            assert entry["grade"] in ("pass", "fail", "open")
            assert isinstance(entry["observed"], str) and entry["observed"]

    def test_two_runs_serialize_byte_identically(self):
        a = canonical_json(run_suite("invariants"))
        b = canonical_json(run_suite("invariants"))
        assert a == b

    def test_config_travels_into_the_report(self):
        cfg = RunConfig(truncation=2048)
        doc = run_suite("invariants", config=cfg)
        assert doc["config"]["truncation"] == 2048


class TestPaperClaimsSuite:
    def test_all_eleven_claims_pass(self):
        doc = run_suite("paper-claims")
        assert doc["summary"]["total"] == 11
        bad = [(e["id"], e["observed"]) for e in doc["entries"]
               if e["grade"] != "pass"]
        assert bad == []

"""Scenario/response/report serialization and the bundled fixtures."""

import hashlib
import json
from importlib import resources

import pytest

from avlab import dataio
from avlab.errors import ValidationError
from avlab.fitting import CohortSpec, Model, generate_synthetic_cohort

# Pinned so accidental fixture edits fail loudly.
FIXTURE_SHA256 = {
    "scenario_a.json": "5a7e99aee20324191c0fbd256722138acbb3cce119234a212dff8368814ed219",
    "scenario_b.json": "cd3ea60b58a901bf5aed6ef4f3bc04cd404af2dbf6e81ed81a8c495ddbfd81e6",
}


class TestScenarioIO:
    def test_builtin_a(self, scn_a):
        assert scn_a.tally.total_approvals == 16
        assert scn_a.m == 5
        assert scn_a.utility("E") == 0.25
        assert scn_a.count("D") == 4

    def test_builtin_b(self, scn_b):
        assert scn_b.utility("D") == 0.25
        assert scn_b.count("C") == 4

    def test_fixture_checksums(self):
        for name, want in FIXTURE_SHA256.items():
            data = resources.files("avlab.fixtures").joinpath(name).read_bytes()
            assert hashlib.sha256(data).hexdigest() == want, name

    def test_round_trip(self, tmp_path, scn_a):
        path = tmp_path / "a.json"
        dataio.write_scenario(scn_a, path)
        assert dataio.load_scenario(path) == scn_a

    def test_winners_zero_rejected(self, tmp_path, scn_a):
        obj = dataio.scenario_to_obj(scn_a)
        obj["winners"] = 0
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(obj))
        with pytest.raises(ValidationError, match="k out of range"):
            dataio.load_scenario(path)

    def test_count_exceeding_known_rejected(self, tmp_path, scn_a):
        obj = dataio.scenario_to_obj(scn_a)
        obj["counts"]["A"] = 99
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(obj))
        with pytest.raises(ValidationError, match="exceeds known ballots"):
            dataio.load_scenario(path)

    def test_parse_error_reports_position(self, tmp_path):
        path = tmp_path / "mangled.json"
        path.write_text('{"id": "X", \n  broken')
        with pytest.raises(ValidationError, match="line 2"):
            dataio.load_scenario(path)

    def test_missing_field_named(self, tmp_path):
        path = tmp_path / "partial.json"
        path.write_text('{"id": "X"}')
        with pytest.raises(ValidationError, match="candidates"):
            dataio.load_scenario(path)

    def test_resolve_accepts_id_or_path(self, tmp_path, scn_b):
        assert dataio.resolve_scenario("B") == scn_b
        path = tmp_path / "b.json"
        dataio.write_scenario(scn_b, path)
        assert dataio.resolve_scenario(str(path)) == scn_b


class TestResponseIO:
    def test_round_trip_large_cohort(self, tmp_path, scenarios):
        spec = CohortSpec(voters=104, model=Model.AUT, noise=0.25, seed=13)
        records = generate_synthetic_cohort(spec, scenarios)
        path = tmp_path / "cohort.csv"
        dataio.write_responses(records, path)
        assert dataio.load_responses(path, scenarios) == records

    def test_ballot_order_insensitive(self, scenarios):
        text = (
            "voter_id,scenario_id,winners,missing,ballot,timestamp\n"
            "v1,A,1,0,E|B,2026-01-01T00:00:00Z\n"
        )
        (rec,) = dataio.parse_responses(text, scenarios)
        assert rec.ballot == frozenset({"B", "E"})

    def test_empty_ballot_field(self, scenarios):
        text = (
            "voter_id,scenario_id,winners,missing,ballot,timestamp\n"
            "v1,A,1,0,,2026-01-01T00:00:00Z\n"
        )
        (rec,) = dataio.parse_responses(text, scenarios)
        assert rec.ballot == frozenset()

    def test_unknown_candidate_names_row(self, scenarios):
        text = (
            "voter_id,scenario_id,winners,missing,ballot,timestamp\n"
            "v1,A,1,0,E|Z,2026-01-01T00:00:00Z\n"
        )
        with pytest.raises(ValidationError, match="row 2.*Z"):
            dataio.parse_responses(text, scenarios)

    def test_unknown_scenario_rejected(self, scenarios):
        text = (
            "voter_id,scenario_id,winners,missing,ballot,timestamp\n"
            "v1,Q,1,0,E,2026-01-01T00:00:00Z\n"
        )
        with pytest.raises(ValidationError, match="unknown scenario"):
            dataio.parse_responses(text, scenarios)

    def test_duplicates_listed(self, scenarios):
        text = (
            "voter_id,scenario_id,winners,missing,ballot,timestamp\n"
            "v1,A,1,0,E,t1\n"
            "v1,A,1,0,B,t2\n"
        )
        with pytest.raises(ValidationError, match="duplicate"):
            dataio.parse_responses(text, scenarios)

    def test_bad_header_rejected(self):
        with pytest.raises(ValidationError, match="header"):
            dataio.parse_responses("a,b,c\n1,2,3\n")

    def test_no_validation_without_scenarios(self):
        text = (
            "voter_id,scenario_id,winners,missing,ballot,timestamp\n"
            "v1,whatever,4,2,X|Y,t\n"
        )
        (rec,) = dataio.parse_responses(text)
        assert rec.ballot == frozenset({"X", "Y"})


class TestReportIO:
    def test_report_json(self, tmp_path, scenarios):
        from avlab.fitting import evaluate_cohort

        records = generate_synthetic_cohort(
            CohortSpec(voters=2, model=Model.COMPLETE, noise=0.0, seed=1), scenarios
        )
        report = evaluate_cohort(records, scenarios)
        path = tmp_path / "report.json"
        dataio.write_report(report, path)
        obj = json.loads(path.read_text())
        assert obj["winnerCounts"] == [1, 2, 3]
        assert len(obj["cells"]) == 15
        complete_row = [c for c in obj["cells"] if c["model"] == "complete"]
        assert all(c["meanAccuracy"] == 1.0 for c in complete_row)

    def test_atomic_write_replaces_whole_file(self, tmp_path):
        path = tmp_path / "file.txt"
        dataio.atomic_write_text(path, "first")
        dataio.atomic_write_text(path, "second")
        assert path.read_text() == "second"
        assert list(tmp_path.iterdir()) == [path]

"""Loading and writing scenario files, response datasets, and reports.

Scenario files are JSON; response datasets are RFC-4180 CSV with ballots
encoded as pipe-joined candidate labels. All writes go through a
write-temp-then-rename step so readers never observe a partial file.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from importlib import resources
from pathlib import Path
from typing import Mapping

from .core import CandidateSet, Scenario, Tally, UtilityProfile, format_ballot
from .errors import ValidationError
from .fitting import AccuracyReport, ResponseRecord

RESPONSE_HEADER = ["voter_id", "scenario_id", "winners", "missing", "ballot", "timestamp"]

_FIXTURE_FILES = {"A": "scenario_a.json", "B": "scenario_b.json"}


def atomic_write_text(path: str | Path, text: str) -> None:
    """Write a whole file atomically (temp file + rename)."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def parse_scenario(obj: dict, source: str = "<scenario>") -> Scenario:
    """Build a validated :class:`Scenario` from a parsed JSON object."""
    try:
        labels = tuple(obj["candidates"])
        utilities = {str(c): float(u) for c, u in obj["utilities"].items()}
        counts = {str(c): int(n) for c, n in obj["counts"].items()}
        scenario = Scenario(
            id=str(obj["id"]),
            candidates=CandidateSet(labels),
            utilities=UtilityProfile(utilities),
            tally=Tally(
                counts=counts,
                known_ballots=int(obj["knownBallots"]),
                missing_ballots=int(obj.get("missingBallots", 0)),
            ),
            winners=int(obj["winners"]),
        )
    except KeyError as exc:
        raise ValidationError(f"{source}: missing required field {exc.args[0]!r}") from exc
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise ValidationError(f"{source}: {exc}") from None
        raise ValidationError(f"{source}: malformed value ({exc})") from exc
    return scenario


def scenario_to_obj(scenario: Scenario) -> dict:
    return {
        "id": scenario.id,
        "candidates": list(scenario.candidates.labels),
        "utilities": {c: scenario.utility(c) for c in scenario.candidates},
        "counts": {c: scenario.count(c) for c in scenario.candidates},
        "knownBallots": scenario.tally.known_ballots,
        "missingBallots": scenario.tally.missing_ballots,
        "winners": scenario.winners,
    }


def load_scenario(path: str | Path) -> Scenario:
    """Load and validate a scenario JSON file."""
    path = Path(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(obj, dict):
        raise ValidationError(f"{path}: expected a JSON object at top level")
    return parse_scenario(obj, source=str(path))


def write_scenario(scenario: Scenario, path: str | Path) -> None:
    atomic_write_text(path, json.dumps(scenario_to_obj(scenario), indent=2) + "\n")


def builtin_scenarios() -> dict[str, Scenario]:
    """The two bundled scenarios, keyed by id."""
    out: dict[str, Scenario] = {}
    for sid, fname in _FIXTURE_FILES.items():
        text = resources.files("avlab.fixtures").joinpath(fname).read_text(encoding="utf-8")
        out[sid] = parse_scenario(json.loads(text), source=f"fixture {fname}")
    return out


def resolve_scenario(ref: str) -> Scenario:
    """Accept either a bundled scenario id ("A"/"B") or a file path."""
    builtins = builtin_scenarios()
    if ref in builtins:
        return builtins[ref]
    return load_scenario(ref)


def parse_ballot_field(text: str) -> frozenset[str]:
    return frozenset(part for part in text.split("|") if part) if text else frozenset()


def responses_to_csv(records: list[ResponseRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(RESPONSE_HEADER)
    for rec in records:
        writer.writerow(
            [
                rec.voter_id,
                rec.scenario_id,
                rec.winners,
                rec.missing,
                format_ballot(rec.ballot),
                rec.timestamp,
            ]
        )
    return buf.getvalue()


def write_responses(records: list[ResponseRecord], path: str | Path) -> None:
    atomic_write_text(path, responses_to_csv(records))


def parse_responses(text: str, scenarios: Mapping[str, Scenario] | None = None, source: str = "<responses>") -> list[ResponseRecord]:
    """Parse a response CSV, validating ballots against ``scenarios`` when given."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ValidationError(f"{source}: empty file") from None
    if header != RESPONSE_HEADER:
        raise ValidationError(f"{source}: bad header {header!r}, expected {RESPONSE_HEADER!r}")
    records: list[ResponseRecord] = []
    seen: dict[tuple, int] = {}
    duplicates: list[str] = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(RESPONSE_HEADER):
            raise ValidationError(f"{source}: row {lineno}: expected {len(RESPONSE_HEADER)} fields, got {len(row)}")
        voter_id, scenario_id, winners, missing, ballot_text, timestamp = row
        try:
            k, n_missing = int(winners), int(missing)
        except ValueError as exc:
            raise ValidationError(f"{source}: row {lineno}: {exc}") from None
        ballot = parse_ballot_field(ballot_text)
        if scenarios is not None:
            if scenario_id not in scenarios:
                raise ValidationError(f"{source}: row {lineno}: unknown scenario {scenario_id!r}")
            scn = scenarios[scenario_id]
            unknown = ballot - set(scn.candidates.labels)
            if unknown:
                raise ValidationError(
                    f"{source}: row {lineno}: ballot references unknown candidates {sorted(unknown)}"
                )
        key = (voter_id, scenario_id, k, n_missing)
        if key in seen:
            duplicates.append(f"row {lineno} duplicates row {seen[key]}: {key!r}")
        else:
            seen[key] = lineno
        records.append(
            ResponseRecord(
                voter_id=voter_id,
                scenario_id=scenario_id,
                winners=k,
                missing=n_missing,
                ballot=ballot,
                timestamp=timestamp,
            )
        )
    if duplicates:
        raise ValidationError(f"{source}: duplicate condition keys:\n  " + "\n  ".join(duplicates))
    return records


def load_responses(path: str | Path, scenarios: Mapping[str, Scenario] | None = None) -> list[ResponseRecord]:
    path = Path(path)
    return parse_responses(path.read_text(encoding="utf-8"), scenarios, source=str(path))


def write_report(report: AccuracyReport, path: str | Path) -> None:
    """Write an accuracy report as JSON (aligned text lives in ``to_text``)."""
    atomic_write_text(path, json.dumps(report.to_obj(), indent=2) + "\n")


def write_curve_csv(rows: list[tuple], header: list[str], path: str | Path) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(header)
    writer.writerows(rows)
    atomic_write_text(path, buf.getvalue())

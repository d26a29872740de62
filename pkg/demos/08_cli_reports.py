"""
Scenario configs and the command-line runner
============================================

Every capability is also reachable through JSON scenario configs and the
`momentkit` CLI (run / validate / list).  Reports are deterministic JSON
plus RFC-4180 CSV tables; volatile metadata lives in a sibling file.
"""

import json
import pathlib
import tempfile

from importlib import resources

from momentkit.cli import main
from momentkit.scenarios import SCENARIO_KINDS

print("available scenario kinds:")
for kind, entry in SCENARIO_KINDS.items():
    print(f"  {kind:20s} {entry['description']}")

fixtures = resources.files("momentkit").joinpath("fixtures")
with tempfile.TemporaryDirectory() as tmp:
    # A simple trace scenario: the report carries the computed value,
    # the per-kind tolerances, and the pass verdict.
    code = main(["run", str(fixtures / "trace.json"), "--out", tmp])
    report = json.loads((pathlib.Path(tmp) / "trace.report.json").read_text())
    print("exit:", code, " value:", report["results"]["value"],
          " passed:", report["passed"])

    # The nine-stage end-to-end scenario also emits a CSV stage table.
    code = main(["run", str(fixtures / "main_theorem.json"), "--out", tmp])
    csv_path = pathlib.Path(tmp) / "main_theorem.report.stages.csv"
    print("stage table:")
    for line in csv_path.read_text().splitlines():
        print("   ", line)

    # Timestamps and thread counts stay out of the report proper so that
    # reruns with the same seed are byte-identical; they live in the
    # sibling meta file.
    meta = json.loads(
        (pathlib.Path(tmp) / "main_theorem.report.meta.json").read_text()
    )
    print("meta keys:", sorted(meta))

# Config validation catches typos with a suggestion instead of a stack
# trace.
bad = {"kind": "tracee", "parameters": {}}
with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as fh:
    json.dump(bad, fh)
    bad_path = fh.name
code = main(["validate", bad_path])
print("validate exit for typo config:", code)
pathlib.Path(bad_path).unlink()

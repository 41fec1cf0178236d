"""Regenerate the frontend test fixtures from the live Python engine.

Runs the real service in-process and records the JSON bodies the UI
tests replay through their mocked fetch, so the mocks never drift from
actual service behaviour. Run from the repository root:

    python frontend/scripts/capture-fixtures.py
"""

import copy
import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from modelrank.io_formats import bundled_scenario_path, load_scenario
from modelrank.service import create_app

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

QUALITY_LABELS = ["fitness", "precision", "generalization"]
JUDGMENT_ENTRIES = {
    "stakeholder-1": [[1.0, 6.0, 7.0], [0.17, 1.0, 1.0], [0.14, 1.0, 1.0]],
    "stakeholder-2": [[1.0, 5.0, 5.0], [0.2, 1.0, 1.0], [0.2, 1.0, 1.0]],
    "stakeholder-3": [[1.0, 1.0, 0.33], [1.0, 1.0, 2.0], [3.0, 0.5, 1.0]],
}
# throughput weight dragged past the rank flip (~0.268), others
# rescaled proportionally from the (0.40, 0.25, 0.35) baseline
PAST_FLIP_WEIGHTS = {
    "labels": ["quality", "throughput", "risk"],
    "values": [0.384, 0.28, 0.336],
}


def write(name: str, payload) -> None:
    (FIXTURES / name).write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {name}")


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    document = load_scenario(bundled_scenario_path()).document

    with tempfile.TemporaryDirectory() as tmp:
        client = TestClient(create_app(Path(tmp)))

        created = client.post("/problems", json=document).json()
        sid = created["id"]
        write("create.json", created)
        write("problem.json", client.get(f"/problems/{sid}").json())
        write("ranking_initial.json", client.get(f"/problems/{sid}/ranking").json())

        version = created["version"]
        for k, (stakeholder, entries) in enumerate(JUDGMENT_ENTRIES.items(), start=1):
            response = client.put(
                f"/problems/{sid}/judgments/{stakeholder}",
                json={"labels": QUALITY_LABELS, "entries": entries},
                headers={"If-Match": str(version)},
            )
            assert response.status_code == 200, response.text
            version = response.json()["version"]
            write(f"judgments_s{k}.json", response.json())
        write("ranking_after_judgments.json",
              client.get(f"/problems/{sid}/ranking").json())

        # sweep recorded at the baseline weights, before the what-if move
        sensitivity = client.post(
            f"/problems/{sid}/sensitivity",
            json={"criterion": "throughput", "grid": 101},
        )
        assert sensitivity.status_code == 200
        write("sensitivity_throughput.json", sensitivity.json())

        stale = client.put(
            f"/problems/{sid}/weights",
            json={"top_level": PAST_FLIP_WEIGHTS},
            headers={"If-Match": "1"},
        )
        assert stale.status_code == 409
        write("conflict_409.json", stale.json())

        moved = client.put(
            f"/problems/{sid}/weights",
            json={"top_level": PAST_FLIP_WEIGHTS},
            headers={"If-Match": str(version)},
        )
        assert moved.status_code == 200, moved.text
        write("weights_put.json", moved.json())
        write("ranking_after_weights.json",
              client.get(f"/problems/{sid}/ranking").json())

        # a sparse scenario cannot drop its screening rule: 22
        # alternatives carry no throughput/risk values
        rejected = client.put(
            f"/problems/{sid}/knockouts",
            json={"knockouts": []},
            headers={"If-Match": str(moved.json()["version"])},
        )
        assert rejected.status_code == 422
        write("knockouts_422.json", rejected.json())

        # complete-metrics variant: toggling the rule off yields all 27
        complete = copy.deepcopy(document)
        for alternative in complete["alternatives"]:
            alternative["metrics"].setdefault("throughput", 60.0)
            alternative["metrics"].setdefault("risk", "medium")
        full = client.post("/problems", json=complete).json()
        write("problem_full.json", client.get(f"/problems/{full['id']}").json())
        toggled = client.put(
            f"/problems/{full['id']}/knockouts",
            json={"knockouts": []},
            headers={"If-Match": str(full["version"])},
        )
        assert toggled.status_code == 200
        write("knockouts_off.json", toggled.json())
        write("ranking_full27.json",
              client.get(f"/problems/{full['id']}/ranking").json())


if __name__ == "__main__":
    main()

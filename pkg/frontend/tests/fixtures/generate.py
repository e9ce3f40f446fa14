#!/usr/bin/env python3
"""Regenerate the frontend contract-test fixtures from the real API.

Runs a small seeded optimization, saves it, and records genuine endpoint
responses so the frontend tests exercise exactly what the service serves.
"""

import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

import evotrace as et
from evotrace.service import create_app
from evotrace.store import save_run

HERE = Path(__file__).parent
RANGE = (2, 7)  # six generation columns, like brushing 56..61 at small scale


def main() -> None:
    problem = et.get_problem("dtlz2", n=6)
    config = et.make_run_config(problem, mu=12, generations=8, seed=11)
    log = et.run(problem, "nsga2", config)

    with tempfile.TemporaryDirectory() as tmp:
        save_run(log, Path(tmp) / "demo")
        client = TestClient(create_app(tmp))

        def dump(name: str, response) -> None:
            assert response.status_code == 200, (name, response.text)
            (HERE / name).write_text(json.dumps(response.json(), indent=1, sort_keys=True))

        dump("runs.json", client.get("/runs"))
        dump("overview.json", client.get("/runs/demo/overview"))
        generations = client.get(
            "/runs/demo/generations",
            params={"from": RANGE[0], "to": RANGE[1], "iterations": 250},
        )
        dump("generations.json", generations)

        # a mutated offspring that survived, in a middle column: the workflow
        # test selects this dot
        chosen = None
        for column in generations.json()["generations"][1:-1]:
            for i, origin, survived in zip(
                column["ids"], column["origins"], column["survived"]
            ):
                if origin == "mutated_offspring" and survived:
                    chosen = (i, column["generation"])
                    break
            if chosen:
                break
        assert chosen is not None, "fixture run produced no surviving mutant in range"
        target_id, target_generation = chosen

        dump("lineage.json", client.get("/runs/demo/lineage", params={"ids": str(target_id)}))
        dump("operators.json", client.get(f"/runs/demo/operators/{target_generation}"))
        (HERE / "meta.json").write_text(
            json.dumps(
                {
                    "run": "demo",
                    "range": {"from": RANGE[0], "to": RANGE[1]},
                    "selected_id": target_id,
                    "selected_generation": target_generation,
                },
                indent=1,
                sort_keys=True,
            )
        )
        print(f"fixtures written: selected id {target_id} at generation {target_generation}")


if __name__ == "__main__":
    main()

import math

import numpy as np
import pytest
from fastapi.testclient import TestClient

import evotrace as et
from evotrace.service import create_app
from evotrace.store import save_run


@pytest.fixture(scope="module")
def runs_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("service-runs")
    problem = et.get_problem("dtlz2", n=6)
    config = et.make_run_config(problem, mu=12, generations=6, seed=11)
    save_run(et.run(problem, "nsga2", config), root / "demo")
    (root / "broken").mkdir()
    (root / "broken" / "manifest.json").write_text("{not json")
    return root


@pytest.fixture(scope="module")
def client(runs_dir):
    return TestClient(create_app(runs_dir, range_cap=4))


def test_list_runs(client):
    payload = client.get("/runs").json()
    by_name = {entry["name"]: entry for entry in payload}
    assert by_name["demo"]["status"] == "ok"
    assert by_name["demo"]["problem"] == "dtlz2"
    assert by_name["demo"]["mu"] == 12
    assert by_name["demo"]["generations"] == 6
    assert by_name["broken"]["status"] == "invalid"


def test_empty_runs_dir(tmp_path):
    empty_client = TestClient(create_app(tmp_path))
    assert empty_client.get("/runs").json() == []


def test_overview(client):
    r = client.get("/runs/demo/overview")
    assert r.status_code == 200
    body = r.json()
    series = body["quality_series"]
    assert (
        len(series["igd"]) == len(series["hv"]) == len(series["sp"]) == len(series["ms"]) == 6
    )
    for entry in body["origin_statistics"]:
        survived = sum(entry[k]["survived"] for k in (
            "reserved", "mating_pool", "crossover_offspring", "mutated_offspring"
        ))
        assert survived == body["mu"]


def test_overview_unknown_run(client):
    assert client.get("/runs/nope/overview").status_code == 404


def test_generation_detail(client):
    r = client.get("/runs/demo/generations", params={"from": 2, "to": 3})
    assert r.status_code == 200
    body = r.json()
    assert body["from"] == 2 and body["to"] == 3
    assert body["projection_mode"] in ("tsne", "pca_fallback")
    assert set(body["size_measures"]) == {
        "nearest_reference", "nearest_neighbor_objective", "nearest_neighbor_decision"
    }
    grid = body["density_grid"]
    assert len(grid["values"]) == grid["width"] * grid["height"]
    for generation in body["generations"]:
        count = len(generation["ids"])
        assert len(generation["origins"]) == count
        assert len(generation["survived"]) == count
        assert len(generation["objectives"]) == count * 3
        assert len(generation["pca"]) == count * 2
        assert len(generation["tsne"]) == count * 2
        for key in ("nearest_reference", "nearest_neighbor_objective",
                    "nearest_neighbor_decision"):
            assert len(generation[key]) == count
            for value in generation[key]:
                assert isinstance(value, (int, float))


def test_generation_detail_pool_size(client):
    r = client.get("/runs/demo/generations", params={"from": 2, "to": 2})
    generation = r.json()["generations"][0]
    # |Q(k)| = mu + 2*lambda = 12 + 12
    assert len(generation["ids"]) == 24


def test_generation_detail_cached_flag(client):
    params = {"from": 4, "to": 5, "iterations": 50}
    first = client.get("/runs/demo/generations", params=params).json()
    second = client.get("/runs/demo/generations", params=params).json()
    assert second["projection_cached"] is True
    assert second["generations"] == first["generations"]


def test_generation_range_cap(client):
    r = client.get("/runs/demo/generations", params={"from": 1, "to": 6})
    assert r.status_code == 400
    assert "cap" in r.json()["detail"]


def test_generation_range_validation(client):
    assert client.get("/runs/demo/generations", params={"from": 5, "to": 2}).status_code == 400
    assert client.get("/runs/demo/generations", params={"from": 1, "to": 99}).status_code == 400
    r = client.get("/runs/demo/generations", params={"from": 1, "to": 2, "size": "bogus"})
    assert r.status_code == 400


def test_non_survivors_absent_from_next_population(client, runs_dir):
    log = None
    from evotrace.store import load_run

    log = load_run(runs_dir / "demo")
    r = client.get("/runs/demo/generations", params={"from": 2, "to": 3}).json()
    by_generation = {g["generation"]: g for g in r["generations"]}
    gen2 = by_generation[2]
    dead = {i for i, s in zip(gen2["ids"], gen2["survived"]) if not s}
    assert dead.isdisjoint(set(log.generations[2].population_ids))


def test_lineage_endpoint(client):
    r = client.get("/runs/demo/generations", params={"from": 2, "to": 2}).json()
    generation = r["generations"][0]
    mutated = [
        i for i, origin in zip(generation["ids"], generation["origins"])
        if origin == "mutated_offspring"
    ]
    target = mutated[0] if mutated else generation["ids"][-1]
    body = client.get("/runs/demo/lineage", params={"ids": str(target)}).json()
    assert str(target) in body["life_spans"]
    tree = body["trees"][0]
    assert tree["root"] == target
    for edge in tree["edges"]:
        assert edge["relation"] in ("crossover", "mutation_pre_image", "reserved_self")
        assert edge["objective_distance"] >= 0
    assert body["common_ancestors"] is None  # single id


def test_lineage_edge_distance_definition(client, runs_dir):
    from evotrace.store import load_run

    log = load_run(runs_dir / "demo")
    pair = log.generations[0].mating_pairs[0]
    child = pair.offspring_ids[0]
    body = client.get("/runs/demo/lineage", params={"ids": str(child)}).json()
    edges = body["trees"][0]["edges"]
    for edge in edges:
        if edge["child"] == child and edge["parent"] == pair.parent_a_id:
            expected = math.dist(
                log.individuals[child].objective, log.individuals[pair.parent_a_id].objective
            )
            assert edge["objective_distance"] == pytest.approx(expected, abs=1e-12)
            return
    pytest.fail("parent edge missing from lineage payload")


def test_lineage_common_ancestor_for_siblings(client, runs_dir):
    from evotrace.store import load_run

    log = load_run(runs_dir / "demo")
    pair = log.generations[0].mating_pairs[0]
    ids = f"{pair.offspring_ids[0]},{pair.offspring_ids[1]}"
    body = client.get("/runs/demo/lineage", params={"ids": ids}).json()
    assert body["common_ancestors"] is not None
    assert body["common_ancestors"]["canonical"] == min(body["common_ancestors"]["ids"])


def test_lineage_errors(client):
    assert client.get("/runs/demo/lineage", params={"ids": "999999"}).status_code == 404
    assert client.get("/runs/demo/lineage", params={"ids": "abc"}).status_code == 400
    assert client.get("/runs/demo/lineage", params={"ids": ""}).status_code == 400


def test_operator_detail(client, runs_dir):
    from evotrace.store import load_run

    log = load_run(runs_dir / "demo")
    r = client.get("/runs/demo/operators/3")
    assert r.status_code == 200
    body = r.json()
    rec = log.generations[2]
    assert len(body["pairs"]) == len(rec.mating_pairs)
    assert len(body["mutations"]) == len(rec.mutation_events)

    for pair in body["pairs"]:
        assert pair["parent_parent_distance"] >= 0
        assert len(pair["offspring_parent_distances"]) == 2
        assert len(pair["nearest_reference"]) == 4

    if body["mutations"]:
        deltas = np.array([m["delta_normalized"] for m in body["mutations"]])
        assert deltas.min() >= 0.0 and deltas.max() <= 1.0
        if len(deltas) > 1:
            spans = deltas.max(axis=0) - deltas.min(axis=0)
            raw = np.array([m["delta"] for m in body["mutations"]])
            varying = raw.max(axis=0) - raw.min(axis=0) > 0
            assert np.allclose(deltas.min(axis=0)[varying], 0.0)
            assert np.allclose(deltas.max(axis=0)[varying], 1.0)
        for mutation in body["mutations"]:
            mutant = log.individuals[mutation["mutant"]]
            pre = log.individuals[mutation["offspring"]]
            assert mutation["delta"] == pytest.approx(
                [a - b for a, b in zip(mutant.decision, pre.decision)], abs=1e-12
            )

    groups = body["selection"]["groups"]
    assert sum(g["survived"] for g in groups) == log.config.mu
    for group in groups:
        assert group["total"] == len(group["members"])
        assert sum(group["origin_counts"].values()) == group["total"]
        assert group["survived"] == sum(1 for m in group["members"] if m["survived"])


def test_operator_sorting(client):
    r = client.get("/runs/demo/operators/3", params={"sort_pairs": "parent_parent"})
    distances = [p["parent_parent_distance"] for p in r.json()["pairs"]]
    assert distances == sorted(distances)
    r = client.get("/runs/demo/operators/3", params={"sort_mutations": "distance"})
    if r.json()["mutations"]:
        values = [m["distance"] for m in r.json()["mutations"]]
        assert values == sorted(values)
    r = client.get("/runs/demo/operators/3", params={"sort_mutations": "dim:0"})
    assert r.status_code == 200
    assert client.get(
        "/runs/demo/operators/3", params={"sort_mutations": "dim:99"}
    ).status_code == 400
    assert client.get(
        "/runs/demo/operators/3", params={"sort_pairs": "bogus"}
    ).status_code == 400


def test_operator_generation_bounds(client):
    assert client.get("/runs/demo/operators/0").status_code == 404
    assert client.get("/runs/demo/operators/7").status_code == 404


def test_identical_requests_identical_payloads(client):
    a = client.get("/runs/demo/operators/2").json()
    b = client.get("/runs/demo/operators/2").json()
    assert a == b

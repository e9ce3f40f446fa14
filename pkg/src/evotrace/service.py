"""HTTP query API over stored runs: the boundary the frontend consumes.

Endpoints (all GET, JSON bodies, numeric arrays flat):

  /runs                                run summaries (invalid dirs flagged)
  /runs/{run}/overview                 quality series + origin statistics
  /runs/{run}/generations?from=&to=&size=&perplexity=&iterations=
                                       per-generation scatter payloads
  /runs/{run}/lineage?ids=&back=       life spans, trees, common ancestors
  /runs/{run}/operators/{k}?sort_pairs=&sort_mutations=
                                       mating / mutation / selection panels

Every payload is derived purely from the stored RunLog; the service keeps
caches only (loaded logs, the per-run PCA + density grid, and t-SNE
embeddings keyed by (range, perplexity, iterations, seed), LRU-bounded and
mirrored to the run's projections/ directory). Non-finite fitness scores are
encoded as the strings "Infinity"/"-Infinity" exactly as in the store.
"""

from __future__ import annotations

import math
import os
import threading
from collections import OrderedDict
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException, Query

from .core import Origin, RunLog
from .lineage import ancestors, common_ancestor_set, life_span
from .metrics import origin_statistics
from .projection import PcaModel, TsneEmbedding, density_grid, fit_pca, fit_tsne, project
from .store import (
    StoreError,
    load_pca,
    load_run,
    load_tsne,
    read_manifest,
    save_pca,
    save_tsne,
    tsne_cache_key,
)

RUNS_DIR_ENV = "EVOTRACE_RUNS_DIR"
DEFAULT_RANGE_CAP = 12
DEFAULT_EMBEDDING_CACHE_BYTES = 64 * 1024 * 1024

SIZE_MEASURES = ("nearest_reference", "nearest_neighbor_objective", "nearest_neighbor_decision")

ORIGIN_ORDER = (
    Origin.RESERVED,
    Origin.MATING_POOL,
    Origin.CROSSOVER_OFFSPRING,
    Origin.MUTATED_OFFSPRING,
)


def _encode(value: float) -> float | str:
    if math.isinf(value):
        return "Infinity" if value > 0 else "-Infinity"
    if math.isnan(value):
        return "NaN"
    return float(value)


class RunRepository:
    """Loads runs from a directory tree and caches analysis artifacts."""

    def __init__(
        self,
        runs_dir,
        range_cap: int = DEFAULT_RANGE_CAP,
        embedding_cache_bytes: int = DEFAULT_EMBEDDING_CACHE_BYTES,
    ):
        self.runs_dir = Path(runs_dir)
        self.range_cap = range_cap
        self._logs: dict[str, RunLog] = {}
        self._pca: dict[str, PcaModel] = {}
        self._density: dict[str, dict] = {}
        self._embeddings: OrderedDict[tuple, TsneEmbedding] = OrderedDict()
        self._embedding_bytes = 0
        self._embedding_cap = embedding_cache_bytes
        self._lock = threading.Lock()
        self._fit_locks: dict[tuple, threading.Lock] = {}

    # -- run access ---------------------------------------------------------

    def run_directory(self, name: str) -> Path:
        path = (self.runs_dir / name).resolve()
        if path.parent != self.runs_dir.resolve() or not path.is_dir():
            raise HTTPException(status_code=404, detail=f"unknown run {name!r}")
        return path

    def list_runs(self) -> list[dict]:
        if not self.runs_dir.exists():
            raise HTTPException(
                status_code=500, detail=f"runs directory {self.runs_dir} does not exist"
            )
        out = []
        for path in sorted(p for p in self.runs_dir.iterdir() if p.is_dir()):
            try:
                manifest = read_manifest(path)
                out.append(
                    {
                        "name": path.name,
                        "status": "ok",
                        "problem": manifest["problem"]["name"],
                        "algorithm": manifest["algorithm"],
                        "mu": manifest["config"]["mu"],
                        "generations": manifest["counts"]["generations"],
                        "seed": manifest["seed"],
                    }
                )
            except StoreError as exc:
                out.append({"name": path.name, "status": "invalid", "error": str(exc)})
        return out

    def log(self, name: str) -> RunLog:
        with self._lock:
            if name in self._logs:
                return self._logs[name]
        directory = self.run_directory(name)
        try:
            log = load_run(directory)
        except StoreError as exc:
            raise HTTPException(status_code=500, detail=f"run {name!r} unreadable: {exc}")
        with self._lock:
            self._logs[name] = log
        return log

    # -- cached projections ---------------------------------------------------

    def pca(self, name: str) -> PcaModel:
        with self._lock:
            if name in self._pca:
                return self._pca[name]
        directory = self.run_directory(name)
        model = load_pca(directory)
        if model is None:
            model = fit_pca(self.log(name).reference_set)
            save_pca(directory, model)
        with self._lock:
            self._pca[name] = model
        return model

    def reference_density(self, name: str) -> dict:
        with self._lock:
            if name in self._density:
                return self._density[name]
        log = self.log(name)
        projected = project(self.pca(name), log.reference_set)
        grid = density_grid(projected)
        payload = {
            "width": grid.width,
            "height": grid.height,
            "x_min": grid.x_min,
            "x_max": grid.x_max,
            "y_min": grid.y_min,
            "y_max": grid.y_max,
            "bandwidth": grid.bandwidth,
            "values": list(grid.values),
        }
        with self._lock:
            self._density[name] = payload
        return payload

    def embedding(
        self,
        name: str,
        first: int,
        last: int,
        perplexity: float,
        iterations: int,
        union_ids: list[int],
    ) -> tuple[TsneEmbedding, bool]:
        """Shared t-SNE over the union; (embedding, was_cached)."""
        log = self.log(name)
        seed = log.config.seed
        cache_id = (name, first, last, perplexity, iterations, seed)
        with self._lock:
            if cache_id in self._embeddings:
                self._embeddings.move_to_end(cache_id)
                return self._embeddings[cache_id], True
            fit_lock = self._fit_locks.setdefault(cache_id, threading.Lock())

        with fit_lock:  # coalesce concurrent identical fits
            with self._lock:
                if cache_id in self._embeddings:
                    return self._embeddings[cache_id], True
            directory = self.run_directory(name)
            key = tsne_cache_key(first, last, perplexity, iterations, seed)
            embedding = load_tsne(directory, key)
            cached = embedding is not None
            if embedding is None:
                vectors = [log.individuals[i].decision for i in union_ids]
                embedding = fit_tsne(
                    vectors, union_ids, perplexity=perplexity, iterations=iterations, seed=seed
                )
                save_tsne(directory, key, embedding)
            self._remember(cache_id, embedding)
            return embedding, cached

    def _remember(self, cache_id: tuple, embedding: TsneEmbedding) -> None:
        size = 32 * len(embedding.coordinates) + 128
        with self._lock:
            self._embeddings[cache_id] = embedding
            self._embeddings.move_to_end(cache_id)
            self._embedding_bytes += size
            while self._embedding_bytes > self._embedding_cap and len(self._embeddings) > 1:
                _, evicted = self._embeddings.popitem(last=False)
                self._embedding_bytes -= 32 * len(evicted.coordinates) + 128


# -- payload builders ---------------------------------------------------------


def overview_payload(log: RunLog) -> dict:
    series = {
        "generation": [q.generation for q in log.quality_series],
        "igd": [q.igd for q in log.quality_series],
        "hv": [q.hv for q in log.quality_series],
        "sp": [q.sp for q in log.quality_series],
        "ms": [q.ms for q in log.quality_series],
    }
    origins = []
    for rec in log.generations:
        stats = origin_statistics(rec)
        entry = {"generation": stats.generation}
        for origin in ORIGIN_ORDER:
            survived, died = stats.counts[origin]
            entry[origin.value] = {"survived": survived, "died": died}
        origins.append(entry)
    return {
        "mu": log.config.mu,
        "generations": len(log.generations),
        "quality_series": series,
        "origin_statistics": origins,
    }


def generation_detail_payload(
    log: RunLog,
    embedding: TsneEmbedding,
    pca: PcaModel,
    density: dict,
    first: int,
    last: int,
    size_mapping: str,
    embedding_cached: bool,
) -> dict:
    generations = []
    for k in range(first, last + 1):
        rec = log.generations[k - 1]
        roles = rec.candidate_roles()
        survived = {m.individual_id: m.survived for m in rec.selection.members()}
        ids = sorted(roles)
        objectives = np.asarray([log.individuals[i].objective for i in ids])
        decisions = np.asarray([log.individuals[i].decision for i in ids])
        reference = np.asarray(log.reference_set)

        pca_coords = project(pca, objectives)
        tsne_coords = embedding.slice(ids)

        ref_d = np.sqrt(((reference[None, :, :] - objectives[:, None, :]) ** 2).sum(axis=2))
        nearest_reference = ref_d.min(axis=1)
        nn_obj = _nearest_neighbor_all(objectives)
        nn_dec = _nearest_neighbor_all(decisions)

        generations.append(
            {
                "generation": k,
                "ids": ids,
                "origins": [roles[i].value for i in ids],
                "survived": [bool(survived[i]) for i in ids],
                "objectives": [float(v) for v in objectives.ravel()],
                "pca": [float(v) for v in pca_coords.ravel()],
                "tsne": [float(v) for v in tsne_coords.ravel()],
                "nearest_reference": [float(v) for v in nearest_reference],
                "nearest_neighbor_objective": [_encode(float(v)) for v in nn_obj],
                "nearest_neighbor_decision": [_encode(float(v)) for v in nn_dec],
            }
        )
    return {
        "from": first,
        "to": last,
        "m": log.problem.m,
        "size_mapping": size_mapping,
        "size_measures": list(SIZE_MEASURES),
        "projection_mode": embedding.mode,
        "projection_cached": embedding_cached,
        "density_grid": density,
        "generations": generations,
    }


def _nearest_neighbor_all(points: np.ndarray) -> np.ndarray:
    if len(points) < 2:
        return np.full(len(points), np.inf)
    d = np.sqrt(((points[:, None, :] - points[None, :, :]) ** 2).sum(axis=2))
    np.fill_diagonal(d, np.inf)
    return d.min(axis=1)


def lineage_payload(
    log: RunLog, ids: list[int], max_back: int | None, pca: PcaModel | None = None
) -> dict:
    for i in ids:
        if i not in log.individuals:
            raise HTTPException(status_code=404, detail=f"unknown individual id {i}")

    spans = {}
    trees = []
    for i in ids:
        birth, death = life_span(log, i)
        spans[str(i)] = {"birth": birth, "death": death}
        tree = ancestors(log, i, max_back)
        edges = []
        for e in tree.edges:
            child = log.individuals[e.child_id]
            parent = log.individuals[e.parent_id]
            distance = math.dist(child.objective, parent.objective)
            edges.append(
                {
                    "child": e.child_id,
                    "parent": e.parent_id,
                    "relation": e.relation.value,
                    "generation": e.generation,
                    "objective_distance": distance,
                }
            )
        nodes = {}
        for node_id, generation in sorted(tree.node_generations.items()):
            ind = log.individuals[node_id]
            node = {
                "generation": generation,
                "death": ind.death_generation,
                "origin": ind.origin.value,
                "objective": list(ind.objective),
                "decision": list(ind.decision),
            }
            if pca is not None:
                coords = project(pca, [ind.objective])[0]
                node["pca"] = [float(coords[0]), float(coords[1])]
            nodes[str(node_id)] = node
        trees.append({"root": tree.root_id, "nodes": nodes, "edges": edges})

    common = None
    if len(ids) >= 2:
        found = common_ancestor_set(log, ids)
        if found is not None:
            generation, at_best = found
            common = {"generation": generation, "ids": at_best, "canonical": at_best[0]}
    return {"ids": ids, "life_spans": spans, "trees": trees, "common_ancestors": common}


_PAIR_SORTS = {
    "parent_parent": lambda row: row["parent_parent_distance"],
    "parent_offspring": lambda row: max(
        d for pair in row["offspring_parent_distances"] for d in pair
    ),
}


def operator_payload(
    log: RunLog, generation: int, sort_pairs: str | None, sort_mutations: str | None
) -> dict:
    rec = log.generations[generation - 1]
    reference = np.asarray(log.reference_set)
    inds = log.individuals

    def nearest_ref(ind_id: int) -> float:
        objective = np.asarray(inds[ind_id].objective)
        return float(np.sqrt(((reference - objective) ** 2).sum(axis=1)).min())

    pairs = []
    for pair in rec.mating_pairs:
        pa = np.asarray(inds[pair.parent_a_id].decision)
        pb = np.asarray(inds[pair.parent_b_id].decision)
        offspring = [np.asarray(inds[o].decision) for o in pair.offspring_ids]
        pairs.append(
            {
                "parent_a": pair.parent_a_id,
                "parent_b": pair.parent_b_id,
                "offspring": list(pair.offspring_ids),
                "beta": pair.spread_factor,
                "perturbation_magnitudes": list(pair.perturbation_magnitudes),
                "parent_parent_distance": float(np.linalg.norm(pa - pb)),
                "offspring_parent_distances": [
                    [float(np.linalg.norm(o - pa)), float(np.linalg.norm(o - pb))]
                    for o in offspring
                ],
                "nearest_reference": {
                    str(i): nearest_ref(i)
                    for i in (pair.parent_a_id, pair.parent_b_id, *pair.offspring_ids)
                },
            }
        )
    if sort_pairs is not None:
        if sort_pairs not in _PAIR_SORTS:
            raise HTTPException(status_code=400, detail=f"unknown pair sort {sort_pairs!r}")
        pairs.sort(key=_PAIR_SORTS[sort_pairs])

    deltas = np.asarray([e.delta for e in rec.mutation_events], dtype=float)
    if len(deltas):
        lo = deltas.min(axis=0)
        hi = deltas.max(axis=0)
        span = hi - lo
        normalized = np.divide(
            deltas - lo, span, out=np.zeros_like(deltas), where=span > 0
        )
    mutations = []
    for row, event in enumerate(rec.mutation_events):
        mutations.append(
            {
                "offspring": event.offspring_id,
                "mutant": event.mutant_id,
                "delta": list(event.delta),
                "delta_normalized": [float(v) for v in normalized[row]],
                "distance": float(np.linalg.norm(deltas[row])),
                "pre_objective": list(event.pre_objective),
                "post_objective": list(inds[event.mutant_id].objective),
                "pre_nearest_reference": nearest_ref(event.offspring_id),
                "post_nearest_reference": nearest_ref(event.mutant_id),
            }
        )
    if sort_mutations is not None:
        if sort_mutations == "distance":
            mutations.sort(key=lambda row: row["distance"])
        elif sort_mutations.startswith("dim:"):
            dim = int(sort_mutations.split(":", 1)[1])
            if not 0 <= dim < log.problem.n:
                raise HTTPException(status_code=400, detail=f"delta dimension {dim} out of range")
            mutations.sort(key=lambda row: row["delta"][dim])
        else:
            raise HTTPException(
                status_code=400, detail=f"unknown mutation sort {sort_mutations!r}"
            )

    roles = rec.candidate_roles()
    groups = []
    for group in rec.selection.groups:
        counts = {origin.value: 0 for origin in ORIGIN_ORDER}
        members = []
        for member in group.members:
            origin = roles[member.individual_id]
            counts[origin.value] += 1
            members.append(
                {
                    "id": member.individual_id,
                    "origin": origin.value,
                    "fitness": _encode(member.fitness_score),
                    "survived": member.survived,
                }
            )
        groups.append(
            {
                "rank": group.rank,
                "total": len(group.members),
                "survived": sum(1 for m in group.members if m.survived),
                "origin_counts": counts,
                "members": members,
            }
        )

    return {
        "generation": generation,
        "n": log.problem.n,
        "pairs": pairs,
        "mutations": mutations,
        "selection": {"prioritized": rec.selection.prioritized, "groups": groups},
    }


# -- app ----------------------------------------------------------------------


def create_app(runs_dir=None, range_cap: int = DEFAULT_RANGE_CAP) -> FastAPI:
    """Build the API over a runs directory (default: $EVOTRACE_RUNS_DIR)."""
    if runs_dir is None:
        runs_dir = os.environ.get(RUNS_DIR_ENV, "runs")
    repo = RunRepository(runs_dir, range_cap=range_cap)
    app = FastAPI(title="evotrace", version="0.1.0")
    app.state.repository = repo

    @app.get("/runs")
    def list_runs():
        return repo.list_runs()

    @app.get("/runs/{run}/overview")
    def run_overview(run: str):
        return overview_payload(repo.log(run))

    @app.get("/runs/{run}/generations")
    def generation_detail(
        run: str,
        from_generation: int = Query(alias="from", ge=1),
        to_generation: int = Query(alias="to", ge=1),
        size: str = Query(default="nearest_reference"),
        perplexity: float = Query(default=30.0, gt=1.0),
        iterations: int = Query(default=1000, ge=1, le=5000),
    ):
        log = repo.log(run)
        total = len(log.generations)
        if size not in SIZE_MEASURES:
            raise HTTPException(status_code=400, detail=f"unknown size mapping {size!r}")
        if not 1 <= from_generation <= to_generation <= total:
            raise HTTPException(
                status_code=400,
                detail=f"range [{from_generation}, {to_generation}] outside 1..{total}",
            )
        width = to_generation - from_generation + 1
        if width > repo.range_cap:
            raise HTTPException(
                status_code=400,
                detail=(
                    f"range of {width} generations exceeds the cap of {repo.range_cap}; "
                    "t-SNE over the union would be too expensive — narrow the range"
                ),
            )
        union: set[int] = set()
        for k in range(from_generation, to_generation + 1):
            union.update(log.generations[k - 1].candidate_roles())
        union_ids = sorted(union)
        embedding, cached = repo.embedding(
            run, from_generation, to_generation, perplexity, iterations, union_ids
        )
        return generation_detail_payload(
            log,
            embedding,
            repo.pca(run),
            repo.reference_density(run),
            from_generation,
            to_generation,
            size,
            cached,
        )

    @app.get("/runs/{run}/lineage")
    def lineage_query(run: str, ids: str, back: int | None = Query(default=None, ge=0)):
        log = repo.log(run)
        try:
            parsed = [int(part) for part in ids.split(",") if part.strip() != ""]
        except ValueError:
            raise HTTPException(status_code=400, detail=f"bad ids parameter {ids!r}")
        if not parsed:
            raise HTTPException(status_code=400, detail="ids parameter is empty")
        return lineage_payload(log, parsed, back, repo.pca(run))

    @app.get("/runs/{run}/operators/{generation}")
    def operator_detail(
        run: str,
        generation: int,
        sort_pairs: str | None = Query(default=None),
        sort_mutations: str | None = Query(default=None),
    ):
        log = repo.log(run)
        if not 1 <= generation <= len(log.generations):
            raise HTTPException(
                status_code=404,
                detail=f"generation {generation} outside 1..{len(log.generations)}",
            )
        return operator_payload(log, generation, sort_pairs, sort_mutations)

    return app

"""Bit-exact persistence of run logs and cached projections.

A run directory contains:

  manifest.json       problem, algorithm, config, seed, counts, format version
  individuals.jsonl   one individual per line, id ascending
  generations.jsonl   one generation record per line
  measures.json       quality series + per-generation origin statistics
  reference.json      reference set (+ optional decisions) and HV reference point
  projections/        cached PCA / t-SNE results keyed by content hash

Serialization is canonical: keys sorted, compact separators, floats written
as their shortest round-trip decimal (Python repr), so saving the same log
twice produces identical bytes and save-load-save is a fixpoint. Non-finite
fitness scores (crowding-distance boundaries are +inf) are encoded as the
JSON strings "Infinity"/"-Infinity"/"NaN"; everything else must be finite.
Writes take a lock file; reads are concurrent.
"""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path

from filelock import FileLock

from .core import (
    GenerationRecord,
    Individual,
    MatingPair,
    MutationEvent,
    Origin,
    ProblemSpec,
    QualityPoint,
    RunConfig,
    RunLog,
    SelectionGroup,
    SelectionMember,
    SelectionRecord,
    validate_run_log,
)
from .metrics import origin_statistics
from .projection import PcaModel, TsneEmbedding

FORMAT_VERSION = 1

RUN_FILES = (
    "manifest.json",
    "individuals.jsonl",
    "generations.jsonl",
    "measures.json",
    "reference.json",
)


class StoreError(Exception):
    """Base for persistence failures."""


class MissingRunFileError(StoreError):
    pass


class SchemaVersionError(StoreError):
    pass


class JsonlParseError(StoreError):
    pass


class RunValidationError(StoreError):
    def __init__(self, violations: list[str]):
        super().__init__(
            f"stored log violates {len(violations)} invariant(s); "
            "pass force=True to load anyway:\n" + "\n".join(violations[:20])
        )
        self.violations = violations


def canonical_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def _encode_float(value: float):
    if math.isinf(value):
        return "Infinity" if value > 0 else "-Infinity"
    if math.isnan(value):
        return "NaN"
    return float(value)


def _decode_float(value) -> float:
    if isinstance(value, str):
        return {"Infinity": math.inf, "-Infinity": -math.inf, "NaN": math.nan}[value]
    return float(value)


def _individual_obj(ind: Individual) -> dict:
    return {
        "id": ind.id,
        "birth": ind.birth_generation,
        "death": ind.death_generation,
        "origin": ind.origin.value,
        "parents": list(ind.parent_ids),
        "decision": list(ind.decision),
        "objective": list(ind.objective),
    }


def _individual_from(obj: dict) -> Individual:
    return Individual(
        id=int(obj["id"]),
        birth_generation=int(obj["birth"]),
        origin=Origin(obj["origin"]),
        parent_ids=tuple(int(p) for p in obj["parents"]),
        decision=tuple(float(v) for v in obj["decision"]),
        objective=tuple(float(v) for v in obj["objective"]),
        death_generation=None if obj["death"] is None else int(obj["death"]),
    )


def _generation_obj(rec: GenerationRecord) -> dict:
    return {
        "index": rec.index,
        "reserved": list(rec.reserved_ids),
        "mating_pool": list(rec.mating_pool_ids),
        "mating_pairs": [
            {
                "parent_a": p.parent_a_id,
                "parent_b": p.parent_b_id,
                "offspring": list(p.offspring_ids),
                "beta": p.spread_factor,
                "perturbation": list(p.perturbation_magnitudes),
            }
            for p in rec.mating_pairs
        ],
        "mutations": [
            {
                "offspring": e.offspring_id,
                "mutant": e.mutant_id,
                "delta": list(e.delta),
                "pre_objective": list(e.pre_objective),
            }
            for e in rec.mutation_events
        ],
        "selection": {
            "prioritized": rec.selection.prioritized,
            "groups": [
                {
                    "rank": g.rank,
                    "members": [
                        [m.individual_id, _encode_float(m.fitness_score), m.survived]
                        for m in g.members
                    ],
                }
                for g in rec.selection.groups
            ],
        },
        "population": list(rec.population_ids),
        "evaluations": rec.evaluations,
    }


def _generation_from(obj: dict) -> GenerationRecord:
    return GenerationRecord(
        index=int(obj["index"]),
        reserved_ids=tuple(int(i) for i in obj["reserved"]),
        mating_pool_ids=tuple(int(i) for i in obj["mating_pool"]),
        mating_pairs=tuple(
            MatingPair(
                parent_a_id=int(p["parent_a"]),
                parent_b_id=int(p["parent_b"]),
                offspring_ids=(int(p["offspring"][0]), int(p["offspring"][1])),
                spread_factor=float(p["beta"]),
                perturbation_magnitudes=(
                    float(p["perturbation"][0]),
                    float(p["perturbation"][1]),
                ),
            )
            for p in obj["mating_pairs"]
        ),
        mutation_events=tuple(
            MutationEvent(
                offspring_id=int(e["offspring"]),
                mutant_id=int(e["mutant"]),
                delta=tuple(float(v) for v in e["delta"]),
                pre_objective=tuple(float(v) for v in e["pre_objective"]),
            )
            for e in obj["mutations"]
        ),
        selection=SelectionRecord(
            prioritized=bool(obj["selection"]["prioritized"]),
            groups=tuple(
                SelectionGroup(
                    rank=int(g["rank"]),
                    members=tuple(
                        SelectionMember(
                            individual_id=int(m[0]),
                            fitness_score=_decode_float(m[1]),
                            survived=bool(m[2]),
                        )
                        for m in g["members"]
                    ),
                )
                for g in obj["selection"]["groups"]
            ),
        ),
        population_ids=tuple(int(i) for i in obj["population"]),
        evaluations=int(obj["evaluations"]),
    )


def _manifest_obj(log: RunLog) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "problem": {
            "name": log.problem.name,
            "n": log.problem.n,
            "m": log.problem.m,
            "bounds": [list(b) for b in log.problem.bounds],
        },
        "algorithm": log.algorithm,
        "seed": log.config.seed,
        "config": {
            "mu": log.config.mu,
            "generations": log.config.generations,
            "seed": log.config.seed,
            "pair_count": log.config.pair_count,
            "sbx_distribution_index": log.config.sbx_distribution_index,
            "sbx_perturbation_scale": log.config.sbx_perturbation_scale,
            "mutation_probability": log.config.mutation_probability,
            "mutation_distribution_index": log.config.mutation_distribution_index,
            "mutation_per_variable_probability": log.config.mutation_per_variable_probability,
            "mating_strategy": log.config.mating_strategy,
            "reference_point_count": log.config.reference_point_count,
        },
        "counts": {
            "individuals": len(log.individuals),
            "generations": len(log.generations),
        },
    }


def _measures_obj(log: RunLog) -> dict:
    origins = []
    for rec in log.generations:
        stats = origin_statistics(rec)
        origins.append(
            {
                "generation": stats.generation,
                **{
                    origin.value: list(stats.counts[origin])
                    for origin in (
                        Origin.RESERVED,
                        Origin.MATING_POOL,
                        Origin.CROSSOVER_OFFSPRING,
                        Origin.MUTATED_OFFSPRING,
                    )
                },
            }
        )
    return {
        "quality": [
            {"generation": q.generation, "igd": q.igd, "hv": q.hv, "sp": q.sp, "ms": q.ms}
            for q in log.quality_series
        ],
        "origin_statistics": origins,
    }


def save_run(log: RunLog, directory) -> dict:
    """Write the full run directory; returns the manifest.

    Refuses to overwrite a directory holding a different format version.
    Partially written files are removed if a write fails.
    """
    path = Path(directory)
    path.mkdir(parents=True, exist_ok=True)
    manifest_path = path / "manifest.json"
    if manifest_path.exists():
        try:
            existing = json.loads(manifest_path.read_text())
        except json.JSONDecodeError as exc:
            raise StoreError(f"existing manifest is unreadable: {exc}") from exc
        if existing.get("format_version") != FORMAT_VERSION:
            raise SchemaVersionError(
                f"directory holds format version {existing.get('format_version')}, "
                f"writer is {FORMAT_VERSION}"
            )

    manifest = _manifest_obj(log)
    files = {
        "manifest.json": canonical_dumps(manifest) + "\n",
        "individuals.jsonl": "".join(
            canonical_dumps(_individual_obj(log.individuals[i])) + "\n"
            for i in sorted(log.individuals)
        ),
        "generations.jsonl": "".join(
            canonical_dumps(_generation_obj(rec)) + "\n" for rec in log.generations
        ),
        "measures.json": canonical_dumps(_measures_obj(log)) + "\n",
        "reference.json": canonical_dumps(
            {
                "objectives": [list(p) for p in log.reference_set],
                "decisions": (
                    None
                    if log.reference_decisions is None
                    else [list(p) for p in log.reference_decisions]
                ),
                "hv_reference_point": list(log.hv_reference_point),
            }
        )
        + "\n",
    }

    written: list[Path] = []
    with FileLock(str(path / ".lock")):
        try:
            for name, content in files.items():
                target = path / name
                target.write_text(content)
                written.append(target)
            (path / "projections").mkdir(exist_ok=True)
        except OSError:
            for target in written:
                try:
                    target.unlink()
                except OSError:
                    pass
            raise
    return manifest


def _read_jsonl(path: Path) -> list[dict]:
    out = []
    with path.open() as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                out.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise JsonlParseError(f"{path.name}:{lineno}: {exc}") from exc
    return out


def read_manifest(directory) -> dict:
    path = Path(directory) / "manifest.json"
    if not path.exists():
        raise MissingRunFileError(f"missing {path}")
    try:
        manifest = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise JsonlParseError(f"{path.name}: {exc}") from exc
    version = manifest.get("format_version")
    if version != FORMAT_VERSION:
        raise SchemaVersionError(f"unsupported format version {version!r}")
    return manifest


def load_run(directory, force: bool = False) -> RunLog:
    """Load and validate a run directory written by save_run.

    Raises MissingRunFileError / SchemaVersionError / JsonlParseError for
    structural problems and RunValidationError when the reconstructed log
    violates invariants (unless force=True).
    """
    path = Path(directory)
    manifest = read_manifest(path)
    for name in RUN_FILES:
        if not (path / name).exists():
            raise MissingRunFileError(f"missing {path / name}")

    problem = ProblemSpec(
        name=manifest["problem"]["name"],
        n=int(manifest["problem"]["n"]),
        m=int(manifest["problem"]["m"]),
        bounds=tuple((float(lo), float(hi)) for lo, hi in manifest["problem"]["bounds"]),
    )
    cfg = manifest["config"]
    config = RunConfig(
        mu=int(cfg["mu"]),
        generations=int(cfg["generations"]),
        seed=int(cfg["seed"]),
        pair_count=int(cfg["pair_count"]),
        sbx_distribution_index=float(cfg["sbx_distribution_index"]),
        sbx_perturbation_scale=float(cfg["sbx_perturbation_scale"]),
        mutation_probability=float(cfg["mutation_probability"]),
        mutation_distribution_index=float(cfg["mutation_distribution_index"]),
        mutation_per_variable_probability=(
            None
            if cfg["mutation_per_variable_probability"] is None
            else float(cfg["mutation_per_variable_probability"])
        ),
        mating_strategy=cfg["mating_strategy"],
        reference_point_count=int(cfg["reference_point_count"]),
    )

    individuals = {}
    for obj in _read_jsonl(path / "individuals.jsonl"):
        ind = _individual_from(obj)
        individuals[ind.id] = ind
    generations = [_generation_from(obj) for obj in _read_jsonl(path / "generations.jsonl")]

    try:
        measures = json.loads((path / "measures.json").read_text())
        reference = json.loads((path / "reference.json").read_text())
    except json.JSONDecodeError as exc:
        raise JsonlParseError(str(exc)) from exc

    quality = [
        QualityPoint(
            generation=int(q["generation"]),
            igd=float(q["igd"]),
            hv=float(q["hv"]),
            sp=float(q["sp"]),
            ms=float(q["ms"]),
        )
        for q in measures["quality"]
    ]

    log = RunLog(
        problem=problem,
        algorithm=manifest["algorithm"],
        config=config,
        individuals=individuals,
        generations=generations,
        quality_series=quality,
        reference_set=[tuple(float(v) for v in p) for p in reference["objectives"]],
        hv_reference_point=tuple(float(v) for v in reference["hv_reference_point"]),
        reference_decisions=(
            None
            if reference["decisions"] is None
            else [tuple(float(v) for v in p) for p in reference["decisions"]]
        ),
    )

    counts = manifest["counts"]
    if counts["individuals"] != len(individuals) or counts["generations"] != len(generations):
        raise JsonlParseError(
            f"manifest counts ({counts['individuals']} individuals, "
            f"{counts['generations']} generations) do not match files "
            f"({len(individuals)}, {len(generations)})"
        )

    if not force:
        violations = validate_run_log(log)
        if violations:
            raise RunValidationError(violations)
    return log


# --- projection cache -------------------------------------------------------


def pca_cache_path(directory) -> Path:
    return Path(directory) / "projections" / "pca.json"


def save_pca(directory, model: PcaModel) -> Path:
    path = pca_cache_path(directory)
    path.parent.mkdir(exist_ok=True)
    obj = {
        "mean": list(model.mean),
        "axes": [list(a) for a in model.axes],
        "explained_variance": list(model.explained_variance),
        "degenerate": model.degenerate,
    }
    path.write_text(canonical_dumps(obj) + "\n")
    return path


def load_pca(directory) -> PcaModel | None:
    path = pca_cache_path(directory)
    if not path.exists():
        return None
    obj = json.loads(path.read_text())
    return PcaModel(
        mean=tuple(float(v) for v in obj["mean"]),
        axes=(
            tuple(float(v) for v in obj["axes"][0]),
            tuple(float(v) for v in obj["axes"][1]),
        ),
        explained_variance=(
            float(obj["explained_variance"][0]),
            float(obj["explained_variance"][1]),
        ),
        degenerate=bool(obj["degenerate"]),
    )


def tsne_cache_key(
    first: int, last: int, perplexity: float, iterations: int, seed: int
) -> str:
    payload = canonical_dumps(
        {
            "from": first,
            "to": last,
            "perplexity": perplexity,
            "iterations": iterations,
            "seed": seed,
        }
    )
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def tsne_cache_path(directory, key: str) -> Path:
    return Path(directory) / "projections" / f"tsne-{key}.json"


def save_tsne(directory, key: str, embedding: TsneEmbedding) -> Path:
    path = tsne_cache_path(directory, key)
    path.parent.mkdir(exist_ok=True)
    obj = {
        "coordinates": [
            [i, x, y] for i, (x, y) in sorted(embedding.coordinates.items())
        ],
        "perplexity": embedding.perplexity,
        "iterations": embedding.iterations,
        "seed": embedding.seed,
        "final_kl": _encode_float(embedding.final_kl),
        "kl_after_exaggeration": _encode_float(embedding.kl_after_exaggeration),
        "mode": embedding.mode,
    }
    path.write_text(canonical_dumps(obj) + "\n")
    return path


def load_tsne(directory, key: str) -> TsneEmbedding | None:
    path = tsne_cache_path(directory, key)
    if not path.exists():
        return None
    obj = json.loads(path.read_text())
    return TsneEmbedding(
        coordinates={int(i): (float(x), float(y)) for i, x, y in obj["coordinates"]},
        perplexity=float(obj["perplexity"]),
        iterations=int(obj["iterations"]),
        seed=int(obj["seed"]),
        final_kl=_decode_float(obj["final_kl"]),
        kl_after_exaggeration=_decode_float(obj["kl_after_exaggeration"]),
        mode=obj["mode"],
    )


def list_run_directories(runs_root) -> list[Path]:
    root = Path(runs_root)
    if not root.exists():
        return []
    return sorted(p for p in root.iterdir() if p.is_dir())

"""Event-sourced design sessions: create, grade, evolve, replay.

Every state mutation appends exactly one JSONL record, and replaying a log
rebuilds the session bit for bit: the create record carries the normalized
genomes and the seed, grades are explicit, and evolution consumes the
session's rng stream in event order. One lock per session serializes
writers; independent sessions never contend.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .codec import CodecConfig, encode, normalize
from .corpus import REFERENCE_A, REFERENCE_B
from .curves import ClosedCurve, densify
from .engine import GaConfig, Individual, Population, evolve
from .errors import EvoshapeError, InvalidInputError, InvalidSetupError
from .harness import GenerationStats, ConvergenceTrace, average_population_similarity
from .io import (append_jsonl, codec_config_from_dict, codec_config_to_dict,
                 ga_config_from_dict, ga_config_to_dict, genome_from_dict,
                 genome_to_dict, read_jsonl)
from .similarity import GENE_SPAN_DEFAULT, SimilarityParams, compute_bounds

MODES = ("interactive", "automated")


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="milliseconds")


class Session:
    """One design run: a genome population, its grades, and its event log."""

    def __init__(self, session_id: str, mode: str, ga_config: GaConfig,
                 codec_config: CodecConfig, seed: int, genomes: list,
                 created_at: str, log_path: Path | None = None):
        if mode not in MODES:
            raise InvalidInputError(f"mode must be one of {MODES}, got {mode!r}")
        if len(genomes) < 2:
            raise InvalidInputError("a session needs at least two genomes")
        self.id = session_id
        self.mode = mode
        self.ga_config = ga_config
        self.codec_config = codec_config
        self.seed = int(seed)
        self.created_at = created_at
        self.log_path = log_path
        span = min(GENE_SPAN_DEFAULT, codec_config.harmonic_count)
        self.bounds = compute_bounds(genomes, gene_span=span)
        self.params: SimilarityParams | None = None
        self._default_params = SimilarityParams(
            model="exponential", bounds=self.bounds,
            a=REFERENCE_A, b=REFERENCE_B, gene_span=span,
        )
        self.generations = [Population(0, [
            Individual(id=k, genome=g) for k, g in enumerate(genomes)
        ])]
        self.trace: list[GenerationStats] = []
        self.comparisons: list[dict] = []
        self.events: list[dict] = []
        self._rng = np.random.default_rng(self.seed)
        self._lock = threading.Lock()

    @property
    def current(self) -> Population:
        return self.generations[-1]

    def effective_params(self) -> SimilarityParams:
        """Calibrated params if set, else the reference exponential model."""
        return self.params if self.params is not None else self._default_params

    def convergence_trace(self) -> ConvergenceTrace:
        with self._lock:
            return ConvergenceTrace(tuple(self.trace))

    def summary(self) -> dict:
        with self._lock:
            current = self.current
            graded = [ind for ind in current.individuals if ind.fitness is not None]
            return {
                "id": self.id,
                "mode": self.mode,
                "seed": self.seed,
                "created_at": self.created_at,
                "generation": current.generation_index,
                "generation_count": len(self.generations),
                "population_size": len(current),
                "graded": len(graded),
                "positive_grades": sum(1 for ind in graded if ind.fitness > 0),
                "config": ga_config_to_dict(self.ga_config),
                "codec": codec_config_to_dict(self.codec_config),
            }

    def generation(self, index: int) -> Population:
        with self._lock:
            if not 0 <= index < len(self.generations):
                raise InvalidInputError(
                    f"generation {index} out of range 0..{len(self.generations) - 1}"
                )
            return self.generations[index]

    # ------------------------------------------------------------ mutation

    def grade(self, individual_id: int, fitness: int) -> dict:
        """Record one grade; repeat calls overwrite, each appends an event."""
        with self._lock:
            record = {"event": "grade",
                      "generation": self.current.generation_index,
                      "individual": individual_id, "fitness": fitness,
                      "seed": self.seed, "timestamp": _now()}
            self._apply_grade(record)
            self._commit(record)
            return {"individual_id": individual_id, "fitness": int(fitness),
                    "generation": self.current.generation_index}

    def evolve_step(self) -> dict:
        """Close the current generation and breed the next one."""
        with self._lock:
            record = {"event": "evolve",
                      "generation": self.current.generation_index + 1,
                      "seed": self.seed, "timestamp": _now()}
            summary = self._apply_evolve(record)
            self._commit(record)
            return summary

    def record_comparison(self, left_id: int, right_id: int, verdict: int) -> dict:
        """Log a -3..3 preference verdict between two current individuals."""
        with self._lock:
            record = {"event": "compare",
                      "generation": self.current.generation_index,
                      "left": left_id, "right": right_id, "verdict": verdict,
                      "seed": self.seed, "timestamp": _now()}
            self._apply_compare(record)
            self._commit(record)
            return {"left_id": left_id, "right_id": right_id,
                    "verdict": int(verdict),
                    "generation": self.current.generation_index}

    # ------------------------------------------------- event application

    def _apply_grade(self, record: dict) -> None:
        fitness = record["fitness"]
        if not isinstance(fitness, int) or isinstance(fitness, bool) \
                or not 0 <= fitness <= 6:
            raise InvalidInputError(f"fitness {fitness!r} must be an integer in 0..6")
        individual_id = record["individual"]
        population = self.current
        for k, ind in enumerate(population.individuals):
            if ind.id == individual_id:
                population.individuals[k] = replace(ind, fitness=float(fitness))
                return
        raise InvalidInputError(
            f"no individual with id {individual_id} "
            f"in generation {population.generation_index}"
        )

    def _apply_evolve(self, record: dict) -> dict:
        if self.mode != "interactive":
            raise InvalidSetupError("only interactive sessions evolve by grading")
        population = self.current
        if not any(ind.fitness is not None and ind.fitness > 0
                   for ind in population.individuals):
            raise InvalidSetupError("evolve needs at least one positive grade")
        self.trace.append(self._trace_entry(population))
        next_population = evolve(population, self.ga_config, self._rng)
        self.generations.append(next_population)
        before = {ind.id for ind in population.individuals}
        survivor_ids = sorted(before & {ind.id for ind in next_population.individuals})
        summary = {
            "generation": next_population.generation_index,
            "survivor_ids": survivor_ids,
            "child_count": len(next_population) - len(survivor_ids),
            "population_size": len(next_population),
        }
        record["survivors"] = survivor_ids
        record["children"] = summary["child_count"]
        return summary

    def _apply_compare(self, record: dict) -> None:
        verdict = record["verdict"]
        if not isinstance(verdict, int) or isinstance(verdict, bool) \
                or not -3 <= verdict <= 3:
            raise InvalidInputError(f"verdict {verdict!r} outside -3..3")
        population = self.current
        population.by_id(record["left"])
        population.by_id(record["right"])
        self.comparisons.append({"left_id": record["left"],
                                 "right_id": record["right"],
                                 "verdict": verdict,
                                 "generation": population.generation_index})

    def _trace_entry(self, population: Population) -> GenerationStats:
        # interactive generations may be partially graded; aggregate the graded
        graded = [ind for ind in population.individuals if ind.fitness is not None]
        best = max(graded, key=lambda ind: ind.fitness)
        return GenerationStats(
            generation_index=population.generation_index,
            mean_fitness=float(np.mean([ind.fitness for ind in graded])),
            best_fitness=float(best.fitness),
            best_id=best.id,
            average_similarity=average_population_similarity(
                population, self.effective_params()),
        )

    def _commit(self, record: dict) -> None:
        self.events.append(record)
        if self.log_path is not None:
            append_jsonl(self.log_path, record)


def create_session(curves: list[ClosedCurve], ga_config: GaConfig | None = None,
                   codec_config: CodecConfig | None = None, seed: int = 0,
                   mode: str = "interactive", data_dir: str | Path | None = None,
                   session_id: str | None = None) -> Session:
    """Densify, encode, and normalize traced curves into generation 0.

    Curves already denser than the codec's interpolation target keep their
    own points. When ``data_dir`` is given the session appends its event log
    to ``<data_dir>/<id>.jsonl``; otherwise the log stays in memory.
    """
    ga_config = ga_config if ga_config is not None else GaConfig()
    codec_config = codec_config if codec_config is not None else CodecConfig()
    if len(curves) < 2:
        raise InvalidInputError("a session needs at least two initial curves")
    genomes = []
    for k, curve in enumerate(curves):
        try:
            dense = densify(curve, max(codec_config.interpolated_point_count,
                                       len(curve)))
            genomes.append(normalize(encode(dense, codec_config.harmonic_count)))
        except EvoshapeError as exc:
            raise InvalidInputError(f"curve {k}: {exc}") from None

    session_id = session_id if session_id is not None else uuid.uuid4().hex[:12]
    log_path = None
    if data_dir is not None:
        directory = Path(data_dir)
        directory.mkdir(parents=True, exist_ok=True)
        log_path = directory / f"{session_id}.jsonl"
        if log_path.exists():
            raise InvalidInputError(f"session log {log_path} already exists")

    session = Session(session_id=session_id, mode=mode, ga_config=ga_config,
                      codec_config=codec_config, seed=seed, genomes=genomes,
                      created_at=_now(), log_path=log_path)
    session._commit({
        "event": "create", "session": session_id, "mode": mode,
        "generation": 0, "seed": session.seed,
        "config": ga_config_to_dict(ga_config),
        "codec": codec_config_to_dict(codec_config),
        "genomes": [genome_to_dict(g) for g in genomes],
        "timestamp": session.created_at,
    })
    return session


def replay_session(source: str | Path | list[dict]) -> Session:
    """Rebuild a session purely from its event log; writes nothing."""
    records = source if isinstance(source, list) else read_jsonl(source)
    if not records or records[0].get("event") != "create":
        raise InvalidInputError("event log must start with a create record")
    head = records[0]
    try:
        session = Session(
            session_id=head["session"], mode=head["mode"],
            ga_config=ga_config_from_dict(head["config"]),
            codec_config=codec_config_from_dict(head["codec"]),
            seed=head["seed"],
            genomes=[genome_from_dict(g) for g in head["genomes"]],
            created_at=head["timestamp"], log_path=None,
        )
    except KeyError as exc:
        raise InvalidInputError(f"create record is missing {exc}") from None
    session.events.append(head)
    handlers = {"grade": session._apply_grade,
                "evolve": session._apply_evolve,
                "compare": session._apply_compare}
    for n, record in enumerate(records[1:], start=2):
        handler = handlers.get(record.get("event"))
        if handler is None:
            raise InvalidInputError(
                f"record {n}: unknown event {record.get('event')!r}"
            )
        try:
            handler(record)
        except KeyError as exc:
            raise InvalidInputError(f"record {n} is missing {exc}") from None
        session.events.append(record)
    return session

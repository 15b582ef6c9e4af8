"""HTTP facade: sessions, tracing, calibration, and harness runs over JSON.

The app is a factory so tests can build isolated instances. All domain
validation lives in the library; this layer only translates error families
into status codes (validation 422, precondition 409, missing resource 404)
and serves individuals as decoded polylines so the UI never does Fourier
math.
"""

from __future__ import annotations

import dataclasses
import threading
from dataclasses import replace
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel, StrictInt
from starlette.exceptions import HTTPException as StarletteHTTPException

from .calibration import (CalibrationJudgment, CalibrationTrial, estimate_a,
                          estimate_b, fit_weights, make_judgment, make_trial,
                          rescale_variant)
from .codec import CodecConfig, Genome, decode, encode, normalize
from .corpus import encode_corpus, reference_params, sample_corpus
from .curves import densify
from .engine import GaConfig
from .errors import (EvoshapeError, InvalidInputError, PreconditionError,
                     UnderdeterminedFitError)
from .harness import run_target_convergence
from .io import (append_jsonl, codec_config_from_dict, curve_from_dict,
                 ga_config_from_dict, genome_from_dict, genome_to_dict,
                 judgment_to_dict, load_json, params_to_dict, read_judgments,
                 trace_csv, trace_to_dict)
from .session import Session, create_session
from .similarity import SimilarityParams, compute_bounds

UI_SAMPLE_COUNT = 400
PAGE_SIZE = 6


@dataclasses.dataclass(frozen=True)
class ServiceConfig:
    """Listen address, data directory, and workbench defaults."""

    host: str = "127.0.0.1"
    port: int = 8765
    data_dir: Path = Path("evoshape-data")
    ga: GaConfig = GaConfig()
    codec: CodecConfig = CodecConfig()


def load_service_config(path: str | Path) -> ServiceConfig:
    data = load_json(path)
    if not isinstance(data, dict):
        raise InvalidInputError("service config must be a JSON object")
    unknown = set(data) - {"host", "port", "data_dir", "ga", "codec"}
    if unknown:
        raise InvalidInputError(f"unknown service config keys: {sorted(unknown)}")
    kwargs: dict = {}
    if "host" in data:
        kwargs["host"] = str(data["host"])
    if "port" in data:
        kwargs["port"] = int(data["port"])
    if "data_dir" in data:
        kwargs["data_dir"] = Path(data["data_dir"])
    if "ga" in data:
        kwargs["ga"] = ga_config_from_dict(data["ga"])
    if "codec" in data:
        kwargs["codec"] = codec_config_from_dict(data["codec"])
    return ServiceConfig(**kwargs)


# ------------------------------------------------------------ request shapes

class SessionRequest(BaseModel):
    curves: list[dict]
    config: dict | None = None
    codec: dict | None = None
    seed: int = 0
    mode: str = "interactive"


class GradeRequest(BaseModel):
    individual_id: int
    fitness: StrictInt


class TraceRequest(BaseModel):
    points: list
    params: list | None = None


class TrialRequest(BaseModel):
    gene_i: int
    gene_j: int
    perturbation_scale: float = 0.3
    seed: int | None = None
    base: dict | None = None


class JudgmentRequest(BaseModel):
    trial_id: str
    iso_similar: bool = True
    similarity_level: int | None = None


class VariantRequest(BaseModel):
    scale: float


class FitRequest(BaseModel):
    model: str


class TargetRunRequest(BaseModel):
    target_genome: dict
    initial: list[dict] | None = None
    config: dict | None = None
    generations: int = 10
    seed: int | None = None


# ----------------------------------------------------------------- stores

class SessionStore:
    def __init__(self, data_dir: Path):
        self.data_dir = data_dir
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def add(self, session: Session) -> None:
        with self._lock:
            self._sessions[session.id] = session

    def get(self, session_id: str) -> Session:
        with self._lock:
            session = self._sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail={
                "error": "NotFound", "message": f"no session {session_id}"})
        return session


class CalibrationStore:
    """Trials awaiting judgment plus the judgment log, shared app-wide.

    Gene distances are measured against bounds computed from the reference
    corpus, so judgments stay comparable across trials and sessions.
    """

    def __init__(self, data_dir: Path):
        self._lock = threading.Lock()
        self._trials: dict[str, CalibrationTrial] = {}
        # as-created trials; slider adjustments always rescale from these so
        # the scale parameter is absolute, not compounding
        self._pristine: dict[str, CalibrationTrial] = {}
        self._counter = 0
        self._rng = np.random.default_rng(0)
        self._reference: list[Genome] | None = None
        self._bounds = None
        self._path = data_dir / "judgments.jsonl"
        self.judgments: list[CalibrationJudgment] = (
            read_judgments(self._path) if self._path.exists() else [])

    def reference_genomes(self) -> list[Genome]:
        with self._lock:
            if self._reference is None:
                self._reference = encode_corpus(sample_corpus())
                self._bounds = compute_bounds(self._reference)
            return self._reference

    def bounds(self):
        self.reference_genomes()
        return self._bounds

    def default_base(self) -> Genome:
        # multiplicative perturbations cannot move a zero gene, so the
        # default base activates every muted gene in the span
        base = self.reference_genomes()[0]
        span = self._bounds.gene_span
        for m in range(1, span + 1):
            pair = base.gene(m)
            if abs(pair[0]) < 1e-9 and abs(pair[1]) < 1e-9:
                mag = 0.15 / m
                base = base.with_gene(m, (mag, -0.5j * mag))
        return base

    def new_trial(self, request: TrialRequest) -> CalibrationTrial:
        base = (genome_from_dict(request.base) if request.base is not None
                else self.default_base())
        rng = (np.random.default_rng(request.seed) if request.seed is not None
               else self._rng)
        with self._lock:
            trial = make_trial(base, request.gene_i, request.gene_j,
                               request.perturbation_scale, rng)
            self._counter += 1
            trial = replace(trial, trial_id=f"trial-{self._counter:04d}")
            self._trials[trial.trial_id] = trial
            self._pristine[trial.trial_id] = trial
            return trial

    def adjust_variant(self, trial_id: str, scale: float) -> CalibrationTrial:
        with self._lock:
            pristine = self._pristine.get(trial_id)
            if pristine is None:
                raise HTTPException(status_code=404, detail={
                    "error": "NotFound", "message": f"no trial {trial_id}"})
            trial = rescale_variant(pristine, scale)
            self._trials[trial_id] = trial
            return trial

    def judge(self, request: JudgmentRequest) -> CalibrationJudgment:
        with self._lock:
            trial = self._trials.get(request.trial_id)
        if trial is None:
            raise HTTPException(status_code=404, detail={
                "error": "NotFound", "message": f"no trial {request.trial_id}"})
        judgment = make_judgment(trial, self.bounds(),
                                 iso_similar=request.iso_similar,
                                 similarity_level=request.similarity_level)
        with self._lock:
            self.judgments.append(judgment)
            self._path.parent.mkdir(parents=True, exist_ok=True)
            append_jsonl(self._path, judgment_to_dict(judgment))
        return judgment

    def fit(self, model: str) -> SimilarityParams:
        with self._lock:
            judgments = list(self.judgments)
        iso = [j for j in judgments if j.iso_similar]
        if not iso:
            raise UnderdeterminedFitError("no iso-similar judgments recorded yet")
        bounds = self.bounds()
        if model == "exponential":
            b = estimate_b(iso)
            graded = [j for j in iso if j.similarity_level is not None]
            if not graded:
                raise UnderdeterminedFitError(
                    "the exponential scale needs judgments with a similarity level")
            a = estimate_a(graded, b)
            return SimilarityParams(model="exponential", bounds=bounds,
                                    a=a.mean, b=b)
        if model == "weighted":
            weights = fit_weights(iso)
            return SimilarityParams(model="weighted", bounds=bounds,
                                    weights=weights)
        raise InvalidInputError(f"unknown model {model!r}; use exponential or weighted")


# -------------------------------------------------------------- app factory

def _decoded_points(genome: Genome, codec: CodecConfig) -> list:
    p = min(codec.decode_precision, genome.harmonic_count)
    return decode(genome, precision=p, sample_count=UI_SAMPLE_COUNT).points.tolist()


def _individual_payload(ind, codec: CodecConfig) -> dict:
    return {
        "id": ind.id,
        "fitness": None if ind.fitness is None else int(ind.fitness),
        "generation_born": ind.generation_born,
        "parent_ids": None if ind.parent_ids is None else list(ind.parent_ids),
        "points": _decoded_points(ind.genome, codec),
    }


def _parse_curves(payloads: list[dict]):
    curves = []
    for k, payload in enumerate(payloads):
        try:
            curves.append(curve_from_dict(payload))
        except EvoshapeError as exc:
            raise InvalidInputError(f"curve {k}: {exc}") from None
    return curves


def _parse_genomes(payloads: list[dict], label: str):
    genomes = []
    for k, payload in enumerate(payloads):
        try:
            genomes.append(genome_from_dict(payload))
        except EvoshapeError as exc:
            raise InvalidInputError(f"{label} {k}: {exc}") from None
    return genomes


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    config = config if config is not None else ServiceConfig()
    data_dir = Path(config.data_dir)
    app = FastAPI(title="evoshape service")
    sessions = SessionStore(data_dir)
    calibration = CalibrationStore(data_dir)
    app.state.config = config

    # every error body is {"error": <family>, "message": <text>}
    @app.exception_handler(EvoshapeError)
    async def _domain_error(request: Request, exc: EvoshapeError):
        status = 409 if isinstance(exc, PreconditionError) else 422
        return JSONResponse(status_code=status, content={
            "error": type(exc).__name__, "message": str(exc)})

    @app.exception_handler(StarletteHTTPException)
    async def _http_error(request: Request, exc: StarletteHTTPException):
        detail = exc.detail if isinstance(exc.detail, dict) else {
            "error": "HTTPError", "message": str(exc.detail)}
        return JSONResponse(status_code=exc.status_code, content=detail)

    @app.exception_handler(RequestValidationError)
    async def _request_error(request: Request, exc: RequestValidationError):
        first = exc.errors()[0] if exc.errors() else {}
        loc = ".".join(str(part) for part in first.get("loc", ()))
        return JSONResponse(status_code=422, content={
            "error": "RequestValidationError",
            "message": f"{loc}: {first.get('msg', 'invalid request')}"})

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    # ---------------------------------------------------------- sessions

    @app.post("/sessions", status_code=201)
    def post_session(request: SessionRequest):
        curves = _parse_curves(request.curves)
        ga = (ga_config_from_dict(request.config)
              if request.config is not None else config.ga)
        codec = (codec_config_from_dict(request.codec)
                 if request.codec is not None else config.codec)
        session = create_session(curves, ga_config=ga, codec_config=codec,
                                 seed=request.seed, mode=request.mode,
                                 data_dir=data_dir)
        sessions.add(session)
        return session.summary()

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return sessions.get(session_id).summary()

    @app.get("/sessions/{session_id}/generation/{index}")
    def get_generation(session_id: str, index: int, page: int = 0):
        session = sessions.get(session_id)
        try:
            population = session.generation(index)
        except InvalidInputError as exc:
            raise HTTPException(status_code=404, detail={
                "error": "NotFound", "message": str(exc)}) from None
        size = len(population)
        page_count = (size + PAGE_SIZE - 1) // PAGE_SIZE
        if not 0 <= page < page_count:
            raise HTTPException(status_code=404, detail={
                "error": "NotFound",
                "message": f"page {page} out of range 0..{page_count - 1}"})
        chunk = population.individuals[page * PAGE_SIZE:(page + 1) * PAGE_SIZE]
        return {
            "generation": population.generation_index,
            "page": page,
            "page_count": page_count,
            "population_size": size,
            "individuals": [_individual_payload(ind, session.codec_config)
                            for ind in chunk],
        }

    @app.post("/sessions/{session_id}/grades")
    def post_grade(session_id: str, request: GradeRequest):
        return sessions.get(session_id).grade(request.individual_id,
                                              request.fitness)

    @app.post("/sessions/{session_id}/evolve")
    def post_evolve(session_id: str):
        return sessions.get(session_id).evolve_step()

    @app.get("/sessions/{session_id}/metrics")
    def get_metrics(session_id: str, format: str = "json"):
        trace = sessions.get(session_id).convergence_trace()
        if format == "csv":
            return PlainTextResponse(trace_csv(trace), media_type="text/csv")
        if format == "json":
            return trace_to_dict(trace)
        raise InvalidInputError(f"unknown format {format!r}; use json or csv")

    # ------------------------------------------------------------ tracing

    @app.post("/trace")
    def post_trace(request: TraceRequest):
        payload: dict = {"points": request.points}
        if request.params is not None:
            payload["params"] = request.params
        curve = curve_from_dict(payload)
        dense = densify(curve, max(config.codec.interpolated_point_count,
                                   len(curve)))
        genome = normalize(encode(dense, config.codec.harmonic_count))
        return {
            "genome": genome_to_dict(genome),
            "preview": {"points": _decoded_points(genome, config.codec)},
        }

    # -------------------------------------------------------- calibration

    @app.post("/calibration/trials", status_code=201)
    def post_trial(request: TrialRequest):
        trial = calibration.new_trial(request)
        codec = config.codec
        return {
            "trial_id": trial.trial_id,
            "gene_i": trial.gene_i,
            "gene_j": trial.gene_j,
            "base": genome_to_dict(trial.base),
            "variant_i": genome_to_dict(trial.variant_i),
            "variant_j": genome_to_dict(trial.variant_j),
            "previews": {
                "base": _decoded_points(trial.base, codec),
                "variant_i": _decoded_points(trial.variant_i, codec),
                "variant_j": _decoded_points(trial.variant_j, codec),
            },
        }

    @app.post("/calibration/trials/{trial_id}/variant")
    def post_variant(trial_id: str, request: VariantRequest):
        trial = calibration.adjust_variant(trial_id, request.scale)
        return {
            "trial_id": trial.trial_id,
            "scale": request.scale,
            "variant_j": genome_to_dict(trial.variant_j),
            "preview": _decoded_points(trial.variant_j, config.codec),
        }

    @app.post("/calibration/judgments", status_code=201)
    def post_judgment(request: JudgmentRequest):
        return judgment_to_dict(calibration.judge(request))

    @app.post("/calibration/fit")
    def post_fit(request: FitRequest):
        return params_to_dict(calibration.fit(request.model))

    # ------------------------------------------------------------ harness

    @app.post("/harness/target-run")
    def post_target_run(request: TargetRunRequest):
        target = genome_from_dict(request.target_genome)
        if request.initial is not None:
            initial = _parse_genomes(request.initial, "initial genome")
        else:
            initial = calibration.reference_genomes()
        ga = (ga_config_from_dict(request.config)
              if request.config is not None else config.ga)
        if request.seed is not None:
            ga = dataclasses.replace(ga, rng_seed=request.seed)
        params = reference_params(initial)
        trace, best = run_target_convergence(target, initial, ga, params,
                                             request.generations)
        return {
            "trace": trace_to_dict(trace)["entries"],
            "best": {
                "id": best.id,
                "fitness": best.fitness,
                "generation_born": best.generation_born,
                "genome": genome_to_dict(best.genome),
            },
        }

    return app

"""File formats: curves, genomes, similarity params, judgment logs, CSV reports.

JSON carries full float precision (repr round trip), so dump followed by load
reproduces arrays bit for bit. CSV is the reporting surface and renders every
float with 9 significant digits for stable diffs.
"""

from __future__ import annotations

import dataclasses
import json
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .calibration import CalibrationJudgment, FitReport
from .codec import CodecConfig, Genome
from .curves import ClosedCurve
from .engine import GaConfig
from .errors import InvalidInputError
from .harness import ConvergenceTrace, DoeGrid
from .similarity import CoefficientBounds, SimilarityParams

TRACE_COLUMNS = ("generation", "avg_fitness", "best_fitness", "avg_similarity")
JUDGMENT_KEYS = ("trial_id", "gene_i", "gene_j", "dist_i", "dist_j", "iso_similar")


def fmt9(value: float) -> str:
    """Nine-significant-digit rendering shared by all CSV emitters."""
    return format(float(value), ".9g")


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise InvalidInputError(message)


# ------------------------------------------------------------------ curves

def curve_to_dict(curve: ClosedCurve) -> dict:
    data: dict[str, Any] = {"points": curve.points.tolist()}
    if curve.params is not None:
        data["params"] = curve.params.tolist()
    return data


def curve_from_dict(data: Any) -> ClosedCurve:
    _require(isinstance(data, dict), "curve payload must be a JSON object")
    _require("points" in data, "curve payload is missing 'points'")
    try:
        points = np.asarray(data["points"], dtype=float)
        params = data.get("params")
        if params is not None:
            params = np.asarray(params, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"curve payload is not numeric: {exc}") from None
    _require(points.ndim == 2 and points.shape[1] == 2,
             "'points' must be a list of [x, y] pairs")
    return ClosedCurve(points, params)


# ----------------------------------------------------------------- genomes

def genome_to_dict(genome: Genome) -> dict:
    pairs = np.column_stack([genome.coeffs.real, genome.coeffs.imag])
    return {"harmonic_count": genome.harmonic_count, "coeffs": pairs.tolist()}


def genome_from_dict(data: Any) -> Genome:
    _require(isinstance(data, dict), "genome payload must be a JSON object")
    for key in ("harmonic_count", "coeffs"):
        _require(key in data, f"genome payload is missing {key!r}")
    try:
        count = int(data["harmonic_count"])
        pairs = np.asarray(data["coeffs"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"genome payload is not numeric: {exc}") from None
    _require(pairs.ndim == 2 and pairs.shape[1] == 2,
             "'coeffs' must be a list of [u, v] pairs")
    return Genome(count, pairs[:, 0] + 1j * pairs[:, 1])


# ------------------------------------------------------- similarity params

def bounds_to_dict(bounds: CoefficientBounds) -> dict:
    out: dict[str, list[float]] = {}
    for m in range(-bounds.gene_span, bounds.gene_span + 1):
        k = bounds.gene_span + m
        out[str(m)] = [float(bounds.u_min[k]), float(bounds.u_max[k]),
                       float(bounds.v_min[k]), float(bounds.v_max[k])]
    return out


def bounds_from_dict(data: Any) -> CoefficientBounds:
    _require(isinstance(data, dict) and data,
             "'bounds' must map harmonic indices to [u_min, u_max, v_min, v_max]")
    try:
        entries = {int(k): v for k, v in data.items()}
    except (TypeError, ValueError):
        raise InvalidInputError("bounds keys must be integer harmonic indices") from None
    span = max(abs(m) for m in entries)
    rows = []
    for m in range(-span, span + 1):
        _require(m in entries, f"bounds are missing index {m}")
        row = entries[m]
        _require(isinstance(row, (list, tuple)) and len(row) == 4,
                 f"bounds entry {m} must be [u_min, u_max, v_min, v_max]")
        rows.append(row)
    try:
        block = np.asarray(rows, dtype=float).T
    except (TypeError, ValueError):
        raise InvalidInputError("bounds entries must be numeric") from None
    return CoefficientBounds(gene_span=span, u_min=block[0], u_max=block[1],
                             v_min=block[2], v_max=block[3])


def params_to_dict(params: SimilarityParams) -> dict:
    data: dict[str, Any] = {"model": params.model, "gene_span": params.gene_span}
    if params.model == "exponential":
        data["a"] = float(params.a)
        data["b"] = float(params.b)
    else:
        data["weights"] = [float(w) for w in params.weights]
    data["bounds"] = bounds_to_dict(params.bounds)
    return data


def params_from_dict(data: Any) -> SimilarityParams:
    _require(isinstance(data, dict), "params payload must be a JSON object")
    for key in ("model", "bounds"):
        _require(key in data, f"params payload is missing {key!r}")
    bounds = bounds_from_dict(data["bounds"])
    try:
        kwargs: dict[str, Any] = {}
        if "gene_span" in data:
            kwargs["gene_span"] = int(data["gene_span"])
        if data.get("a") is not None:
            kwargs["a"] = float(data["a"])
        if data.get("b") is not None:
            kwargs["b"] = float(data["b"])
        if data.get("weights") is not None:
            kwargs["weights"] = np.asarray(data["weights"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"params payload is not numeric: {exc}") from None
    return SimilarityParams(model=data["model"], bounds=bounds, **kwargs)


# ----------------------------------------------------------------- configs

def ga_config_to_dict(config: GaConfig) -> dict:
    data = dataclasses.asdict(config)
    data["mutation_factor_range"] = list(config.mutation_factor_range)
    return data


def ga_config_from_dict(data: Any) -> GaConfig:
    _require(isinstance(data, dict), "ga config must be a JSON object")
    fields = {f.name for f in dataclasses.fields(GaConfig)}
    unknown = set(data) - fields
    _require(not unknown, f"unknown ga config keys: {sorted(unknown)}")
    kwargs = dict(data)
    if "mutation_factor_range" in kwargs:
        rng = kwargs["mutation_factor_range"]
        _require(isinstance(rng, (list, tuple)) and len(rng) == 2,
                 "mutation_factor_range must be [lo, hi]")
        kwargs["mutation_factor_range"] = (float(rng[0]), float(rng[1]))
    try:
        return GaConfig(**kwargs)
    except TypeError as exc:
        raise InvalidInputError(f"ga config is malformed: {exc}") from None


def codec_config_to_dict(config: CodecConfig) -> dict:
    return dataclasses.asdict(config)


def codec_config_from_dict(data: Any) -> CodecConfig:
    _require(isinstance(data, dict), "codec config must be a JSON object")
    fields = {f.name for f in dataclasses.fields(CodecConfig)}
    unknown = set(data) - fields
    _require(not unknown, f"unknown codec config keys: {sorted(unknown)}")
    try:
        return CodecConfig(**data)
    except TypeError as exc:
        raise InvalidInputError(f"codec config is malformed: {exc}") from None


# --------------------------------------------------------------- judgments

def judgment_to_dict(judgment: CalibrationJudgment) -> dict:
    record: dict[str, Any] = {
        "trial_id": judgment.trial_id,
        "gene_i": judgment.gene_i,
        "gene_j": judgment.gene_j,
        "dist_i": float(judgment.dist_i),
        "dist_j": float(judgment.dist_j),
        "iso_similar": judgment.iso_similar,
    }
    if judgment.similarity_level is not None:
        record["similarity_level"] = judgment.similarity_level
    return record


def judgment_from_dict(data: Any) -> CalibrationJudgment:
    _require(isinstance(data, dict), "judgment record must be a JSON object")
    for key in JUDGMENT_KEYS:
        _require(key in data, f"judgment record is missing {key!r}")
    level = data.get("similarity_level")
    try:
        return CalibrationJudgment(
            trial=None,
            gene_i=int(data["gene_i"]),
            gene_j=int(data["gene_j"]),
            dist_i=float(data["dist_i"]),
            dist_j=float(data["dist_j"]),
            iso_similar=bool(data["iso_similar"]),
            similarity_level=None if level is None else int(level),
            trial_id=str(data["trial_id"]),
        )
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"judgment record is not numeric: {exc}") from None


def read_judgments(path: str | Path) -> list[CalibrationJudgment]:
    judgments = []
    for n, record in enumerate(read_jsonl(path), start=1):
        try:
            judgments.append(judgment_from_dict(record))
        except InvalidInputError as exc:
            raise InvalidInputError(f"{path}: record {n}: {exc}") from None
    return judgments


def write_judgments(path: str | Path, judgments: Iterable[CalibrationJudgment]) -> None:
    write_jsonl(path, (judgment_to_dict(j) for j in judgments))


# ------------------------------------------------------------- CSV reports

def trace_rows(trace: ConvergenceTrace) -> list[tuple[int, float, float, float]]:
    return [(e.generation_index, e.mean_fitness, e.best_fitness, e.average_similarity)
            for e in trace.entries]


def trace_csv(trace: ConvergenceTrace) -> str:
    lines = [",".join(TRACE_COLUMNS)]
    for gen, mean, best, sim in trace_rows(trace):
        lines.append(f"{gen},{fmt9(mean)},{fmt9(best)},{fmt9(sim)}")
    return "\n".join(lines) + "\n"


def multi_trace_csv(runs: Sequence[tuple[int, ConvergenceTrace]]) -> str:
    """One block per run, oldest seed first, with a leading seed column."""
    lines = [",".join(("seed",) + TRACE_COLUMNS)]
    for seed, trace in runs:
        for gen, mean, best, sim in trace_rows(trace):
            lines.append(f"{seed},{gen},{fmt9(mean)},{fmt9(best)},{fmt9(sim)}")
    return "\n".join(lines) + "\n"


def trace_to_dict(trace: ConvergenceTrace) -> dict:
    return {"entries": [
        {"generation": e.generation_index,
         "avg_fitness": e.mean_fitness,
         "best_fitness": e.best_fitness,
         "best_id": e.best_id,
         "avg_similarity": e.average_similarity}
        for e in trace.entries]}


def grid_csv(grid: DoeGrid) -> str:
    lines = [",".join(["precision"] + [f"n{n}" for n in grid.point_counts])]
    for i, p in enumerate(grid.precisions):
        lines.append(",".join([str(p)] + [fmt9(e) for e in grid.errors[i]]))
    return "\n".join(lines) + "\n"


def grid_to_dict(grid: DoeGrid) -> dict:
    return {"precisions": list(grid.precisions),
            "point_counts": list(grid.point_counts),
            "errors": grid.errors.tolist()}


def matrix_csv(ids: Sequence[str], matrix: np.ndarray) -> str:
    _require(len(ids) == matrix.shape[0] == matrix.shape[1],
             "ids must match the matrix size")
    lines = [",".join(["id"] + [str(i) for i in ids])]
    for label, row in zip(ids, matrix):
        lines.append(",".join([str(label)] + [fmt9(v) for v in row]))
    return "\n".join(lines) + "\n"


def fit_report_to_dict(report: FitReport) -> dict:
    data: dict[str, Any] = {
        "selected": report.selected,
        "rmse": {k: float(v) for k, v in report.rmse.items()},
        "mae": {k: float(v) for k, v in report.mae.items()},
        "residuals": {k: list(v) for k, v in report.residuals.items()},
    }
    for name in ("b_values", "b_mean", "a_values", "a_mean", "a_std"):
        value = getattr(report, name)
        if value is not None:
            data[name] = list(value) if isinstance(value, tuple) else float(value)
    return data


# ------------------------------------------------------------ file helpers

def load_json(path: str | Path) -> Any:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{path}: {exc}") from None


def dump_json(path: str | Path, data: Any) -> None:
    Path(path).write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")


def dumps(data: Any) -> str:
    return json.dumps(data, indent=2)


def read_jsonl(path: str | Path) -> list[dict]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise InvalidInputError(f"{path}: line {n}: {exc}") from None
    return records


def write_jsonl(path: str | Path, records: Iterable[dict]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record) + "\n")


def append_jsonl(path: str | Path, record: dict) -> None:
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(json.dumps(record) + "\n")


def read_curve(path: str | Path) -> ClosedCurve:
    return curve_from_dict(load_json(path))


def write_curve(path: str | Path, curve: ClosedCurve) -> None:
    dump_json(path, curve_to_dict(curve))


def read_genome(path: str | Path) -> Genome:
    return genome_from_dict(load_json(path))


def write_genome(path: str | Path, genome: Genome) -> None:
    dump_json(path, genome_to_dict(genome))


def read_params(path: str | Path) -> SimilarityParams:
    return params_from_dict(load_json(path))


def write_params(path: str | Path, params: SimilarityParams) -> None:
    dump_json(path, params_to_dict(params))

"""Fitting the similarity-index weights from iso-similarity judgments.

A trial copies a base genome twice, perturbing gene i in the first copy and
gene j in the second. The user tunes the second perturbation until both
variants feel equally similar to the base, then names that shared similarity
on the seven-level scale. From a batch of such judgments this module
estimates the exponential weighting (b from the distance ratios, a from the
named levels) or free per-gene weights by logarithmic least squares, and
compares fitted models on holdout pairs.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .codec import Genome
from .errors import (
    DegenerateTrialError,
    InvalidInputError,
    UnderdeterminedFitError,
)
from .similarity import (
    CoefficientBounds,
    GENE_SPAN_DEFAULT,
    SimilarityParams,
    gene_distance,
    level_to_percent,
    similarity_index,
)


@dataclass(frozen=True)
class CalibrationTrial:
    """Base genome plus its two single-gene variants."""

    base: Genome
    variant_i: Genome
    variant_j: Genome
    gene_i: int
    gene_j: int
    trial_id: str = ""

    def __post_init__(self):
        if self.gene_i == self.gene_j:
            raise InvalidInputError("trial genes must differ")
        for g, idx in ((self.variant_i, self.gene_i), (self.variant_j, self.gene_j)):
            h = g.harmonic_count
            if h != self.base.harmonic_count:
                raise InvalidInputError("trial genomes must share harmonic_count")
            mask = np.ones(2 * h + 1, dtype=bool)
            mask[[h + idx, h - idx]] = False
            if not np.array_equal(g.coeffs[mask], self.base.coeffs[mask]):
                raise InvalidInputError(
                    f"variant differs from base outside gene {idx}"
                )


def make_trial(base: Genome, i: int, j: int, perturbation_scale: float,
               rng: np.random.Generator) -> CalibrationTrial:
    """Perturb gene i and gene j of the base multiplicatively.

    The factor is 1 + s * u with |u| in [0.5, 1] and random sign, where s is
    perturbation_scale, so scale 0 reproduces the base exactly and moderate
    scales keep the factor away from both 0 and 1.
    """
    span = base.harmonic_count
    if i == j:
        raise InvalidInputError("trial genes must differ")
    for idx in (i, j):
        if not 1 <= idx <= span:
            raise InvalidInputError(f"gene index {idx} outside 1..{span}")

    def perturbed(g: Genome, idx: int) -> Genome:
        mag = perturbation_scale * rng.uniform(0.5, 1.0)
        sign = 1.0 if rng.random() < 0.5 else -1.0
        factor = 1.0 + sign * mag
        pair = g.gene(idx)
        return g.with_gene(idx, (pair[0] * factor, pair[1] * factor))

    return CalibrationTrial(base, perturbed(base, i), perturbed(base, j), i, j)


def rescale_variant(trial: CalibrationTrial, scale: float) -> CalibrationTrial:
    """Rescale variant_j's gene-j delta from the base by a positive factor.

    This is the tuning knob of the iso-similarity loop: the delta is linear
    in scale, so the measured gene distance grows as scale squared. Scale 1
    returns the trial unchanged.
    """
    if not np.isfinite(scale) or scale <= 0:
        raise InvalidInputError("variant scale must be positive and finite")
    base_pair = trial.base.gene(trial.gene_j)
    var_pair = trial.variant_j.gene(trial.gene_j)
    adjusted = (base_pair[0] + scale * (var_pair[0] - base_pair[0]),
                base_pair[1] + scale * (var_pair[1] - base_pair[1]))
    return replace(trial,
                   variant_j=trial.base.with_gene(trial.gene_j, adjusted))


@dataclass(frozen=True)
class CalibrationJudgment:
    """A finalized trial with its measured gene distances.

    dist_i and dist_j are the elementary distances base->variant_i at gene i and
    base->variant_j at gene j, computed against the session's coefficient bounds at
    judgment time so estimators can run from logs alone.
    """

    trial: CalibrationTrial | None
    gene_i: int
    gene_j: int
    dist_i: float
    dist_j: float
    iso_similar: bool
    similarity_level: int | None = None
    trial_id: str = ""

    def __post_init__(self):
        if self.similarity_level is not None:
            level_to_percent(self.similarity_level)
        if self.dist_i < 0 or self.dist_j < 0:
            raise InvalidInputError("gene distances cannot be negative")


def make_judgment(trial: CalibrationTrial, bounds: CoefficientBounds,
                  iso_similar: bool = True,
                  similarity_level: int | None = None) -> CalibrationJudgment:
    """Measure the trial's two gene distances and package the judgment."""
    dist_i = gene_distance(trial.base.gene(trial.gene_i), trial.variant_i.gene(trial.gene_i),
                           trial.gene_i, bounds)
    dist_j = gene_distance(trial.base.gene(trial.gene_j), trial.variant_j.gene(trial.gene_j),
                           trial.gene_j, bounds)
    return CalibrationJudgment(
        trial=trial, gene_i=trial.gene_i, gene_j=trial.gene_j,
        dist_i=dist_i, dist_j=dist_j, iso_similar=iso_similar,
        similarity_level=similarity_level, trial_id=trial.trial_id,
    )


def estimate_b(judgments: list[CalibrationJudgment]) -> float:
    """Average of b = ln(dist_i / dist_j) / (j - i) over iso-similar judgments."""
    if not judgments:
        raise InvalidInputError("estimate_b needs at least one judgment")
    values = []
    for jd in judgments:
        if not jd.iso_similar:
            raise InvalidInputError("estimate_b expects iso-similar judgments")
        if jd.dist_i <= 0 or jd.dist_j <= 0:
            raise DegenerateTrialError("zero gene distance in judgment")
        values.append(np.log(jd.dist_i / jd.dist_j) / (jd.gene_j - jd.gene_i))
    return float(np.mean(values))


@dataclass(frozen=True)
class AEstimate:
    values: tuple[float, ...]
    mean: float
    std: float


def estimate_a(judgments: list[CalibrationJudgment], b: float,
               gene_span: int = GENE_SPAN_DEFAULT) -> AEstimate:
    """Per judgment a = (100/x - 1) / sum_m e^{b m} d_m, averaged with spread.

    A trial's variants differ from the base at a single gene, so the span sum
    reduces to e^{b i} * dist_i for the judged pair.
    """
    if not judgments:
        raise InvalidInputError("estimate_a needs at least one judgment")
    values = []
    for jd in judgments:
        if jd.similarity_level is None:
            raise InvalidInputError("estimate_a needs judgments with a similarity level")
        if jd.gene_i > gene_span:
            raise InvalidInputError("judged gene outside the configured span")
        x = level_to_percent(jd.similarity_level)
        denom = np.exp(b * jd.gene_i) * jd.dist_i
        if x <= 0 or denom <= 0:
            raise DegenerateTrialError("unusable judgment for the scale fit")
        values.append((100.0 / x - 1.0) / denom)
    arr = np.array(values)
    return AEstimate(tuple(arr.tolist()), float(arr.mean()), float(arr.std()))


def _coverage_connected(pairs: list[tuple[int, int]], span: int) -> bool:
    # breadth-first reachability from gene 1 over the (i, j) edges
    adjacent = {m: set() for m in range(1, span + 1)}
    for i, j in pairs:
        adjacent[i].add(j)
        adjacent[j].add(i)
    seen = {1}
    queue = [1]
    while queue:
        for nxt in adjacent[queue.pop()]:
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return len(seen) == span


def fit_weights(judgments: list[CalibrationJudgment],
                gene_span: int = GENE_SPAN_DEFAULT) -> np.ndarray:
    """Least-squares fit of ln p_i - ln p_j = ln(dist_j / dist_i), gauge p_1 = 1."""
    n = len(judgments)
    if n <= gene_span:
        raise UnderdeterminedFitError(
            f"need more than {gene_span} judgments, got {n}"
        )
    pairs = []
    for jd in judgments:
        if not jd.iso_similar:
            raise InvalidInputError("fit_weights expects iso-similar judgments")
        if not (1 <= jd.gene_i <= gene_span and 1 <= jd.gene_j <= gene_span):
            raise InvalidInputError("judged gene outside the configured span")
        if jd.dist_i <= 0 or jd.dist_j <= 0:
            raise DegenerateTrialError("zero gene distance in judgment")
        pairs.append((jd.gene_i, jd.gene_j))
    if not _coverage_connected(pairs, gene_span):
        raise UnderdeterminedFitError("judgments do not connect all genes 1..span")

    # unknowns x_m = ln p_m for m = 2..span; x_1 fixed to 0 by the gauge
    a = np.zeros((n, gene_span - 1))
    rhs = np.empty(n)
    for row, jd in enumerate(judgments):
        if jd.gene_i > 1:
            a[row, jd.gene_i - 2] = 1.0
        if jd.gene_j > 1:
            a[row, jd.gene_j - 2] = -1.0
        rhs[row] = np.log(jd.dist_j / jd.dist_i)
    x, *_ = np.linalg.lstsq(a, rhs, rcond=None)
    return np.exp(np.concatenate([[0.0], x]))


@dataclass(frozen=True)
class FitReport:
    """Holdout comparison of candidate similarity models."""

    rmse: dict[str, float]
    mae: dict[str, float]
    residuals: dict[str, tuple[float, ...]]
    selected: str
    b_values: tuple[float, ...] | None = None
    b_mean: float | None = None
    a_values: tuple[float, ...] | None = None
    a_mean: float | None = None
    a_std: float | None = None


def compare_models(exp_params: SimilarityParams, weight_params: SimilarityParams,
                   holdout: list[tuple[Genome, Genome, int]], **fit_details) -> FitReport:
    """Predict holdout pair similarities under both models; lower RMSE wins."""
    if not holdout:
        raise InvalidInputError("holdout must not be empty")
    rmse, mae, residuals = {}, {}, {}
    for name, params in (("exponential", exp_params), ("weighted", weight_params)):
        res = []
        for gk, gl, level in holdout:
            predicted = similarity_index(gk, gl, params)
            res.append(predicted - level_to_percent(level))
        arr = np.array(res)
        rmse[name] = float(np.sqrt(np.mean(arr ** 2)))
        mae[name] = float(np.mean(np.abs(arr)))
        residuals[name] = tuple(arr.tolist())
    selected = "exponential" if rmse["exponential"] <= rmse["weighted"] else "weighted"
    return FitReport(rmse=rmse, mae=mae, residuals=residuals, selected=selected,
                     **fit_details)

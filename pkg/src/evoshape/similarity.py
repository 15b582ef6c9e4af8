"""Perceived-similarity index between two genomes.

The elementary distance between genes of the same order m compares the four
real components (u_m, u_-m, v_m, v_-m), each normalized by that component's
spread over a reference population. Gene distances are combined into
D(k, l) = sum_m alpha(m) * d_m with either an exponential weighting
alpha(m) = a * e^{b m} or free per-gene weights p_m, and the index is
SimInd = 100 / (1 + D) percent.

Distances operate on the coefficients as given; pipelines normalize genomes
to canonical form at ingestion so that comparisons are shape-only.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from .codec import Genome
from .errors import ConfigError, InvalidInputError

GENE_SPAN_DEFAULT = 10
DEGENERATE_WIDTH = 1e-12

# user similarity levels to percentages
LEVEL_PERCENT = {0: 5.0, 1: 30.0, 2: 50.0, 3: 65.0, 4: 80.0, 5: 90.0, 6: 100.0}


def level_to_percent(level: int) -> float:
    """Seven-level judgment scale to its percentage value."""
    if not isinstance(level, (int, np.integer)) or isinstance(level, bool):
        raise InvalidInputError(f"similarity level must be an integer, got {level!r}")
    if level not in LEVEL_PERCENT:
        raise InvalidInputError(f"similarity level {level} outside 0..6")
    return LEVEL_PERCENT[int(level)]


@dataclass(frozen=True)
class CoefficientBounds:
    """Per-coefficient min/max of u and v over a reference population.

    Arrays cover indices m = -gene_span .. gene_span; index gene_span + m
    addresses coefficient m. Widths below DEGENERATE_WIDTH are treated as 1
    so constant coefficients never divide by zero.
    """

    gene_span: int
    u_min: np.ndarray
    u_max: np.ndarray
    v_min: np.ndarray
    v_max: np.ndarray

    def __post_init__(self):
        n = 2 * self.gene_span + 1
        for name in ("u_min", "u_max", "v_min", "v_max"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (n,):
                raise InvalidInputError(f"{name} must have length {n}")
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        if np.any(self.u_max < self.u_min) or np.any(self.v_max < self.v_min):
            raise InvalidInputError("bounds must satisfy max >= min")

    def _index(self, m: int) -> int:
        if abs(m) > self.gene_span:
            raise InvalidInputError(f"no bounds for coefficient index {m}")
        return self.gene_span + m

    def width_u(self, m: int) -> float:
        w = self.u_max[self._index(m)] - self.u_min[self._index(m)]
        return float(w) if w >= DEGENERATE_WIDTH else 1.0

    def width_v(self, m: int) -> float:
        w = self.v_max[self._index(m)] - self.v_min[self._index(m)]
        return float(w) if w >= DEGENERATE_WIDTH else 1.0


def compute_bounds(reference: list[Genome], gene_span: int = GENE_SPAN_DEFAULT) -> CoefficientBounds:
    """Min/max scan of coefficient components over a reference population."""
    if len(reference) < 2:
        raise InvalidInputError("bounds need at least 2 reference genomes")
    if gene_span < 1:
        raise InvalidInputError("gene_span must be >= 1")
    for g in reference:
        if g.harmonic_count < gene_span:
            raise InvalidInputError(
                f"reference genome covers {g.harmonic_count} harmonics, span is {gene_span}"
            )
    block = np.stack([
        g.coeffs[g.harmonic_count - gene_span:g.harmonic_count + gene_span + 1]
        for g in reference
    ])
    return CoefficientBounds(
        gene_span=gene_span,
        u_min=block.real.min(axis=0),
        u_max=block.real.max(axis=0),
        v_min=block.imag.min(axis=0),
        v_max=block.imag.max(axis=0),
    )


@dataclass(frozen=True)
class SimilarityParams:
    """Weighting model, reference bounds, and the gene span of the index."""

    model: str
    bounds: CoefficientBounds
    a: float | None = None
    b: float | None = None
    weights: np.ndarray | None = field(default=None)
    gene_span: int = GENE_SPAN_DEFAULT

    def __post_init__(self):
        if self.gene_span < 1:
            raise ConfigError("gene_span must be >= 1")
        if self.bounds.gene_span < self.gene_span:
            raise ConfigError("bounds do not cover the configured gene_span")
        if self.model == "exponential":
            if self.a is None or self.b is None:
                raise ConfigError("exponential model needs both a and b")
            if self.a <= 0:
                raise ConfigError("exponential scale a must be positive")
        elif self.model == "weighted":
            w = np.asarray(self.weights, dtype=float)
            if w.shape != (self.gene_span,):
                raise ConfigError(f"weighted model needs {self.gene_span} weights")
            if np.any(w <= 0):
                raise ConfigError("weights must all be positive")
            w.flags.writeable = False
            object.__setattr__(self, "weights", w)
        else:
            raise ConfigError(f"unknown similarity model {self.model!r}")

    def alpha(self, m: int) -> float:
        """Weight of gene m in the distance sum."""
        if not 1 <= m <= self.gene_span:
            raise InvalidInputError(f"gene index {m} outside 1..{self.gene_span}")
        if self.model == "exponential":
            return float(self.a * np.exp(self.b * m))
        return float(self.weights[m - 1])

    def alpha_vector(self) -> np.ndarray:
        m = np.arange(1, self.gene_span + 1)
        if self.model == "exponential":
            return self.a * np.exp(self.b * m)
        return np.array(self.weights)


def gene_distance(g_k: tuple[complex, complex], g_l: tuple[complex, complex],
                  m: int, bounds: CoefficientBounds) -> float:
    """Normalized squared difference over the four components of gene m."""
    ak, ank = complex(g_k[0]), complex(g_k[1])
    al, anl = complex(g_l[0]), complex(g_l[1])
    du = (ak.real - al.real) / bounds.width_u(m)
    dun = (ank.real - anl.real) / bounds.width_u(-m)
    dv = (ak.imag - al.imag) / bounds.width_v(m)
    dvn = (ank.imag - anl.imag) / bounds.width_v(-m)
    return du * du + dun * dun + dv * dv + dvn * dvn


def genome_distance(g_k: Genome, g_l: Genome, params: SimilarityParams) -> float:
    """Weighted sum of elementary gene distances up to the gene span."""
    span = params.gene_span
    for g in (g_k, g_l):
        if g.harmonic_count < span:
            raise InvalidInputError("genome does not cover the gene span")
    total = 0.0
    for m in range(1, span + 1):
        total += params.alpha(m) * gene_distance(g_k.gene(m), g_l.gene(m), m, params.bounds)
    return total


def similarity_index(g_k: Genome, g_l: Genome, params: SimilarityParams) -> float:
    """SimInd = 100 / (1 + D), in percent, always in (0, 100]."""
    return 100.0 / (1.0 + genome_distance(g_k, g_l, params))


def _inverse_widths(bounds: CoefficientBounds, span: int) -> tuple[np.ndarray, np.ndarray]:
    wu = bounds.u_max - bounds.u_min
    wv = bounds.v_max - bounds.v_min
    wu = np.where(wu >= DEGENERATE_WIDTH, wu, 1.0)
    wv = np.where(wv >= DEGENERATE_WIDTH, wv, 1.0)
    c = bounds.gene_span
    keep = np.concatenate([np.arange(c + 1, c + span + 1), np.arange(c - 1, c - span - 1, -1)])
    return 1.0 / wu[keep], 1.0 / wv[keep]


def feature_matrix(genomes: list[Genome], params: SimilarityParams) -> np.ndarray:
    """Stack genomes as rows of scaled components so that the squared
    euclidean distance between rows equals genome_distance exactly."""
    span = params.gene_span
    inv_u, inv_v = _inverse_widths(params.bounds, span)
    scale = np.sqrt(np.concatenate([params.alpha_vector()] * 2))
    rows = np.empty((len(genomes), 4 * span))
    for i, g in enumerate(genomes):
        if g.harmonic_count < span:
            raise InvalidInputError("genome does not cover the gene span")
        h = g.harmonic_count
        # order: a_1..a_span then a_-1..a_-span, matching _inverse_widths
        pos = g.coeffs[h + 1:h + span + 1]
        neg = g.coeffs[h - 1:h - span - 1:-1]
        both = np.concatenate([pos, neg])
        rows[i, :2 * span] = both.real * inv_u * scale
        rows[i, 2 * span:] = both.imag * inv_v * scale
    return rows


def distance_matrix(genomes: list[Genome], params: SimilarityParams) -> np.ndarray:
    """All-pairs genome distances via the feature embedding."""
    f = feature_matrix(genomes, params)
    return cdist(f, f, "sqeuclidean")


def distances_to(genomes: list[Genome], target: Genome, params: SimilarityParams) -> np.ndarray:
    f = feature_matrix(genomes, params)
    ft = feature_matrix([target], params)
    return cdist(f, ft, "sqeuclidean")[:, 0]

"""Procedural car silhouettes for experiments and automated tests.

Two generators live here. ``sample_car`` emits one randomized car profile
resampled to a hand-trace point count, handy as trace input. ``sample_corpus``
builds the reference corpus used by the automated experiments: a clustered
family of profiles derived from a handful of prototype genomes. Cluster
identity lives in the low genes (1-3), genes 4-10 carry no energy at all,
and harmonics above the similarity span keep each prototype's own styling
detail. Blending two members lands between their clusters, and scaling a
gene cannot leak energy into the empty mid band, so the cluster geometry
stays put under the genetic operators while the curves remain busy enough
for reconstruction-error studies.
"""

from __future__ import annotations

import numpy as np

from .codec import Genome, decode, encode, normalize
from .curves import ClosedCurve, densify, ensure_counterclockwise, resample_closed
from .errors import InvalidInputError
from .similarity import SimilarityParams, compute_bounds

CORPUS_SIZE_DEFAULT = 30
PROTOTYPE_COUNT = 6
MEMBER_JITTER = 0.01
CORPUS_POINTS_MIN = 150
CORPUS_POINTS_MAX = 200
TRACE_POINTS_MIN = 60
TRACE_POINTS_MAX = 80

# similarity weighting tuned for the cluster spacing of the sample corpus
REFERENCE_A = 30.0
REFERENCE_B = -0.4

_H = 70
_MUTED_GENES = range(4, 11)
_DENSIFY_POINTS = 1500


def _arc(center_x: float, center_y: float, radius: float,
         start: float, end: float, count: int) -> np.ndarray:
    theta = np.linspace(start, end, count)
    return np.column_stack((center_x + radius * np.cos(theta),
                            center_y + radius * np.sin(theta)))


def _profile_polyline(rng: np.random.Generator) -> np.ndarray:
    """Fine counterclockwise polyline of one randomized car profile."""
    length = rng.uniform(3.4, 5.4)
    clearance = rng.uniform(0.14, 0.26)
    belt = clearance + rng.uniform(0.78, 1.10)       # beltline height
    roof = belt + rng.uniform(0.42, 0.95)            # roof height
    wheel = rng.uniform(0.30, 0.44)                  # arch radius
    x_front_wheel = rng.uniform(0.16, 0.23) * length
    x_rear_wheel = rng.uniform(0.74, 0.84) * length
    x_windshield = rng.uniform(0.30, 0.44) * length  # windshield base
    x_roof_front = x_windshield + rng.uniform(0.10, 0.20) * length
    x_roof_rear = rng.uniform(0.62, 0.78) * length
    x_deck = x_roof_rear + rng.uniform(0.08, 0.16) * length  # rear window base
    nose = belt * rng.uniform(0.72, 0.92)            # hood height at the nose
    tail = belt * rng.uniform(0.90, 1.06)            # trunk height at the tail
    x_deck = min(x_deck, 0.93 * length)
    x_roof_front = min(x_roof_front, x_roof_rear - 0.05 * length)

    pieces = [
        np.array([[0.02 * length, clearance]]),
        np.array([[x_front_wheel - wheel, clearance]]),
        _arc(x_front_wheel, clearance, wheel, np.pi, 0.0, 24)[1:-1],
        np.array([[x_front_wheel + wheel, clearance]]),
        np.array([[x_rear_wheel - wheel, clearance]]),
        _arc(x_rear_wheel, clearance, wheel, np.pi, 0.0, 24)[1:-1],
        np.array([[x_rear_wheel + wheel, clearance]]),
        np.array([[0.98 * length, clearance]]),       # rear bumper bottom
        np.array([[length, 0.45 * tail + 0.55 * clearance]]),
        np.array([[0.99 * length, tail]]),            # trunk lid
        np.array([[x_deck, belt]]),                   # deck meets rear window
        np.array([[x_roof_rear, roof]]),
        np.array([[x_roof_front, roof]]),
        np.array([[x_windshield, belt]]),
        np.array([[0.07 * length, nose]]),            # hood to nose
        np.array([[0.0, 0.5 * (nose + clearance)]]),  # front face
    ]
    return np.vstack(pieces)


def sample_car(rng: np.random.Generator) -> ClosedCurve:
    """One randomized car silhouette traced with 60-80 points."""
    count = int(rng.integers(TRACE_POINTS_MIN, TRACE_POINTS_MAX + 1))
    points = resample_closed(_profile_polyline(rng), count)
    return ensure_counterclockwise(ClosedCurve(points))


def _car_genome(rng: np.random.Generator) -> Genome:
    curve = ensure_counterclockwise(ClosedCurve(_profile_polyline(rng)))
    return normalize(encode(densify(curve, _DENSIFY_POINTS), _H))


def _mute_mid_genes(genome: Genome) -> Genome:
    coeffs = np.array(genome.coeffs)
    for m in _MUTED_GENES:
        coeffs[_H + m] = 0.0
        coeffs[_H - m] = 0.0
    return normalize(Genome(_H, coeffs))


def _prototypes(rng: np.random.Generator, count: int) -> list[Genome]:
    return [_mute_mid_genes(_car_genome(rng)) for _ in range(count)]


def sample_corpus(count: int = CORPUS_SIZE_DEFAULT, seed: int = 0) -> list[ClosedCurve]:
    """Deterministic clustered corpus of car silhouettes.

    Member ``i`` jitters prototype ``i mod PROTOTYPE_COUNT`` and is decoded
    at full precision with its parameter values attached, so re-encoding a
    corpus curve recovers the member genome to machine accuracy.
    """
    if count < 1:
        raise InvalidInputError("corpus count must be positive")
    rng = np.random.default_rng(seed)
    protos = _prototypes(rng, PROTOTYPE_COUNT)
    stacked = np.array([p.coeffs for p in protos])
    sigma = stacked.std(axis=0)
    # canonicalization can jump to the mirrored branch; redraw jitter if a
    # member lands far from its prototype
    tolerance = 20.0 * MEMBER_JITTER * (sigma.max() + 1.0)
    curves = []
    for i in range(count):
        base = protos[i % PROTOTYPE_COUNT].coeffs
        for _ in range(50):
            jitter = MEMBER_JITTER * sigma * (
                rng.standard_normal(2 * _H + 1)
                + 1j * rng.standard_normal(2 * _H + 1))
            member = normalize(Genome(_H, base + jitter))
            if np.abs(np.asarray(member.coeffs) - base).max() < tolerance:
                break
        else:
            raise InvalidInputError("corpus jitter failed to stay near its prototype")
        samples = int(rng.integers(CORPUS_POINTS_MIN, CORPUS_POINTS_MAX + 1))
        curves.append(decode(member, precision=_H, sample_count=samples))
    return curves


def encode_corpus(curves: list[ClosedCurve]) -> list[Genome]:
    """Re-encode sampled members at the corpus harmonic count."""
    return [normalize(encode(c, _H)) for c in curves]


def reference_params(genomes: list[Genome]) -> SimilarityParams:
    """Exponential similarity weighting matched to the sample corpus."""
    return SimilarityParams(model="exponential", a=REFERENCE_A, b=REFERENCE_B,
                            bounds=compute_bounds(genomes))

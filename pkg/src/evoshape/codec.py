"""Fourier-harmonic shape genomes.

A closed curve z(t) = x(t) + i y(t), periodic with z(t + 1) = z(t), is
represented by complex harmonic coefficients a_m. Coefficient a_0 is the
centroid-like fundamental; the pair (a_m, a_-m) for m >= 1 forms gene m. A
genome with harmonic_count H stores the 2H + 1 coefficients m = -H .. H.

Encoding integrates the sampled curve against each harmonic with the
trapezium rule, by default over normalized arc-length parameters. Curves
that carry their own parameter values (decoded curves do) are integrated at
those values instead, which makes decode followed by encode recover the
source coefficients to quadrature accuracy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import directed_hausdorff

from .curves import ClosedCurve, arc_length_params
from .errors import ConfigError, DegenerateGenomeError, InvalidInputError

NORMALIZE_TOL = 1e-12


@dataclass(frozen=True)
class Genome:
    """Harmonic coefficients of one silhouette.

    ``coeffs`` is a complex array of length 2 * harmonic_count + 1 ordered
    m = -H .. H, so index H + m addresses coefficient a_m.
    """

    harmonic_count: int
    coeffs: np.ndarray

    def __post_init__(self):
        if self.harmonic_count < 1:
            raise InvalidInputError("harmonic_count must be >= 1")
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != (2 * self.harmonic_count + 1,):
            raise InvalidInputError(
                f"expected {2 * self.harmonic_count + 1} coefficients, got {c.shape}"
            )
        if not np.all(np.isfinite(c)):
            raise InvalidInputError("coefficients must be finite")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    def coefficient(self, m: int) -> complex:
        """a_m for -H <= m <= H."""
        if abs(m) > self.harmonic_count:
            raise InvalidInputError(f"harmonic index {m} out of range")
        return complex(self.coeffs[self.harmonic_count + m])

    def gene(self, m: int) -> tuple[complex, complex]:
        """Gene m as the pair (a_m, a_-m); gene 0 is (a_0, a_0)."""
        return self.coefficient(m), self.coefficient(-m)

    def with_gene(self, m: int, pair: tuple[complex, complex]) -> "Genome":
        """Copy of this genome with gene m replaced."""
        if not 1 <= m <= self.harmonic_count:
            raise InvalidInputError(f"gene index {m} out of range")
        c = np.array(self.coeffs)
        c[self.harmonic_count + m] = pair[0]
        c[self.harmonic_count - m] = pair[1]
        return Genome(self.harmonic_count, c)


@dataclass(frozen=True)
class CodecConfig:
    """Tunables of the trace -> genome -> polyline pipeline."""

    harmonic_count: int = 70
    interpolated_point_count: int = 1500
    decode_precision: int = 70
    decode_sample_count: int = 1500

    def __post_init__(self):
        if self.harmonic_count < 1:
            raise ConfigError("harmonic_count must be >= 1")
        if self.interpolated_point_count < 3:
            raise ConfigError("interpolated_point_count must be >= 3")
        if not 1 <= self.decode_precision <= self.harmonic_count:
            raise ConfigError("decode_precision must be in 1..harmonic_count")
        if self.decode_sample_count < 3:
            raise ConfigError("decode_sample_count must be >= 3")


def encode(curve: ClosedCurve, harmonic_count: int) -> Genome:
    """Trapezium-rule harmonic analysis of a closed polyline.

    For points z_0 .. z_{P-1} at parameters t_0 .. t_{P-1} (arc length unless
    the curve carries its own values), with the wraparound z_P = z_0, t_P = 1:

        a_m = sum_k (t_{k+1} - t_k) / 2 * (z_{k+1} e^{-2 pi i m t_{k+1}}
                                           + z_k e^{-2 pi i m t_k})
    """
    if harmonic_count < 1:
        raise InvalidInputError("harmonic_count must be >= 1")
    t = curve.params if curve.params is not None else arc_length_params(curve)
    z = curve.points[:, 0] + 1j * curve.points[:, 1]

    t_ext = np.concatenate([t, [1.0]])
    z_ext = np.concatenate([z, z[:1]])
    m = np.arange(-harmonic_count, harmonic_count + 1)
    # phase[k, j] = e^{-2 pi i m_j t_k}; column-wise trapezium over k
    phase = np.exp(-2j * np.pi * np.outer(t_ext, m))
    integrand = z_ext[:, None] * phase
    dt = np.diff(t_ext)[:, None]
    coeffs = 0.5 * np.sum(dt * (integrand[1:] + integrand[:-1]), axis=0)
    return Genome(harmonic_count, coeffs)


def decode(genome: Genome, precision: int | None = None,
           sample_count: int = 1500) -> ClosedCurve:
    """Evaluate the truncated series at uniform parameters k / sample_count.

    ``precision`` p <= H limits the reconstruction to harmonics |m| <= p. The
    returned curve carries its parameter values so that re-encoding it is
    consistent with this sampling.
    """
    h = genome.harmonic_count
    p = h if precision is None else int(precision)
    if not 1 <= p <= h:
        raise InvalidInputError(f"precision {p} out of range 1..{h}")
    if sample_count < 3:
        raise InvalidInputError("sample_count must be >= 3")
    t = np.arange(sample_count) / sample_count
    m = np.arange(-p, p + 1)
    a = genome.coeffs[h - p:h + p + 1]
    z = np.exp(2j * np.pi * np.outer(t, m)) @ a
    pts = np.column_stack([z.real, z.imag])
    return ClosedCurve(pts, t)


def _even_flip(coeffs: np.ndarray, h: int) -> np.ndarray:
    m = np.arange(-h, h + 1)
    out = np.array(coeffs)
    out[m % 2 == 0] *= -1.0
    return out


def normalize(genome: Genome) -> Genome:
    """Canonical form: centered, unit first harmonic, zero reference phases.

    Sets a_0 = 0, rescales so |a_1| = 1, then applies the joint rotation and
    start-point shift that zero both arg(a_1) and arg(a_-1). Those two
    equations fix the transform only up to a simultaneous half-turn of
    rotation and half-period shift, which negates every even coefficient; the
    representative with the dominant even harmonic's phase in [0, pi) is
    chosen so the form is unique and idempotent.
    """
    h = genome.harmonic_count
    c = np.array(genome.coeffs)
    c[h] = 0.0
    a1 = c[h + 1]
    if abs(a1) < NORMALIZE_TOL:
        raise DegenerateGenomeError("cannot normalize: |a_1| is zero")
    c /= abs(a1)

    phi_p = np.angle(c[h + 1])
    phi_n = np.angle(c[h - 1])
    theta = -0.5 * (phi_p + phi_n)   # common rotation
    sigma = -0.5 * (phi_p - phi_n)   # 2 pi * start shift
    m = np.arange(-h, h + 1)
    c *= np.exp(1j * (theta + m * sigma))

    even = (m % 2 == 0) & (m != 0)
    mags = np.abs(c[even])
    if len(mags) and mags.max() > NORMALIZE_TOL:
        ph = np.angle(c[even][np.argmax(mags)])
        if ph < 0.0 or ph >= np.pi:
            c = _even_flip(c, h)

    # exact zeros where the construction promises them
    c[h] = 0.0
    c[h + 1] = abs(c[h + 1])
    c[h - 1] = abs(c[h - 1]) if abs(c[h - 1]) > NORMALIZE_TOL else c[h - 1]
    return Genome(h, c)


def reconstruction_error(original: ClosedCurve, reconstructed: ClosedCurve) -> float:
    """Symmetric Hausdorff distance scaled by the original's bbox diagonal."""
    a, b = original.points, reconstructed.points
    span = a.max(axis=0) - a.min(axis=0)
    diag = float(np.hypot(*span))
    if diag < 1e-12:
        raise InvalidInputError("original curve has a degenerate bounding box")
    d = max(directed_hausdorff(a, b)[0], directed_hausdorff(b, a)[0])
    return d / diag

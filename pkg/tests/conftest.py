from __future__ import annotations

import numpy as np

from evoshape.codec import Genome


def random_genome(rng: np.random.Generator, harmonic_count: int = 70,
                  active_genes: int = 10, magnitude: float = 0.2) -> Genome:
    """Genome with |a_1| = 1 and random genes up to ``active_genes``."""
    h = harmonic_count
    c = np.zeros(2 * h + 1, dtype=complex)
    for m in range(1, min(active_genes, h) + 1):
        c[h + m] = magnitude * (rng.uniform(-1, 1) + 1j * rng.uniform(-1, 1))
        c[h - m] = magnitude * (rng.uniform(-1, 1) + 1j * rng.uniform(-1, 1))
    c[h + 1] = np.exp(1j * rng.uniform(0, 2 * np.pi))
    return Genome(h, c)


def circle_points(n: int, radius: float = 1.0, center=(0.0, 0.0)) -> np.ndarray:
    t = np.arange(n) / n
    return np.column_stack([
        center[0] + radius * np.cos(2 * np.pi * t),
        center[1] + radius * np.sin(2 * np.pi * t),
    ])

"""Evolutionary silhouette design workbench."""

__version__ = "0.1.0"

from .codec import CodecConfig, Genome, decode, encode, normalize, reconstruction_error
from .curves import ClosedCurve, arc_length_params, densify, ensure_counterclockwise

__all__ = [
    "ClosedCurve",
    "CodecConfig",
    "Genome",
    "arc_length_params",
    "decode",
    "densify",
    "encode",
    "ensure_counterclockwise",
    "normalize",
    "reconstruction_error",
    "__version__",
]

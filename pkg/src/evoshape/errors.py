"""Exception types shared across the workbench.

Each class maps to one failure family so the CLI and the HTTP service can
translate them into stable exit codes / status codes without string matching.
"""


class EvoshapeError(Exception):
    """Base class for all workbench errors."""


class InvalidInputError(EvoshapeError):
    """Malformed or out-of-contract input data (validation failure)."""


class DegenerateGenomeError(InvalidInputError):
    """Genome cannot be normalized (vanishing first harmonic)."""


class ConfigError(InvalidInputError):
    """Configuration value outside its legal range."""


class PreconditionError(EvoshapeError):
    """Operation invoked in a state where it is not allowed."""


class NoSelectableParentError(PreconditionError):
    """Selection requested but no individual has positive fitness."""


class InvalidSetupError(PreconditionError):
    """Experiment setup violates a structural requirement."""


class UnderdeterminedFitError(PreconditionError):
    """Not enough independent observations to fit the requested model."""


class DegenerateTrialError(InvalidInputError):
    """Calibration trial with a zero or unusable perturbation."""

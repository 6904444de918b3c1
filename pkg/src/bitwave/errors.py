"""Exception taxonomy shared across the package.

The CLI maps these onto process exit codes (see bitwave.cli), so new error
conditions should reuse one of the existing families rather than raising a
bare Exception.
"""


class BitwaveError(Exception):
    """Base class for all package errors."""


class WavError(BitwaveError):
    """Malformed RIFF/WAVE data; message names the offending chunk or field."""


class UnsupportedWavError(WavError):
    """Well-formed WAV that uses a codec or layout outside integer PCM 8/16-bit."""


class ConfigError(BitwaveError):
    """Invalid configuration value or incompatible option combination."""


class ShapeError(ConfigError):
    """Tensor/model shape mismatch detected at bind or run time."""


class DataError(BitwaveError):
    """Problem with user-supplied data (manifests, datasets, silent clips)."""


class NumericalError(BitwaveError):
    """Non-finite values encountered where the math requires finite ones."""

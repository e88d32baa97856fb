"""Exception hierarchy.

ConfigurationError covers bad parameters and inconsistent flags (CLI exit
code 1); the data-shaped errors (DataFormatError, DataError, GeometryError)
map to CLI exit code 2.
"""


class BeamTwinError(Exception):
    """Base class for all beamtwin errors."""


class ConfigurationError(BeamTwinError):
    """Invalid parameter value or inconsistent configuration."""


class DataFormatError(BeamTwinError):
    """Malformed input file (wrong shape, bad values, version mismatch)."""


class DataError(BeamTwinError):
    """Structurally valid but inconsistent data (id mismatch, missing records)."""


class GeometryError(BeamTwinError):
    """Degenerate geometry: zero-length paths or undefined azimuths."""


class DivergenceError(BeamTwinError):
    """Training produced a non-finite loss."""

"""Exception types shared across the package."""


class WiltscanError(Exception):
    """Base class for all package-specific errors."""


class UnsupportedFormatError(WiltscanError):
    """Input file is not an 8-bit RGB/RGBA PNG."""


class CorruptDataError(WiltscanError):
    """Input file claims to be a PNG but cannot be decoded."""


class InvalidColorspaceError(WiltscanError):
    """Operation applied to an image in the wrong colorspace."""


class DimensionMismatchError(WiltscanError):
    """Image and mask (or two masks) differ in width or height."""


class OutOfBoundsError(WiltscanError):
    """Pixel coordinate outside the image or mask."""


class EmptyInputError(WiltscanError):
    """Operation requires at least one sample or one input file."""


class KExceedsSamplesError(WiltscanError):
    """Requested cluster count is larger than the sample count."""


class InfeasibleSpecError(WiltscanError):
    """Synthetic scene spec violates its own constraints."""


class EmptyDirectoryError(WiltscanError):
    """Batch input directory contains no readable PNG files."""


class ConfigError(WiltscanError):
    """Pipeline config file failed strict parsing."""


class PipelineStageError(WiltscanError):
    """Wraps an error raised inside a named pipeline stage."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause

"""Exception hierarchy for the veinpulse pipeline.

Input and configuration problems map to CLI exit code 2, pipeline
failures (a run that started but cannot produce a result) to exit code 3.
"""


class VeinPulseError(Exception):
    """Base class for all veinpulse errors."""

    exit_code = 2


class DimensionError(VeinPulseError):
    """Image or grid dimensions are empty, ragged, or inconsistent."""


class FormatError(VeinPulseError):
    """A file is not in one of the supported grayscale formats."""


class SequenceNotFoundError(VeinPulseError):
    """No frame files matched the manifest."""


class ParameterError(VeinPulseError):
    """A numeric parameter is outside its legal range."""


class PhantomSpecError(VeinPulseError):
    """A phantom specification violates its invariants."""


class PipelineFailure(VeinPulseError):
    """A run started but cannot produce a usable result."""

    exit_code = 3


class EmptyMapError(PipelineFailure):
    """Binarization was asked for on an all-zero score field."""


class NoVesselError(PipelineFailure):
    """No vessel run found inside the central selection band."""


class TrackingFailureError(PipelineFailure):
    """Too many frames lost the monitored vessel."""

    def __init__(self, message: str, gap_count: int = 0, frames_total: int = 0):
        super().__init__(message)
        self.gap_count = gap_count
        self.frames_total = frames_total

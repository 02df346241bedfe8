class ExportError(Exception):
    """Base class for everything this package raises on purpose."""


class WeightSourceError(ExportError):
    """Pretrained weights could not be obtained."""


class ExportFormatError(ExportError):
    """A written model file does not parse back cleanly."""

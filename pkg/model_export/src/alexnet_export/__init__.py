"""Export of truncated AlexNet inference graphs and their preprocessing sidecar."""

from .errors import ExportError, ExportFormatError, WeightSourceError
from .export import ExportConfig, ExportResult, VerifyReport, export, verify

__all__ = [
    "ExportConfig",
    "ExportResult",
    "VerifyReport",
    "export",
    "verify",
    "ExportError",
    "ExportFormatError",
    "WeightSourceError",
]

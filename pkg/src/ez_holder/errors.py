"""Exception hierarchy for construction and certificate failures."""

from __future__ import annotations

from typing import Any


class HolderError(Exception):
    """Base class for ez-holder domain errors.

    Attributes:
        message: Human-readable description.
        context: Extra machine-readable fields (stage index, witness, ...).
    """

    kind = "holder-error"

    def __init__(self, message: str, **context: Any) -> None:
        super().__init__(message)
        self.message = message
        self.context = context

    def to_dict(self) -> dict[str, Any]:
        """Serialize for the CLI's error JSON."""
        return {"error": self.kind, "message": self.message, **self.context}


class CoverError(HolderError):
    """A cover could not be built or certified."""

    kind = "cover-error"


class PrecisionError(HolderError):
    """A value does not fit binary floating point at the required accuracy."""

    kind = "precision-error"


class CertificateError(HolderError):
    """A certificate could not be produced from the given inputs."""

    kind = "certificate-error"

"""Exception hierarchy shared by every module.

Each exception carries a stable machine-readable ``code`` (its class name)
so the HTTP layer and the CLI can map failures without string matching.
"""

from __future__ import annotations


class TwinError(Exception):
    """Base class for all domain errors."""

    #: HTTP status the service layer should use for this error class.
    http_status = 400

    @property
    def code(self) -> str:
        return type(self).__name__


class GainOutOfRange(TwinError):
    """Required or requested EDFA gain lies outside [gain_min, gain_max]."""

    http_status = 422


class EmptyPlan(TwinError):
    """A channel plan with zero channels was passed where one is required."""

    http_status = 422


class RxPowerOutOfRange(TwinError):
    """Received power outside the transceiver's supported window."""

    http_status = 422


class InvalidBer(TwinError):
    """BER outside the open interval (0, 0.5)."""

    http_status = 422


class NoIntersection(TwinError):
    """Measured BER does not intersect the back-to-back curve."""

    http_status = 422


class NoFeasibleTrx(TwinError):
    """No transceiver in the catalog meets the margin requirement."""

    http_status = 422


class SchemaViolation(TwinError):
    """A document failed validation; ``path`` is a JSON-pointer-ish locator."""

    http_status = 422

    def __init__(self, message: str, path: str = ""):
        super().__init__(message)
        self.path = path

    def __str__(self) -> str:  # pragma: no cover - repr sugar
        base = super().__str__()
        return f"{base} (at {self.path})" if self.path else base


class SpectrumConflict(TwinError):
    """Requested slot overlaps existing lightpaths; lists the blockers."""

    http_status = 409

    def __init__(self, message: str, blocking: tuple[str, ...] = ()):
        super().__init__(message)
        self.blocking = tuple(blocking)


class UnknownLightpath(TwinError):
    http_status = 404


class NoRoute(TwinError):
    http_status = 422


class NoSpectrum(TwinError):
    http_status = 422


class StaleReport(TwinError):
    """Store revision advanced since the what-if report was produced."""

    http_status = 409


class InsufficientHistory(TwinError):
    http_status = 422


class NonContiguousSegments(TwinError):
    http_status = 422


class InvalidSample(TwinError):
    """Telemetry sample violates ordering or field constraints."""

    http_status = 422

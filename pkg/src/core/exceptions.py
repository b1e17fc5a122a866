"""
Simulator Exception Classes

Custom exceptions for error handling across the signal chain, the receiver
and the experiment harness.
"""

from typing import Any


class UpsSimError(Exception):
    """Base exception for all simulator errors."""

    def __init__(
        self,
        message: str,
        error_code: str | None = None,
        context: dict[str, Any] | None = None,
    ) -> None:
        super().__init__(message)
        self.error_code = error_code
        self.context = context or {}

    def __str__(self) -> str:
        base_msg = super().__str__()
        if self.error_code:
            base_msg = f"[{self.error_code}] {base_msg}"
        if self.context:
            context_str = ", ".join(f"{k}={v}" for k, v in self.context.items())
            base_msg = f"{base_msg} (Context: {context_str})"
        return base_msg

    def get_recovery_hint(self) -> str:
        """Provide a generic hint; subclasses narrow it down."""
        return "Re-run with --debug for the full processing log"


class ConfigurationError(UpsSimError):
    """Raised when a configuration value is invalid or missing."""

    def __init__(
        self,
        message: str,
        field_name: str | None = None,
        expected: Any = None,
        actual: Any = None,
    ) -> None:
        context: dict[str, Any] = {}
        if field_name:
            context["field_name"] = field_name
        if expected is not None:
            context["expected"] = expected
        if actual is not None:
            context["actual"] = actual
        super().__init__(message, "CONFIG_ERROR", context)

    def get_recovery_hint(self) -> str:
        """Provide a helpful hint for fixing the configuration."""
        if "field_name" in self.context:
            field = self.context["field_name"]
            if "expected" in self.context:
                return (
                    f"Set '{field}' to a value satisfying: {self.context['expected']}"
                )
            return f"Check the '{field}' setting in the scenario file"
        return "Check the scenario file against scenarios/README.md"


class NyquistError(ConfigurationError):
    """Raised when a band does not fit below the Nyquist limit of a rate."""

    def __init__(self, what: str, band_hz: tuple[float, float], rate: float) -> None:
        low, high = band_hz
        super().__init__(
            f"{what} spans {low:.1f}-{high:.1f} Hz which does not fit below "
            f"Nyquist ({rate / 2:.1f} Hz) at rate {rate:.1f} Hz",
            field_name="rate",
            expected=f"> {2 * high:.1f} Hz",
            actual=rate,
        )
        self.band_hz = band_hz
        self.rate = rate

    def get_recovery_hint(self) -> str:
        return (
            f"Raise the sample rate above {2 * self.band_hz[1]:.0f} Hz "
            "or lower the signal frequencies"
        )


class ScheduleError(ConfigurationError):
    """Raised when a slot schedule cannot be built."""

    def get_recovery_hint(self) -> str:
        return "Give every anchor a distinct id and list each id in one group only"


class ScenarioFileError(ConfigurationError):
    """Raised when a scenario or anchor-map file cannot be read or validated."""

    def __init__(self, message: str, file_path: str | None = None) -> None:
        super().__init__(message, field_name=None)
        if file_path:
            self.context["file_path"] = file_path

    def get_recovery_hint(self) -> str:
        return "Validate the YAML syntax and compare with the files in scenarios/"


class SignalMismatchError(UpsSimError):
    """Raised when buffers that must agree in rate or length do not."""

    def __init__(
        self,
        message: str,
        expected: Any = None,
        actual: Any = None,
    ) -> None:
        context: dict[str, Any] = {}
        if expected is not None:
            context["expected"] = expected
        if actual is not None:
            context["actual"] = actual
        super().__init__(message, "SIGNAL_MISMATCH", context)


class DetectionError(UpsSimError):
    """Raised when the receiver cannot extract beacons from audio."""

    def __init__(
        self,
        message: str,
        error_code: str = "DETECTION_ERROR",
        context: dict[str, Any] | None = None,
    ) -> None:
        super().__init__(message, error_code, context)

    def get_recovery_hint(self) -> str:
        return "Check the recording level and that beacons are audible in 5-15 kHz"


class CBeaconAbsentError(DetectionError):
    """Raised when no chirp carrier is found in the audio."""

    def __init__(self, score: float, threshold: float) -> None:
        super().__init__(
            "No downconverted chirp found in audio",
            "CBEACON_ABSENT",
            {"score": round(score, 3), "threshold": threshold},
        )
        self.score = score

    def get_recovery_hint(self) -> str:
        return (
            "Make sure the cBeacon is on and its slope matches the detector "
            "configuration"
        )


class InsufficientDataError(DetectionError):
    """Raised when the audio is too short for the requested processing."""

    def __init__(self, message: str, needed: int, available: int) -> None:
        super().__init__(
            message,
            "INSUFFICIENT_DATA",
            {"needed_samples": needed, "available_samples": available},
        )

    def get_recovery_hint(self) -> str:
        return "Record at least one full schedule round plus two chirp periods"


class LocalizationError(UpsSimError):
    """Raised when a position fix cannot be computed."""

    def __init__(
        self,
        message: str,
        error_code: str = "LOCALIZATION_ERROR",
        context: dict[str, Any] | None = None,
    ) -> None:
        super().__init__(message, error_code, context)


class InsufficientAnchorsError(LocalizationError):
    """Raised when fewer pseudo-ranges than unknowns are available."""

    def __init__(self, available: int, dims: int) -> None:
        super().__init__(
            f"{available} pseudo-ranges cannot solve a {dims}D fix",
            "INSUFFICIENT_ANCHORS",
            {"available": available, "required": dims + 1},
        )

    def get_recovery_hint(self) -> str:
        return "Decode more anchors or switch to 2D mode with a known height"


class DegenerateGeometryError(LocalizationError):
    """Raised when the anchor geometry makes the solve ill-conditioned."""

    def __init__(self, condition_number: float) -> None:
        super().__init__(
            "Anchor geometry is degenerate",
            "DEGENERATE_GEOMETRY",
            {"condition_number": f"{condition_number:.3g}"},
        )
        self.condition_number = condition_number

    def get_recovery_hint(self) -> str:
        return "Avoid collinear (2D) or coplanar (3D) anchor layouts"


class ExperimentError(UpsSimError):
    """Raised when an experiment is unknown or badly parameterized."""

    def __init__(self, message: str, experiment: str | None = None) -> None:
        context = {"experiment": experiment} if experiment else {}
        super().__init__(message, "EXPERIMENT_ERROR", context)

    def get_recovery_hint(self) -> str:
        return "Run 'list-experiments' to see the registered experiments"

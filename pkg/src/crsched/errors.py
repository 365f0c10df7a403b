"""Exception hierarchy shared by the library and the CLI."""

from __future__ import annotations


class DomainError(ValueError):
    """A numeric argument lies outside the domain of a function."""


class ConfigError(ValueError):
    """Invalid scenario configuration.

    ``field`` names the offending key; ``line`` is filled in by the parser when
    the configuration came from text.
    """

    kind = "invalid config"

    def __init__(self, field: str, detail: str = "", line: int | None = None):
        self.field = field
        self.detail = detail
        self.line = line
        super().__init__(self._render())

    def _render(self) -> str:
        msg = f"{self.kind}: field '{self.field}'"
        if self.detail:
            msg += f" ({self.detail})"
        if self.line is not None:
            msg = f"line {self.line}: {msg}"
        return msg

    def at_line(self, line: int | None) -> "ConfigError":
        self.line = line
        self.args = (self._render(),)
        return self


class MissingFieldError(ConfigError):
    kind = "missing field"


class LengthMismatchError(ConfigError):
    kind = "trace length mismatch"


class NegativeValueError(ConfigError):
    kind = "negative value"


class InfeasibleError(ValueError):
    """A power decision violates a per-slot constraint."""


class InfeasibleEnergyError(InfeasibleError):
    pass


class InfeasibleRateError(InfeasibleError):
    pass


class OracleRefusal(ValueError):
    """Horizon too long for exhaustive enumeration."""

"""Exception types and validation findings shared across the package."""
from __future__ import annotations

from dataclasses import dataclass, field


class ProtosumError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(ProtosumError):
    """A delimited-text source could not be parsed.

    Carries the 1-based line number of the offending row when known.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class LogValidationError(ProtosumError):
    """The parsed data violates a structural constraint (e.g. a case-level
    attribute taking two different values within one case)."""


class ConfigError(ProtosumError):
    """A knowledge base, mapping, spec or template is invalid."""


class EvaluationError(ProtosumError):
    """A membership or truth computation was applied to incompatible data."""


class UnknownActivityError(ProtosumError):
    """An operation referenced an activity label absent from the log."""


@dataclass(frozen=True)
class Finding:
    level: str  # "error" | "warning"
    subject: str | None  # case id or variable name, None for log-wide findings
    message: str

    def __str__(self) -> str:
        where = f" [{self.subject}]" if self.subject else ""
        return f"{self.level}{where}: {self.message}"


@dataclass
class ValidationReport:
    findings: list[Finding] = field(default_factory=list)

    def add(self, level: str, subject: str | None, message: str) -> None:
        self.findings.append(Finding(level, subject, message))

    @property
    def errors(self) -> list[Finding]:
        return [f for f in self.findings if f.level == "error"]

    def __bool__(self) -> bool:
        return bool(self.findings)

    def __iter__(self):
        return iter(self.findings)

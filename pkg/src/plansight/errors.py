"""Exception hierarchy. Every error carries a machine-readable ``code``
that is stable across the CLI and the HTTP API."""

from __future__ import annotations

from typing import Any


class EngineError(Exception):
    """Base class for all errors raised by this package."""

    code = "EngineError"

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_doc(self) -> dict:
        doc: dict[str, Any] = {"code": self.code, "message": self.message}
        if self.details:
            doc["details"] = {k: v for k, v in self.details.items() if v is not None}
        return doc


class PddlSyntaxError(EngineError):
    """Malformed input text; reports the 1-based line/column of the offender."""

    code = "SyntaxError"

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}", line=line, column=column)
        self.line = line
        self.column = column


class UnsupportedFeatureError(EngineError):
    """Input uses a construct outside the supported language subset."""

    code = "UnsupportedFeature"

    def __init__(self, feature: str, line: int | None = None, column: int | None = None):
        where = f"{line}:{column}: " if line is not None else ""
        super().__init__(f"{where}unsupported feature {feature}", feature=feature,
                         line=line, column=column)
        self.feature = feature


class PddlSemanticError(EngineError):
    """Well-formed input that violates a declaration or typing rule."""

    code = "SemanticError"

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = f"{line}:{column}: " if line is not None else ""
        super().__init__(where + message, line=line, column=column)


class NotApplicableError(EngineError):
    """apply() called with an action whose preconditions do not hold."""

    code = "NotApplicable"

    def __init__(self, classification):
        super().__init__(f"action {classification.action_id} is not applicable "
                         f"({classification.status})")
        self.classification = classification
        self.details = {"classification": classification.to_doc()}


class NegativeResourceError(EngineError):
    """A decrease drove a fluent below zero; the domain fails to guard it."""

    code = "NegativeResource"

    def __init__(self, action_id: str, fluent: str):
        super().__init__(f"action {action_id} drives {fluent} below zero",
                         action=action_id, fluent=fluent)


class TargetUnreachableError(EngineError):
    code = "TargetUnreachable"


class TargetInitiallyTrueError(EngineError):
    code = "TargetInitiallyTrue"


class InvalidCommandError(EngineError):
    """Session command rejected before it touched the session."""

    code = "InvalidCommand"


class StepNotApplicableError(EngineError):
    """ExecuteStep refused; carries the blocking classification."""

    code = "StepNotApplicable"

    def __init__(self, classification):
        super().__init__(f"step {classification.action_id} is not applicable "
                         f"({classification.status})")
        self.classification = classification
        self.details = {"classification": classification.to_doc()}


class DispatchBlockedError(EngineError):
    """Dispatch refused by the gate; carries the validation report."""

    code = "DispatchBlocked"

    def __init__(self, report):
        super().__init__("plan dispatch blocked by validation")
        self.report = report
        self.details = {"report": report.to_doc()}


class SchemaVersionMismatchError(EngineError):
    code = "SchemaVersionMismatch"


class ScenarioFormatError(EngineError):
    code = "ScenarioFormat"


class UnknownSessionError(EngineError):
    code = "UnknownSession"

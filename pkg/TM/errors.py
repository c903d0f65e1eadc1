from __future__ import annotations


class TMError(ValueError):
    code = "TMError"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message

    def to_dict(self):
        return {"code": self.code, "message": self.message}


class DuplicateName(TMError):
    code = "DuplicateName"


class UnknownParent(TMError):
    code = "UnknownParent"


class DuplicateStage(TMError):
    code = "DuplicateStage"


class MixedReceiveRefinement(TMError):
    code = "MixedReceiveRefinement"


class DirectionOnNonTransfer(TMError):
    code = "DirectionOnNonTransfer"


class IllegalFlowPair(TMError):
    code = "IllegalFlowPair"

    def __init__(self, message: str, rule: str):
        super().__init__(message)
        self.rule = rule

    def to_dict(self):
        return {"code": self.code, "message": self.message, "rule": self.rule}


class UnknownStage(TMError):
    code = "UnknownStage"


class ParseError(TMError):
    """Raised with the span of the offending token or statement."""

    code = "ParseError"

    def __init__(self, message: str, span):
        super().__init__(message)
        self.span = span

    def __str__(self):
        if self.span is None:
            return self.message
        return "statement {}, bytes {}-{}: {}".format(
            self.span.statement, self.span.start, self.span.end, self.message)

    def to_dict(self):
        payload = {"code": self.code, "message": self.message}
        if self.span is not None:
            payload["span"] = self.span.to_dict()
        return payload


class InvalidModel(TMError):
    code = "InvalidModel"

    def __init__(self, message: str, diagnostics=()):
        super().__init__(message)
        self.diagnostics = list(diagnostics)

    def to_dict(self):
        return {"code": self.code, "message": self.message,
                "diagnostics": [d.to_dict() for d in self.diagnostics]}


class SchemaError(TMError):
    code = "SchemaError"

    def __init__(self, message: str, path: str):
        super().__init__("{}: {}".format(path, message))
        self.path = path

    def to_dict(self):
        return {"code": self.code, "message": self.message, "path": self.path}


class EmptyRegion(TMError):
    code = "EmptyRegion"


class DuplicateLabel(TMError):
    code = "DuplicateLabel"


class UnknownEvent(TMError):
    code = "UnknownEvent"


class InvalidChronology(TMError):
    code = "InvalidChronology"


class TooManyEvents(TMError):
    code = "TooManyEvents"


class TraceNotAccepted(TMError):
    code = "TraceNotAccepted"

    def __init__(self, message: str, verdict=None):
        super().__init__(message)
        self.verdict = verdict


class InvalidSourceStage(TMError):
    code = "InvalidSourceStage"


class ForeignStage(TMError):
    code = "ForeignStage"


class EmptyChronology(TMError):
    code = "EmptyChronology"


class InvalidName(TMError):
    code = "InvalidName"

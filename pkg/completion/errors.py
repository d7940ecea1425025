class CompletionError(Exception):
    """
    Base class for every error the library raises on purpose.
    Carries a machine-readable code and the exit status the CLI should use.
    """
    code = "completion-error"
    exit_status = 2

    def to_dict(self) -> dict:
        return {"code": self.code, "message": str(self), "type": type(self).__name__}


class InputError(CompletionError):
    code = "input-error"
    exit_status = 1


class GraphFormatError(InputError):
    code = "graph-format"


class MatrixFormatError(InputError):
    code = "matrix-format"


class PatternError(InputError):
    """The pattern does not have the shape the operation needs."""
    code = "unsupported-pattern"


class SizeLimitError(InputError):
    code = "size-limit"


class NotFullRankTypicalError(PatternError):
    code = "not-full-rank-typical"


class NotCertifiedError(InputError):
    code = "not-certified-full-rank"


class InexactReportError(InputError):
    code = "inexact-report"


class NumericError(CompletionError):
    code = "numeric-error"
    exit_status = 2


class SingularBlockError(NumericError):
    code = "singular-block"


class NonGenericInputError(NumericError):
    code = "non-generic-input"


class InternalConsistencyError(NumericError):
    code = "internal-consistency"

"""Exception hierarchy shared by every stage of the pipeline.

The CLI maps the three top-level families onto exit codes:
``ValidationError`` -> 1, ``HookFailed`` -> 2, ``IngestionError`` -> 3.
"""


class ResprofError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(ResprofError, ValueError):
    """Input violates a domain invariant.

    ``violations`` holds the structured findings when the error originates
    from one of the ``validate_*`` functions.
    """

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = tuple(violations)


# -- ingestion ---------------------------------------------------------------

class IngestionError(ResprofError, ValueError):
    pass


class MalformedRow(IngestionError):
    def __init__(self, line_no, reason=""):
        super().__init__(f"malformed CSV row at line {line_no}" + (f": {reason}" if reason else ""))
        self.line_no = line_no


class MalformedLine(IngestionError):
    def __init__(self, line_no, reason=""):
        super().__init__(f"malformed exposition line {line_no}" + (f": {reason}" if reason else ""))
        self.line_no = line_no


class NoData(IngestionError):
    def __init__(self, metric):
        super().__init__(f"no samples for metric {metric!r} in the requested range")
        self.metric = metric


class EvenWindow(ValidationError):
    def __init__(self, window):
        super().__init__(f"smoothing window must be a positive odd integer, got {window}")
        self.window = window


class UnequalDurations(ValidationError):
    def __init__(self, faulty, normal):
        super().__init__(f"faulty duration {faulty}s differs from normal duration {normal}s")
        self.faulty = faulty
        self.normal = normal


class OutOfRange(ValidationError):
    pass


# -- analysis ----------------------------------------------------------------

class AnalysisError(ResprofError, ValueError):
    pass


class EmptySubset(AnalysisError):
    def __init__(self):
        super().__init__("metric subset is empty")


class UnknownMetric(AnalysisError):
    def __init__(self, metric):
        super().__init__(f"metric {metric!r} is not part of the window")
        self.metric = metric


class DegenerateInput(AnalysisError):
    pass


class LengthMismatchError(AnalysisError):
    def __init__(self, got, expected):
        super().__init__(f"series length {got} does not match {expected}")
        self.got = got
        self.expected = expected


class NotAPermutation(AnalysisError):
    pass


class RankMismatch(AnalysisError):
    pass


class InvalidThreshold(ValidationError):
    def __init__(self, tau):
        super().__init__(f"threshold must lie strictly inside (0, 1), got {tau}")
        self.tau = tau


class EmptyInput(ValidationError):
    pass


class InvalidSpec(ValidationError):
    pass


# -- harness -----------------------------------------------------------------

class HookFailed(ResprofError):
    def __init__(self, failure, exit_code, phase="inject"):
        super().__init__(f"{phase} hook for failure {failure!r} exited with code {exit_code}")
        self.failure = failure
        self.exit_code = exit_code
        self.phase = phase


class IngestionFailed(IngestionError):
    def __init__(self, failure, cause):
        super().__init__(f"could not collect metrics for failure {failure!r}: {cause}")
        self.failure = failure
        self.cause = cause

"""Exception hierarchy shared across the pipeline."""


class StepragError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(StepragError):
    """A line-delimited file contains a malformed record."""

    def __init__(self, path, line_no: int, reason: str):
        self.path = str(path)
        self.line_no = line_no
        self.reason = reason
        super().__init__(f"{self.path}:{line_no}: {reason}")


class DuplicateIdError(StepragError):
    """Two records in one file share an id."""

    def __init__(self, path, record_id: str, first_line: int, second_line: int):
        self.record_id = record_id
        self.first_line = first_line
        self.second_line = second_line
        super().__init__(
            f"{path}: duplicate id {record_id!r} on lines {first_line} and {second_line}"
        )


class NotFoundError(StepragError):
    """Lookup by id failed."""

    def __init__(self, kind: str, record_id: str):
        self.record_id = record_id
        super().__init__(f"{kind} not found: {record_id!r}")


class ConfigError(StepragError):
    """Invalid configuration or preconditions for an operation."""


class GatewayError(StepragError):
    """Base class for model-endpoint failures."""


class TransportError(GatewayError):
    """Network failure or non-success HTTP status after all retries."""

    def __init__(self, message: str, attempts: int):
        self.attempts = attempts
        super().__init__(f"{message} ({attempts} attempts)")


class GatewayTimeout(TransportError):
    """Request exceeded the configured timeout after all retries."""


class ScriptExhaustedError(GatewayError):
    """A scripted gateway received a request no remaining entry matches."""


class ReplayMissError(GatewayError):
    """Replay session has no entry for the request hash."""

    def __init__(self, request_hash: str, prompt_head: str):
        self.request_hash = request_hash
        super().__init__(
            f"no recorded result for request hash {request_hash} (prompt starts: {prompt_head!r})"
        )


class DegenerateOutputError(StepragError):
    """The model emitted empty reasoning steps twice in a row."""

    def __init__(self, sample_id: str, step: int):
        self.sample_id = sample_id
        self.step = step
        super().__init__(f"sample {sample_id!r}: empty output at steps {step - 1} and {step}")


class TraceError(StepragError):
    """A multi-step run failed; carries the sample id for batch reporting."""

    def __init__(self, sample_id: str, cause: Exception):
        self.sample_id = sample_id
        self.cause = cause
        super().__init__(f"sample {sample_id!r}: {cause}")


class SchemaError(StepragError):
    """A record read back from disk violates its schema."""

    def __init__(self, path, line_no: int, field: str, reason: str):
        self.line_no = line_no
        self.field = field
        super().__init__(f"{path}:{line_no}: field {field!r}: {reason}")


class ValidationError(StepragError):
    """A numeric input violates an operation's preconditions."""


class RecallUnavailableError(StepragError):
    """No sample in the dataset carries supporting passage annotations."""

    def __init__(self):
        super().__init__("recall unavailable: no sample carries supporting_ids")

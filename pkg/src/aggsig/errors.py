class UsageError(ValueError):
    """Raised when an operation is called outside its contract (bad group tag, empty input, ...)."""


class ScenarioError(UsageError):
    """Malformed scenario document. Carries the offending field path when known."""

    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)

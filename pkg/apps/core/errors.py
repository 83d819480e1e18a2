"""
Exception hierarchy shared by every featurefuzz app.

Each app defines its own subclasses next to the code that raises them;
this module only holds the roots so commands can map any domain failure
to a runtime exit code.
"""


class FeatureFuzzError(Exception):
    """
    Base class for every error the toolkit raises on purpose.

    Attributes:
        exit_code (int): Process exit code used by the command line when the
            error escapes a subcommand. Usage errors use 1, everything that
            happens after arguments were accepted uses 2.
    """

    exit_code = 2

    def as_payload(self) -> dict[str, str]:
        """Machine-readable form written to stderr by the command line."""
        return {"error": type(self).__name__, "message": str(self)}


class LocatedError(FeatureFuzzError):
    """An error tied to a position in a text file (1-based line)."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None and column is not None:
            message = f"{message} (line {line}, column {column})"
        elif line is not None:
            message = f"{message} (line {line})"
        super().__init__(message)

    def as_payload(self) -> dict[str, str | int]:
        payload: dict[str, str | int] = dict(super().as_payload())
        if self.line is not None:
            payload["line"] = self.line
        if self.column is not None:
            payload["column"] = self.column
        return payload


class IOFailure(FeatureFuzzError):
    """A file the toolkit had to read or write could not be accessed."""

    @classmethod
    def from_os_error(cls, exc: OSError) -> "IOFailure":
        if exc.filename is not None:
            return cls(f"{exc.strerror or exc}: {exc.filename}")
        return cls(str(exc))

class ValidationError(ValueError):
    """Bad arguments or inconsistent inputs (CLI exit status 1)."""


class MalformedInputError(ValueError):
    """An input file does not follow its declared format (CLI exit status 2)."""

    def __init__(self, message: str, path=None, line: int | None = None):
        where = ""
        if path is not None:
            where += f"{path}"
        if line is not None:
            where += f":{line}" if where else f"line {line}"
        super().__init__(f"{where}: {message}" if where else message)
        self.path = path
        self.line = line

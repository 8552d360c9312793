class SSError(Exception):
    """Base for all errors reported to the user as diagnostics."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message)
        self.message = message
        self.line = line


class LexError(SSError):
    pass


class ParseError(SSError):
    pass


class RegistrationError(SSError):
    pass

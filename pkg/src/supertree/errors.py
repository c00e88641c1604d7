"""Exception types shared across the toolkit."""


class InputError(ValueError):
    """Malformed or inconsistent user input (CLI exit code 2)."""


class NewickError(InputError):
    def __init__(self, message, offset=None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (at byte {offset})"
        super().__init__(message)


class LimitExceeded(RuntimeError):
    """Exact search refused because the instance is above the configured taxa limit."""

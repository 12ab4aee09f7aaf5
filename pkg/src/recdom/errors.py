class RecdomError(Exception):
    """Base class for all errors raised by recdom."""


class NotAPoset(RecdomError):
    pass


class DuplicateLabel(RecdomError):
    pass


class NotAnEmbedding(RecdomError):
    pass


class BoundExceeded(RecdomError):
    pass


class ArityMismatch(RecdomError):
    pass


class SourceMismatch(RecdomError):
    pass


class CompositionMismatch(RecdomError):
    pass


class InvalidLink(RecdomError):
    pass


class InvalidLinkMor(RecdomError):
    pass


class ValueNotInStage(RecdomError):
    pass


class CoconeMismatch(RecdomError):
    pass


class NotNatural(RecdomError):
    pass


class IsoNotFound(RecdomError):
    pass


class DslError(RecdomError):
    """Parse or elaboration error carrying a 1-based source position."""

    def __init__(self, message, line=None, column=None):
        self.message = message
        self.line = line
        self.column = column
        where = f" at {line}:{column}" if line is not None else ""
        super().__init__(f"{message}{where}")


class UnboundVariable(DslError):
    def __init__(self, name, line=None, column=None):
        self.name = name
        super().__init__(f"unbound variable {name}", line, column)

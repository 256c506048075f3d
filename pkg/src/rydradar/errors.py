"""Exception types raised by the toolkit."""


class DomainError(ValueError):
    """An argument lies outside the domain where a formula is defined."""


class ModelValidityError(DomainError):
    """Inputs break an approximation the model relies on."""


class NoSignalError(DomainError):
    """A sampled record carries no energy to estimate from."""


class ConfigError(ValueError):
    """Invalid configuration document.

    Attributes:
        field: ``section.key`` the problem refers to, if any
        line: 1-based line number in the source document, if known
    """

    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(field)
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)

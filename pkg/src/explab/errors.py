"""Exception hierarchy shared by every module."""


class ExplabError(Exception):
    """Base class for errors raised by explab."""


class DomainError(ExplabError, ValueError):
    """An argument lies outside the domain of the operation."""


class ResourceError(ExplabError, RuntimeError):
    """A configured size cap would be exceeded."""


class ConstructionError(ExplabError, ValueError):
    """A construction's admissibility conditions cannot be met."""

"""Exception types shared across the package."""


class InvalidInput(ValueError):
    """An argument violates the documented precondition of an operation."""


class ClauseViolation(InvalidInput):
    """An amalgamation request breaks one of the four construction clauses.

    ``clause`` is one of ``"alpha"``, ``"beta"``, ``"gamma"``, ``"delta"``.
    """

    def __init__(self, clause, message):
        super().__init__(f"clause ({clause}): {message}")
        self.clause = clause


class ConsistencyError(RuntimeError):
    """A derived structure contradicts a property that must hold by construction."""


class ResourceLimit(RuntimeError):
    """A condition would exceed the height or table-size limits."""


class SearchFailure(LookupError):
    """No sub-family with the requested shape exists."""


class FormatError(InvalidInput):
    """Malformed serialized condition."""


class PreconditionViolation(InvalidInput):
    """A check's hypothesis does not hold; ``item`` names which one."""

    def __init__(self, item, message):
        super().__init__(f"precondition ({item}) fails: {message}")
        self.item = item

class ContractViolation(ValueError):
    """A caller broke an operation's precondition (ordering, ownership, ...)."""


class CorruptChunk(ValueError):
    """A chunk payload does not decode to a valid strictly increasing run."""


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where = f"{path}:"
        if line is not None:
            where += f"{line}: "
        elif where:
            where += " "
        super().__init__(f"{where}{message}")

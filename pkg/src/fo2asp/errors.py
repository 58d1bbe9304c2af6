class Fo2AspError(Exception):
    """Base class for all errors raised by this package."""


class InputError(Fo2AspError):
    """Problem text or problem value is unusable (maps to CLI exit code 20)."""


class ParseError(InputError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.message = message
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)


class ValidationError(InputError):
    pass


class TranslationError(Fo2AspError):
    pass


class CapExceeded(Fo2AspError):
    """An exhaustive enumeration would exceed its configured bound."""


class ThreeValuedError(Fo2AspError):
    """A definition has a three-valued well-founded model.

    ``true`` and ``unknown`` hold the certainly-true and undetermined ground
    atoms as ``(predicate, args)`` pairs.
    """

    def __init__(self, true: frozenset, unknown: frozenset):
        self.true = true
        self.unknown = unknown
        shown = ", ".join(sorted(_fmt(a) for a in unknown)[:5])
        super().__init__(f"definition is not total: unknown atoms {shown}")


class SolverError(Fo2AspError):
    pass


class AnswerSetParseError(SolverError):
    pass


class BackMappingError(Fo2AspError):
    pass


def _fmt(atom) -> str:
    name, args = atom
    return f"{name}({','.join(map(str, args))})" if args else name

"""Exception hierarchy shared by every compiler phase."""

from __future__ import annotations


class Pos:
    __slots__ = ("line", "col", "file")

    def __init__(self, line: int, col: int, file: str = "<input>"):
        self.line = line
        self.col = col
        self.file = file

    def __repr__(self):
        return f"{self.file}:{self.line}:{self.col}"

    def __eq__(self, other):
        return isinstance(other, Pos) and (self.line, self.col, self.file) == (
            other.line,
            other.col,
            other.file,
        )

    def __hash__(self):
        return hash((self.line, self.col, self.file))


NOPOS = Pos(0, 0, "<generated>")


class MiniCurryError(Exception):
    """Base class; ``pos`` is optional source position."""

    kind = "error"

    def __init__(self, message: str, pos: Pos | None = None):
        super().__init__(message)
        self.message = message
        self.pos = pos

    def __str__(self):
        if self.pos is not None and self.pos is not NOPOS:
            return f"{self.pos}: {self.kind}: {self.message}"
        return f"{self.kind}: {self.message}"


class ParseError(MiniCurryError):
    kind = "parse error"

    def __init__(self, message: str, pos: Pos | None = None, expected=()):
        self.expected = tuple(sorted(set(expected)))
        if self.expected:
            message = f"{message} (expected {', '.join(self.expected)})"
        super().__init__(message, pos)


class ScopeError(MiniCurryError):
    kind = "scope error"


class TypeError_(MiniCurryError):
    """Static type error.  Subclasses name the failing rule."""

    kind = "type error"


class UnificationError(TypeError_):
    kind = "type error [UnificationError]"


class UnresolvedInstance(TypeError_):
    kind = "type error [UnresolvedInstance]"

    def __init__(self, message: str, pos: Pos | None = None, cls=None, type_=None):
        super().__init__(message, pos)
        self.cls = cls
        self.type = type_


class AmbiguousContext(TypeError_):
    kind = "type error [AmbiguousContext]"


class SignatureError(TypeError_):
    kind = "type error [SignatureError]"


class DeriveError(TypeError_):
    kind = "type error [DeriveError]"


class InstanceError(TypeError_):
    kind = "type error [InstanceError]"


class EvalError(MiniCurryError):
    kind = "runtime error"

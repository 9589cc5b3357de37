"""Domain errors.

Every error names the offending element (vertex, edge, triple, index, ...)
so callers can report a violation without re-deriving context.  All errors
inherit from :class:`UltraTreeError`; the CLI maps that base class to exit
code 1.
"""

from __future__ import annotations


class UltraTreeError(Exception):
    """Base class for every domain error raised by this package."""


class DuplicateVertex(UltraTreeError):
    def __init__(self, vertex: str):
        super().__init__(f"duplicate vertex id {vertex!r}")
        self.vertex = vertex


class SelfLoop(UltraTreeError):
    def __init__(self, vertex: str):
        super().__init__(f"self loop at vertex {vertex!r}")
        self.vertex = vertex


class UnknownVertex(UltraTreeError):
    def __init__(self, vertex: str):
        super().__init__(f"unknown vertex id {vertex!r}")
        self.vertex = vertex


class MissingLabel(UltraTreeError):
    def __init__(self, vertex: str):
        super().__init__(f"no label for vertex {vertex!r}")
        self.vertex = vertex


class NegativeLabel(UltraTreeError):
    def __init__(self, vertex: str, value):
        super().__init__(f"negative label {value} at vertex {vertex!r}")
        self.vertex = vertex
        self.value = value


class NotConnected(UltraTreeError):
    def __init__(self, vertex: str):
        super().__init__(f"graph is not connected: vertex {vertex!r} unreachable")
        self.vertex = vertex


class HasCycle(UltraTreeError):
    def __init__(self, edge: tuple[str, str]):
        super().__init__(f"graph has a cycle: edge {edge!r} closes one")
        self.edge = edge


class SameVertex(UltraTreeError):
    def __init__(self, vertex: str):
        super().__init__(f"endpoints coincide: {vertex!r}")
        self.vertex = vertex


class EmptySet(UltraTreeError):
    def __init__(self, what: str = "vertex set"):
        super().__init__(f"empty {what}")


class NotConnectedSubset(UltraTreeError):
    def __init__(self, vertex: str):
        super().__init__(
            f"vertex subset does not induce a connected subtree ({vertex!r} separated)"
        )
        self.vertex = vertex


class VertexInS(UltraTreeError):
    def __init__(self, vertex: str):
        super().__init__(f"vertex {vertex!r} already belongs to the subtree")
        self.vertex = vertex


class SizeCapExceeded(UltraTreeError):
    def __init__(self, size: int, cap: int, what: str = "input"):
        super().__init__(f"{what} size {size} exceeds cap {cap}")
        self.size = size
        self.cap = cap


class AsymmetricEntry(UltraTreeError):
    def __init__(self, u: str, v: str):
        super().__init__(f"matrix asymmetric at ({u!r}, {v!r})")
        self.pair = (u, v)


class NonzeroDiagonal(UltraTreeError):
    def __init__(self, vertex: str, value):
        super().__init__(f"nonzero diagonal entry {value} at {vertex!r}")
        self.vertex = vertex
        self.value = value


class StrongTriangleViolation(UltraTreeError):
    def __init__(self, x: str, y: str, z: str):
        super().__init__(
            f"strong triangle inequality fails on ({x!r}, {y!r}, {z!r})"
        )
        self.triple = (x, y, z)


class NegativeDistance(UltraTreeError):
    def __init__(self, u: str, v: str, value):
        super().__init__(f"negative distance {value} at ({u!r}, {v!r})")
        self.pair = (u, v)
        self.value = value


class DegenerateLabeling(UltraTreeError):
    """An edge whose both endpoints carry label zero."""

    def __init__(self, edge, detail: str = ""):
        msg = f"degenerate labeling: both endpoints of {edge!r} have label 0"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
        self.edge = edge


class InvalidDeclaration(UltraTreeError):
    """Declared sequence metadata inconsistent with its prefix, or a malformed
    symbolic constructor (bad parameter, bad ref, bad site selector...)."""

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class GlueLabelMismatch(UltraTreeError):
    def __init__(self, where: str, base_value, part_value):
        super().__init__(
            f"glued labels differ at {where}: base has {base_value}, part has {part_value}"
        )
        self.where = where
        self.base_value = base_value
        self.part_value = part_value


class PreconditionFailed(UltraTreeError):
    def __init__(self, clause: str, detail: str = ""):
        msg = f"precondition failed: {clause}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
        self.clause = clause
        self.detail = detail

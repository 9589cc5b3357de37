"""Finite ultrametric spaces with exact rational distances.

An :class:`UltraSpace` is a finite point set with a symmetric, zero-diagonal
matrix satisfying the strong triangle inequality d(x,z) <= max(d(x,y), d(y,z)).
Off-diagonal zeros are allowed (the space is then only a pseudoultrametric;
``proper`` is False).

Every proper finite ultrametric space is equivalently a dendrogram: a rooted
tree whose internal nodes carry strictly decreasing positive values root-to-
leaf and whose leaves are the points; the distance of two points is the value
at their join.  ``canonical_hierarchy`` computes that tree in a canonical
form, which decides isometry and drives exhaustive space enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .errors import (
    AsymmetricEntry,
    DuplicateVertex,
    EmptySet,
    NegativeDistance,
    NonzeroDiagonal,
    StrongTriangleViolation,
    UnknownVertex,
)


@dataclass(frozen=True)
class UltraSpace:
    """Finite (pseudo)ultrametric space.  Built via :func:`validate_space`."""

    points: tuple[str, ...]
    dist: tuple[tuple[Fraction, ...], ...]
    proper: bool

    @cached_property
    def _index(self) -> dict[str, int]:
        return {p: i for i, p in enumerate(self.points)}

    def d(self, u: str, v: str) -> Fraction:
        try:
            return self.dist[self._index[u]][self._index[v]]
        except KeyError as exc:
            raise UnknownVertex(exc.args[0]) from None

    def __len__(self) -> int:
        return len(self.points)

    def attained(self) -> list[Fraction]:
        """Sorted positive distances attained in the space."""
        vals = {e for row in self.dist for e in row if e > 0}
        return sorted(vals)


def validate_space(points, matrix) -> UltraSpace:
    """Check matrix axioms and return the validated space.

    Raises AsymmetricEntry / NonzeroDiagonal / NegativeDistance /
    StrongTriangleViolation naming the offending entries, DuplicateVertex or
    EmptySet for a bad point list.
    """
    pts = tuple(points)
    if not pts:
        raise EmptySet("point set")
    seen = set()
    for p in pts:
        if p in seen:
            raise DuplicateVertex(p)
        seen.add(p)
    n = len(pts)
    rows = tuple(tuple(Fraction(e) for e in row) for row in matrix)
    if len(rows) != n or any(len(r) != n for r in rows):
        raise AsymmetricEntry(pts[0], pts[-1])
    for i in range(n):
        if rows[i][i] != 0:
            raise NonzeroDiagonal(pts[i], rows[i][i])
        for j in range(i + 1, n):
            if rows[i][j] != rows[j][i]:
                raise AsymmetricEntry(pts[i], pts[j])
            if rows[i][j] < 0:
                raise NegativeDistance(pts[i], pts[j], rows[i][j])
    for i in range(n):
        for j in range(n):
            dij = rows[i][j]
            for k in range(n):
                if dij > max(rows[i][k], rows[k][j]):
                    raise StrongTriangleViolation(pts[i], pts[j], pts[k])
    proper = all(
        rows[i][j] > 0 for i in range(n) for j in range(i + 1, n)
    )
    return UltraSpace(points=pts, dist=rows, proper=proper)


# ---------------------------------------------------------------------------
# dendrograms


@dataclass(frozen=True)
class Hierarchy:
    """Dendrogram node: ``value`` is the diameter of its point set, children
    are sub-dendrograms; a leaf has value 0, no children and a point name."""

    value: Fraction
    children: tuple["Hierarchy", ...] = ()
    point: str | None = None

    @property
    def is_leaf(self) -> bool:
        return self.point is not None

    def size(self) -> int:
        if self.is_leaf:
            return 1
        return sum(c.size() for c in self.children)

    def leaves(self) -> list[str]:
        if self.is_leaf:
            return [self.point]
        out: list[str] = []
        for c in self.children:
            out.extend(c.leaves())
        return out

    @cached_property
    def shape(self):
        """Name-free canonical encoding; equal shapes <=> isometric spaces."""
        if self.is_leaf:
            return ()
        return (self.value, tuple(sorted(c.shape for c in self.children)))

    def encode(self) -> str:
        """Compact canonical string, e.g. ``(2 (1 * *) (1 * *))``."""
        if self.is_leaf:
            return "*"
        from .ratio import format_rational

        inner = " ".join(c.encode() for c in sorted(self.children, key=lambda c: c.shape))
        return f"({format_rational(self.value)} {inner})"


def canonical_hierarchy(space: UltraSpace) -> Hierarchy:
    """Dendrogram of the space (children ordered canonically by shape)."""

    def build(idx: list[int]) -> Hierarchy:
        if len(idx) == 1:
            return Hierarchy(Fraction(0), point=space.points[idx[0]])
        diam = max(
            space.dist[i][j] for a, i in enumerate(idx) for j in idx[a + 1 :]
        )
        if diam == 0:
            # pseudoultrametric clump: keep a flat zero node
            kids = tuple(
                Hierarchy(Fraction(0), point=space.points[i]) for i in idx
            )
            return Hierarchy(Fraction(0), children=kids)
        # d(x,y) < diam is an equivalence relation inside this cluster
        classes: list[list[int]] = []
        for i in idx:
            for cls in classes:
                if space.dist[i][cls[0]] < diam:
                    cls.append(i)
                    break
            else:
                classes.append([i])
        kids = tuple(build(cls) for cls in classes)
        kids = tuple(sorted(kids, key=lambda h: h.shape))
        return Hierarchy(diam, children=kids)

    return build(list(range(len(space.points))))


def isometric(x: UltraSpace, y: UltraSpace) -> dict[str, str] | None:
    """Distance-preserving bijection x -> y, or None."""
    if len(x) != len(y):
        return None
    hx = canonical_hierarchy(x)
    hy = canonical_hierarchy(y)
    if hx.shape != hy.shape:
        return None
    mapping: dict[str, str] = {}

    def align(a: Hierarchy, b: Hierarchy) -> None:
        if a.is_leaf:
            mapping[a.point] = b.point
            return
        # children on both sides are sorted by shape; within an equal-shape
        # run any pairing is distance-preserving, so pair positionally
        for ca, cb in zip(a.children, b.children):
            align(ca, cb)

    align(hx, hy)
    return mapping


def space_from_hierarchy(h: Hierarchy, prefix: str = "p") -> UltraSpace:
    """Materialize a dendrogram as a space with synthetic point names."""
    n = h.size()
    width = max(1, len(str(n - 1)))
    names = [f"{prefix}{i:0{width}d}" for i in range(n)]
    dist = [[Fraction(0)] * n for _ in range(n)]
    counter = [0]

    def assign(node: Hierarchy) -> list[int]:
        if node.is_leaf:
            i = counter[0]
            counter[0] += 1
            return [i]
        groups = [assign(c) for c in node.children]
        for gi in range(len(groups)):
            for gj in range(gi + 1, len(groups)):
                for a in groups[gi]:
                    for b in groups[gj]:
                        dist[a][b] = node.value
                        dist[b][a] = node.value
        return [i for g in groups for i in g]

    assign(h)
    return validate_space(names, dist)


# ---------------------------------------------------------------------------
# balls


@dataclass(frozen=True)
class Ball:
    """Open ball: members = {x : d(center, x) < radius}."""

    center: str
    radius: Fraction
    members: tuple[str, ...]


def balls(space: UltraSpace) -> list[Ball]:
    """All distinct open balls (one witness (center, radius) per member set).

    Membership changes only at attained distances, so radii range over the
    attained values plus one value above the maximum; that captures every
    distinct ball.
    """
    att = space.attained()
    radii = att + [att[-1] + 1] if att else [Fraction(1)]
    found: dict[tuple[str, ...], Ball] = {}
    for c in space.points:
        for r in radii:
            mem = tuple(sorted(p for p in space.points if space.d(c, p) < r))
            if mem and mem not in found:
                found[mem] = Ball(center=c, radius=r, members=mem)
    return sorted(found.values(), key=lambda b: (len(b.members), b.members))


def sphere(space: UltraSpace, center: str, radius: Fraction) -> tuple[str, ...]:
    """Points at distance exactly ``radius`` from ``center`` (sorted)."""
    return tuple(sorted(p for p in space.points if space.d(center, p) == radius))

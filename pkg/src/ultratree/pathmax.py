"""Indexed path-maximum queries over a labeled tree.

Binary lifting: after an O(n log n) build, the maximum label on any u-v path
is answered in O(log n) by jumping both endpoints toward their lowest common
ancestor in power-of-two strides, folding in per-stride segment maxima.
Matches :func:`ultratree.core_tree.dl_naive` exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core_tree import LabeledTree
from .errors import SizeCapExceeded, UnknownVertex
from .spaces import UltraSpace

ALL_PAIRS_CAP = 2000


@dataclass(frozen=True)
class PathMaxIndex:
    tree: LabeledTree
    depth: dict[str, int]
    # up[k][v] = 2^k-th ancestor of v; seg[k][v] = max label over the
    # vertices v, parent(v), ..., up to but excluding up[k][v]
    up: list[dict[str, str]]
    seg: list[dict[str, Fraction]]
    root: str


def build_index(tree: LabeledTree) -> PathMaxIndex:
    """Root at the lexicographically smallest vertex and build jump tables."""
    root = tree.vertices[0]
    parent: dict[str, str] = {}
    depth: dict[str, int] = {root: 0}
    order = [root]
    stack = [root]
    while stack:
        x = stack.pop()
        for y in tree.adjacency[x]:
            if y not in depth and y != root:
                parent[y] = x
                depth[y] = depth[x] + 1
                order.append(y)
                stack.append(y)
    up0 = {v: parent.get(v, v) for v in tree.vertices}
    seg0 = {v: tree.labels[v] for v in tree.vertices}
    up = [up0]
    seg = [seg0]
    max_depth = max(depth.values(), default=0)
    k = 0
    while (1 << (k + 1)) <= max_depth:
        prev_up, prev_seg = up[k], seg[k]
        up.append({v: prev_up[prev_up[v]] for v in tree.vertices})
        seg.append(
            {v: max(prev_seg[v], prev_seg[prev_up[v]]) for v in tree.vertices}
        )
        k += 1
    return PathMaxIndex(tree=tree, depth=depth, up=up, seg=seg, root=root)


def query(index: PathMaxIndex, u: str, v: str) -> Fraction:
    """Generated distance between u and v in O(log n)."""
    tree = index.tree
    if u not in tree.labels:
        raise UnknownVertex(u)
    if v not in tree.labels:
        raise UnknownVertex(v)
    if u == v:
        return Fraction(0)
    depth, up, seg = index.depth, index.up, index.seg
    acc = Fraction(0)
    if depth[u] < depth[v]:
        u, v = v, u
    # lift u to v's depth; seg[k][u] covers u itself, so after these jumps the
    # labels of every vertex strictly below the new u are folded in
    diff = depth[u] - depth[v]
    k = 0
    while diff:
        if diff & 1:
            acc = max(acc, seg[k][u])
            u = up[k][u]
        diff >>= 1
        k += 1
    if u == v:
        return max(acc, tree.labels[v])
    for k in range(len(up) - 1, -1, -1):
        if up[k][u] != up[k][v]:
            acc = max(acc, seg[k][u], seg[k][v])
            u = up[k][u]
            v = up[k][v]
    # u and v are now distinct children of the meeting vertex
    acc = max(acc, seg[0][u], seg[0][v], tree.labels[up[0][u]])
    return acc


def all_pairs(index: PathMaxIndex, cap: int = ALL_PAIRS_CAP) -> UltraSpace:
    """Full distance matrix from the index; refuses trees above ``cap``."""
    tree = index.tree
    n = len(tree)
    if n > cap:
        raise SizeCapExceeded(n, cap, "all-pairs matrix")
    pts = tree.vertices
    dist = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            dij = query(index, pts[i], pts[j])
            dist[i][j] = dij
            dist[j][i] = dij
    rows = tuple(tuple(r) for r in dist)
    proper = all(rows[i][j] > 0 for i in range(n) for j in range(i + 1, n))
    return UltraSpace(points=pts, dist=rows, proper=proper)

from __future__ import annotations

import random
from fractions import Fraction

from ultratree.core_tree import LabeledTree, build_tree

DEFAULT_LABEL_POOL = (
    Fraction(0),
    Fraction(1, 3),
    Fraction(1, 2),
    Fraction(1),
    Fraction(2),
)


def vertex_names(n: int) -> list[str]:
    width = max(2, len(str(n - 1)))
    return [f"v{i:0{width}d}" for i in range(n)]


def random_tree(rng: random.Random, n: int, pool=DEFAULT_LABEL_POOL) -> LabeledTree:
    """Random recursive tree: vertex i attaches to a uniform earlier vertex."""
    names = vertex_names(n)
    edges = [(names[rng.randrange(i)], names[i]) for i in range(1, n)]
    labels = {v: rng.choice(pool) for v in names}
    return build_tree(names, edges, labels)


def random_nondegenerate_tree(rng: random.Random, n: int, pool=DEFAULT_LABEL_POOL) -> LabeledTree:
    """Like random_tree but re-labels zero-zero edges until non-degenerate."""
    positive = [x for x in pool if x > 0]
    names = vertex_names(n)
    edges = [(names[rng.randrange(i)], names[i]) for i in range(1, n)]
    labels = {v: rng.choice(pool) for v in names}
    for u, v in edges:
        if labels[u] == 0 and labels[v] == 0:
            labels[v] = rng.choice(positive)
    return build_tree(names, edges, labels)

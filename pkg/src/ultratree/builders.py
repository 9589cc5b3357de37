"""Ready-made example trees and spaces used across tests and the CLI."""

from __future__ import annotations

from fractions import Fraction

from .core_tree import LabeledTree, build_tree
from .seqs import Const, Geometric, Harmonic, Modulated, PrimeRecip, Ref
from .spaces import UltraSpace, validate_space
from .symbolic import GlueFamily, Ray, Star, SymbolicTree

F = Fraction


def fig10() -> SymbolicTree:
    """Ray with vanishing positive labels on odd vertices and zeros on even
    vertices; at every even (zero) vertex a star of vanishing positive leaves
    is glued by its center.  Totally bounded but not complete: the ray vertex
    sequence is Cauchy with no limit.
    """
    base = Ray(Modulated(2, (Harmonic(F(1)), Const(F(0)))))
    template = Star(F(0), Harmonic(Ref("envelope")))
    return GlueFamily(
        base=base,
        sites="even",
        template=template,
        shared=(("center",),),
        envelope=Harmonic(F(1, 2)),
    )


def fig1() -> SymbolicTree:
    """Zero-labeled center with leaves labeled 1/p over the primes p; at the
    leaf labeled 1/p hangs a star whose further leaves are labeled by the
    powers 1/p^n (the glued leaf itself is the n = 1 power).  Compact.
    """
    base = Star(F(0), PrimeRecip(F(1)))
    template = Star(F(0), Geometric(Ref("site_label"), Ref("site_label")))
    return GlueFamily(
        base=base,
        sites="leaves",
        template=template,
        shared=(("leaf", 1),),
        envelope=PrimeRecip(F(1)),
    )


def star_vs_path() -> tuple[LabeledTree, LabeledTree]:
    """Two non-isomorphic labeled trees on five vertices generating the same
    ultrametric space (every distance exactly 1): a star whose center is the
    only 1, and a path with 1s at the two inner odd positions."""
    star = build_tree(
        ["v1", "v2", "v3", "v4", "v5"],
        [("v1", "v2"), ("v1", "v3"), ("v1", "v4"), ("v1", "v5")],
        {"v1": F(1), "v2": F(0), "v3": F(0), "v4": F(0), "v5": F(0)},
    )
    path = build_tree(
        ["v1", "v2", "v3", "v4", "v5"],
        [("v1", "v2"), ("v2", "v3"), ("v3", "v4"), ("v4", "v5")],
        {"v1": F(0), "v2": F(1), "v3": F(0), "v4": F(1), "v5": F(0)},
    )
    return star, path


def four_point_space() -> UltraSpace:
    """Four points in two tight pairs (inner distance 1, outer distance 2).
    The whole space is an open ball that is not a sphere-plus-center, and no
    labeled tree on exactly four vertices generates it."""
    points = ["x1", "x2", "x3", "x4"]
    one, two = F(1), F(2)
    zero = F(0)
    matrix = [
        [zero, one, two, two],
        [one, zero, two, two],
        [two, two, zero, one],
        [two, two, one, zero],
    ]
    return validate_space(points, matrix)

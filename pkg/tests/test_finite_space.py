from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest

from conftest import random_nondegenerate_tree
from ultratree.builders import four_point_space, star_vs_path
from ultratree.core_tree import distance_matrix
from ultratree.errors import SizeCapExceeded
from ultratree.finite_space import (
    conjecture_predicate,
    conjecture_scan,
    enumerate_spaces,
    representable,
)
from ultratree.spaces import (
    balls,
    canonical_hierarchy,
    isometric,
    sphere,
    validate_space,
)

F = Fraction


def uniform_space(n, value=F(1)):
    pts = [f"p{i}" for i in range(n)]
    matrix = [[F(0) if i == j else value for j in range(n)] for i in range(n)]
    return validate_space(pts, matrix)


def brute_isometry_classes(n, values):
    """Oracle: enumerate ALL symmetric matrices over ``values`` and keep the
    ultrametric ones, dedupilated by canonical dendrogram encoding."""
    pts = [f"q{i}" for i in range(n)]
    pairs = list(itertools.combinations(range(n), 2))
    seen = set()
    for combo in itertools.product(values, repeat=len(pairs)):
        matrix = [[F(0)] * n for _ in range(n)]
        for (i, j), val in zip(pairs, combo):
            matrix[i][j] = matrix[j][i] = val
        ok = all(
            matrix[i][j] <= max(matrix[i][k], matrix[k][j])
            for i in range(n) for j in range(n) for k in range(n)
        )
        if not ok:
            continue
        seen.add(canonical_hierarchy(validate_space(pts, matrix)).encode())
    return seen


# ---------------------------------------------------------------------------
# the sphere-plus-center predicate


def test_predicate_two_point():
    ok, failing = conjecture_predicate(uniform_space(2))
    assert ok and failing is None


def test_predicate_uniform_five():
    ok, failing = conjecture_predicate(uniform_space(5))
    assert ok and failing is None


def test_predicate_four_point_counterexample_shape():
    """Two tight pairs at mutual distance 2: the whole space is an open ball
    but removing any center leaves a set that is no sphere."""
    sp = four_point_space()
    ok, failing = conjecture_predicate(sp)
    assert not ok
    assert failing is not None
    assert set(failing.members) == set(sp.points)
    assert canonical_hierarchy(sp).encode() == "(2 (1 * *) (1 * *))"


def test_predicate_holds_on_generated_spaces():
    """Spaces generated by labeled trees always pass (they are representable
    by construction, and the scan shows predicate agrees with that)."""
    rng = random.Random(77)
    for _ in range(30):
        tree = random_nondegenerate_tree(rng, rng.randrange(2, 7))
        ok, failing = conjecture_predicate(distance_matrix(tree))
        assert ok, failing


# ---------------------------------------------------------------------------
# representability


def test_representable_singleton():
    sp = validate_space(["only"], [[0]])
    tree = representable(sp)
    assert tree is not None and tree.vertices == ("only",)


def test_representable_four_point_fails():
    assert representable(four_point_space()) is None


def test_representable_star_matrix():
    star, path = star_vs_path()
    ms, mp = distance_matrix(star), distance_matrix(path)
    assert ms.points == mp.points and ms.dist == mp.dist
    tree = representable(ms)
    assert tree is not None
    assert distance_matrix(tree).dist == ms.dist


def test_representable_cap_enforced():
    with pytest.raises(SizeCapExceeded):
        representable(uniform_space(6))
    # explicit cap raise admits the six-point uniform space
    assert representable(uniform_space(6), cap=6) is not None


def test_representable_roundtrip_random_trees():
    """Every generated matrix must be recognized as representable and the
    witness must generate the same matrix (search is its own oracle here)."""
    rng = random.Random(424)
    for _ in range(20):
        tree = random_nondegenerate_tree(rng, rng.randrange(1, 6))
        sp = distance_matrix(tree)
        witness = representable(sp)
        assert witness is not None
        assert distance_matrix(witness).dist == sp.dist


def test_representable_label_pool_pruning_lossless():
    """The default pool {0} + attained distances finds a witness whenever a
    finer grid does (labels outside the attained set never help)."""
    fine = [F(0), F(1, 2), F(1), F(3, 2), F(2)]
    for sp in enumerate_spaces(4, [F(1), F(2)]):
        default = representable(sp)
        widened = representable(sp, label_pool=fine)
        assert (default is None) == (widened is None)
    assert representable(four_point_space(), label_pool=fine) is None


# ---------------------------------------------------------------------------
# balls and spheres


def test_balls_nest_or_disjoint():
    rng = random.Random(99)
    for _ in range(12):
        tree = random_nondegenerate_tree(rng, rng.randrange(2, 7))
        sp = distance_matrix(tree)
        bs = [set(b.members) for b in balls(sp)]
        for x, y in itertools.combinations(bs, 2):
            assert x <= y or y <= x or not (x & y)
        for b in balls(sp):
            assert b.center in b.members


def test_sphere_is_distance_level_set():
    sp = four_point_space()
    assert sphere(sp, "x1", F(1)) == ("x2",)
    assert sphere(sp, "x1", F(2)) == ("x3", "x4")
    assert sphere(sp, "x1", F(3)) == ()


# ---------------------------------------------------------------------------
# enumeration up to isometry


def test_enumerate_counts_small():
    for n, expect in ((1, 1), (2, 2), (3, 3), (4, 5)):
        assert len(enumerate_spaces(n, [F(1), F(2)])) == expect


def test_enumerate_encodings_frozen():
    got = [canonical_hierarchy(s).encode() for s in enumerate_spaces(4, [F(1), F(2)])]
    assert got == [
        "(1 * * * *)",
        "(2 (1 * *) (1 * *))",
        "(2 * (1 * * *))",
        "(2 * * (1 * *))",
        "(2 * * * *)",
    ]


def test_enumerate_complete_against_matrix_enumeration():
    """Oracle: direct enumeration of all ultrametric matrices, deduplicated
    by canonical encoding, gives the same class sets."""
    for n in (2, 3, 4):
        via_module = {
            canonical_hierarchy(s).encode()
            for s in enumerate_spaces(n, [F(1), F(2)])
        }
        assert via_module == brute_isometry_classes(n, [F(1), F(2)])


def test_enumerate_returns_distinct_classes():
    spaces = enumerate_spaces(4, [F(1), F(2)])
    for a, b in itertools.combinations(spaces, 2):
        assert isometric(a, b) is None


def test_enumerate_caps():
    with pytest.raises(SizeCapExceeded):
        enumerate_spaces(7, [F(1)])
    with pytest.raises(SizeCapExceeded):
        enumerate_spaces(3, [F(1), F(2), F(3), F(4), F(5)])
    with pytest.raises(SizeCapExceeded):
        enumerate_spaces(0, [F(1)])


# ---------------------------------------------------------------------------
# the scan harness


def test_scan_small_sizes_agree():
    for n in (1, 2, 3):
        report = conjecture_scan(n, [F(1), F(2)])
        assert report.disagree_count == 0
        assert report.agree_count == len(report.records)
        assert all(r.predicate and r.representable for r in report.records)


def test_scan_four_point_classes():
    report = conjecture_scan(4, [F(1), F(2)])
    assert report.disagree_count == 0
    assert len(report.records) == 5
    verdicts = {r.canonical_hierarchy: (r.predicate, r.representable)
                for r in report.records}
    # the two-tight-pairs class fails the predicate AND is non-representable:
    # the conjecture direction "predicate <=> representable" survives
    assert verdicts["(2 (1 * *) (1 * *))"] == (False, False)
    assert all(v == (True, True) for k, v in verdicts.items()
               if k != "(2 (1 * *) (1 * *))")
    failing = [r for r in report.records if not r.predicate]
    assert len(failing) == 1
    assert failing[0].failing_ball is not None
    assert failing[0].witness_tree is None


def test_scan_workers_deterministic():
    seq = conjecture_scan(4, [F(1), F(2)])
    par = conjecture_scan(4, [F(1), F(2)], workers=2)
    assert [r.space_id for r in seq.records] == [r.space_id for r in par.records]
    assert [r.canonical_hierarchy for r in seq.records] == [
        r.canonical_hierarchy for r in par.records
    ]
    assert seq.disagreements == par.disagreements

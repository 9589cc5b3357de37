from __future__ import annotations

import random
from fractions import Fraction

import pytest

from ultratree.errors import InvalidDeclaration
from ultratree.seqs import (
    INFINITE,
    Const,
    Custom,
    FiniteSupport,
    Geometric,
    Harmonic,
    Modulated,
    PrimeRecip,
    Ref,
    is_cauchy_ray,
    nth_prime,
    seq_stats,
)

F = Fraction


def brute_count_geq(seq, eps, horizon):
    """Oracle: count indices with term >= eps among the first ``horizon``."""
    return sum(1 for n in range(1, horizon + 1) if seq.term(n) >= eps)


def test_const_metadata():
    s = Const("3/2")
    assert s.term(1) == s.term(100) == F(3, 2)
    assert s.limsup() == s.inf() == F(3, 2)
    assert not s.vanishes()
    assert s.indices_geq(F(1)) is INFINITE
    assert s.indices_geq(F(2)) == []
    assert not is_cauchy_ray(s)


def test_const_zero_is_cauchy():
    assert is_cauchy_ray(Const(0))


def test_harmonic_metadata():
    s = Harmonic(1)
    assert s.term(3) == F(1, 3)
    assert s.vanishes() and s.inf() == 0 and s.sup() == 1
    assert s.indices_geq(F(1, 4)) == [1, 2, 3, 4]
    assert s.count_geq(F(2, 7)) == 3
    assert s.count_geq(F(1, 100)) == brute_count_geq(s, F(1, 100), 500)


def test_geometric_metadata():
    s = Geometric(1, "1/2")
    assert s.term(4) == F(1, 8)
    assert s.indices_geq(F(1, 8)) == [1, 2, 3, 4]
    assert s.count_geq(F(1, 100)) == brute_count_geq(s, F(1, 100), 200)
    with pytest.raises(InvalidDeclaration):
        Geometric(1, 1)
    with pytest.raises(InvalidDeclaration):
        Geometric(1, "3/2")


def test_prime_recip_metadata():
    s = PrimeRecip(1)
    assert [s.term(n) for n in range(1, 5)] == [F(1, 2), F(1, 3), F(1, 5), F(1, 7)]
    assert s.sup() == F(1, 2)
    # primes <= 8 are 2, 3, 5, 7
    assert s.indices_geq(F(1, 8)) == [1, 2, 3, 4]
    assert s.count_geq(F(1, 30)) == brute_count_geq(s, F(1, 30), 60)
    assert nth_prime(10) == 29


def test_finite_support():
    s = FiniteSupport(("2", "0", "1/2"))
    assert s.term(2) == 0 and s.term(17) == 0
    assert s.sup() == 2 and s.vanishes()
    assert s.indices_geq(F(1, 2)) == [1, 3]
    assert s.has_zero_term()
    # the all-zero tail starts at index 4, so (4, 5) is the first adjacent pair
    assert s.has_adjacent_zero_pair() == 4


def test_modulated_interleaves():
    s = Modulated(2, (Harmonic(1), Const(0)))
    # positions: 1 -> 1/1, 2 -> 0, 3 -> 1/2, 4 -> 0, 5 -> 1/3 ...
    assert [s.term(n) for n in range(1, 6)] == [F(1), F(0), F(1, 2), F(0), F(1, 3)]
    assert s.vanishes()
    assert s.indices_geq(F(1, 3)) == [1, 3, 5]
    assert s.count_geq(F(1, 9)) == brute_count_geq(s, F(1, 9), 40)
    assert s.zero_in_progression(2, 2)          # even positions all zero
    assert s.all_zero_in_progression(2, 2)
    assert not s.zero_in_progression(1, 2)      # odd positions never zero
    assert s.has_adjacent_zero_pair() is None


def test_modulated_adjacent_zeros():
    s = Modulated(3, (Const(0), Const(0), Harmonic(2)))
    assert s.has_adjacent_zero_pair() == 1


def test_custom_validation_and_tail():
    # limsup smaller than a prefix term must be rejected
    with pytest.raises(InvalidDeclaration):
        Custom(("1", "1/2"), F(1, 4), F(0), F(0), True)
    with pytest.raises(InvalidDeclaration):
        Custom(("1/2",), F(1), F(0), F(1, 2), True)  # vanishes contradicts limsup
    with pytest.raises(InvalidDeclaration):
        Custom(("1/2",), F(1), F(0), F(1, 4), False)  # inf not materialized
    ok = Custom(("1/2", "1"), F(1), F(1, 3), F(1, 3), False)
    # tail alternates limsup, liminf
    assert ok.term(3) == F(1) and ok.term(4) == F(1, 3) and ok.term(5) == F(1)
    assert ok.indices_geq(F(1, 2)) is INFINITE
    assert ok.count_geq(F(3, 2)) == 0
    assert not ok.vanishes()


def test_custom_vanishing():
    # a positive prefix term above the declared limsup is rejected, so the
    # only vanishing customs are all-zero ones
    with pytest.raises(InvalidDeclaration):
        Custom(("1/2", "1/4"), F(0), F(0), F(0), True)
    s = Custom(("0", "0"), F(0), F(0), F(0), True)
    assert s.term(1) == 0 and s.term(99) == 0
    assert s.vanishes()
    assert s.indices_geq(F(1, 4)) == []
    assert s.has_adjacent_zero_pair() == 1


def test_ref_substitution_and_scaling():
    s = Geometric(Ref("site_label"), Ref("site_label"))
    assert s.has_refs()
    with pytest.raises(InvalidDeclaration):
        s.term(1)
    conc = s.substitute({"site_label": F(1, 3), "envelope": F(1)})
    assert conc.term(2) == F(1, 9)
    t = Harmonic(Ref("envelope", F(2))).substitute({"envelope": F(1, 4)})
    assert t.term(1) == F(1, 2)
    sc = Harmonic(1).scale(F(1, 2))
    assert sc.term(2) == F(1, 4)
    sc2 = Harmonic(F(2)).scale(Ref("envelope"))
    assert sc2.substitute({"envelope": F(1, 3)}).term(1) == F(2, 3)


def test_scaled_custom_and_modulated():
    m = Modulated(2, (Harmonic(1), Const(0))).scale(F(1, 2))
    assert m.term(1) == F(1, 2) and m.term(3) == F(1, 4) and m.term(2) == 0
    c = Custom(("1/2",), F(1), F(1, 2), F(1, 2), False).scale(F(2))
    assert c.term(1) == 1 and c.limsup() == 2


def test_stats_bundle():
    st = seq_stats(Modulated(2, (Harmonic(1), Const("1/3"))))
    assert st.limsup == F(1, 3)
    assert st.liminf == 0
    assert st.inf == 0
    assert not st.vanishes


def test_count_geq_oracle_random():
    rng = random.Random(2024)
    pool = [
        Harmonic(F(rng.randrange(1, 5))),
        Geometric(F(rng.randrange(1, 4)), F(1, rng.randrange(2, 5))),
        PrimeRecip(F(rng.randrange(1, 4))),
        FiniteSupport(tuple(F(rng.randrange(0, 4), 2) for _ in range(5))),
    ]
    pool.append(Modulated(2, (pool[0], pool[1])))
    for s in pool:
        for k in (1, 2, 5, 9, 30):
            eps = F(1, k)
            got = s.count_geq(eps)
            assert got is not INFINITE
            assert got == brute_count_geq(s, eps, 800)

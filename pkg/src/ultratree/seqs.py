"""Label sequences with exact metadata.

Infinite parts of a symbolic tree (ray vertices, star leaves, family
envelopes) carry their labels as a declared sequence.  Every kind answers,
with exact rational arithmetic: the n-th term, limsup / liminf / inf / sup,
whether the sequence vanishes (tends to 0), and which indices carry a term
>= eps (a finite list or the answer "infinitely many").

Zeroness of every kind is eventually periodic, and ``zero_profile`` returns
a (threshold, period) certificate; existential or universal questions about
zero terms, also along arithmetic subprogressions of indices, are decided by
scanning one certified window.  That is what makes non-degeneracy of an
infinite labeling decidable.

Parameters are rationals, or - inside a glue-family template - a
:class:`Ref` to the member's site label or envelope value, with an optional
rational coefficient.  Metadata methods demand a concrete (ref-free)
sequence; ``substitute`` produces one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import floor, lcm

from .errors import InvalidDeclaration
from .ratio import format_rational, parse_rational


class _Infinite:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITE"


INFINITE = _Infinite()

REF_SOURCES = ("site_label", "envelope")


@dataclass(frozen=True)
class Ref:
    """Placeholder for a per-member value: coeff * source(m)."""

    source: str
    coeff: Fraction = Fraction(1)

    def __post_init__(self):
        if self.source not in REF_SOURCES:
            raise InvalidDeclaration(f"unknown ref source {self.source!r}")
        object.__setattr__(self, "coeff", Fraction(self.coeff))
        if self.coeff < 0:
            raise InvalidDeclaration(f"negative ref coefficient {self.coeff}")


def as_val(x):
    """Coerce x ('p/q' string, int, Fraction, Ref, {'$': ...} dict) to a Val."""
    if isinstance(x, Ref):
        return x
    if isinstance(x, dict):
        if "$" not in x:
            raise InvalidDeclaration(f"bad parameter object {x!r}")
        coeff = parse_rational(x.get("coeff", "1"))
        return Ref(source=x["$"], coeff=coeff)
    return parse_rational(x)


def val_is_concrete(v) -> bool:
    return not isinstance(v, Ref)


def resolve_val(v, bindings: dict[str, Fraction]) -> Fraction:
    if isinstance(v, Ref):
        if v.source not in bindings:
            raise InvalidDeclaration(f"unresolved ref {v.source!r}")
        return v.coeff * bindings[v.source]
    return v


def _scale_val(v, factor):
    if isinstance(v, Ref):
        if isinstance(factor, Ref):
            raise InvalidDeclaration("cannot scale a ref by a ref")
        return Ref(v.source, v.coeff * factor)
    if isinstance(factor, Ref):
        return Ref(factor.source, factor.coeff * v)
    return v * factor


def _need_concrete(seq: "LabelSeq"):
    if seq.has_refs():
        raise InvalidDeclaration(
            "sequence still contains template refs; substitute first"
        )


@dataclass(frozen=True)
class SeqStats:
    limsup: Fraction
    liminf: Fraction
    inf: Fraction
    vanishes: bool


class LabelSeq:
    """Base class; see module docstring for the contract."""

    kind = "abstract"

    # -- derived helpers shared by all kinds --------------------------------

    def count_geq(self, eps: Fraction):
        idx = self.indices_geq(eps)
        return idx if idx is INFINITE else len(idx)

    def stats(self) -> SeqStats:
        return SeqStats(
            limsup=self.limsup(),
            liminf=self.liminf(),
            inf=self.inf(),
            vanishes=self.vanishes(),
        )

    def is_zero(self, n: int) -> bool:
        return self.term(n) == 0

    def scan_window(self) -> int:
        """Index bound W such that zero patterns repeat beyond it."""
        n0, q = self.zero_profile()
        return n0 + 2 * q

    def has_zero_term(self) -> bool:
        return self.zero_in_progression(1, 1)

    def zero_in_progression(self, start: int, step: int) -> bool:
        """Does any index start, start+step, ... carry a zero term?"""
        _need_concrete(self)
        n0, q = self.zero_profile()
        limit = n0 + step * q + step  # covers one full residue cycle past n0
        n = start
        while n <= limit:
            if self.is_zero(n):
                return True
            n += step
        return False

    def all_zero_in_progression(self, start: int, step: int) -> bool:
        _need_concrete(self)
        n0, q = self.zero_profile()
        limit = n0 + step * q + step
        n = start
        while n <= limit:
            if not self.is_zero(n):
                return False
            n += step
        return True

    def has_adjacent_zero_pair(self):
        """First n with term(n) = term(n+1) = 0, else None."""
        _need_concrete(self)
        n0, q = self.zero_profile()
        for n in range(1, n0 + 2 * q + 2):
            if self.is_zero(n) and self.is_zero(n + 1):
                return n
        return None

    # -- interface ----------------------------------------------------------

    def term(self, n: int) -> Fraction:
        raise NotImplementedError

    def limsup(self) -> Fraction:
        raise NotImplementedError

    def liminf(self) -> Fraction:
        raise NotImplementedError

    def inf(self) -> Fraction:
        raise NotImplementedError

    def sup(self) -> Fraction:
        raise NotImplementedError

    def vanishes(self) -> bool:
        return self.limsup() == 0

    def indices_geq(self, eps: Fraction):
        raise NotImplementedError

    def zero_profile(self) -> tuple[int, int]:
        raise NotImplementedError

    def has_refs(self) -> bool:
        raise NotImplementedError

    def substitute(self, bindings: dict[str, Fraction]) -> "LabelSeq":
        raise NotImplementedError

    def scale(self, factor) -> "LabelSeq":
        raise NotImplementedError

    def describe(self) -> str:
        raise NotImplementedError


def _check_eps(eps: Fraction):
    if eps <= 0:
        raise InvalidDeclaration(f"eps must be positive, got {eps}")


def _fmt_val(v) -> str:
    if isinstance(v, Ref):
        if v.coeff == 1:
            return f"${v.source}"
        return f"{format_rational(v.coeff)}*${v.source}"
    return format_rational(v)


@dataclass(frozen=True)
class Const(LabelSeq):
    """c, c, c, ..."""

    c: Fraction | Ref

    kind = "const"

    def __post_init__(self):
        object.__setattr__(self, "c", as_val(self.c))
        if val_is_concrete(self.c) and self.c < 0:
            raise InvalidDeclaration(f"negative constant {self.c}")

    def term(self, n):
        if n < 1:
            raise InvalidDeclaration(f"index {n} out of range")
        _need_concrete(self)
        return self.c

    def limsup(self):
        _need_concrete(self)
        return self.c

    liminf = limsup
    inf = limsup
    sup = limsup

    def indices_geq(self, eps):
        _need_concrete(self)
        _check_eps(eps)
        return INFINITE if self.c >= eps else []

    def zero_profile(self):
        return (0, 1)

    def has_refs(self):
        return not val_is_concrete(self.c)

    def substitute(self, bindings):
        return Const(resolve_val(self.c, bindings))

    def scale(self, factor):
        return Const(_scale_val(self.c, factor))

    def describe(self):
        return f"const({_fmt_val(self.c)})"


@dataclass(frozen=True)
class FiniteSupport(LabelSeq):
    """Explicit prefix, then all zeros."""

    prefix: tuple[Fraction, ...]

    kind = "finite_support"

    def __post_init__(self):
        vals = tuple(parse_rational(x) for x in self.prefix)
        for x in vals:
            if x < 0:
                raise InvalidDeclaration(f"negative term {x}")
        object.__setattr__(self, "prefix", vals)

    def term(self, n):
        if n < 1:
            raise InvalidDeclaration(f"index {n} out of range")
        return self.prefix[n - 1] if n <= len(self.prefix) else Fraction(0)

    def limsup(self):
        return Fraction(0)

    liminf = limsup

    def inf(self):
        return Fraction(0)

    def sup(self):
        return max(self.prefix, default=Fraction(0))

    def indices_geq(self, eps):
        _check_eps(eps)
        return [i + 1 for i, x in enumerate(self.prefix) if x >= eps]

    def zero_profile(self):
        return (len(self.prefix), 1)

    def has_refs(self):
        return False

    def substitute(self, bindings):
        return self

    def scale(self, factor):
        if isinstance(factor, Ref):
            raise InvalidDeclaration("finite_support cannot carry refs")
        return FiniteSupport(tuple(x * factor for x in self.prefix))

    def describe(self):
        return "finite_support(" + ", ".join(map(format_rational, self.prefix)) + ")"


@dataclass(frozen=True)
class Harmonic(LabelSeq):
    """a/1, a/2, a/3, ..."""

    a: Fraction | Ref

    kind = "harmonic"

    def __post_init__(self):
        object.__setattr__(self, "a", as_val(self.a))
        if val_is_concrete(self.a) and self.a < 0:
            raise InvalidDeclaration(f"negative coefficient {self.a}")

    def term(self, n):
        if n < 1:
            raise InvalidDeclaration(f"index {n} out of range")
        _need_concrete(self)
        return self.a / n

    def limsup(self):
        return Fraction(0)

    liminf = limsup

    def inf(self):
        return Fraction(0)

    def sup(self):
        _need_concrete(self)
        return self.a

    def indices_geq(self, eps):
        _need_concrete(self)
        _check_eps(eps)
        if self.a == 0:
            return []
        return list(range(1, floor(self.a / eps) + 1))

    def zero_profile(self):
        return (0, 1)  # all zero if a == 0, else never zero

    def has_refs(self):
        return not val_is_concrete(self.a)

    def substitute(self, bindings):
        return Harmonic(resolve_val(self.a, bindings))

    def scale(self, factor):
        return Harmonic(_scale_val(self.a, factor))

    def describe(self):
        return f"harmonic({_fmt_val(self.a)})"


@dataclass(frozen=True)
class Geometric(LabelSeq):
    """a, a*r, a*r^2, ... with 0 < r < 1."""

    a: Fraction | Ref
    r: Fraction | Ref

    kind = "geometric"

    def __post_init__(self):
        object.__setattr__(self, "a", as_val(self.a))
        object.__setattr__(self, "r", as_val(self.r))
        if val_is_concrete(self.a) and self.a < 0:
            raise InvalidDeclaration(f"negative coefficient {self.a}")
        if val_is_concrete(self.r) and not (0 < self.r < 1):
            raise InvalidDeclaration(f"geometric ratio {self.r} not in (0, 1)")

    def term(self, n):
        if n < 1:
            raise InvalidDeclaration(f"index {n} out of range")
        _need_concrete(self)
        return self.a * self.r ** (n - 1)

    def limsup(self):
        return Fraction(0)

    liminf = limsup

    def inf(self):
        return Fraction(0)

    def sup(self):
        _need_concrete(self)
        return self.a

    def indices_geq(self, eps):
        _need_concrete(self)
        _check_eps(eps)
        out = []
        n = 1
        t = self.a
        while t >= eps:
            out.append(n)
            n += 1
            t *= self.r
        return out

    def zero_profile(self):
        return (0, 1)

    def has_refs(self):
        return not (val_is_concrete(self.a) and val_is_concrete(self.r))

    def substitute(self, bindings):
        return Geometric(resolve_val(self.a, bindings), resolve_val(self.r, bindings))

    def scale(self, factor):
        return Geometric(_scale_val(self.a, factor), self.r)

    def describe(self):
        return f"geometric({_fmt_val(self.a)}, {_fmt_val(self.r)})"


# -- primes ------------------------------------------------------------------

_PRIMES: list[int] = [2, 3, 5, 7, 11, 13]


def _grow_primes() -> None:
    cand = _PRIMES[-1] + 2
    while True:
        if all(cand % p for p in _PRIMES if p * p <= cand):
            _PRIMES.append(cand)
            return
        cand += 2


def nth_prime(n: int) -> int:
    """1-based: nth_prime(1) == 2."""
    if n < 1:
        raise InvalidDeclaration(f"prime index {n} out of range")
    while len(_PRIMES) < n:
        _grow_primes()
    return _PRIMES[n - 1]


def primes_leq(x: Fraction) -> list[int]:
    out = []
    i = 1
    while True:
        p = nth_prime(i)
        if p > x:
            return out
        out.append(p)
        i += 1


@dataclass(frozen=True)
class PrimeRecip(LabelSeq):
    """a/2, a/3, a/5, a/7, ...: a over the n-th prime."""

    a: Fraction | Ref

    kind = "prime_recip"

    def __post_init__(self):
        object.__setattr__(self, "a", as_val(self.a))
        if val_is_concrete(self.a) and self.a < 0:
            raise InvalidDeclaration(f"negative coefficient {self.a}")

    def term(self, n):
        if n < 1:
            raise InvalidDeclaration(f"index {n} out of range")
        _need_concrete(self)
        return self.a / nth_prime(n)

    def limsup(self):
        return Fraction(0)

    liminf = limsup

    def inf(self):
        return Fraction(0)

    def sup(self):
        _need_concrete(self)
        return self.a / 2

    def indices_geq(self, eps):
        _need_concrete(self)
        _check_eps(eps)
        if self.a == 0:
            return []
        return list(range(1, len(primes_leq(self.a / eps)) + 1))

    def zero_profile(self):
        return (0, 1)

    def has_refs(self):
        return not val_is_concrete(self.a)

    def substitute(self, bindings):
        return PrimeRecip(resolve_val(self.a, bindings))

    def scale(self, factor):
        return PrimeRecip(_scale_val(self.a, factor))

    def describe(self):
        return f"prime_recip({_fmt_val(self.a)})"


@dataclass(frozen=True)
class Modulated(LabelSeq):
    """Interleaves ``period`` child sequences: term(n) is child (n-1) % period
    evaluated at index (n-1) // period + 1."""

    period: int
    seqs: tuple[LabelSeq, ...]

    kind = "modulated"

    def __post_init__(self):
        object.__setattr__(self, "seqs", tuple(self.seqs))
        if self.period < 1 or len(self.seqs) != self.period:
            raise InvalidDeclaration(
                f"modulated needs exactly period={self.period} child sequences, got {len(self.seqs)}"
            )

    def _split(self, n: int) -> tuple[int, int]:
        return (n - 1) % self.period, (n - 1) // self.period + 1

    def term(self, n):
        if n < 1:
            raise InvalidDeclaration(f"index {n} out of range")
        i, j = self._split(n)
        return self.seqs[i].term(j)

    def limsup(self):
        return max(s.limsup() for s in self.seqs)

    def liminf(self):
        return min(s.liminf() for s in self.seqs)

    def inf(self):
        return min(s.inf() for s in self.seqs)

    def sup(self):
        return max(s.sup() for s in self.seqs)

    def indices_geq(self, eps):
        _check_eps(eps)
        merged: list[int] = []
        for i, s in enumerate(self.seqs):
            sub = s.indices_geq(eps)
            if sub is INFINITE:
                return INFINITE
            merged.extend((j - 1) * self.period + i + 1 for j in sub)
        return sorted(merged)

    def zero_profile(self):
        thresholds, periods = zip(*(s.zero_profile() for s in self.seqs))
        return (self.period * (max(thresholds) + 1), self.period * lcm(*periods))

    def has_refs(self):
        return any(s.has_refs() for s in self.seqs)

    def substitute(self, bindings):
        return Modulated(self.period, tuple(s.substitute(bindings) for s in self.seqs))

    def scale(self, factor):
        return Modulated(self.period, tuple(s.scale(factor) for s in self.seqs))

    def describe(self):
        return f"modulated({self.period}; " + ", ".join(s.describe() for s in self.seqs) + ")"


@dataclass(frozen=True)
class Custom(LabelSeq):
    """Explicit prefix plus declared asymptotics.

    Beyond the prefix the sequence is materialized canonically as the
    alternation limsup, liminf, limsup, ...; validation guarantees the
    declared stats are exactly the stats of the materialized sequence:
    prefix terms must not exceed limsup, inf must equal
    min(min(prefix), liminf), and vanishes must equal (limsup == 0).
    """

    prefix: tuple[Fraction, ...]
    limsup_: Fraction
    liminf_: Fraction
    inf_: Fraction
    vanishes_: bool

    kind = "custom"

    def __post_init__(self):
        vals = tuple(parse_rational(x) for x in self.prefix)
        object.__setattr__(self, "prefix", vals)
        object.__setattr__(self, "limsup_", parse_rational(self.limsup_))
        object.__setattr__(self, "liminf_", parse_rational(self.liminf_))
        object.__setattr__(self, "inf_", parse_rational(self.inf_))
        for x in vals:
            if x < 0:
                raise InvalidDeclaration(f"negative term {x}")
            if x > self.limsup_:
                raise InvalidDeclaration(
                    f"prefix term {x} exceeds declared limsup {self.limsup_}"
                )
        if not (0 <= self.liminf_ <= self.limsup_):
            raise InvalidDeclaration(
                f"need 0 <= liminf <= limsup, got {self.liminf_}, {self.limsup_}"
            )
        expect_inf = min(vals) if vals else self.liminf_
        expect_inf = min(expect_inf, self.liminf_)
        if self.inf_ != expect_inf:
            raise InvalidDeclaration(
                f"declared inf {self.inf_} differs from materialized inf {expect_inf}"
            )
        if self.vanishes_ != (self.limsup_ == 0):
            raise InvalidDeclaration(
                "declared vanishes flag contradicts declared limsup"
            )

    def term(self, n):
        if n < 1:
            raise InvalidDeclaration(f"index {n} out of range")
        if n <= len(self.prefix):
            return self.prefix[n - 1]
        return self.limsup_ if (n - len(self.prefix)) % 2 == 1 else self.liminf_

    def limsup(self):
        return self.limsup_

    def liminf(self):
        return self.liminf_

    def inf(self):
        return self.inf_

    def sup(self):
        return max(self.limsup_, max(self.prefix, default=Fraction(0)))

    def vanishes(self):
        return self.vanishes_

    def indices_geq(self, eps):
        _check_eps(eps)
        if self.limsup_ >= eps:
            return INFINITE
        return [i + 1 for i, x in enumerate(self.prefix) if x >= eps]

    def zero_profile(self):
        return (len(self.prefix), 2)

    def has_refs(self):
        return False

    def substitute(self, bindings):
        return self

    def scale(self, factor):
        if isinstance(factor, Ref):
            raise InvalidDeclaration("custom sequences cannot carry refs")
        return Custom(
            tuple(x * factor for x in self.prefix),
            self.limsup_ * factor,
            self.liminf_ * factor,
            self.inf_ * factor,
            self.vanishes_,
        )

    def describe(self):
        return (
            f"custom(prefix={list(map(format_rational, self.prefix))}, "
            f"limsup={format_rational(self.limsup_)}, liminf={format_rational(self.liminf_)})"
        )


SEQ_KINDS = {
    "const": Const,
    "finite_support": FiniteSupport,
    "harmonic": Harmonic,
    "geometric": Geometric,
    "modulated": Modulated,
    "custom": Custom,
    "prime_recip": PrimeRecip,
}


def seq_stats(seq: LabelSeq) -> SeqStats:
    return seq.stats()


def is_cauchy_ray(seq: LabelSeq) -> bool:
    """A ray's vertex sequence is Cauchy in the generated metric iff its
    labels vanish."""
    return seq.vanishes()

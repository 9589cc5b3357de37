"""Topological classification of the ultrametric space generated by a
symbolically presented labeled tree.

The space on the vertex set has distance "largest label on the connecting
path, endpoints included".  Its topology is decided by label data alone:

- complete      <=> along every ray the labels have positive limsup
- discrete      <=> no zero-labeled vertex has neighbor labels with inf 0
                    (only infinite-degree vertices, i.e. star centers, can
                    fail this: a finite positive bag has positive min)
- totally bounded <=> every label-count set {v : label >= eps} is finite and
                    no infinite-degree vertex has a positive label
- compact       <=> rayless and totally bounded

Every negative verdict carries a witness naming a concrete vertex, ray, or
sequence.  Family members are checked concretely over a certified window of
member indices: each per-member verdict depends on the member index only
through which substituted source values are zero, and that pattern is
eventually periodic with a computable certificate (see member_window).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core_tree import is_non_degenerate
from .errors import DegenerateLabeling
from .ratio import format_rational
from .seqs import LabelSeq
from .symbolic import (
    Address,
    Finite,
    GlueFamily,
    GlueFinite,
    Ray,
    ScaledLabels,
    Star,
    SymbolicTree,
    contains_kind,
    first_of_kind,
    format_address,
    instantiate,
    member_window,
    site_base_step,
    site_of_base_step,
    validate_symbolic,
)

ONE = Fraction(1)


@dataclass(frozen=True)
class Witness:
    kind: str
    address: str
    detail: str


@dataclass(frozen=True)
class Verdict:
    complete: bool
    complete_witness: Witness | None
    discrete: bool
    discrete_witness: Witness | None
    totally_bounded: bool
    totally_bounded_witness: Witness | None
    discrete_and_tb: bool
    compact: bool
    compact_witness: Witness | None


@dataclass(frozen=True)
class FreeTreeReport:
    rayless: bool
    locally_finite: bool
    finite: bool
    has_adjacent_infinite_degree_pair: bool
    countable: bool
    pair_witness: str | None = None


@dataclass(frozen=True)
class VertexClass:
    address: str
    status: str  # "isolated" | "accumulation"
    label: str
    detail: str
    neighbor_witnesses: tuple[str, ...] = ()


@dataclass(frozen=True)
class IsolatedPointsReport:
    classes: tuple[VertexClass, ...]
    note: str


# ---------------------------------------------------------------------------
# degeneracy


def _first_zero_index(seq: LabelSeq) -> int | None:
    n0, q = seq.zero_profile()
    for n in range(1, n0 + q + 1):
        if seq.term(n) == 0:
            return n
    return None


def check_non_degenerate(node: SymbolicTree, prefix: Address = ()) -> None:
    """Raise DegenerateLabeling if some edge has both endpoint labels zero."""
    if isinstance(node, Finite):
        ok, bad = is_non_degenerate(node.tree)
        if not ok:
            u, v = bad[0]
            raise DegenerateLabeling(
                (format_address(prefix + (("vertex", u),)),
                 format_address(prefix + (("vertex", v),))),
                "both endpoint labels are zero",
            )
        return
    if isinstance(node, Ray):
        hit = node.labels.has_adjacent_zero_pair()
        if hit is not None:
            raise DegenerateLabeling(
                (format_address(prefix + (("ray", hit),)),
                 format_address(prefix + (("ray", hit + 1),))),
                "consecutive ray labels are both zero",
            )
        return
    if isinstance(node, Star):
        if node.center_label == 0:
            k = _first_zero_index(node.leaf_labels)
            if k is not None:
                raise DegenerateLabeling(
                    (format_address(prefix + (("center",),)),
                     format_address(prefix + (("leaf", k),))),
                    "zero-labeled center with a zero-labeled leaf",
                )
        return
    if isinstance(node, GlueFinite):
        check_non_degenerate(node.base, prefix + (("base",),))
        for i, att in enumerate(node.attachments):
            check_non_degenerate(att.part, prefix + (("attach", i),))
        return
    if isinstance(node, GlueFamily):
        check_non_degenerate(node.base, prefix + (("base",),))
        for m in member_window(node):
            check_non_degenerate(instantiate(node, m), prefix + (("member", m),))
        return
    if isinstance(node, ScaledLabels):
        check_non_degenerate(node.inner, prefix)
        return


# ---------------------------------------------------------------------------
# completeness: rays with vanishing limsup


def _vanishing_ray(node: SymbolicTree, prefix: Address) -> Witness | None:
    if isinstance(node, Ray):
        if node.labels.limsup() == 0:
            return Witness(
                "vanishing_ray",
                format_address(prefix + (("ray", 1),)),
                f"ray labels {node.labels.describe()} have limsup 0, so the "
                "vertex sequence along the ray is Cauchy without a limit",
            )
        return None
    if isinstance(node, (Finite, Star)):
        return None
    if isinstance(node, GlueFinite):
        w = _vanishing_ray(node.base, prefix + (("base",),))
        if w:
            return w
        for i, att in enumerate(node.attachments):
            w = _vanishing_ray(att.part, prefix + (("attach", i),))
            if w:
                return w
        return None
    if isinstance(node, GlueFamily):
        w = _vanishing_ray(node.base, prefix + (("base",),))
        if w:
            return w
        for m in member_window(node):
            w = _vanishing_ray(instantiate(node, m), prefix + (("member", m),))
            if w:
                return w
        return None
    if isinstance(node, ScaledLabels):
        return _vanishing_ray(node.inner, prefix)
    return None


# ---------------------------------------------------------------------------
# total boundedness


def _nonvanishing_seq(node: SymbolicTree, prefix: Address) -> Witness | None:
    """First infinite label family that fails to vanish (infinite V_eps)."""

    def hit(seq: LabelSeq, addr: Address, what: str) -> Witness | None:
        if seq.vanishes():
            return None
        eps = seq.limsup() / 2
        return Witness(
            "infinite_V_eps",
            format_address(addr),
            f"{what} {seq.describe()} has limsup "
            f"{format_rational(seq.limsup())}, so infinitely many labels are "
            f">= {format_rational(eps)}",
        )

    if isinstance(node, Finite):
        return None
    if isinstance(node, Ray):
        return hit(node.labels, prefix + (("ray", 1),), "ray labels")
    if isinstance(node, Star):
        return hit(node.leaf_labels, prefix + (("leaf", 1),), "leaf labels")
    if isinstance(node, GlueFinite):
        w = _nonvanishing_seq(node.base, prefix + (("base",),))
        if w:
            return w
        for i, att in enumerate(node.attachments):
            w = _nonvanishing_seq(att.part, prefix + (("attach", i),))
            if w:
                return w
        return None
    if isinstance(node, GlueFamily):
        w = _nonvanishing_seq(node.base, prefix + (("base",),))
        if w:
            return w
        w = hit(node.envelope, prefix + (("member", 1),), "family envelope")
        if w:
            return w
        for m in member_window(node):
            w = _nonvanishing_seq(instantiate(node, m), prefix + (("member", m),))
            if w:
                return w
        return None
    if isinstance(node, ScaledLabels):
        return _nonvanishing_seq(node.inner, prefix)
    return None


def _positive_infinite_degree(node: SymbolicTree, prefix: Address) -> Witness | None:
    """First star center carrying a positive label (infinite degree)."""
    if isinstance(node, (Finite, Ray)):
        return None
    if isinstance(node, Star):
        if node.center_label > 0:
            return Witness(
                "infinite_degree_positive_label",
                format_address(prefix + (("center",),)),
                f"vertex of infinite degree labeled "
                f"{format_rational(node.center_label)}: the ball of radius "
                f"{format_rational(node.center_label)} around it needs "
                "infinitely many smaller balls to cover the leaves",
            )
        return None
    if isinstance(node, GlueFinite):
        w = _positive_infinite_degree(node.base, prefix + (("base",),))
        if w:
            return w
        for i, att in enumerate(node.attachments):
            w = _positive_infinite_degree(att.part, prefix + (("attach", i),))
            if w:
                return w
        return None
    if isinstance(node, GlueFamily):
        w = _positive_infinite_degree(node.base, prefix + (("base",),))
        if w:
            return w
        for m in member_window(node):
            w = _positive_infinite_degree(
                instantiate(node, m), prefix + (("member", m),)
            )
            if w:
                return w
        return None
    if isinstance(node, ScaledLabels):
        return _positive_infinite_degree(node.inner, prefix)
    return None


# ---------------------------------------------------------------------------
# discreteness: neighbor-label bags of zero-labeled star centers


@dataclass(frozen=True)
class Bag:
    """Neighbor labels of one vertex, contributed by one structural side."""

    inf: Fraction | None  # None = empty contribution
    desc: str
    samples: tuple[str, ...] = ()


def _combine(bags: list[Bag]) -> tuple[Fraction | None, str, tuple[str, ...]]:
    infs = [b.inf for b in bags if b.inf is not None]
    inf = min(infs) if infs else None
    desc = "; ".join(b.desc for b in bags if b.desc)
    samples = tuple(s for b in bags for s in b.samples)
    return inf, desc, samples


def _leaf_samples(seq: LabelSeq, prefix: Address, scale: Fraction) -> tuple[str, ...]:
    out = []
    for k in range(1, 61):
        if seq.term(k) > 0:
            out.append(
                f"{format_address(prefix + (('leaf', k),))} "
                f"(label {format_rational(scale * seq.term(k))})"
            )
            if len(out) == 3:
                break
    return tuple(out)


def neighbor_bag(
    node: SymbolicTree, addr: Address, abs_prefix: Address, scale: Fraction = ONE
) -> Bag:
    """Labels of the neighbors of ``addr`` in the merged view of ``node``."""
    head, rest = addr[0], addr[1:]
    if isinstance(node, Finite):
        v = head[1]
        vals = sorted(node.tree.labels[u] for u in node.tree.adjacency[v])
        if not vals:
            return Bag(None, "")
        return Bag(
            scale * vals[0],
            f"finite-tree neighbors with labels "
            f"{{{', '.join(format_rational(scale * x) for x in vals)}}}",
        )
    if isinstance(node, Ray):
        n = head[1]
        vals = [node.labels.term(n + 1)]
        if n >= 2:
            vals.append(node.labels.term(n - 1))
        return Bag(
            scale * min(vals),
            f"ray neighbors with labels "
            f"{{{', '.join(format_rational(scale * x) for x in sorted(vals))}}}",
        )
    if isinstance(node, Star):
        if head == ("center",):
            seq = node.leaf_labels
            samples = ()
            if scale * seq.inf() == 0:
                samples = _leaf_samples(seq, abs_prefix, scale)
            return Bag(
                scale * seq.inf(),
                f"star leaves labeled {seq.describe()}"
                + (f" scaled by {format_rational(scale)}" if scale != 1 else ""),
                samples,
            )
        return Bag(scale * node.center_label, "the star center")
    if isinstance(node, GlueFinite):
        if head == ("base",):
            bags = [neighbor_bag(node.base, rest, abs_prefix + (("base",),), scale)]
            for i, att in enumerate(node.attachments):
                if att.site == rest:
                    bags.append(
                        neighbor_bag(
                            att.part, att.shared,
                            abs_prefix + (("attach", i),), scale,
                        )
                    )
            inf, desc, samples = _combine(bags)
            return Bag(inf, desc, samples)
        i = head[1]
        att = node.attachments[i]
        bags = [neighbor_bag(att.part, rest, abs_prefix + (("attach", i),), scale)]
        if rest == att.shared:
            bags.append(
                neighbor_bag(node.base, att.site, abs_prefix + (("base",),), scale)
            )
            for j, other in enumerate(node.attachments):
                if j != i and other.site == att.site:
                    bags.append(
                        neighbor_bag(
                            other.part, other.shared,
                            abs_prefix + (("attach", j),), scale,
                        )
                    )
        inf, desc, samples = _combine(bags)
        return Bag(inf, desc, samples)
    if isinstance(node, GlueFamily):
        if head == ("base",):
            bags = [neighbor_bag(node.base, rest, abs_prefix + (("base",),), scale)]
            m = site_of_base_step(node, rest[0]) if len(rest) == 1 else None
            if m is not None:
                bags.append(
                    neighbor_bag(
                        instantiate(node, m), node.shared,
                        abs_prefix + (("member", m),), scale,
                    )
                )
            inf, desc, samples = _combine(bags)
            return Bag(inf, desc, samples)
        m = head[1]
        bags = [
            neighbor_bag(
                instantiate(node, m), rest, abs_prefix + (("member", m),), scale
            )
        ]
        if rest == node.shared:
            bags.append(
                neighbor_bag(
                    node.base, (site_base_step(node, m),),
                    abs_prefix + (("base",),), scale,
                )
            )
        inf, desc, samples = _combine(bags)
        return Bag(inf, desc, samples)
    if isinstance(node, ScaledLabels):
        return neighbor_bag(node.inner, addr, abs_prefix, scale * node.factor)
    return Bag(None, "")


@dataclass(frozen=True)
class _CenterRecord:
    canonical: Address
    label: Fraction
    bags: tuple[Bag, ...]
    group: str | None  # family grouping key for report compaction
    member: int | None


def _center_records(
    node: SymbolicTree,
    prefix: Address,
    extras: dict[Address, list[Bag]],
    canon: dict[Address, Address],
    scale: Fraction,
    group: str | None,
    member: int | None,
    out: list[_CenterRecord],
) -> None:
    """Collect every star-center vertex class with its full neighbor bags."""
    if isinstance(node, (Finite, Ray)):
        return
    if isinstance(node, Star):
        local = (("center",),)
        bag = neighbor_bag(node, local, prefix, scale)
        bags = [bag] + extras.get(local, [])
        out.append(
            _CenterRecord(
                canon.get(local, prefix + local),
                scale * node.center_label,
                tuple(bags),
                group,
                member,
            )
        )
        return
    if isinstance(node, GlueFinite):
        base_extras: dict[Address, list[Bag]] = {}
        for a, bl in extras.items():
            if a and a[0] == ("base",):
                base_extras.setdefault(a[1:], []).extend(bl)
        base_canon = {
            a[1:]: c for a, c in canon.items() if a and a[0] == ("base",)
        }
        for i, att in enumerate(node.attachments):
            base_extras.setdefault(att.site, []).append(
                neighbor_bag(att.part, att.shared, prefix + (("attach", i),), scale)
            )
        _center_records(
            node.base, prefix + (("base",),), base_extras, base_canon,
            scale, group, member, out,
        )
        for i, att in enumerate(node.attachments):
            part_extras: dict[Address, list[Bag]] = {}
            for a, bl in extras.items():
                if a and a[0] == ("attach", i):
                    part_extras.setdefault(a[1:], []).extend(bl)
            boundary = [
                neighbor_bag(node.base, att.site, prefix + (("base",),), scale)
            ]
            for j, other in enumerate(node.attachments):
                if j != i and other.site == att.site:
                    boundary.append(
                        neighbor_bag(
                            other.part, other.shared,
                            prefix + (("attach", j),), scale,
                        )
                    )
            part_extras.setdefault(att.shared, []).extend(boundary)
            part_canon = {
                a[1:]: c for a, c in canon.items() if a and a[0] == ("attach", i)
            }
            site_local = (("base",),) + att.site
            part_canon.setdefault(
                att.shared, canon.get(site_local, prefix + site_local)
            )
            _center_records(
                att.part, prefix + (("attach", i),), part_extras, part_canon,
                scale, group, member, out,
            )
        return
    if isinstance(node, GlueFamily):
        base_extras = {
            a[1:]: bl for a, bl in extras.items() if a and a[0] == ("base",)
        }
        base_canon = {
            a[1:]: c for a, c in canon.items() if a and a[0] == ("base",)
        }
        _center_records(
            node.base, prefix + (("base",),), base_extras, base_canon,
            scale, group, member, out,
        )
        fam_group = format_address(prefix) or "top"
        for m in member_window(node):
            mem = instantiate(node, m)
            mem_extras: dict[Address, list[Bag]] = {}
            for a, bl in extras.items():
                if a and a[0] == ("member", m):
                    mem_extras.setdefault(a[1:], []).extend(bl)
            site = (site_base_step(node, m),)
            mem_extras.setdefault(node.shared, []).append(
                neighbor_bag(node.base, site, prefix + (("base",),), scale)
            )
            mem_canon = {
                a[1:]: c for a, c in canon.items() if a and a[0] == ("member", m)
            }
            site_local = (("base",),) + site
            mem_canon.setdefault(
                node.shared, canon.get(site_local, prefix + site_local)
            )
            _center_records(
                mem, prefix + (("member", m),), mem_extras, mem_canon,
                scale, fam_group, m, out,
            )
        return
    if isinstance(node, ScaledLabels):
        _center_records(
            node.inner, prefix, extras, canon, scale * node.factor,
            group, member, out,
        )
        return


def _is_accumulation(rec: _CenterRecord) -> bool:
    if rec.label != 0:
        return False
    inf, _, _ = _combine(list(rec.bags))
    return inf == 0


def _accumulation_witness(node: SymbolicTree) -> Witness | None:
    out: list[_CenterRecord] = []
    _center_records(node, (), {}, {}, ONE, None, None, out)
    for rec in out:
        if _is_accumulation(rec):
            _, desc, samples = _combine(list(rec.bags))
            detail = (
                "zero-labeled vertex of infinite degree whose neighbor labels "
                f"have infimum 0: {desc}"
            )
            if samples:
                detail += "; vanishing neighbors: " + ", ".join(samples)
            return Witness(
                "accumulation_vertex", format_address(rec.canonical), detail
            )
    return None


# ---------------------------------------------------------------------------
# public: classify


def classify(node: SymbolicTree) -> Verdict:
    """Decide the four topological properties with witnesses."""
    validate_symbolic(node)
    check_non_degenerate(node)

    complete_w = _vanishing_ray(node, ())
    vanish_w = _nonvanishing_seq(node, ())
    posinf_w = _positive_infinite_degree(node, ())
    acc_w = _accumulation_witness(node)

    rayless = not contains_kind(node, Ray)
    locally_finite = not contains_kind(node, Star)

    tb_w = posinf_w or vanish_w
    compact_w: Witness | None = None
    if not rayless:
        loc, _ = first_of_kind(node, Ray)
        compact_w = Witness(
            "ray_present",
            format_address(loc + (("ray", 1),)),
            "the tree contains a ray: vanishing ray labels break "
            "completeness, non-vanishing ones break total boundedness",
        )
    elif tb_w is not None:
        compact_w = tb_w

    return Verdict(
        complete=complete_w is None,
        complete_witness=complete_w,
        discrete=acc_w is None,
        discrete_witness=acc_w,
        totally_bounded=tb_w is None,
        totally_bounded_witness=tb_w,
        discrete_and_tb=locally_finite and vanish_w is None,
        compact=compact_w is None,
        compact_witness=compact_w,
    )


# ---------------------------------------------------------------------------
# public: free-tree predicates


def _member_shared_is_center(fam: GlueFamily) -> bool:
    """Structurally: does the glued member vertex have infinite degree?"""
    return _bundle_infinite(fam.template, fam.shared)


def _bundle_infinite(node: SymbolicTree, addr: Address) -> bool:
    """Does the merged vertex at ``addr`` contain a star center?"""
    head, rest = addr[0], addr[1:]
    if isinstance(node, Finite) or isinstance(node, Ray):
        return False
    if isinstance(node, Star):
        return head == ("center",)
    if isinstance(node, GlueFinite):
        if head == ("base",):
            if _bundle_infinite(node.base, rest):
                return True
            return any(
                att.site == rest and _bundle_infinite(att.part, att.shared)
                for att in node.attachments
            )
        att = node.attachments[head[1]]
        if _bundle_infinite(att.part, rest):
            return True
        if rest == att.shared:
            if _bundle_infinite(node.base, att.site):
                return True
            return any(
                o is not att and o.site == att.site
                and _bundle_infinite(o.part, o.shared)
                for o in node.attachments
            )
        return False
    if isinstance(node, GlueFamily):
        if head == ("base",):
            if _bundle_infinite(node.base, rest):
                return True
            if len(rest) == 1 and site_of_base_step(node, rest[0]) is not None:
                return _bundle_infinite(node.template, node.shared)
            return False
        if _bundle_infinite(node.template, rest):
            return True
        if rest == node.shared:
            return _bundle_infinite(
                node.base, (site_base_step(node, head[1]),)
            )
        return False
    if isinstance(node, ScaledLabels):
        return _bundle_infinite(node.inner, addr)
    return False


def _adjacent(node: SymbolicTree, a: Address, b: Address) -> bool:
    """Structural adjacency between two canonical addresses in ``node``."""
    if isinstance(node, Finite):
        if len(a) != 1 or len(b) != 1:
            return False
        return b[0][1] in node.tree.adjacency.get(a[0][1], ())
    if isinstance(node, Ray):
        if len(a) != 1 or len(b) != 1 or a[0][0] != "ray" or b[0][0] != "ray":
            return False
        return abs(a[0][1] - b[0][1]) == 1
    if isinstance(node, Star):
        if len(a) != 1 or len(b) != 1:
            return False
        return (a[0] == ("center",) and b[0][0] == "leaf") or (
            b[0] == ("center",) and a[0][0] == "leaf"
        )
    if isinstance(node, GlueFinite):
        if a[0] == ("base",) and b[0] == ("base",):
            return _adjacent(node.base, a[1:], b[1:])
        if a[0][0] == "attach" and b[0][0] == "attach" and a[0] == b[0]:
            return _adjacent(node.attachments[a[0][1]].part, a[1:], b[1:])
        for x, y in ((a, b), (b, a)):
            if x[0][0] == "attach" and y[0] == ("base",):
                att = node.attachments[x[0][1]]
                if y[1:] == att.site:
                    return _adjacent(att.part, x[1:], att.shared)
        return False
    if isinstance(node, GlueFamily):
        if a[0] == ("base",) and b[0] == ("base",):
            return _adjacent(node.base, a[1:], b[1:])
        if a[0][0] == "member" and b[0][0] == "member" and a[0] == b[0]:
            return _adjacent(node.template, a[1:], b[1:])
        for x, y in ((a, b), (b, a)):
            if x[0][0] == "member" and y[0] == ("base",):
                if y[1:] == (site_base_step(node, x[0][1]),):
                    return _adjacent(node.template, x[1:], node.shared)
        return False
    if isinstance(node, ScaledLabels):
        return _adjacent(node.inner, a, b)
    return False


def _neighbor_bundle_infinite(node: SymbolicTree, addr: Address) -> bool:
    """Is some neighbor of ``addr`` (within node's merged view) a merged
    vertex of infinite degree?"""
    head, rest = addr[0], addr[1:]
    if isinstance(node, (Finite, Ray)):
        return False  # no star can hide inside
    if isinstance(node, Star):
        return head[0] == "leaf"  # the center
    if isinstance(node, GlueFinite):
        if head == ("base",):
            if _neighbor_bundle_infinite(node.base, rest):
                return True
            for att in node.attachments:
                if att.site != rest and _adjacent(node.base, rest, att.site) \
                        and _bundle_infinite(node, (("base",),) + att.site):
                    return True
                if att.site == rest and _neighbor_bundle_infinite(
                    att.part, att.shared
                ):
                    return True
            return False
        att = node.attachments[head[1]]
        if _neighbor_bundle_infinite(att.part, rest):
            return True
        if rest != att.shared and _adjacent(att.part, rest, att.shared) \
                and _bundle_infinite(node, (("base",),) + att.site):
            return True
        return False
    if isinstance(node, GlueFamily):
        member_inf = _member_shared_is_center(node)
        if head == ("base",):
            if _neighbor_bundle_infinite(node.base, rest):
                return True
            if member_inf and len(rest) == 1:
                step = rest[0]
                if isinstance(node.base, Star):
                    if step == ("center",):
                        return True  # every leaf is a site
                    return False  # leaf's only neighbor is the center
                n = step[1]
                for nb in (n - 1, n + 1):
                    if nb >= 1 and site_of_base_step(node, ("ray", nb)) is not None:
                        return True
            if len(rest) == 1 and site_of_base_step(node, rest[0]) is not None:
                if _neighbor_bundle_infinite(node.template, node.shared):
                    return True
            return False
        m = head[1]
        if _neighbor_bundle_infinite(node.template, rest):
            return True
        if rest != node.shared and _adjacent(node.template, rest, node.shared):
            site = (site_base_step(node, m),)
            if _bundle_infinite(node, (("base",),) + site):
                return True
        return False
    if isinstance(node, ScaledLabels):
        return _neighbor_bundle_infinite(node.inner, addr)
    return False


def _adjacent_inf_pair(node: SymbolicTree, prefix: Address) -> str | None:
    """Witness description for two adjacent infinite-degree merged vertices.

    An edge lives inside exactly one constructor piece; a bundle becomes
    infinite only through the shared vertex of an enclosing gluing, so
    checking each gluing's boundary (plus recursion into every piece) is
    exhaustive.
    """
    if isinstance(node, (Finite, Ray, Star)):
        return None
    if isinstance(node, ScaledLabels):
        return _adjacent_inf_pair(node.inner, prefix)
    if isinstance(node, GlueFinite):
        w = _adjacent_inf_pair(node.base, prefix + (("base",),))
        if w:
            return w
        for i, att in enumerate(node.attachments):
            w = _adjacent_inf_pair(att.part, prefix + (("attach", i),))
            if w:
                return w
        for att in node.attachments:
            site_abs = (("base",),) + att.site
            if _bundle_infinite(node, site_abs) and _neighbor_bundle_infinite(
                node, site_abs
            ):
                return (
                    f"glued vertex {format_address(prefix + site_abs)} has "
                    "infinite degree and an infinite-degree neighbor"
                )
        return None
    if isinstance(node, GlueFamily):
        w = _adjacent_inf_pair(node.base, prefix + (("base",),))
        if w:
            return w
        w = _adjacent_inf_pair(node.template, prefix + (("member", 1),))
        if w:
            return w
        if _member_shared_is_center(node):
            if isinstance(node.base, Star):
                addr = prefix + (("base",), ("center",))
                return (
                    f"star base center {format_address(addr)} is adjacent to "
                    "every glued member center"
                )
            if node.sites == "all":
                addr = prefix + (("base",), ("ray", 1))
                return (
                    f"consecutive ray vertices from {format_address(addr)} "
                    "all carry glued member centers"
                )
            if _neighbor_bundle_infinite(node.template, node.shared):
                addr = prefix + (("base",), site_base_step(node, 1))
                return (
                    f"glued member center {format_address(addr)} has an "
                    "infinite-degree neighbor inside the member"
                )
        else:
            site1 = (("base",), site_base_step(node, 1))
            if _bundle_infinite(node, site1) and _neighbor_bundle_infinite(
                node, site1
            ):
                return (
                    f"glued vertex {format_address(prefix + site1)} has "
                    "infinite degree and an infinite-degree neighbor"
                )
        return None
    return None


def free_predicates(node: SymbolicTree) -> FreeTreeReport:
    """Structural facts about the unlabeled tree underneath the labeling."""
    rayless = not contains_kind(node, Ray)
    locally_finite = not contains_kind(node, Star)
    finite = not (
        contains_kind(node, Ray)
        or contains_kind(node, Star)
        or contains_kind(node, GlueFamily)
    )
    pair = _adjacent_inf_pair(node, ())
    return FreeTreeReport(
        rayless=rayless,
        locally_finite=locally_finite,
        finite=finite,
        has_adjacent_infinite_degree_pair=pair is not None,
        countable=True,
        pair_witness=pair,
    )


# ---------------------------------------------------------------------------
# public: isolated points


def isolated_points(node: SymbolicTree) -> IsolatedPointsReport:
    """Per-vertex-class report: which vertices are accumulation points.

    Only zero-labeled vertices of infinite degree can be accumulation points;
    each such vertex is reported with sample neighbors of positive vanishing
    label (which are themselves isolated).  Everything else is isolated.
    """
    validate_symbolic(node)
    check_non_degenerate(node)
    records: list[_CenterRecord] = []
    _center_records(node, (), {}, {}, ONE, None, None, records)

    classes: list[VertexClass] = []
    seen_groups: dict[str, list[_CenterRecord]] = {}
    loose: list[_CenterRecord] = []
    for rec in records:
        if rec.group is None:
            loose.append(rec)
        else:
            seen_groups.setdefault(rec.group, []).append(rec)

    def emit(rec: _CenterRecord, suffix: str = "") -> None:
        inf, desc, samples = _combine(list(rec.bags))
        acc = _is_accumulation(rec)
        detail = (
            f"label {format_rational(rec.label)}; neighbor labels: {desc}"
            f"; infimum {'-' if inf is None else format_rational(inf)}{suffix}"
        )
        classes.append(
            VertexClass(
                address=format_address(rec.canonical),
                status="accumulation" if acc else "isolated",
                label=format_rational(rec.label),
                detail=detail,
                neighbor_witnesses=samples if acc else (),
            )
        )

    for rec in loose:
        emit(rec)
    for group, recs in seen_groups.items():
        verdicts = {_is_accumulation(r) for r in recs}
        if len(verdicts) == 1:
            emit(recs[0], suffix=" (likewise for every member of this family)")
        else:
            for rec in recs:
                emit(rec)

    note = (
        "every vertex not listed is isolated: it has positive label, or "
        "finite degree with finitely many positive neighbor labels"
    )
    return IsolatedPointsReport(classes=tuple(classes), note=note)

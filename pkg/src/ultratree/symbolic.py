"""Symbolically presented (possibly infinite) labeled trees.

The constructor algebra:

- ``Finite(tree)``: an explicit finite labeled tree.
- ``Ray(labels)``: vertices 1, 2, 3, ... in a one-way infinite path; vertex n
  is labeled ``labels.term(n)``.
- ``Star(center_label, leaf_labels)``: one center of infinite degree with
  leaves 1, 2, 3, ...
- ``GlueFinite(base, attachments)``: finitely many trees glued onto the base,
  each sharing exactly one vertex (its ``shared`` address) with a base vertex
  (its ``site`` address); shared labels must match.
- ``GlueFamily(base, sites, template, shared, envelope)``: one template
  instance per member index m = 1, 2, ..., glued at the selected base sites
  (Ray sites: "all" | "even" | "odd"; Star sites: "leaves").  Inside the
  template, sequence parameters may be a :class:`~ultratree.seqs.Ref` to the
  member's site label or envelope value; refs bind to the innermost enclosing
  family.  ``envelope.term(m)`` must bound every label of member m, which is
  what makes vertex counting across infinitely many members decidable.
- ``ScaledLabels(inner, factor)``: every label of ``inner`` multiplied by a
  positive factor (possibly a ref inside templates).  Structure unchanged.

Vertices are addressed by constructor path: ``ray:3``, ``center``, ``leaf:2``,
``vertex:a``, prefixed with ``base`` / ``attach:i`` / ``member:m`` through
glue layers.  A glued shared vertex is canonically addressed through the base.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .core_tree import LabeledTree, build_tree
from .errors import (
    GlueLabelMismatch,
    InvalidDeclaration,
    SizeCapExceeded,
    UnknownVertex,
)
from .ratio import format_rational
from .seqs import (
    INFINITE,
    Const,
    Custom,
    FiniteSupport,
    Geometric,
    Harmonic,
    LabelSeq,
    Modulated,
    PrimeRecip,
    Ref,
    as_val,
    nth_prime,
    resolve_val,
    val_is_concrete,
)

Address = tuple[tuple, ...]

TRUNCATE_SIZE_CAP = 200_000
SPOT_CHECK_MEMBERS = 16


# ---------------------------------------------------------------------------
# addresses


def format_address(addr: Address) -> str:
    parts = []
    for step in addr:
        if step[0] in ("center", "base"):
            parts.append(step[0])
        else:
            parts.append(f"{step[0]}:{step[1]}")
    return "/".join(parts)


def parse_address(text: str) -> Address:
    steps: list[tuple] = []
    if not text:
        raise InvalidDeclaration("empty address")
    for seg in text.split("/"):
        if seg in ("center", "base"):
            steps.append((seg,))
        elif ":" in seg:
            kind, _, arg = seg.partition(":")
            if kind == "vertex":
                steps.append(("vertex", arg))
            elif kind in ("ray", "leaf", "attach", "member"):
                try:
                    steps.append((kind, int(arg)))
                except ValueError:
                    raise InvalidDeclaration(f"bad address segment {seg!r}") from None
            else:
                raise InvalidDeclaration(f"bad address segment {seg!r}")
        else:
            raise InvalidDeclaration(f"bad address segment {seg!r}")
    return tuple(steps)


# ---------------------------------------------------------------------------
# node types


class SymbolicTree:
    """Base class of the constructor algebra."""


@dataclass(frozen=True)
class Finite(SymbolicTree):
    tree: LabeledTree


@dataclass(frozen=True)
class Ray(SymbolicTree):
    labels: LabelSeq


@dataclass(frozen=True)
class Star(SymbolicTree):
    center_label: Fraction | Ref
    leaf_labels: LabelSeq

    def __post_init__(self):
        object.__setattr__(self, "center_label", as_val(self.center_label))
        if val_is_concrete(self.center_label) and self.center_label < 0:
            raise InvalidDeclaration(f"negative center label {self.center_label}")


@dataclass(frozen=True)
class Attachment:
    site: Address
    part: SymbolicTree
    shared: Address


@dataclass(frozen=True)
class GlueFinite(SymbolicTree):
    base: SymbolicTree
    attachments: tuple[Attachment, ...]

    def __post_init__(self):
        object.__setattr__(self, "attachments", tuple(self.attachments))


RAY_SELECTORS = ("all", "even", "odd")
STAR_SELECTORS = ("leaves",)


@dataclass(frozen=True)
class GlueFamily(SymbolicTree):
    base: SymbolicTree
    sites: str
    template: SymbolicTree
    shared: Address
    envelope: LabelSeq

    def __post_init__(self):
        if isinstance(self.base, Ray):
            if self.sites not in RAY_SELECTORS:
                raise InvalidDeclaration(
                    f"site selector {self.sites!r} invalid for a ray base"
                )
        elif isinstance(self.base, Star):
            if self.sites not in STAR_SELECTORS:
                raise InvalidDeclaration(
                    f"site selector {self.sites!r} invalid for a star base"
                )
        else:
            raise InvalidDeclaration("glue_family base must be a ray or a star")


@dataclass(frozen=True)
class ScaledLabels(SymbolicTree):
    inner: SymbolicTree
    factor: Fraction | Ref

    def __post_init__(self):
        object.__setattr__(self, "factor", as_val(self.factor))
        if val_is_concrete(self.factor) and self.factor <= 0:
            raise InvalidDeclaration(
                f"scale factor must be positive, got {self.factor}"
            )


def default_shared(node: SymbolicTree) -> Address:
    """Canonical shared vertex when a gluing does not name one."""
    if isinstance(node, Finite):
        return (("vertex", node.tree.vertices[0]),)
    if isinstance(node, Ray):
        return (("ray", 1),)
    if isinstance(node, Star):
        return (("center",),)
    if isinstance(node, (GlueFinite, GlueFamily)):
        return (("base",),) + tuple(default_shared(node.base))
    if isinstance(node, ScaledLabels):
        return default_shared(node.inner)
    raise InvalidDeclaration(f"unknown constructor {type(node).__name__}")


# ---------------------------------------------------------------------------
# sites


def site_base_step(fam: GlueFamily, m: int) -> tuple:
    """Base-local address step of member m's glue site."""
    if m < 1:
        raise InvalidDeclaration(f"member index {m} out of range")
    if isinstance(fam.base, Star):
        return ("leaf", m)
    if fam.sites == "all":
        return ("ray", m)
    if fam.sites == "even":
        return ("ray", 2 * m)
    return ("ray", 2 * m - 1)  # odd


def site_of_base_step(fam: GlueFamily, step: tuple) -> int | None:
    """Inverse of site_base_step: member index hosted at a base vertex."""
    if isinstance(fam.base, Star):
        return step[1] if step[0] == "leaf" else None
    if step[0] != "ray":
        return None
    n = step[1]
    if fam.sites == "all":
        return n
    if fam.sites == "even":
        return n // 2 if n % 2 == 0 else None
    return (n + 1) // 2 if n % 2 == 1 else None


def site_label(fam: GlueFamily, m: int) -> Fraction:
    step = site_base_step(fam, m)
    if isinstance(fam.base, Star):
        return fam.base.leaf_labels.term(m)
    return fam.base.labels.term(step[1])


def member_bindings(fam: GlueFamily, m: int) -> dict[str, Fraction]:
    return {"site_label": site_label(fam, m), "envelope": fam.envelope.term(m)}


def substitute_node(node: SymbolicTree, bindings: dict[str, Fraction]) -> SymbolicTree:
    """Resolve refs bound by the *innermost* family: nested family templates
    are left untouched (their refs belong to the nested family)."""
    if isinstance(node, Finite):
        return node
    if isinstance(node, Ray):
        return Ray(node.labels.substitute(bindings))
    if isinstance(node, Star):
        return Star(
            resolve_val(node.center_label, bindings),
            node.leaf_labels.substitute(bindings),
        )
    if isinstance(node, GlueFinite):
        return GlueFinite(
            substitute_node(node.base, bindings),
            tuple(
                Attachment(a.site, substitute_node(a.part, bindings), a.shared)
                for a in node.attachments
            ),
        )
    if isinstance(node, GlueFamily):
        return GlueFamily(
            substitute_node(node.base, bindings),
            node.sites,
            node.template,
            node.shared,
            node.envelope.substitute(bindings),
        )
    if isinstance(node, ScaledLabels):
        return ScaledLabels(
            substitute_node(node.inner, bindings),
            resolve_val(node.factor, bindings),
        )
    raise InvalidDeclaration(f"unknown constructor {type(node).__name__}")


def instantiate(fam: GlueFamily, m: int) -> SymbolicTree:
    """Concrete member m of the family."""
    return substitute_node(fam.template, member_bindings(fam, m))


def member_window(fam: GlueFamily) -> list[int]:
    """Member indices 1..W whose concrete checks decide every member.

    Any per-member verdict computed by this package (degeneracy, vanishing,
    limsup positivity, accumulation, positivity of the center label) depends
    on m only through which ref source values are zero, because substituted
    parameters have the form coeff * source(m).  Zeroness of site labels and
    envelope values is eventually periodic in m with a certificate derived
    from the underlying sequences, so checking one window beyond the combined
    threshold covers all members exactly.
    """
    if isinstance(fam.base, Star):
        n0s, qs = fam.base.leaf_labels.zero_profile()
    else:
        n0s, qs = fam.base.labels.zero_profile()
    n0e, qe = fam.envelope.zero_profile()
    # site m maps to base index m, 2m or 2m-1, all >= m, and the map is
    # periodic mod qs; +1 covers the neighbor indices site(m) +- 1 as well
    threshold = max(n0s + 1, n0e, 4)
    period = lcm(qs, qe)
    return list(range(1, threshold + 2 * period + 1))


# ---------------------------------------------------------------------------
# structural navigation


def has_vertex(node: SymbolicTree, addr: Address) -> bool:
    """Does the address resolve structurally (labels not consulted)?"""
    if not addr:
        return False
    head, rest = addr[0], addr[1:]
    if isinstance(node, Finite):
        return not rest and head[0] == "vertex" and head[1] in node.tree.labels
    if isinstance(node, Ray):
        return not rest and head[0] == "ray" and head[1] >= 1
    if isinstance(node, Star):
        if rest:
            return False
        return head == ("center",) or (head[0] == "leaf" and head[1] >= 1)
    if isinstance(node, GlueFinite):
        if head == ("base",):
            return has_vertex(node.base, rest)
        if head[0] == "attach" and 0 <= head[1] < len(node.attachments):
            return has_vertex(node.attachments[head[1]].part, rest)
        return False
    if isinstance(node, GlueFamily):
        if head == ("base",):
            return has_vertex(node.base, rest)
        if head[0] == "member" and head[1] >= 1:
            return has_vertex(node.template, rest)
        return False
    if isinstance(node, ScaledLabels):
        return has_vertex(node.inner, addr)
    return False


def label_at(node: SymbolicTree, addr: Address) -> Fraction:
    """Exact label of the vertex at ``addr`` (node must be concrete there)."""
    if not addr:
        raise UnknownVertex(format_address(addr))
    head, rest = addr[0], addr[1:]
    if isinstance(node, Finite):
        if rest or head[0] != "vertex" or head[1] not in node.tree.labels:
            raise UnknownVertex(format_address(addr))
        return node.tree.labels[head[1]]
    if isinstance(node, Ray):
        if rest or head[0] != "ray" or head[1] < 1:
            raise UnknownVertex(format_address(addr))
        return node.labels.term(head[1])
    if isinstance(node, Star):
        if rest:
            raise UnknownVertex(format_address(addr))
        if head == ("center",):
            if not val_is_concrete(node.center_label):
                raise InvalidDeclaration("center label is an unresolved ref")
            return node.center_label
        if head[0] == "leaf" and head[1] >= 1:
            return node.leaf_labels.term(head[1])
        raise UnknownVertex(format_address(addr))
    if isinstance(node, GlueFinite):
        if head == ("base",):
            return label_at(node.base, rest)
        if head[0] == "attach" and 0 <= head[1] < len(node.attachments):
            return label_at(node.attachments[head[1]].part, rest)
        raise UnknownVertex(format_address(addr))
    if isinstance(node, GlueFamily):
        if head == ("base",):
            return label_at(node.base, rest)
        if head[0] == "member" and head[1] >= 1:
            return label_at(instantiate(node, head[1]), rest)
        raise UnknownVertex(format_address(addr))
    if isinstance(node, ScaledLabels):
        if not val_is_concrete(node.factor):
            raise InvalidDeclaration("scale factor is an unresolved ref")
        return node.factor * label_at(node.inner, addr)
    raise UnknownVertex(format_address(addr))


def sup_labels(node: SymbolicTree) -> Fraction:
    """Supremum of all labels (envelopes bound family members by contract)."""
    if isinstance(node, Finite):
        return max(node.tree.labels.values())
    if isinstance(node, Ray):
        return node.labels.sup()
    if isinstance(node, Star):
        if not val_is_concrete(node.center_label):
            raise InvalidDeclaration("center label is an unresolved ref")
        return max(node.center_label, node.leaf_labels.sup())
    if isinstance(node, GlueFinite):
        return max(
            [sup_labels(node.base)] + [sup_labels(a.part) for a in node.attachments]
        )
    if isinstance(node, GlueFamily):
        return max(sup_labels(node.base), node.envelope.sup())
    if isinstance(node, ScaledLabels):
        if not val_is_concrete(node.factor):
            raise InvalidDeclaration("scale factor is an unresolved ref")
        return node.factor * sup_labels(node.inner)
    raise InvalidDeclaration(f"unknown constructor {type(node).__name__}")


def walk_constructors(node: SymbolicTree, prefix: Address = ()):
    """Yield (address prefix, constructor node) over the whole structure,
    entering family templates at the representative member index 1."""
    yield prefix, node
    if isinstance(node, GlueFinite):
        yield from walk_constructors(node.base, prefix + (("base",),))
        for i, a in enumerate(node.attachments):
            yield from walk_constructors(a.part, prefix + (("attach", i),))
    elif isinstance(node, GlueFamily):
        yield from walk_constructors(node.base, prefix + (("base",),))
        yield from walk_constructors(node.template, prefix + (("member", 1),))
    elif isinstance(node, ScaledLabels):
        yield from walk_constructors(node.inner, prefix)


def contains_kind(node: SymbolicTree, kind) -> bool:
    return any(isinstance(n, kind) for _, n in walk_constructors(node))


def first_of_kind(node: SymbolicTree, kind):
    for prefix, n in walk_constructors(node):
        if isinstance(n, kind):
            return prefix, n
    return None


# ---------------------------------------------------------------------------
# validation


def validate_symbolic(node: SymbolicTree) -> None:
    """Full structural validation: glue sites exist, shared labels match
    (exactly where concrete; family members spot-checked over the certified
    window plus the first few indices), envelopes dominate member suprema.
    """
    if isinstance(node, (Finite, Ray, Star)):
        return
    if isinstance(node, ScaledLabels):
        validate_symbolic(node.inner)
        return
    if isinstance(node, GlueFinite):
        validate_symbolic(node.base)
        for i, a in enumerate(node.attachments):
            if not has_vertex(node.base, a.site):
                raise UnknownVertex(format_address(a.site))
            if not has_vertex(a.part, a.shared):
                raise UnknownVertex(format_address(a.shared))
            validate_symbolic(a.part)
            try:
                base_val = label_at(node.base, a.site)
                part_val = label_at(a.part, a.shared)
            except InvalidDeclaration:
                continue  # refs present; checked per-member at instantiation
            if base_val != part_val:
                raise GlueLabelMismatch(format_address(a.site), base_val, part_val)
        return
    if isinstance(node, GlueFamily):
        validate_symbolic(node.base)
        if not has_vertex(node.template, node.shared):
            raise UnknownVertex(format_address(node.shared))
        _validate_template_ratio_refs(node)
        concrete = not (
            _node_has_free_refs(node.base)
            or node.envelope.has_refs()
        )
        if concrete:
            checks = sorted(set(member_window(node)) | set(range(1, SPOT_CHECK_MEMBERS + 1)))
            for m in checks:
                member = instantiate(node, m)
                validate_symbolic(member)
                want = site_label(node, m)
                got = label_at(member, node.shared)
                if want != got:
                    raise GlueLabelMismatch(
                        f"member:{m} at {format_address(node.shared)}", want, got
                    )
                if sup_labels(member) > node.envelope.term(m):
                    raise InvalidDeclaration(
                        f"envelope {node.envelope.describe()} does not dominate "
                        f"member {m} (sup {format_rational(sup_labels(member))} > "
                        f"{format_rational(node.envelope.term(m))})"
                    )
        return
    raise InvalidDeclaration(f"unknown constructor {type(node).__name__}")


def _node_has_free_refs(node: SymbolicTree) -> bool:
    """Refs not bound by a family inside ``node`` itself."""
    if isinstance(node, Finite):
        return False
    if isinstance(node, Ray):
        return node.labels.has_refs()
    if isinstance(node, Star):
        return (not val_is_concrete(node.center_label)) or node.leaf_labels.has_refs()
    if isinstance(node, GlueFinite):
        return _node_has_free_refs(node.base) or any(
            _node_has_free_refs(a.part) for a in node.attachments
        )
    if isinstance(node, GlueFamily):
        # template refs are bound by this family; base and envelope are not
        return _node_has_free_refs(node.base) or node.envelope.has_refs()
    if isinstance(node, ScaledLabels):
        return (not val_is_concrete(node.factor)) or _node_has_free_refs(node.inner)
    return False


def _validate_template_ratio_refs(fam: GlueFamily) -> None:
    """A geometric ratio ref needs every source value in (0, 1)."""
    from .seqs import Geometric

    def seqs_of(n: SymbolicTree):
        for _, c in walk_constructors(n):
            if isinstance(c, Ray):
                yield from _leaf_seqs(c.labels)
            elif isinstance(c, Star):
                yield from _leaf_seqs(c.leaf_labels)
            elif isinstance(c, GlueFamily):
                yield from _leaf_seqs(c.envelope)

    for s in seqs_of(fam.template):
        if isinstance(s, Geometric) and isinstance(s.r, Ref):
            src = s.r
            if src.source == "site_label":
                if isinstance(fam.base, Star):
                    seq, start, step = fam.base.leaf_labels, 1, 1
                else:
                    seq = fam.base.labels
                    start, step = (2, 2) if fam.sites == "even" else (1, 2 if fam.sites == "odd" else 1)
                if seq.has_refs():
                    continue  # nested family: checked at instantiation
                if seq.zero_in_progression(start, step) or src.coeff * seq.sup() >= 1:
                    raise InvalidDeclaration(
                        "geometric ratio ref needs site labels in (0, 1)"
                    )
            else:
                env = fam.envelope
                if env.has_refs():
                    continue
                if env.zero_in_progression(1, 1) or src.coeff * env.sup() >= 1:
                    raise InvalidDeclaration(
                        "geometric ratio ref needs envelope values in (0, 1)"
                    )


def _leaf_seqs(seq: LabelSeq):
    from .seqs import Modulated

    if isinstance(seq, Modulated):
        for s in seq.seqs:
            yield from _leaf_seqs(s)
    else:
        yield seq


# ---------------------------------------------------------------------------
# truncation


def truncate(
    node: SymbolicTree, budget: int, size_cap: int = TRUNCATE_SIZE_CAP
) -> tuple[LabeledTree, dict[str, str]]:
    """Deterministic finite materialization.

    Ray: first ``budget`` vertices; Star: center plus first ``budget`` leaves;
    GlueFamily: members m <= budget whose site is materialized, each truncated
    with the same budget.  Shared vertices are force-included (with the prefix
    needed to stay connected) and validated: shared labels must match and the
    envelope must dominate each materialized member.  Returns the tree plus a
    map from canonical symbolic addresses to emitted vertex ids (vertex ids
    are the address strings themselves).
    """
    if budget < 1:
        raise InvalidDeclaration(f"budget must be >= 1, got {budget}")
    verts, edges = _materialize(node, budget, set())
    if len(verts) > size_cap:
        raise SizeCapExceeded(len(verts), size_cap, "truncation")
    ids = {addr: format_address(addr) for addr in verts}
    tree = build_tree(
        sorted(ids.values()),
        [(ids[a], ids[b]) for a, b in sorted(edges)],
        {ids[a]: lab for a, lab in verts.items()},
    )
    addr_map = {ids[a]: ids[a] for a in sorted(verts)}
    return tree, addr_map


def _materialize(
    node: SymbolicTree, budget: int, forced: set[Address]
) -> tuple[dict[Address, Fraction], set[tuple[Address, Address]]]:
    if isinstance(node, Finite):
        verts = {(("vertex", v),): node.tree.labels[v] for v in node.tree.vertices}
        edges = {((("vertex", u),), (("vertex", v),)) for u, v in node.tree.edges}
        return verts, edges
    if isinstance(node, Ray):
        top = budget
        for addr in forced:
            if addr and addr[0][0] == "ray":
                top = max(top, addr[0][1])
        verts = {(("ray", n),): node.labels.term(n) for n in range(1, top + 1)}
        edges = {
            ((("ray", n),), (("ray", n + 1),)) for n in range(1, top)
        }
        return verts, edges
    if isinstance(node, Star):
        leaf_idx = set(range(1, budget + 1))
        for addr in forced:
            if addr and addr[0][0] == "leaf":
                leaf_idx.add(addr[0][1])
        if not val_is_concrete(node.center_label):
            raise InvalidDeclaration("center label is an unresolved ref")
        verts: dict[Address, Fraction] = {(("center",),): node.center_label}
        edges: set[tuple[Address, Address]] = set()
        for k in sorted(leaf_idx):
            verts[(("leaf", k),)] = node.leaf_labels.term(k)
            edges.add(((("center",),), (("leaf", k),)))
        return verts, edges
    if isinstance(node, GlueFinite):
        base_forced = {a[1:] for a in forced if a and a[0] == ("base",)}
        part_forced: dict[int, set[Address]] = {}
        for a in forced:
            if a and a[0][0] == "attach":
                part_forced.setdefault(a[0][1], set()).add(a[1:])
        for att in node.attachments:
            base_forced.add(att.site)
        bverts, bedges = _materialize(node.base, budget, base_forced)
        verts = {(("base",),) + a: lab for a, lab in bverts.items()}
        edges = {
            ((("base",),) + a, (("base",),) + b) for a, b in bedges
        }
        for i, att in enumerate(node.attachments):
            pf = part_forced.get(i, set()) | {att.shared}
            pverts, pedges = _materialize(att.part, budget, pf)
            if att.shared not in pverts:
                raise UnknownVertex(format_address(att.shared))
            canon = (("base",),) + att.site

            def rename(a, canon=canon, shared=att.shared, i=i):
                return canon if a == shared else (("attach", i),) + a

            share_lab = pverts[att.shared]
            if verts[canon] != share_lab:
                raise GlueLabelMismatch(
                    format_address(canon), verts[canon], share_lab
                )
            for a, lab in pverts.items():
                if a != att.shared:
                    verts[rename(a)] = lab
            for a, b in pedges:
                edges.add((rename(a), rename(b)))
        return verts, edges
    if isinstance(node, GlueFamily):
        base_forced = {a[1:] for a in forced if a and a[0] == ("base",)}
        member_forced: dict[int, set[Address]] = {}
        for a in forced:
            if a and a[0][0] == "member":
                member_forced.setdefault(a[0][1], set()).add(a[1:])
        members = set(member_forced)
        for m in range(1, budget + 1):
            members.add(m)
        for m in sorted(member_forced):
            base_forced.add((site_base_step(node, m),))
        bverts, bedges = _materialize(node.base, budget, base_forced)
        verts = {(("base",),) + a: lab for a, lab in bverts.items()}
        edges = {((("base",),) + a, (("base",),) + b) for a, b in bedges}
        for m in sorted(members):
            site_addr = (site_base_step(node, m),)
            canon = (("base",),) + site_addr
            if m not in member_forced and canon not in verts:
                continue
            member = instantiate(node, m)
            if sup_labels(member) > node.envelope.term(m):
                raise InvalidDeclaration(
                    f"envelope does not dominate member {m}"
                )
            mf = member_forced.get(m, set()) | {node.shared}
            pverts, pedges = _materialize(member, budget, mf)
            if node.shared not in pverts:
                raise UnknownVertex(format_address(node.shared))
            share_lab = pverts[node.shared]
            if verts.get(canon, share_lab) != share_lab:
                raise GlueLabelMismatch(
                    f"member:{m} at {format_address(canon)}",
                    verts[canon],
                    share_lab,
                )

            def rename(a, canon=canon, shared=node.shared, m=m):
                return canon if a == shared else (("member", m),) + a

            for a, lab in pverts.items():
                if a != node.shared:
                    verts[rename(a)] = lab
            for a, b in pedges:
                edges.add((rename(a), rename(b)))
        return verts, edges
    if isinstance(node, ScaledLabels):
        if not val_is_concrete(node.factor):
            raise InvalidDeclaration("scale factor is an unresolved ref")
        verts, edges = _materialize(node.inner, budget, forced)
        return {a: node.factor * lab for a, lab in verts.items()}, edges
    raise InvalidDeclaration(f"unknown constructor {type(node).__name__}")


# ---------------------------------------------------------------------------
# symbolic vertex counting
#
# Counting stays exact even when a family envelope does not vanish.  Every
# sequence kind has fully determined terms, so the supremum of a member's
# non-shared labels is a finite max of monomials
#
#     coeff * site_label(m)**site_pow * envelope(m)**env_pow,
#
# each attained by an actual vertex of the member.  Restricted to the member
# progression, every built-in sequence settles into finitely many residue
# classes whose values approach their limits from above, so a monomial with a
# class-limit product >= eps is exceeded by infinitely many members, and
# otherwise a bounded scan lists exactly the members that still reach eps.

_LOOSE_SCAN_CAP = 1_000_000


def _mono_mul_val(mono, v):
    """Multiply a (coeff, site_pow, env_pow) monomial by a value or Ref."""
    c, sp, se = mono
    if isinstance(v, Ref):
        if v.source == "site_label":
            return (c * v.coeff, sp + 1, se)
        return (c * v.coeff, sp, se + 1)
    return (c * Fraction(v), sp, se)


def _seq_sup_monos(seq, skip, mult, out):
    """Append monomials whose max equals sup of seq.term(n) over n != skip.

    Exact in both directions: the listed monomials dominate every non-skipped
    term, and each listed value is realized by at least one actual term (for
    constant values and alternating tails, by infinitely many).
    """
    if isinstance(seq, Const):
        out.append(_mono_mul_val(mult, seq.c))
    elif isinstance(seq, Harmonic):
        c, sp, se = _mono_mul_val(mult, seq.a)
        out.append((c / (2 if skip == 1 else 1), sp, se))
    elif isinstance(seq, PrimeRecip):
        c, sp, se = _mono_mul_val(mult, seq.a)
        out.append((c / nth_prime(2 if skip == 1 else 1), sp, se))
    elif isinstance(seq, Geometric):
        mono = _mono_mul_val(mult, seq.a)
        if skip == 1:
            mono = _mono_mul_val(mono, seq.r)
        out.append(mono)
    elif isinstance(seq, FiniteSupport):
        best = max(
            (x for i, x in enumerate(seq.prefix, 1) if i != skip),
            default=Fraction(0),
        )
        if best > 0:
            out.append(_mono_mul_val(mult, best))
    elif isinstance(seq, Custom):
        best = max(
            [x for i, x in enumerate(seq.prefix, 1) if i != skip]
            + [seq.limsup_]
        )
        if best > 0:
            out.append(_mono_mul_val(mult, best))
    elif isinstance(seq, Modulated):
        for i, comp in enumerate(seq.seqs):
            inner_skip = None
            if skip is not None and (skip - 1) % seq.period == i:
                inner_skip = (skip - 1) // seq.period + 1
            _seq_sup_monos(comp, inner_skip, mult, out)
    else:
        raise InvalidDeclaration(
            f"cannot analyze sequence kind {type(seq).__name__}"
        )


def _template_unshared_monos(node, shared, mult, out):
    """Monomials for the labels of a template's non-shared vertices.

    ``shared`` is the address, within ``node``, of the vertex glued onto the
    family base (None once the walk has left the branch containing it).
    """
    if isinstance(node, Finite):
        skip = shared[0][1] if shared and shared[0][0] == "vertex" else None
        for name, lab in node.tree.labels.items():
            if name != skip and lab > 0:
                out.append(_mono_mul_val(mult, lab))
    elif isinstance(node, Ray):
        skip = shared[0][1] if shared and shared[0][0] == "ray" else None
        _seq_sup_monos(node.labels, skip, mult, out)
    elif isinstance(node, Star):
        if not (shared and shared[0][0] == "center"):
            out.append(_mono_mul_val(mult, node.center_label))
        skip = shared[0][1] if shared and shared[0][0] == "leaf" else None
        _seq_sup_monos(node.leaf_labels, skip, mult, out)
    elif isinstance(node, GlueFinite):
        base_shared = shared[1:] if shared and shared[0] == ("base",) else None
        _template_unshared_monos(node.base, base_shared, mult, out)
        for i, att in enumerate(node.attachments):
            if shared and shared[0] == ("attach", i):
                part_shared = shared[1:]
            else:
                # the part's glued vertex duplicates a base label that the
                # base walk already handled (and excluded, if it is the
                # family-shared vertex)
                part_shared = att.shared
            _template_unshared_monos(att.part, part_shared, mult, out)
    elif isinstance(node, GlueFamily):
        raise InvalidDeclaration(
            "cannot count vertices across a family nested inside the template"
            " of a family whose envelope does not vanish"
        )
    elif isinstance(node, ScaledLabels):
        _template_unshared_monos(
            node.inner, shared, _mono_mul_val(mult, node.factor), out
        )
    else:
        raise InvalidDeclaration(f"unknown constructor {type(node).__name__}")


def _class_limit_map(seq, start, step):
    """(Q, limits) for seq.term(start + k*step), k = 0, 1, 2, ...

    limits[k % Q] is the limit of the terms within that residue class of k;
    past the settle bound every class approaches its limit from above (or
    equals it).
    """
    if isinstance(seq, Const):
        return 1, [Fraction(seq.c)]
    if isinstance(seq, (Harmonic, Geometric, PrimeRecip, FiniteSupport)):
        return 1, [Fraction(0)]
    if isinstance(seq, Custom):
        offset = start - len(seq.prefix)
        if step % 2 == 0:
            return 1, [seq.limsup_ if offset % 2 == 1 else seq.liminf_]
        v0 = seq.limsup_ if offset % 2 == 1 else seq.liminf_
        v1 = seq.limsup_ if (offset + step) % 2 == 1 else seq.liminf_
        return 2, [v0, v1]
    if isinstance(seq, Modulated):
        p = seq.period
        phases = lcm(step, p) // step
        inner_step = lcm(step, p) // p
        qs, ls = [], []
        for j in range(phases):
            n_j = start + j * step
            comp = seq.seqs[(n_j - 1) % p]
            q, l = _class_limit_map(comp, (n_j - 1) // p + 1, inner_step)
            qs.append(q)
            ls.append(l)
        big = phases * lcm(*qs)
        limits = []
        for r in range(big):
            j = r % phases
            limits.append(ls[j][((r - j) // phases) % qs[j]])
        return big, limits
    raise InvalidDeclaration(
        f"cannot analyze sequence kind {type(seq).__name__}"
    )


def _settle_bound(seq, start, step):
    """First k past which every residue class of seq.term(start + k*step)
    is non-increasing toward (or equal to) its class limit."""
    if isinstance(seq, (Const, Harmonic, Geometric, PrimeRecip)):
        return 0
    if isinstance(seq, (FiniteSupport, Custom)):
        spill = len(seq.prefix) - start
        return 0 if spill < 0 else spill // step + 1
    if isinstance(seq, Modulated):
        p = seq.period
        phases = lcm(step, p) // step
        inner_step = lcm(step, p) // p
        worst = 0
        for j in range(phases):
            n_j = start + j * step
            comp = seq.seqs[(n_j - 1) % p]
            inner = _settle_bound(comp, (n_j - 1) // p + 1, inner_step)
            worst = max(worst, j + phases * inner)
        return worst
    raise InvalidDeclaration(
        f"cannot analyze sequence kind {type(seq).__name__}"
    )


def _site_progression(fam: GlueFamily) -> tuple[int, int]:
    """(start, step) with member m glued at base index start + (m-1)*step."""
    if isinstance(fam.base, Star):
        return 1, 1
    return {"all": (1, 1), "even": (2, 2), "odd": (1, 2)}[fam.sites]


def _loose_family_hits(fam: GlueFamily, eps: Fraction):
    """Member indices whose non-shared labels reach eps, for a family whose
    envelope exceeds eps infinitely often.  Exact: a sorted list, or INFINITE
    when infinitely many members (hence vertices) reach eps."""
    base_seq = (
        fam.base.leaf_labels if isinstance(fam.base, Star) else fam.base.labels
    )
    if base_seq.has_refs() or fam.envelope.has_refs():
        raise InvalidDeclaration(
            "family base labels and envelope must be concrete to count"
        )
    start, step = _site_progression(fam)
    raw: list = []
    _template_unshared_monos(fam.template, fam.shared, (Fraction(1), 0, 0), raw)
    monos = sorted({(c, sp, se) for c, sp, se in raw if c > 0})
    plans = []
    settle = 0
    for c, sp, se in monos:
        if sp > 0:
            qs, ls = _class_limit_map(base_seq, start, step)
            settle = max(settle, _settle_bound(base_seq, start, step))
        else:
            qs, ls = 1, [Fraction(1)]
        if se > 0:
            qe, le = _class_limit_map(fam.envelope, 1, 1)
            settle = max(settle, _settle_bound(fam.envelope, 1, 1))
        else:
            qe, le = 1, [Fraction(1)]
        q = lcm(qs, qe)
        for r in range(q):
            if c * ls[r % qs] ** sp * le[r % qe] ** se >= eps:
                return INFINITE
        plans.append(((c, sp, se), q))
    hits: list[int] = []
    pending = {(i, r) for i, (_, q) in enumerate(plans) for r in range(q)}
    k = 0
    while pending:
        if k > _LOOSE_SCAN_CAP:
            raise SizeCapExceeded(k, _LOOSE_SCAN_CAP, "family member scan")
        m = k + 1
        site = base_seq.term(start + k * step)
        env = fam.envelope.term(m)
        best = Fraction(0)
        for i, ((c, sp, se), q) in enumerate(plans):
            val = c * site**sp * env**se
            best = max(best, val)
            if k >= settle and val < eps:
                pending.discard((i, k % q))
        if best >= eps:
            hits.append(m)
        k += 1
    return hits


def count_vertices_geq(node: SymbolicTree, eps: Fraction):
    """|{v : label(v) >= eps}| as an exact integer or INFINITE."""
    eps = Fraction(eps)
    if eps <= 0:
        raise InvalidDeclaration(f"eps must be positive, got {eps}")
    if isinstance(node, Finite):
        return sum(1 for x in node.tree.labels.values() if x >= eps)
    if isinstance(node, Ray):
        return node.labels.count_geq(eps)
    if isinstance(node, Star):
        if not val_is_concrete(node.center_label):
            raise InvalidDeclaration("center label is an unresolved ref")
        extra = 1 if node.center_label >= eps else 0
        leaves = node.leaf_labels.count_geq(eps)
        return INFINITE if leaves is INFINITE else leaves + extra
    if isinstance(node, GlueFinite):
        total = count_vertices_geq(node.base, eps)
        if total is INFINITE:
            return INFINITE
        for a in node.attachments:
            sub = count_vertices_geq(a.part, eps)
            if sub is INFINITE:
                return INFINITE
            total += sub
            if label_at(a.part, a.shared) >= eps:
                total -= 1  # shared vertex already counted in the base
        return total
    if isinstance(node, GlueFamily):
        total = count_vertices_geq(node.base, eps)
        if total is INFINITE:
            return INFINITE
        idx = node.envelope.indices_geq(eps)
        if idx is INFINITE:
            idx = _loose_family_hits(node, eps)
            if idx is INFINITE:
                return INFINITE
        for m in idx:
            member = instantiate(node, m)
            sub = count_vertices_geq(member, eps)
            if sub is INFINITE:
                return INFINITE
            total += sub
            if label_at(member, node.shared) >= eps:
                total -= 1
        return total
    if isinstance(node, ScaledLabels):
        if not val_is_concrete(node.factor):
            raise InvalidDeclaration("scale factor is an unresolved ref")
        return count_vertices_geq(node.inner, eps / node.factor)
    raise InvalidDeclaration(f"unknown constructor {type(node).__name__}")


def exceedance_bound(node: SymbolicTree, eps: Fraction):
    """A budget b such that truncate(node, b) materializes every vertex with
    label >= eps; INFINITE when count_vertices_geq is infinite."""
    eps = Fraction(eps)
    if eps <= 0:
        raise InvalidDeclaration(f"eps must be positive, got {eps}")
    if isinstance(node, Finite):
        return 1
    if isinstance(node, (Ray, Star)):
        seq = node.labels if isinstance(node, Ray) else node.leaf_labels
        idx = seq.indices_geq(eps)
        if idx is INFINITE:
            return INFINITE
        return max(idx, default=1)
    if isinstance(node, GlueFinite):
        bounds = [exceedance_bound(node.base, eps)]
        for a in node.attachments:
            bounds.append(exceedance_bound(a.part, eps))
        if any(b is INFINITE for b in bounds):
            return INFINITE
        return max(bounds + [1])
    if isinstance(node, GlueFamily):
        bounds = [exceedance_bound(node.base, eps)]
        idx = node.envelope.indices_geq(eps)
        if idx is INFINITE:
            idx = _loose_family_hits(node, eps)
            if idx is INFINITE:
                return INFINITE
        for m in idx:
            mb = exceedance_bound(instantiate(node, m), eps)
            if mb is INFINITE:
                return INFINITE
            bounds.append(mb)
            bounds.append(m)
            bounds.append(site_base_step(node, m)[1])
        if any(b is INFINITE for b in bounds):
            return INFINITE
        return max(bounds + [1])
    if isinstance(node, ScaledLabels):
        if not val_is_concrete(node.factor):
            raise InvalidDeclaration("scale factor is an unresolved ref")
        return exceedance_bound(node.inner, eps / node.factor)
    raise InvalidDeclaration(f"unknown constructor {type(node).__name__}")

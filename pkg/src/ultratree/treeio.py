"""JSON (de)serialization for trees, spaces, sequences, and symbolic
constructions, plus Graphviz DOT emission.

Finite tree:   {"vertices": {"a": "1/2", ...}, "edges": [["a", "b"], ...]}
Matrix:        {"points": ["a", "b"], "d": [["0", "1"], ["1", "0"]]}
Sequence:      {"kind": "harmonic", "a": "1"} and friends; a parameter may be
               a ref object {"$": "site_label", "coeff": "1/2"}.
Symbolic tree: {"kind": "glue_family", "base": ..., "sites": "even",
               "template": ..., "shared": "center", "envelope": ...}
               with kinds finite | ray | star | glue_finite | glue_family |
               scaled.  "shared" is optional (defaults to the part's
               canonical glue vertex).

All rationals are rendered as "p/q" or integer strings; no floats.
"""

from __future__ import annotations

from fractions import Fraction

from .core_tree import LabeledTree, build_tree
from .errors import InvalidDeclaration
from .ratio import format_rational, parse_rational
from .seqs import (
    Const,
    Custom,
    FiniteSupport,
    Geometric,
    Harmonic,
    LabelSeq,
    Modulated,
    PrimeRecip,
    Ref,
)
from .spaces import UltraSpace, validate_space
from .symbolic import (
    Attachment,
    Finite,
    GlueFamily,
    GlueFinite,
    Ray,
    ScaledLabels,
    Star,
    SymbolicTree,
    default_shared,
    format_address,
    parse_address,
    validate_symbolic,
)


# ---------------------------------------------------------------------------
# rationals and refs


def _val_to_json(v):
    if isinstance(v, Ref):
        out = {"$": v.source}
        if v.coeff != 1:
            out["coeff"] = format_rational(v.coeff)
        return out
    return format_rational(v)


def _val_from_json(obj):
    if isinstance(obj, dict):
        if "$" not in obj:
            raise InvalidDeclaration(f"bad ref object {obj!r}")
        return Ref(obj["$"], parse_rational(obj.get("coeff", "1")))
    return parse_rational(obj)


# ---------------------------------------------------------------------------
# finite trees


def tree_to_json(tree: LabeledTree) -> dict:
    return {
        "vertices": {v: format_rational(tree.labels[v]) for v in tree.vertices},
        "edges": [[u, v] for u, v in tree.edges],
    }


def tree_from_json(obj: dict) -> LabeledTree:
    if not isinstance(obj, dict) or "vertices" not in obj:
        raise InvalidDeclaration("finite tree JSON needs a 'vertices' mapping")
    verts = obj["vertices"]
    labels = {v: parse_rational(x) for v, x in verts.items()}
    edges = [tuple(e) for e in obj.get("edges", [])]
    return build_tree(list(verts), edges, labels)


# ---------------------------------------------------------------------------
# spaces


def space_to_json(space: UltraSpace) -> dict:
    return {
        "points": list(space.points),
        "d": [[format_rational(e) for e in row] for row in space.dist],
    }


def space_from_json(obj: dict) -> UltraSpace:
    if not isinstance(obj, dict) or "points" not in obj or "d" not in obj:
        raise InvalidDeclaration("matrix JSON needs 'points' and 'd'")
    return validate_space(
        obj["points"], [[parse_rational(e) for e in row] for row in obj["d"]]
    )


# ---------------------------------------------------------------------------
# label sequences


def seq_to_json(seq: LabelSeq) -> dict:
    if isinstance(seq, Const):
        return {"kind": "const", "c": _val_to_json(seq.c)}
    if isinstance(seq, FiniteSupport):
        return {
            "kind": "finite_support",
            "prefix": [format_rational(x) for x in seq.prefix],
        }
    if isinstance(seq, Harmonic):
        return {"kind": "harmonic", "a": _val_to_json(seq.a)}
    if isinstance(seq, Geometric):
        return {
            "kind": "geometric",
            "a": _val_to_json(seq.a),
            "r": _val_to_json(seq.r),
        }
    if isinstance(seq, PrimeRecip):
        return {"kind": "prime_recip", "a": _val_to_json(seq.a)}
    if isinstance(seq, Modulated):
        return {
            "kind": "modulated",
            "period": seq.period,
            "seqs": [seq_to_json(s) for s in seq.seqs],
        }
    if isinstance(seq, Custom):
        return {
            "kind": "custom",
            "prefix": [format_rational(x) for x in seq.prefix],
            "limsup": format_rational(seq.limsup_),
            "liminf": format_rational(seq.liminf_),
            "inf": format_rational(seq.inf_),
            "vanishes": seq.vanishes_,
        }
    raise InvalidDeclaration(f"unknown sequence kind {type(seq).__name__}")


def seq_from_json(obj: dict) -> LabelSeq:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise InvalidDeclaration("sequence JSON needs a 'kind'")
    kind = obj["kind"]
    if kind == "const":
        return Const(_val_from_json(obj["c"]))
    if kind == "finite_support":
        return FiniteSupport(tuple(parse_rational(x) for x in obj["prefix"]))
    if kind == "harmonic":
        return Harmonic(_val_from_json(obj["a"]))
    if kind == "geometric":
        return Geometric(_val_from_json(obj["a"]), _val_from_json(obj["r"]))
    if kind == "prime_recip":
        return PrimeRecip(_val_from_json(obj["a"]))
    if kind == "modulated":
        return Modulated(
            int(obj["period"]), tuple(seq_from_json(s) for s in obj["seqs"])
        )
    if kind == "custom":
        return Custom(
            tuple(parse_rational(x) for x in obj["prefix"]),
            parse_rational(obj["limsup"]),
            parse_rational(obj["liminf"]),
            parse_rational(obj["inf"]),
            bool(obj["vanishes"]),
        )
    raise InvalidDeclaration(f"unknown sequence kind {kind!r}")


# ---------------------------------------------------------------------------
# symbolic trees


def symbolic_to_json(node: SymbolicTree) -> dict:
    if isinstance(node, Finite):
        return {"kind": "finite", "tree": tree_to_json(node.tree)}
    if isinstance(node, Ray):
        return {"kind": "ray", "labels": seq_to_json(node.labels)}
    if isinstance(node, Star):
        return {
            "kind": "star",
            "center": _val_to_json(node.center_label),
            "leaves": seq_to_json(node.leaf_labels),
        }
    if isinstance(node, GlueFinite):
        return {
            "kind": "glue_finite",
            "base": symbolic_to_json(node.base),
            "attachments": [
                {
                    "site": format_address(a.site),
                    "part": symbolic_to_json(a.part),
                    "shared": format_address(a.shared),
                }
                for a in node.attachments
            ],
        }
    if isinstance(node, GlueFamily):
        return {
            "kind": "glue_family",
            "base": symbolic_to_json(node.base),
            "sites": node.sites,
            "template": symbolic_to_json(node.template),
            "shared": format_address(node.shared),
            "envelope": seq_to_json(node.envelope),
        }
    if isinstance(node, ScaledLabels):
        return {
            "kind": "scaled",
            "inner": symbolic_to_json(node.inner),
            "factor": _val_to_json(node.factor),
        }
    raise InvalidDeclaration(f"unknown constructor {type(node).__name__}")


def symbolic_from_json(obj: dict, validate: bool = True) -> SymbolicTree:
    node = _symbolic_from_json(obj)
    if validate:
        validate_symbolic(node)
    return node


def _symbolic_from_json(obj: dict) -> SymbolicTree:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise InvalidDeclaration("symbolic JSON needs a 'kind'")
    kind = obj["kind"]
    if kind == "finite":
        return Finite(tree_from_json(obj["tree"]))
    if kind == "ray":
        return Ray(seq_from_json(obj["labels"]))
    if kind == "star":
        return Star(_val_from_json(obj["center"]), seq_from_json(obj["leaves"]))
    if kind == "glue_finite":
        base = _symbolic_from_json(obj["base"])
        atts = []
        for a in obj.get("attachments", []):
            part = _symbolic_from_json(a["part"])
            shared = (
                parse_address(a["shared"]) if "shared" in a
                else default_shared(part)
            )
            atts.append(Attachment(parse_address(a["site"]), part, shared))
        return GlueFinite(base, tuple(atts))
    if kind == "glue_family":
        template = _symbolic_from_json(obj["template"])
        shared = (
            parse_address(obj["shared"]) if "shared" in obj
            else default_shared(template)
        )
        return GlueFamily(
            _symbolic_from_json(obj["base"]),
            obj["sites"],
            template,
            shared,
            seq_from_json(obj["envelope"]),
        )
    if kind == "scaled":
        return ScaledLabels(
            _symbolic_from_json(obj["inner"]), _val_from_json(obj["factor"])
        )
    raise InvalidDeclaration(f"unknown constructor kind {kind!r}")


# ---------------------------------------------------------------------------
# DOT export


def export_dot(
    tree: LabeledTree,
    generating: tuple[str, ...] = (),
    roots: tuple[str, ...] = (),
    name: str = "ultratree",
) -> str:
    """Graphviz DOT text: vertex labels shown, the generating set filled,
    attachment roots double-circled."""
    gen = set(generating)
    rts = set(roots)
    lines = [f"graph {name} {{", "  node [shape=circle];"]
    for v in tree.vertices:
        attrs = [f'label="{v}\\n{format_rational(tree.labels[v])}"']
        if v in gen:
            attrs.append("style=filled")
            attrs.append("fillcolor=lightblue")
        if v in rts:
            attrs.append("shape=doublecircle")
        lines.append(f'  "{v}" [{", ".join(attrs)}];')
    for u, v in tree.edges:
        lines.append(f'  "{u}" -- "{v}";')
    lines.append("}")
    return "\n".join(lines) + "\n"

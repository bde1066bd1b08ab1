"""Rendering proofs and countermodels, and replaying proof documents."""

from __future__ import annotations

import json
from typing import Optional

from .bulldoze import certificate
from .calculi import RULES, CalculusSpec, conclusions, get_calculus
from .certify import Countermodel
from .engine import Decision, Entry, Node, Status, Tableau
from .syntax import complement, nominals, parse, to_text


_ASCII_LABELS = {"∧": "&", "∨": "|", "◇": "<>", "□": "[]", "¬": "~"}


def rule_label(tag: str, unicode: bool = True) -> str:
    label = "root" if tag == "root" else RULES[tag].label
    return label if unicode else _ASCII_LABELS.get(label, label)


def entry_line(e: Entry, unicode: bool = True) -> str:
    star = "*" if e.accessibility else ""
    text = f"{e.seq}. @{e.prefix} {to_text(e.payload, unicode)}{star}"
    if e.rule == "root":
        return text
    arrow = "←" if unicode else "<-"
    just = rule_label(e.rule, unicode)
    if e.premises:
        just += f" {arrow} " + ", ".join(map(str, e.premises))
    return f"{text}  [{just}]"


def _leaf_line(node: Node, unicode: bool) -> str:
    if node.status is Status.CLOSED:
        a, b = node.branch.closed_by
        mark = "✗" if unicode else "x"
        return f"{mark} closed by {min(a, b)}, {max(a, b)}"
    if node.status is Status.OPEN:
        return "open, saturated"
    if node.status is Status.BUDGET:
        return f"budget exceeded after {node.branch.firings} firings"
    return "not expanded"


def proof_text(t: Tableau, unicode: bool = True) -> str:
    lines: list[str] = []

    def walk(node: Node, depth: int) -> None:
        pad = "  " * depth
        for e in node.entries:
            lines.append(pad + entry_line(e, unicode))
        if node.children:
            for k, child in enumerate(node.children):
                lines.append(f"{pad}branch {k + 1}:")
                walk(child, depth + 1)
        else:
            lines.append(pad + _leaf_line(node, unicode))

    walk(t.root, 0)
    return "\n".join(lines) + "\n"


def _entry_doc(e: Entry) -> dict:
    return {"seq": e.seq, "prefix": e.prefix, "formula": to_text(e.payload),
            "accessibility": e.accessibility, "rule": e.rule,
            "premises": list(e.premises)}


def _node_doc(node: Node) -> dict:
    doc: dict = {"entries": [_entry_doc(e) for e in node.entries],
                 "status": node.status.value}
    if node.children:
        doc["status"] = "split"
        doc["children"] = [_node_doc(c) for c in node.children]
    elif node.status is Status.CLOSED:
        doc["witness"] = sorted(node.branch.closed_by)
    return doc


def _all_nominals(t: Tableau) -> list[str]:
    seen: dict[str, None] = {}
    for leaf in t.leaves():
        if leaf.branch is not None:
            for n in leaf.branch.nominal_order:
                seen.setdefault(n)
    for n in nominals(t.root_formula):
        seen.setdefault(n)
    return list(seen)


def proof_doc(d: Decision) -> dict:
    t = d.tableau
    return {
        "calculus": t.calculus.name,
        "formula": to_text(d.formula),
        "root": {"prefix": t.root_formula.nominal,
                 "formula": to_text(t.root_formula.sub)},
        "verdict": d.verdict.value,
        "nominals": _all_nominals(t),
        "tree": _node_doc(t.root),
    }


class _Replay:
    """Just enough of a branch for :func:`calculi.conclusions`."""

    def __init__(self, entries):
        self.entries = entries


def replay_proof(doc: dict, calculus: Optional[CalculusSpec | str] = None) -> list[str]:
    """Check a proof document: every entry follows from its premises by its
    rule, fresh nominals are fresh, and closed leaves hold a complementary
    pair.  Returns the problems found."""
    cal = get_calculus(calculus or doc["calculus"].lower().rstrip("*")) \
        if not isinstance(calculus, CalculusSpec) else calculus
    noms = doc.get("nominals", [])

    def read(text: str):
        return parse(text, nominals=noms, allow_reserved=True)

    problems: list[str] = []

    def check(node: dict, path: list[Entry]) -> None:
        path = list(path)
        for raw in node["entries"]:
            e = Entry(raw["seq"], raw["prefix"], read(raw["formula"]),
                      raw["accessibility"], raw["rule"], tuple(raw["premises"]))
            if e.seq != len(path):
                problems.append(f"entry {e.seq} out of sequence")
                return
            problems.extend(_justify(cal, path, e))
            path.append(e)
        if node.get("children"):
            for child in node["children"]:
                check(child, path)
            return
        if node["status"] == "closed":
            a, b = node.get("witness", (None, None))
            if a is None or b >= len(path) or not (
                    path[a].prefix == path[b].prefix
                    and path[b].payload == complement(path[a].payload)):
                problems.append(f"leaf marked closed without a contradiction at {a}, {b}")
        elif doc.get("verdict") == "provable":
            problems.append("provable verdict with a leaf that is not closed")

    check(doc["tree"], [])
    return problems


def _justify(cal: CalculusSpec, path: list[Entry], e: Entry) -> list[str]:
    if e.rule == "root":
        return [] if e.seq == 0 else [f"{e.seq}: second root"]
    if e.rule not in cal.rules:
        return [f"{e.seq}: rule {e.rule} is not part of {cal.name}"]
    if any(p >= e.seq for p in e.premises):
        return [f"{e.seq}: premise after conclusion"]
    fresh = None
    if RULES[e.rule].generating:
        used = {x for old in path for x in (old.prefix,) + nominals(old.payload)}
        fresh = e.payload.sub.name if e.accessibility else e.prefix
        if e.accessibility and fresh in used:
            return [f"{e.seq}: nominal {fresh} is not fresh"]
    nominal = None
    if RULES[e.rule].kind == "nominal":
        nominal = e.prefix
        if not any(nominal == old.prefix or nominal in nominals(old.payload)
                   for old in path):
            return [f"{e.seq}: nominal {nominal} has not occurred yet"]
    try:
        alts = conclusions(_Replay(path), e.rule, e.premises, nominal, fresh)
    except (AttributeError, IndexError, TypeError):
        return [f"{e.seq}: premises do not fit rule {e.rule}"]
    if not any((e.prefix, e.payload, e.accessibility) == c
               for alt in alts for c in alt):
        return [f"{e.seq}: @{e.prefix} {to_text(e.payload)} does not follow by {e.rule}"]
    return []


# --------------------------------------------------------------------------
# Countermodels


def countermodel_text(cm: Countermodel, truncate: Optional[int] = None,
                      where: str = "falsified at") -> str:
    em, bm = cm.extracted, cm.bulldozed
    m = em.model
    lines = [f"worlds: {', '.join(map(str, m.worlds))}",
             "relation: " + ", ".join(f"{a}->{b}" for a, b in _ordered_rel(m)),
             ]
    for p, ext in sorted(m.props.items()):
        lines.append(f"{p}: {', '.join(str(w) for w in m.worlds if w in ext)}")
    lines.append("nominals: " + ", ".join(f"{i}={w}" for i, w in sorted(m.noms.items())))
    if bm is not None:
        lines.append("kept: " + ", ".join(map(str, bm.w_minus)))
        for c in bm.clusters:
            lines.append(f"cluster {c.index}: {' < '.join(map(str, c.members))}"
                         " (copied along an infinite chain)")
    lines.append(f"{where}: {cm.point}")
    if truncate and bm is not None:
        t = bm.truncate(truncate)
        lines.append(f"truncation to {truncate} copies:")
        lines.append("  points: " + ", ".join(map(str, t.worlds)))
        lines.append("  relation: " + ", ".join(f"{a}->{b}"
                                                for a, b in _ordered_rel(t)))
    return "\n".join(lines) + "\n"


def _ordered_rel(m) -> list:
    order = {w: k for k, w in enumerate(m.worlds)}
    return sorted(m.rel, key=lambda e: (order[e[0]], order[e[1]]))


def countermodel_doc(cm: Countermodel, formula, truncate: Optional[int] = None) -> dict:
    if cm.bulldozed is None:
        from .semantics import model_to_dict
        return {"variant": "K", "base": model_to_dict(cm.extracted.model),
                "root": cm.extracted.root,
                "urfather_map": dict(cm.extracted.urfather_map),
                "closure": "none", "formula": to_text(formula),
                "world": cm.world}
    return certificate(cm.extracted, cm.bulldozed, formula, cm.world, truncate)


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"

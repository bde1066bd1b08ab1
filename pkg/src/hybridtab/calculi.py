"""The rule systems, as data.

A calculus is a set of rule tags plus two switches: whether restriction (D)
gates the nominal-generating rules, and which signature variant the loop
check uses.  Rule behaviour lives in :func:`conclusions` and
:func:`instantiate`; the engine only schedules.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import NamedTuple, Optional

from .loopcheck import TSetVariant, quasi_urfather
from .semantics import FrameClass
from .syntax import And, At, Box, Dia, Neg, Nom, Or


@dataclass(frozen=True)
class RuleSchema:
    tag: str
    label: str
    priority: int
    # "entry" rules fire on one premise, "pair" rules on two, "nominal"
    # rules once per nominal occurring on the branch.
    kind: str
    branching: bool = False
    generating: bool = False


RULES: dict[str, RuleSchema] = {s.tag: s for s in (
    RuleSchema("and", "∧", 0, "entry"),
    RuleSchema("at", "@", 1, "entry"),
    RuleSchema("id", "Id", 2, "pair"),
    RuleSchema("neg", "¬", 3, "entry"),
    RuleSchema("eq", "Eq", 4, "nominal"),
    RuleSchema("irr", "Irr", 5, "nominal"),
    RuleSchema("ref", "Ref", 5, "nominal"),
    RuleSchema("asym", "A-sym", 5, "nominal"),
    RuleSchema("box", "□", 6, "pair"),
    RuleSchema("trs", "Trs", 7, "pair"),
    RuleSchema("or", "∨", 8, "entry", branching=True),
    RuleSchema("ser", "Ser", 9, "nominal", generating=True),
    RuleSchema("dia", "◇", 10, "entry", generating=True),
)}

LABEL_TO_TAG = {s.label: s.tag for s in RULES.values()}
LABEL_TO_TAG.update({"A-sym": "asym", "Asym": "asym"})

BASE_RULES = frozenset({"neg", "and", "or", "dia", "box", "at", "id"})


@dataclass(frozen=True)
class CalculusSpec:
    name: str
    rules: frozenset
    restriction_d: bool
    tset_variant: Optional[TSetVariant]
    closure: str
    target_class: FrameClass
    experimental: bool = False

    def has(self, tag: str) -> bool:
        return tag in self.rules

    @property
    def gated(self) -> frozenset:
        """Rules whose application needs a quasi-urfather prefix."""
        if not self.restriction_d:
            return frozenset()
        return frozenset(t for t in ("dia", "ser") if t in self.rules)

    def with_rules(self, add=(), remove=(), restriction_d=None) -> "CalculusSpec":
        unknown = (set(add) | set(remove)) - set(RULES)
        if unknown:
            raise ValueError(f"unknown rules: {sorted(unknown)}")
        rules = (self.rules | frozenset(add)) - frozenset(remove)
        d = self.restriction_d if restriction_d is None else restriction_d
        return replace(self, name=self.name + "*", rules=rules,
                       restriction_d=d, experimental=True)


TAB = CalculusSpec("TAB", BASE_RULES, False, None, "none", FrameClass.ALL)
TAB_I4 = CalculusSpec(
    "TAB_I4", (BASE_RULES - {"neg"}) | {"eq", "irr", "trs"}, True,
    TSetVariant.I4, "transitive", FrameClass.SPO)
TAB_I4D = CalculusSpec(
    "TAB_I4D", TAB_I4.rules | {"ser"}, True, TSetVariant.I4, "transitive",
    FrameClass.USPO)
TAB_PO = CalculusSpec(
    "TAB_PO", (BASE_RULES - {"neg"}) | {"eq", "ref", "asym", "trs"}, True,
    TSetVariant.PO, "reflexive-transitive", FrameClass.PO)

CALCULI = {"k": TAB, "i4": TAB_I4, "i4d": TAB_I4D, "po": TAB_PO}


def get_calculus(name: str) -> CalculusSpec:
    key = name.lower().replace("tab_", "").replace("tab", "k")
    try:
        return CALCULI[key]
    except KeyError:
        raise ValueError(f"unknown calculus {name!r}; choose from "
                         f"{', '.join(CALCULI)}") from None


# --------------------------------------------------------------------------
# Rule instances

# A conclusion is (prefix, payload, is_accessibility).
Conclusion = tuple


class RuleInstance(NamedTuple):
    rule: str
    premises: tuple = ()
    nominal: Optional[str] = None
    conclusions: tuple = ()


def nominal_conclusion(tag: str, i: str) -> Conclusion:
    if tag == "eq":
        return (i, Nom(i), False)
    if tag == "irr":
        return (i, Box(Neg(Nom(i))), False)
    if tag == "ref":
        # flagged like a generated edge so that neither [◇] nor [Id] use it
        return (i, Dia(Nom(i)), True)
    if tag == "asym":
        return (i, Box(Or(Nom(i), Box(Neg(Nom(i))))), False)
    raise ValueError(tag)


def conclusions(b, tag: str, premises: tuple = (), nominal: Optional[str] = None,
                fresh: Optional[str] = None) -> tuple:
    """Alternatives produced by an instance: a tuple of conclusion tuples,
    one per resulting branch.  ``fresh`` names the new nominal for the
    generating rules."""
    if RULES[tag].kind == "nominal":
        if tag == "ser":
            return (((nominal, Dia(Nom(fresh)), True),),)
        return ((nominal_conclusion(tag, nominal),),)
    e = b.entries[premises[0]]
    i, f = e.prefix, e.payload
    if tag == "and":
        return (((i, f.left, False), (i, f.right, False)),)
    if tag == "or":
        return (((i, f.left, False),), ((i, f.right, False),))
    if tag == "at":
        return (((f.nominal, f.sub, False),),)
    if tag == "neg":
        j = f.sub.name
        return (((j, Nom(j), False),),)
    if tag == "dia":
        return (((i, Dia(Nom(fresh)), True), (fresh, f.sub, False)),)
    other = b.entries[premises[1]]
    if tag == "box":
        return (((other.payload.sub.name, f.sub, False),),)
    if tag == "trs":
        return (((other.payload.sub.name, f, False),),)
    if tag == "id":
        return (((f.name, other.payload, False),),)
    raise ValueError(tag)


def premise_ok(b, tag: str, premises: tuple) -> bool:
    """Shape and side conditions on the premises (not freshness or (D))."""
    e = b.entries[premises[0]]
    f = e.payload
    if tag == "and":
        return isinstance(f, And)
    if tag == "or":
        return isinstance(f, Or)
    if tag == "at":
        return isinstance(f, At)
    if tag == "neg":
        return isinstance(f, Neg) and isinstance(f.sub, Nom)
    if tag == "dia":
        return isinstance(f, Dia) and not e.accessibility
    other = b.entries[premises[1]]
    if tag in ("box", "trs"):
        g = other.payload
        return (isinstance(f, Box) and isinstance(g, Dia) and isinstance(g.sub, Nom)
                and e.prefix == other.prefix)
    if tag == "id":
        return (isinstance(f, Nom) and not other.accessibility
                and e.prefix == other.prefix)
    raise ValueError(tag)


def is_applicable(b, inst: RuleInstance) -> bool:
    """Whether firing ``inst`` now is allowed and would add something."""
    tag = inst.rule
    cal = b.calculus
    if tag == "dia":
        e = b.entries[inst.premises[0]]
        if (e.prefix, e.payload) in b.fired_dia:
            return False
        return tag not in cal.gated or quasi_urfather(b, e.prefix)
    if tag == "ser":
        if inst.nominal in b.fired_ser:
            return False
        return tag not in cal.gated or quasi_urfather(b, inst.nominal)
    alts = inst.conclusions or conclusions(b, tag, inst.premises, inst.nominal)
    if tag == "or":
        return not any(b.has(c[0], c[1]) for alt in alts for c in alt)
    return any(not b.has(c[0], c[1]) for c in alts[0])


def instantiate(tag: str, b) -> list[RuleInstance]:
    """Every applicable instance of rule ``tag`` on branch ``b``, found by a
    full scan (the engine itself schedules incrementally)."""
    schema = RULES[tag]
    found = []

    def consider(premises=(), nominal=None):
        fresh = b.peek_fresh() if schema.generating else None
        inst = RuleInstance(tag, premises, nominal,
                            conclusions(b, tag, premises, nominal, fresh))
        if is_applicable(b, inst):
            found.append(inst)

    if schema.kind == "nominal":
        for i in b.nominal_order:
            consider(nominal=i)
    elif schema.kind == "entry":
        for n in range(len(b.entries)):
            if premise_ok(b, tag, (n,)):
                consider((n,))
    else:
        for n, e in enumerate(b.entries):
            for m in b.by_prefix.get(e.prefix, ()):
                if premise_ok(b, tag, (n, m)):
                    consider((n, m))
    return found


def applicable_rules(b, cal: Optional[CalculusSpec] = None) -> list[RuleInstance]:
    """All applicable instances on ``b``, ordered by premise position and
    then rule priority."""
    cal = cal or b.calculus
    out = []
    for tag in sorted(cal.rules, key=lambda t: RULES[t].priority):
        out.extend(instantiate(tag, b))
    out.sort(key=lambda r: (r.premises or (-1,), RULES[r.rule].priority))
    return out

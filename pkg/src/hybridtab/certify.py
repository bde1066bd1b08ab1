"""Runtime checks of the structural facts the completeness argument relies
on, applied to concrete branches.  Each check returns a list of human
readable violations; an empty list means the check passed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .bulldoze import (BulldozedModel, Copy, bulldoze, certify_class,
                       eval_truncated, required_copies)
from .engine import Branch, Decision, Status, Tableau
from .extract import (ExtractedModel, check_truth_lemma, extract,
                      named_worlds, warshall_closure)
from .loopcheck import (extra_formula, generation_graph,
                        quasi_urfather, urfather_map)
from .semantics import evaluate
from .syntax import Nom, subformulas, to_text

MAX_COPIES = 6


def _show(e) -> str:
    star = "*" if e.accessibility else ""
    return f"{e.seq}. @{e.prefix} {to_text(e.payload)}{star}"


def subformula_property(b: Branch) -> list[str]:
    """Every entry is a root subformula, an accessibility formula, or comes
    from the calculus's per-nominal payloads."""
    cal = b.calculus
    root_subs = subformulas(b.root.payload)
    extras: set = set()
    if cal.tset_variant is not None:
        for j in b.nominal_order:
            extras |= subformulas(extra_formula(j, cal.tset_variant))
    bad = []
    for e in b.entries:
        f = e.payload
        if f in root_subs or e.accessibility or f in extras:
            continue
        bad.append(_show(e))
    return bad


def forest_shape(b: Branch) -> list[str]:
    return generation_graph(b).shape_violations()


def urfather_properties(b: Branch, saturated: bool) -> list[str]:
    """Properties (a) to (d) of identity urfathers, plus (e) on saturated
    branches."""
    variant = b.calculus.tset_variant
    if variant is None:
        return []
    v = urfather_map(b, variant)
    bad = []
    for j in b.root_nominals:
        if j in {x for x in b.nominal_order} and j not in v:
            bad.append(f"(a) root nominal {j} has no identity urfather")
    for e in b.entries:
        if e.accessibility:
            i, j = e.prefix, e.payload.sub.name
            if quasi_urfather(b, i, variant) and j not in v:
                bad.append(f"(b) {j} generated by quasi-urfather {i} is unmapped")
    root_subs = subformulas(b.root.payload)
    for e in b.entries:
        if e.payload in root_subs and e.prefix in v:
            if not b.has(v[e.prefix], e.payload):
                bad.append(f"(c) {_show(e)} missing at {v[e.prefix]}")
    for i, w in v.items():
        if v.get(w) != w:
            bad.append(f"(d) v({i}) = {w} but v({w}) = {v.get(w)}")
    if saturated:
        for e in b.entries:
            if isinstance(e.payload, Nom):
                i, j = e.prefix, e.payload.name
                if i in v and j in v and v[i] != v[j]:
                    bad.append(f"(e) {_show(e)} but v({i}) != v({j})")
    return bad


def closure_agrees(em: ExtractedModel) -> list[str]:
    if em.closure == "none":
        return []
    reflexive = em.closure == "reflexive-transitive"
    independent = warshall_closure(em.worlds, em.r_e, reflexive)
    if independent != em.rel:
        return [f"relation differs from recomputed closure by "
                f"{sorted(map(str, independent ^ em.rel))}"]
    return []


def clusters_unnamed(b: Branch, em: ExtractedModel, bm: BulldozedModel) -> list[str]:
    named = named_worlds(b, em)
    return [f"cluster member {w} is named by the root formula"
            for c in bm.clusters for w in c.members if w in named]


def serial_extraction(em: ExtractedModel) -> list[str]:
    return [f"world {w} has no successor" for w in em.worlds
            if not em.model.successors[w]]


def copy_equivalence(b: Branch, em: ExtractedModel, bm: BulldozedModel) -> list[str]:
    bad = []
    subs = subformulas(b.root.payload)
    for e in b.entries:
        w = e.prefix
        if e.payload not in subs or w not in bm.cluster_of or em.urfather_map.get(w) != w:
            continue
        k = required_copies(e.payload)
        first = eval_truncated(bm, Copy(w, 0), e.payload, k)
        second = eval_truncated(bm, Copy(w, 1), e.payload, k + 1)
        if first != second:
            bad.append(f"{to_text(e.payload)} differs between ({w},0) and ({w},1)")
    return bad


def preservation(b: Branch, em: ExtractedModel, bm: BulldozedModel,
                 max_copies: int = MAX_COPIES) -> list[str]:
    """Root subformulas keep their truth value at every world after
    bulldozing, stably in the number of copies."""
    bad = []
    for f in sorted(subformulas(b.root.payload), key=to_text):
        k = required_copies(f)
        for w in em.worlds:
            before = evaluate(em.model, w, f)
            for n in range(k, max(k, max_copies) + 1):
                after = eval_truncated(bm, w, f, n)
                if after != before:
                    bad.append(f"{to_text(f)} at {w}: base {before}, "
                               f"bulldozed with {n} copies {after}")
                    break
    return bad


@dataclass
class LemmaReport:
    results: dict = field(default_factory=dict)

    def add(self, name: str, violations: list[str]) -> None:
        self.results.setdefault(name, []).extend(violations)

    @property
    def violations(self) -> list[str]:
        return [f"{k}: {v}" for k, vs in self.results.items() for v in vs]

    @property
    def passed(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.passed

    def merge(self, other: "LemmaReport") -> None:
        for k, vs in other.results.items():
            self.add(k, vs)


@dataclass
class Countermodel:
    """The model of an open branch.  ``bulldozed`` is None for the basic
    calculus, whose extracted model is already a finite model of the class."""
    extracted: ExtractedModel
    bulldozed: Optional[BulldozedModel]
    world: object

    @property
    def point(self):
        if self.bulldozed is None:
            return self.world
        return self.bulldozed.point(self.world)

    def holds(self, f, copies: Optional[int] = None) -> bool:
        if self.bulldozed is None:
            return evaluate(self.extracted.model, self.world, f)
        return eval_truncated(self.bulldozed, self.world, f,
                              copies or required_copies(f))


def countermodel(b: Branch) -> Countermodel:
    em = extract(b)
    bm = bulldoze(em) if em.variant != "K" else None
    return Countermodel(em, bm, em.urfather_map.get(b.root.prefix, em.root))


def certify_open_branch(b: Branch, max_copies: int = MAX_COPIES) -> LemmaReport:
    """Everything checkable on an open saturated branch and its models."""
    r = LemmaReport()
    r.add("subformula property", subformula_property(b))
    r.add("generation forest", forest_shape(b))
    r.add("identity urfathers", urfather_properties(b, saturated=True))
    cm = countermodel(b)
    em, bm = cm.extracted, cm.bulldozed
    truth = check_truth_lemma(b, em)
    r.add("truth lemma", [f"{_show(e)} false at {w}" for e, w in truth.violations])
    r.add("closure", closure_agrees(em))
    cal = b.calculus
    if not cm.holds(b.root.payload):
        r.add("root truth", [f"root payload false at {cm.point}"])
    if bm is None:
        return r
    r.add("clusters unnamed", clusters_unnamed(b, em, bm))
    if cal.has("ser"):
        r.add("serial extraction", serial_extraction(em))
    r.add("copy equivalence", copy_equivalence(b, em, bm))
    r.add("preservation", preservation(b, em, bm, max_copies))
    report = certify_class(bm, cal.target_class, 3)
    r.add("class", [str(c) for c in report.failures])
    return r


def certify_branch(b: Branch, status: Status) -> LemmaReport:
    if status is Status.OPEN:
        return certify_open_branch(b)
    r = LemmaReport()
    r.add("subformula property", subformula_property(b))
    r.add("generation forest", forest_shape(b))
    if status is Status.CLOSED:
        r.add("identity urfathers", urfather_properties(b, saturated=False))
    return r


def certify_tableau(t: Tableau) -> LemmaReport:
    r = LemmaReport()
    for leaf in t.leaves():
        if leaf.branch is not None and leaf.status is not Status.PENDING:
            r.merge(certify_branch(leaf.branch, leaf.status))
    return r


def certify_decision(d: Decision) -> LemmaReport:
    return certify_tableau(d.tableau)

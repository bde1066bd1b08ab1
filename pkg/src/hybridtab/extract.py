"""Reading a model off an open saturated branch.

For the transitive calculi the worlds are the identity urfathers and the
relation is the (reflexive-)transitive closure of the edges induced by
diamond-nominal entries.  For the basic calculus, where equality is not
built in, nominals equated by ``@i j`` entries are merged into one world
and the edges are taken as they stand.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .loopcheck import TSetVariant, t_set, urfather_map
from .semantics import KripkeModel, evaluate
from .syntax import Dia, Nom, Prop, subformulas


class ExtractionError(ValueError):
    pass


def transitive_closure(worlds: Iterable, edges: Iterable[tuple]) -> frozenset:
    succ: dict = {w: set() for w in worlds}
    for a, b in edges:
        succ.setdefault(a, set()).add(b)
    out = set()
    for start in succ:
        seen: set = set()
        stack = list(succ[start])
        while stack:
            w = stack.pop()
            if w not in seen:
                seen.add(w)
                stack.extend(succ.get(w, ()))
        out.update((start, w) for w in seen)
    return frozenset(out)


def reflexive_transitive_closure(worlds: Iterable, edges: Iterable[tuple]) -> frozenset:
    worlds = list(worlds)
    return transitive_closure(worlds, edges) | {(w, w) for w in worlds}


def warshall_closure(worlds: Iterable, edges: Iterable[tuple],
                     reflexive: bool = False) -> frozenset:
    """Matrix closure, kept independent of :func:`transitive_closure` so the
    two can check each other."""
    ws = list(worlds)
    pos = {w: k for k, w in enumerate(ws)}
    n = len(ws)
    m = [[False] * n for _ in range(n)]
    for a, b in edges:
        m[pos[a]][pos[b]] = True
    if reflexive:
        for k in range(n):
            m[k][k] = True
    for k in range(n):
        for i in range(n):
            if m[i][k]:
                row_k = m[k]
                row_i = m[i]
                for j in range(n):
                    if row_k[j]:
                        row_i[j] = True
    return frozenset((ws[i], ws[j]) for i in range(n) for j in range(n) if m[i][j])


@dataclass(frozen=True)
class ExtractedModel:
    model: KripkeModel
    r_e: frozenset
    urfather_map: dict
    variant: str
    root: str
    closure: str = field(default="none")

    @property
    def worlds(self) -> tuple:
        return self.model.worlds

    @property
    def rel(self) -> frozenset:
        return self.model.rel

    def world_of(self, nominal: str):
        return self.urfather_map.get(nominal, self.root)


def _valuation(b, v: dict) -> dict:
    props: dict[str, set] = {}
    for e in b.entries:
        if isinstance(e.payload, Prop) and e.prefix in v:
            props.setdefault(e.payload.name, set()).add(v[e.prefix])
    return props


def _check_extractable(b) -> None:
    if b.closed:
        raise ExtractionError("branch is closed")
    if not b.saturated():
        raise ExtractionError("branch is not saturated")


def _diamond_edges(b, v: dict, sources: Optional[set] = None) -> set:
    edges = set()
    for e in b.entries:
        f = e.payload
        if isinstance(f, Dia) and isinstance(f.sub, Nom):
            i, j = e.prefix, f.sub.name
            if i in v and j in v and (sources is None or i in sources):
                edges.add((v[i], v[j]))
    return edges


def extract(b, variant: Optional[str] = None) -> ExtractedModel:
    """Build the model of an open saturated branch.  ``variant`` is ``"I4"``,
    ``"PO"`` or ``"K"``; by default it follows the branch's calculus."""
    _check_extractable(b)
    if variant is None:
        tv = b.calculus.tset_variant
        variant = tv.value if tv is not None else "K"
    if variant == "K":
        return _extract_k(b)
    tv = TSetVariant(variant)
    v = urfather_map(b, tv)
    worlds = [w for w in b.nominal_order if v.get(w) == w]
    r_e = frozenset(_diamond_edges(b, v))
    if tv is TSetVariant.PO:
        rel, closure = reflexive_transitive_closure(worlds, r_e), "reflexive-transitive"
    else:
        rel, closure = transitive_closure(worlds, r_e), "transitive"
    root = b.root.prefix
    noms = {i: v.get(i, root) for i in b.nominal_order}
    model = KripkeModel(tuple(worlds), rel, _valuation(b, v), noms)
    return ExtractedModel(model, r_e, v, variant, root, closure)


def _extract_k(b) -> ExtractedModel:
    eq: dict[str, list[str]] = {}
    for e in b.entries:
        if isinstance(e.payload, Nom):
            eq.setdefault(e.prefix, []).append(e.payload.name)
    order = {n: k for k, n in enumerate(b.nominal_order)}
    v = {}
    sources = set()
    for i in b.nominal_order:
        targets = eq.get(i)
        if not targets:
            v[i] = i
            sources.add(i)
            continue
        # all nominals equated with i are equated with each other, so the
        # class of any one of them will do
        cls = eq.get(targets[0], targets)
        v[i] = min(cls, key=order.__getitem__)
        if i in cls:
            sources.add(i)
    worlds = [w for w in b.nominal_order if v[w] == w]
    r_e = frozenset(_diamond_edges(b, v, sources))
    model = KripkeModel(tuple(worlds), r_e, _valuation(b, v), dict(v))
    return ExtractedModel(model, r_e, v, "K", b.root.prefix, "none")


@dataclass
class TruthReport:
    checked: int = 0
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.passed


def check_truth_lemma(b, m: ExtractedModel) -> TruthReport:
    """Every root-subformula entry ``@i f`` with ``i`` mapped to a world must
    have ``f`` true there."""
    subs = subformulas(b.root.payload)
    report = TruthReport()
    for e in b.entries:
        if e.payload not in subs or e.prefix not in m.urfather_map:
            continue
        w = m.urfather_map[e.prefix]
        report.checked += 1
        if not evaluate(m.model, w, e.payload):
            report.violations.append((e, w))
    return report


def named_worlds(b, m: ExtractedModel) -> set:
    """Worlds whose signature contains a nominal of the root formula."""
    variant = TSetVariant(m.variant) if m.variant != "K" else TSetVariant.I4
    out = set()
    for w in m.worlds:
        if any(isinstance(f, Nom) for f in t_set(b, w, variant).members):
            out.add(w)
    return out
